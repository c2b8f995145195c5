#include "lear/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lear {

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double centred_dot(std::span<const double> a, double mean_a, std::span<const double> b, double mean_b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - mean_a) * (b[i] - mean_b);
    return s;
}

}  // namespace

std::size_t LassoFit::nonzero_count() const {
    return static_cast<std::size_t>(std::count_if(coefficients.begin(), coefficients.end(),
                                                  [](double b) { return b != 0.0; }));
}

double LassoFit::l1_norm() const {
    double s = 0.0;
    for (double b : coefficients) s += std::abs(b);
    return s;
}

LassoDesign::LassoDesign(Matrix x, Execution exec) : x_(std::move(x)) {
    const std::size_t n = x_.rows();
    const std::size_t p = x_.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("LassoDesign: empty design");
    for (double v : x_.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("LassoDesign: non-finite entry");
    }
    means_.resize(p);
    for (std::size_t j = 0; j < p; ++j) means_[j] = mean_of(x_.col(j));

    gram_ = Matrix(p, p);
    const double inv_n = 1.0 / static_cast<double>(n);
    auto fill_column = [&](std::size_t j) {
        for (std::size_t k = j; k < p; ++k) {
            gram_(k, j) = centred_dot(x_.col(k), means_[k], x_.col(j), means_[j]) * inv_n;
        }
    };
    if (exec == Execution::Serial) {
        for (std::size_t j = 0; j < p; ++j) fill_column(j);
    } else {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t j = 0; j < p; ++j) fill_column(j);
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j + 1; k < p; ++k) gram_(j, k) = gram_(k, j);
    }
}

std::vector<double> LassoDesign::correlations(std::span<const double> y) const {
    if (y.size() != rows()) throw std::invalid_argument("target length does not match design rows");
    const double ybar = mean_of(y);
    const double inv_n = 1.0 / static_cast<double>(rows());
    std::vector<double> c(cols());
    for (std::size_t j = 0; j < cols(); ++j) c[j] = centred_dot(x_.col(j), means_[j], y, ybar) * inv_n;
    return c;
}

std::vector<double> LassoDesign::residuals(std::span<const double> y, const LassoFit& fit) const {
    std::vector<double> r(y.begin(), y.end());
    for (double& v : r) v -= fit.intercept;
    for (std::size_t j = 0; j < cols(); ++j) {
        const double b = fit.coefficients[j];
        if (b == 0.0) continue;
        const auto col = x_.col(j);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= col[i] * b;
    }
    return r;
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double lambda_max(const Matrix& x, std::span<const double> y) {
    if (y.size() != x.rows() || y.empty()) throw std::invalid_argument("lambda_max: dimension mismatch");
    const double ybar = mean_of(y);
    double best = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto col = x.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += col[i] * (y[i] - ybar);
        best = std::max(best, std::abs(s) / static_cast<double>(y.size()));
    }
    return best;
}

double lambda_max(const LassoDesign& design, std::span<const double> y) {
    double best = 0.0;
    for (double c : design.correlations(y)) best = std::max(best, std::abs(c));
    return best;
}

double lasso_objective(const Matrix& x, std::span<const double> y, const LassoFit& fit) {
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double pred = fit.intercept;
        for (std::size_t j = 0; j < x.cols(); ++j) pred += x(i, j) * fit.coefficients[j];
        rss += (y[i] - pred) * (y[i] - pred);
    }
    return rss / (2.0 * static_cast<double>(y.size())) + fit.lambda * fit.l1_norm();
}

namespace {

/// Coordinate descent given c = Xcᵀ(y - ȳ)/n, so a path reuses one correlation pass.
LassoFit fit_from_correlations(const LassoDesign& design, std::span<const double> correlations, double y_mean,
                               double lambda, const LassoOptions& options, std::span<const double> warm_start) {
    const std::size_t p = design.cols();
    if (lambda < 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
    if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (!warm_start.empty() && warm_start.size() != p) throw std::invalid_argument("warm start length mismatch");

    LassoFit fit;
    fit.lambda = lambda;
    fit.coefficients.assign(p, 0.0);
    if (!warm_start.empty()) std::copy(warm_start.begin(), warm_start.end(), fit.coefficients.begin());
    std::vector<double>& beta = fit.coefficients;
    const Matrix& gram = design.gram();

    // gradient[j] = X_cjᵀ r / n
    std::vector<double> gradient(p);
    std::vector<std::size_t> active;
    auto refresh_gradient = [&] {
        active.clear();
        for (std::size_t j = 0; j < p; ++j) {
            if (beta[j] != 0.0) active.push_back(j);
        }
        std::copy(correlations.begin(), correlations.end(), gradient.begin());
        for (std::size_t k : active) {
            const auto gk = gram.col(k);
            for (std::size_t j = 0; j < p; ++j) gradient[j] -= gk[j] * beta[k];
        }
    };

    auto step = [&](std::size_t j) {
        const double gjj = gram(j, j);
        const double old = beta[j];
        const double fresh = gjj > 0.0 ? soft_threshold(gradient[j] + gjj * old, lambda) / gjj : 0.0;
        beta[j] = fresh;
        return fresh - old;
    };

    refresh_gradient();
    while (fit.iterations < options.max_iter) {
        // Full sweep; keeps the whole gradient current.
        double max_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double delta = step(j);
            if (delta == 0.0) continue;
            const auto gj = gram.col(j);
            for (std::size_t k = 0; k < p; ++k) gradient[k] -= gj[k] * delta;
            max_change = std::max(max_change, std::abs(delta));
        }
        ++fit.iterations;
        if (max_change < options.tol) {
            fit.converged = true;
            break;
        }
        // Sweeps over the active set only track the active gradient entries.
        active.clear();
        for (std::size_t j = 0; j < p; ++j) {
            if (beta[j] != 0.0) active.push_back(j);
        }
        while (fit.iterations < options.max_iter) {
            double active_change = 0.0;
            for (std::size_t j : active) {
                const double delta = step(j);
                if (delta == 0.0) continue;
                const auto gj = gram.col(j);
                for (std::size_t k : active) gradient[k] -= gj[k] * delta;
                active_change = std::max(active_change, std::abs(delta));
            }
            ++fit.iterations;
            if (active_change < options.tol) break;
        }
        refresh_gradient();
    }

    const auto means = design.means();
    double intercept = y_mean;
    for (std::size_t j = 0; j < p; ++j) intercept -= means[j] * beta[j];
    fit.intercept = intercept;
    return fit;
}

}  // namespace

LassoFit fit_coordinate_descent(const LassoDesign& design, std::span<const double> y, double lambda,
                                const LassoOptions& options, std::span<const double> warm_start) {
    const auto c = design.correlations(y);
    return fit_from_correlations(design, c, mean_of(y), lambda, options, warm_start);
}

LassoFit fit_coordinate_descent(const Matrix& x, std::span<const double> y, double lambda,
                                const LassoOptions& options, std::span<const double> warm_start) {
    return fit_coordinate_descent(LassoDesign(x, Execution::Serial), y, lambda, options, warm_start);
}

std::string_view criterion_name(Criterion c) { return c == Criterion::AIC ? "aic" : "bic"; }

Criterion criterion_from_name(std::string_view name) {
    if (name == "aic") return Criterion::AIC;
    if (name == "bic") return Criterion::BIC;
    throw std::invalid_argument("unknown criterion '" + std::string(name) + "'");
}

LambdaSelection select_lambda(const LassoDesign& design, std::span<const double> y, Criterion criterion,
                              const LassoOptions& options, const PathOptions& path_options) {
    const std::size_t grid_size = path_options.grid_size;
    const double ratio = path_options.ratio;
    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("ratio must lie in (0, 1)");
    const double n = static_cast<double>(design.rows());
    const double lmax = lambda_max(design, y);

    LambdaSelection out;
    if (lmax == 0.0) {
        out.fit = fit_coordinate_descent(design, y, 0.0, options);
        out.lambda = 0.0;
        const double rss = 0.0;
        out.path.push_back({0.0, 0, rss, std::numeric_limits<double>::quiet_NaN(), 0.0, out.fit.converged});
        return out;
    }

    const double penalty_per_df = criterion == Criterion::AIC ? 2.0 : std::log(n);
    const double log_ratio = std::log(ratio);
    const auto correlations = design.correlations(y);
    const double y_mean = mean_of(y);
    bool have_best = false;
    double best_score = 0.0;
    LassoFit current;
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(grid_size - 1);
        const double lambda = k == 0 ? lmax : lmax * std::exp(log_ratio * frac);
        current = fit_from_correlations(design, correlations, y_mean, lambda, options, current.coefficients);

        const auto r = design.residuals(y, current);
        double rss = 0.0;
        for (double v : r) rss += v * v;
        const std::size_t df = current.nonzero_count();
        double score = std::numeric_limits<double>::quiet_NaN();
        if (static_cast<double>(df) < n) {
            const double mse = std::max(rss / n, std::numeric_limits<double>::min());
            score = n * std::log(mse) + penalty_per_df * static_cast<double>(df);
        }
        out.path.push_back({lambda, df, rss, score, current.l1_norm(), current.converged});
        if (!std::isnan(score) && (!have_best || score < best_score)) {
            have_best = true;
            best_score = score;
            out.lambda = lambda;
            out.fit = current;
        }
        if (static_cast<double>(df) > path_options.max_df_fraction * n) break;
    }
    if (!have_best) {
        out.lambda = lmax;
        out.fit = fit_coordinate_descent(design, y, lmax, options);
    }
    return out;
}

}  // namespace lear
