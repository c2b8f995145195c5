#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "lear/lasso.hpp"

using namespace lear;

namespace {

Matrix gaussian_matrix(std::size_t n, std::size_t p, std::mt19937_64& rng) {
    std::normal_distribution<double> draw(0.0, 1.0);
    Matrix x(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) x(i, j) = draw(rng);
    }
    return x;
}

// Centred columns with XᵀX/n = I.
Matrix orthonormal_design(std::size_t n, std::size_t p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix x = gaussian_matrix(n, p, rng);
    for (std::size_t j = 0; j < p; ++j) {
        auto c = x.col(j);
        double mean = 0.0;
        for (double v : c) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : c) v -= mean;
        for (std::size_t k = 0; k < j; ++k) {
            const auto q = x.col(k);
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += c[i] * q[i];
            dot /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) c[i] -= dot * q[i];
        }
        double norm = 0.0;
        for (double v : c) norm += v * v;
        const double s = std::sqrt(static_cast<double>(n) / norm);
        for (double& v : c) v *= s;
    }
    return x;
}

std::vector<double> noise(std::size_t n, double sd, std::mt19937_64& rng) {
    std::normal_distribution<double> draw(0.0, sd);
    std::vector<double> y(n);
    for (double& v : y) v = draw(rng);
    return y;
}

double dot_col(const Matrix& x, std::size_t j, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += x(i, j) * v[i];
    return s;
}

// Largest violation of the lasso optimality conditions, computed from scratch.
double kkt_violation(const Matrix& x, const std::vector<double>& y, const LassoFit& fit) {
    const std::size_t n = x.rows();
    std::vector<double> r(y);
    for (std::size_t i = 0; i < n; ++i) {
        double pred = fit.intercept;
        for (std::size_t j = 0; j < x.cols(); ++j) pred += x(i, j) * fit.coefficients[j];
        r[i] -= pred;
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double g = dot_col(x, j, r) / static_cast<double>(n);
        const double b = fit.coefficients[j];
        const double v = b != 0.0 ? std::abs(g - fit.lambda * (b > 0 ? 1.0 : -1.0))
                                  : std::max(0.0, std::abs(g) - fit.lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    for (double z : {-4.0, -0.1, 0.0, 0.3, 12.5}) CHECK(soft_threshold(z, 0.0) == z);
}

TEST_CASE("lambda_max") {
    std::mt19937_64 rng(3);
    const Matrix x = gaussian_matrix(40, 5, rng);
    SUBCASE("constant target") {
        const std::vector<double> y(40, 3.5);
        CHECK(lambda_max(x, y) == 0.0);
    }
    SUBCASE("single column equal to y is the population variance") {
        const std::vector<double> y = noise(50, 2.0, rng);
        Matrix one(50, 1);
        for (std::size_t i = 0; i < 50; ++i) one(i, 0) = y[i];
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= 50.0;
        double ss = 0.0;
        for (double v : y) ss += (v - mean) * (v - mean);
        CHECK(lambda_max(one, y) == doctest::Approx(ss / 50.0).epsilon(1e-12));
        CHECK(lambda_max(LassoDesign(one), y) == doctest::Approx(ss / 50.0).epsilon(1e-12));
    }
    SUBCASE("fitting just above it gives an exactly empty model") {
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix xt = gaussian_matrix(60, 30, rng);
            const std::vector<double> y = noise(60, 1.0, rng);
            const auto fit = fit_coordinate_descent(xt, y, 1.01 * lambda_max(xt, y));
            CHECK(fit.nonzero_count() == 0);
            CHECK(fit.converged);
        }
    }
}

TEST_CASE("orthonormal design matches the closed form") {
    const Matrix x = orthonormal_design(64, 8, 17);
    std::mt19937_64 rng(8);
    std::vector<double> y = noise(64, 1.0, rng);
    for (std::size_t i = 0; i < 64; ++i) y[i] += 2.0 * x(i, 1) - 1.0 * x(i, 4) + 0.5 * x(i, 6) + 10.0;
    const LassoDesign design(x);
    const double lmax = lambda_max(design, y);
    for (int k = 0; k <= 20; ++k) {
        const double lambda = k == 20 ? 0.0 : lmax * std::pow(1e-3, k / 19.0);
        const auto fit = fit_coordinate_descent(design, y, lambda);
        CHECK(fit.converged);
        for (std::size_t j = 0; j < 8; ++j) {
            const double expected = soft_threshold(dot_col(x, j, y) / 64.0, lambda);
            CHECK(std::abs(fit.coefficients[j] - expected) <= 1e-8);
        }
    }
}

TEST_CASE("two correlated features match a brute-force minimisation") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> draw(0.0, 1.0);
    const std::size_t n = 80;
    Matrix x(n, 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = draw(rng);
        x(i, 0) = a;
        x(i, 1) = 0.8 * a + 0.6 * draw(rng);
        y[i] = 1.0 + 1.5 * x(i, 0) - 0.7 * x(i, 1) + 0.5 * draw(rng);
    }
    const double lambda = 0.3 * lambda_max(x, y);
    const auto fit = fit_coordinate_descent(x, y, lambda);

    // Objective with the intercept profiled out, minimised by a zooming grid.
    auto objective = [&](double b0, double b1) {
        double ybar = 0, m0 = 0, m1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ybar += y[i];
            m0 += x(i, 0);
            m1 += x(i, 1);
        }
        ybar /= n, m0 /= n, m1 /= n;
        const double b = ybar - m0 * b0 - m1 * b1;
        double rss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - b - b0 * x(i, 0) - b1 * x(i, 1);
            rss += r * r;
        }
        return rss / (2.0 * n) + lambda * (std::abs(b0) + std::abs(b1));
    };
    double c0 = 0, c1 = 0, half = 5.0;
    for (int level = 0; level < 40; ++level) {
        double best = std::numeric_limits<double>::infinity(), b0 = c0, b1 = c1;
        for (int i = -20; i <= 20; ++i) {
            for (int j = -20; j <= 20; ++j) {
                const double t0 = c0 + half * i / 20.0, t1 = c1 + half * j / 20.0;
                const double v = objective(t0, t1);
                if (v < best) best = v, b0 = t0, b1 = t1;
            }
        }
        c0 = b0, c1 = b1, half /= 3.0;
    }
    CHECK(std::abs(fit.coefficients[0] - c0) <= 1e-5);
    CHECK(std::abs(fit.coefficients[1] - c1) <= 1e-5);
}

TEST_CASE("KKT conditions hold on random problems") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> dim_n(20, 120), dim_p(5, 150);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = dim_n(rng), p = dim_p(rng);
        const Matrix x = gaussian_matrix(n, p, rng);
        std::vector<double> y = noise(n, 1.0, rng);
        for (std::size_t i = 0; i < n; ++i) y[i] += 2.0 * x(i, 0) - x(i, p / 2);
        const double lambda = lambda_max(x, y) * std::pow(10.0, -2.0 * (trial % 5) / 4.0);
        const auto fit = fit_coordinate_descent(x, y, lambda);
        REQUIRE(fit.converged);
        CHECK(kkt_violation(x, y, fit) <= 1e-6);
    }
}

TEST_CASE("objective never increases with more sweeps") {
    std::mt19937_64 rng(5);
    const Matrix x = gaussian_matrix(60, 40, rng);
    std::vector<double> y = noise(60, 1.0, rng);
    for (std::size_t i = 0; i < 60; ++i) y[i] += x(i, 3) - 2.0 * x(i, 7);
    const double lambda = 0.05 * lambda_max(x, y);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= 30; ++k) {
        const auto fit = fit_coordinate_descent(x, y, lambda, LassoOptions{1e-12, k});
        const double obj = lasso_objective(x, y, fit);
        CHECK(obj <= previous + 1e-12);
        previous = obj;
    }
}

TEST_CASE("non-convergence is reported") {
    std::mt19937_64 rng(6);
    const Matrix x = gaussian_matrix(50, 60, rng);
    const std::vector<double> y = noise(50, 1.0, rng);
    const auto fit = fit_coordinate_descent(x, y, 1e-4 * lambda_max(x, y), LassoOptions{1e-14, 1});
    CHECK_FALSE(fit.converged);
    CHECK(fit.iterations == 1);
}

TEST_CASE("warm starts reach the same solution") {
    std::mt19937_64 rng(12);
    const Matrix x = gaussian_matrix(100, 30, rng);
    std::vector<double> y = noise(100, 1.0, rng);
    for (std::size_t i = 0; i < 100; ++i) y[i] += 1.5 * x(i, 2) + 0.8 * x(i, 9);
    const LassoDesign design(x);
    const double lmax = lambda_max(design, y);
    const auto start = fit_coordinate_descent(design, y, 0.5 * lmax);
    const auto cold = fit_coordinate_descent(design, y, 0.05 * lmax);
    const auto warm = fit_coordinate_descent(design, y, 0.05 * lmax, {}, start.coefficients);
    for (std::size_t j = 0; j < 30; ++j) CHECK(std::abs(cold.coefficients[j] - warm.coefficients[j]) <= 1e-6);
    CHECK(std::abs(cold.intercept - warm.intercept) <= 1e-6);
    std::vector<double> wrong(29, 0.0);
    CHECK_THROWS_AS(fit_coordinate_descent(design, y, 0.1, {}, wrong), std::invalid_argument);
}

TEST_CASE("serial and parallel designs are identical") {
    std::mt19937_64 rng(1);
    const Matrix x = gaussian_matrix(120, 70, rng);
    const LassoDesign a(x, Execution::Serial), b(x, Execution::Parallel);
    CHECK(a.gram() == b.gram());
}

TEST_CASE("penalty path") {
    SUBCASE("grid layout and df along the path") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const Matrix x = orthonormal_design(200, 20, seed);
            std::mt19937_64 rng(seed);
            std::vector<double> y = noise(200, 1.0, rng);
            for (std::size_t i = 0; i < 200; ++i) y[i] += 0.8 * x(i, 0) - 0.3 * x(i, 5) + 0.1 * x(i, 11);
            for (auto criterion : {Criterion::AIC, Criterion::BIC}) {
                const auto sel = select_lambda(LassoDesign(x), y, criterion);
                REQUIRE(sel.path.size() == 100);
                const double lmax = sel.path.front().lambda;
                CHECK(sel.path.front().df == 0);
                CHECK(sel.path.back().lambda == doctest::Approx(1e-4 * lmax).epsilon(1e-12));
                for (std::size_t k = 1; k < sel.path.size(); ++k) {
                    CHECK(sel.path[k].lambda < sel.path[k - 1].lambda);
                    CHECK(sel.path[k].lambda / sel.path[k - 1].lambda ==
                          doctest::Approx(std::pow(1e-4, 1.0 / 99.0)).epsilon(1e-9));
                    // Larger λ never has more nonzeros.
                    CHECK(sel.path[k - 1].df <= sel.path[k].df);
                }
                double best = std::numeric_limits<double>::infinity();
                for (const auto& pt : sel.path) best = std::min(best, pt.criterion);
                bool found = false;
                for (const auto& pt : sel.path) {
                    if (pt.criterion == best && pt.lambda == sel.lambda) found = true;
                }
                CHECK(found);
            }
        }
    }
    SUBCASE("the criterion is undefined once df reaches n") {
        std::mt19937_64 rng(4);
        const Matrix x = gaussian_matrix(10, 30, rng);
        const std::vector<double> y = noise(10, 1.0, rng);
        const auto sel = select_lambda(LassoDesign(x), y, Criterion::AIC, {}, PathOptions{100, 1e-4, 1.0});
        for (const auto& pt : sel.path) {
            if (pt.df >= 10) CHECK(std::isnan(pt.criterion));
        }
        CHECK(sel.fit.nonzero_count() < 10);
    }
    SUBCASE("truncation stops once df exceeds the cap") {
        std::mt19937_64 rng(4);
        const Matrix x = gaussian_matrix(60, 200, rng);
        const std::vector<double> y = noise(60, 1.0, rng);
        const auto sel = select_lambda(LassoDesign(x), y, Criterion::AIC);
        REQUIRE(sel.path.size() < 100);
        CHECK(sel.path.back().df > 30);
        for (std::size_t k = 0; k + 1 < sel.path.size(); ++k) CHECK(sel.path[k].df <= 30);
    }
    SUBCASE("constant target") {
        std::mt19937_64 rng(4);
        const Matrix x = gaussian_matrix(30, 5, rng);
        const std::vector<double> y(30, 2.0);
        const auto sel = select_lambda(LassoDesign(x), y, Criterion::BIC);
        CHECK(sel.fit.nonzero_count() == 0);
        CHECK(sel.fit.intercept == doctest::Approx(2.0));
    }
}

TEST_CASE("pure noise selects an almost empty model") {
    // Realistic shape: one year of rows, full feature width.
    int sparse = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        const Matrix x = gaussian_matrix(365, 463, rng);
        const std::vector<double> y = noise(365, 1.0, rng);
        const auto sel = select_lambda(LassoDesign(x, Execution::Parallel), y, Criterion::BIC);
        if (sel.fit.nonzero_count() <= 2) ++sparse;
    }
    MESSAGE("BIC fits with <= 2 nonzeros: " << sparse << "/100");
    CHECK(sparse >= 95);
}

TEST_CASE("a strong single feature is recovered") {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed + 1000);
        const Matrix x = gaussian_matrix(200, 50, rng);
        std::vector<double> y = noise(200, 0.5, rng);
        for (std::size_t i = 0; i < 200; ++i) y[i] += 3.0 * x(i, 17) + 4.0;
        for (auto criterion : {Criterion::AIC, Criterion::BIC}) {
            const auto sel = select_lambda(LassoDesign(x), y, criterion);
            const double b = sel.fit.coefficients[17];
            if (b != 0.0 && std::abs(b - 3.0) <= 0.3) ++recovered;
        }
    }
    CHECK(recovered == 40);
}

TEST_CASE("argument checks") {
    std::mt19937_64 rng(2);
    const Matrix x = gaussian_matrix(10, 3, rng);
    const std::vector<double> y = noise(10, 1.0, rng);
    CHECK_THROWS_AS(fit_coordinate_descent(x, y, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_coordinate_descent(x, std::vector<double>(9, 0.0), 0.1), std::invalid_argument);
    CHECK_THROWS_AS(select_lambda(LassoDesign(x), y, Criterion::AIC, {}, PathOptions{1, 1e-4, 0.5}),
                    std::invalid_argument);
    CHECK(criterion_from_name("aic") == Criterion::AIC);
    CHECK(criterion_name(Criterion::BIC) == "bic");
    CHECK_THROWS_AS(criterion_from_name("hqc"), std::invalid_argument);
}
