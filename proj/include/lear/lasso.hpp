#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lear/matrix.hpp"

namespace lear {

/// Minimises (1/2n)·||y - Xβ - b||² + λ·||β||₁ with an unpenalised intercept b.
struct LassoFit {
    std::vector<double> coefficients;
    double intercept = 0.0;
    double lambda = 0.0;
    std::size_t iterations = 0;  // coordinate sweeps
    bool converged = false;

    std::size_t nonzero_count() const;
    double l1_norm() const;
};

struct LassoOptions {
    double tol = 1e-8;  // on the largest coefficient change in one sweep
    std::size_t max_iter = 100000;
};

/// Column means and the centred Gram matrix XcᵀXc/n of a design, shared by every
/// target and penalty fitted against it. Owns a copy of X.
class LassoDesign {
public:
    explicit LassoDesign(Matrix x, Execution exec = Execution::Parallel);

    std::size_t rows() const { return x_.rows(); }
    std::size_t cols() const { return x_.cols(); }
    const Matrix& x() const { return x_; }
    std::span<const double> means() const { return means_; }
    double gram(std::size_t j, std::size_t k) const { return gram_(j, k); }
    const Matrix& gram() const { return gram_; }

    /// Xcᵀ(y - ȳ)/n.
    std::vector<double> correlations(std::span<const double> y) const;

    /// y - Xβ - b.
    std::vector<double> residuals(std::span<const double> y, const LassoFit& fit) const;

private:
    Matrix x_;
    std::vector<double> means_;
    Matrix gram_;
};

/// sign(z)·max(|z| - t, 0).
double soft_threshold(double z, double t);

/// max_j |X_jᵀ(y - ȳ)|/n, the smallest penalty whose solution is all zero.
/// X is used uncentred; centring y alone already makes the inner product equal
/// to the centred-column one.
double lambda_max(const Matrix& x, std::span<const double> y);
double lambda_max(const LassoDesign& design, std::span<const double> y);

double lasso_objective(const Matrix& x, std::span<const double> y, const LassoFit& fit);

/// Cyclic coordinate descent using covariance updates: full sweeps alternate with
/// sweeps restricted to the active set until a full sweep moves no coefficient by
/// more than `tol`. `warm_start` (empty or size p) seeds β. A fit that exhausts
/// `max_iter` is returned with converged = false.
LassoFit fit_coordinate_descent(const LassoDesign& design, std::span<const double> y, double lambda,
                                const LassoOptions& options = {}, std::span<const double> warm_start = {});

LassoFit fit_coordinate_descent(const Matrix& x, std::span<const double> y, double lambda,
                                const LassoOptions& options = {}, std::span<const double> warm_start = {});

enum class Criterion { AIC, BIC };

std::string_view criterion_name(Criterion c);
Criterion criterion_from_name(std::string_view name);

struct PathPoint {
    double lambda;
    std::size_t df;  // nonzero coefficients
    double rss;
    double criterion;  // NaN when df >= n
    double l1_norm;
    bool converged;
};

struct LambdaSelection {
    double lambda = 0.0;
    LassoFit fit;
    std::vector<PathPoint> path;  // ordered from lambda_max downwards
};

struct PathOptions {
    std::size_t grid_size = 100;
    double ratio = 1e-4;  // smallest penalty as a fraction of lambda_max
    /// The path stops once df exceeds this fraction of n; remaining grid points are
    /// not fitted. Near df = n the ln(RSS/n) term diverges and any criterion picks the
    /// interpolating end. Set to 1 to walk the full grid.
    double max_df_fraction = 0.5;
};

/// Log-spaced grid of penalties over [ratio·λmax, λmax], fitted from the largest
/// down with warm starts; returns the information-criterion minimiser.
/// AIC = n·ln(RSS/n) + 2·df, BIC = n·ln(RSS/n) + ln(n)·df.
LambdaSelection select_lambda(const LassoDesign& design, std::span<const double> y, Criterion criterion,
                              const LassoOptions& options = {}, const PathOptions& path = {});

}  // namespace lear
