#ifndef IQSWITCH_GEOMETRY_HPP
#define IQSWITCH_GEOMETRY_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "iqswitch/errors.hpp"
#include "iqswitch/switch_core.hpp"

namespace iqswitch {

// S is the span of the row-indicator matrices e^i and column-indicator
// matrices e~^j; K = S intersected with the nonnegative orthant.

/// x = parallel + perp, with parallel the projection onto S or K.
template <typename Scalar>
struct Decomposition {
    Matrix<Scalar> parallel;
    Matrix<Scalar> perp;
    Scalar norm_parallel{0};
    Scalar norm_perp{0};
    int iterations = 0;
};

/// Closed-form projection onto S: row mean + column mean - grand mean.
template <typename Derived>
Matrix<typename Derived::Scalar> subspace_part(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const Index n = x.rows();
    if (x.cols() != n) throw ConfigError("projection needs a square matrix");
    const Scalar inv_n = Scalar(1) / Scalar(n);
    const auto row_mean = (x.rowwise().sum() * inv_n).eval();
    const auto col_mean = (x.colwise().sum() * inv_n).eval();
    const Scalar grand = x.sum() * inv_n * inv_n;
    Matrix<Scalar> out(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) out(i, j) = row_mean(i) + col_mean(j) - grand;
    return out;
}

template <typename Derived>
Decomposition<typename Derived::Scalar> project_subspace(const Eigen::MatrixBase<Derived>& x) {
    Decomposition<typename Derived::Scalar> d;
    d.parallel = subspace_part(x);
    d.perp = x - d.parallel;
    d.norm_parallel = d.parallel.norm();
    d.norm_perp = d.perp.norm();
    return d;
}

struct ConeOptions {
    double tol = 1e-9;       // stop when successive iterates move less than this
    int max_iter = 100000;
};

/// Euclidean projection onto K by Dykstra's alternating projections between
/// S (closed form) and the orthant (clipping). Only the orthant step carries
/// a correction term; the correction for a linear subspace is orthogonal to
/// it and drops out. Throws ConvergenceError after max_iter sweeps.
template <typename Derived>
Decomposition<typename Derived::Scalar> project_cone(const Eigen::MatrixBase<Derived>& x,
                                                     const ConeOptions& opts = {}) {
    using Scalar = typename Derived::Scalar;
    using Mat = Matrix<Scalar>;
    if (x.rows() != x.cols()) throw ConfigError("projection needs a square matrix");
    if (!(opts.tol > 0.0)) throw ConfigError("project_cone: tol must be positive");

    const Index n = x.rows();
    Mat z = x;
    Mat correction = Mat::Zero(n, n);
    Mat y, w, y_prev, w_prev;
    double change = 0.0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        y = subspace_part(z);
        w = (y + correction).cwiseMax(Scalar(0));
        correction += y - w;
        if (it > 1) {
            change = static_cast<double>((y - y_prev).norm() + (w - w_prev).norm());
            if (change < opts.tol) {
                Decomposition<Scalar> d;
                d.parallel = std::move(y);
                d.perp = x - d.parallel;
                d.norm_parallel = d.parallel.norm();
                d.norm_perp = d.perp.norm();
                d.iterations = it;
                return d;
            }
        }
        y_prev = y;
        w_prev = w;
        z = w;
    }
    throw ConvergenceError("project_cone: Dykstra did not converge", change);
}

/// The three state-space-collapse norms of a queue matrix.
struct SscMetrics {
    double norm_perp_K = 0.0;
    double norm_parallel_K = 0.0;
    double norm_perp_S = 0.0;
};

inline SscMetrics ssc_metrics(const QueueMatrix& q, const ConeOptions& opts = {}) {
    const Matrix<double> x = q.cast<double>();
    const auto cone = project_cone(x, opts);
    const auto sub = project_subspace(x);
    return {cone.norm_perp, cone.norm_parallel, sub.norm_perp};
}

/// Frobenius inner product.
template <typename A, typename B>
typename A::Scalar inner(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return a.cwiseProduct(b).sum();
}

} // namespace iqswitch

#endif // IQSWITCH_GEOMETRY_HPP
