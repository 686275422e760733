#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "romlab/errors.hpp"
#include "romlab/fem.hpp"

namespace romlab {

// Uncentered mass-weighted POD basis. Columns of modes are M-orthonormal,
// eigenvalues are the uncentered second-moment spectrum, and total_energy is
// the snapshot mean of ||u||^2 in the V_h norm.
struct PODBasis {
    Matrix modes;        // N_h x n
    Vector eigenvalues;  // nonincreasing, >= 0 (all computed, may exceed n)
    double total_energy = 0.0;
    bool rank_limited = false;  // requested n exceeded the numerical rank

    int mode_count() const { return static_cast<int>(modes.cols()); }
};

// Method of snapshots: eigendecompose the N x N Gram matrix
// G_ij = u_i^T M u_j / N and lift the eigenvectors. Eigenvalues below
// 1e-12 * lambda_1 count as rank exhaustion.
template <typename Derived>
PODBasis pod(const Eigen::MatrixBase<Derived>& snapshots, const SymmetricSparseMatrix& mass,
             int n) {
    const int count = static_cast<int>(snapshots.rows());
    const int nh = static_cast<int>(snapshots.cols());
    if (nh != mass.dim()) throw config_error("pod: snapshot width does not match mass matrix");
    if (n < 1 || n > std::min(count, nh)) throw config_error("pod: n out of range");

    const Matrix u = snapshots;  // materialize the block expression
    Matrix mu(nh, count);        // columns M u_i
    for (int i = 0; i < count; ++i) mu.col(i) = mass.apply(u.row(i).transpose());
    const Matrix gram = (u * mu) / static_cast<double>(count);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw numerical_error("pod: eigendecomposition failed");

    const double lambda_max = std::max(eig.eigenvalues()(count - 1), 0.0);
    const double floor = 1e-12 * lambda_max;

    int rank = 0;
    for (int k = 0; k < count; ++k)
        if (eig.eigenvalues()(count - 1 - k) > floor) ++rank;

    PODBasis basis;
    basis.rank_limited = n > rank;
    const int kept = std::min(n, rank);
    basis.eigenvalues.resize(rank);
    for (int k = 0; k < rank; ++k)
        basis.eigenvalues[k] = eig.eigenvalues()(count - 1 - k);
    basis.modes.resize(nh, kept);
    for (int k = 0; k < kept; ++k) {
        const double lambda = basis.eigenvalues[k];
        Vector mode = u.transpose() * eig.eigenvectors().col(count - 1 - k) /
                      std::sqrt(static_cast<double>(count) * lambda);
        int imax = 0;
        mode.cwiseAbs().maxCoeff(&imax);
        if (mode[imax] < 0.0) mode = -mode;
        basis.modes.col(k) = mode;
    }
    basis.total_energy = gram.trace();
    return basis;
}

// The per-sample relative mean skips zero-norm samples; the aggregate form
// (sum of errors over sum of norms) stays finite when the sample law puts
// mass on the zero field, and is what the percentage tables report.
struct ProjectionError {
    double absolute = 0.0;            // mean of ||u - VV^T M u||_{V_h}
    double relative = 0.0;            // mean of ||u - VV^T M u|| / ||u||
    double relative_aggregate = 0.0;  // sum ||u - VV^T M u|| / sum ||u||
    double mean_squared = 0.0;
};

template <typename Derived>
ProjectionError pod_projection_error(const PODBasis& basis,
                                     const Eigen::MatrixBase<Derived>& test,
                                     const SymmetricSparseMatrix& mass) {
    const int count = static_cast<int>(test.rows());
    if (test.cols() != mass.dim() || basis.modes.rows() != mass.dim())
        throw config_error("pod_projection_error: dimension mismatch");
    if (count == 0) throw config_error("pod_projection_error: empty test set");

    ProjectionError err;
    int rel_count = 0;
    double norm_sum = 0.0, err_sum = 0.0;
    for (int i = 0; i < count; ++i) {
        const Vector u = test.row(i).transpose();
        const Vector mu = mass.apply(u);
        const Vector residual = u - basis.modes * (basis.modes.transpose() * mu);
        const double e = vh_norm(mass, residual);
        const double norm_u = std::sqrt(std::max(u.dot(mu), 0.0));
        err.absolute += e;
        err.mean_squared += e * e;
        err_sum += e;
        norm_sum += norm_u;
        if (norm_u > 0.0) {
            err.relative += e / norm_u;
            ++rel_count;
        }
    }
    err.absolute /= count;
    err.mean_squared /= count;
    err.relative = rel_count > 0 ? err.relative / rel_count : 0.0;
    err.relative_aggregate = norm_sum > 0.0 ? err_sum / norm_sum : 0.0;
    return err;
}

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// ordinary least squares of log(values) on log(ns)
inline LogLogFit fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& values) {
    if (ns.size() != values.size() || ns.size() < 2)
        throw config_error("fit_loglog_slope: need at least 2 matching points");
    const int n = static_cast<int>(ns.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(ns[i] > 0.0) || !(values[i] > 0.0))
            throw config_error("fit_loglog_slope: all inputs must be positive");
        const double x = std::log(ns[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw config_error("fit_loglog_slope: degenerate abscissae");
    LogLogFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace romlab
