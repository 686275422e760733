#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "romlab/errors.hpp"
#include "romlab/fem.hpp"
#include "romlab/mesh.hpp"
#include "romlab/rng.hpp"

namespace romlab {

// squared-exponential kernel Cov(x, y) = exp(-|x - y|^2 / l^2); the default
// length scale of 1 gives exp(-|x - y|^2)
struct SquaredExponentialKernel {
    double length_scale = 1.0;

    double operator()(const Point2& a, const Point2& b) const {
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        return std::exp(-(dx * dx + dy * dy) / (length_scale * length_scale));
    }
};

template <typename Kernel>
Matrix assemble_covariance_matrix(const Kernel& kernel, const StructuredTriMesh& mesh) {
    const int n = mesh.node_count();
    Matrix c(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double v = kernel(mesh.nodes[i], mesh.nodes[j]);
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

// Truncated covariance eigendecomposition in the lumped-mass inner product.
// eigenvalues are nonincreasing, modes satisfy modes^T diag(mass_diag) modes = I,
// total_energy carries the full trace so tails remain meaningful beyond the
// truncation.
struct KLBasis {
    Vector eigenvalues;   // nonincreasing, >= 0
    Matrix modes;         // N_h x m
    Vector mean;          // zero for centered fields
    Vector mass_diag;     // lumped weights defining the inner product
    double total_energy = 0.0;

    int mode_count() const { return static_cast<int>(eigenvalues.size()); }
};

// Solves the mass-weighted eigenproblem through the lumped-mass square root:
// with S = diag(sqrt(w)), eigendecompose S C S, then map eigenvectors back by
// S^{-1}. Modes get a deterministic sign (largest-magnitude component positive).
inline KLBasis kl_decompose(const Matrix& covariance, const SymmetricSparseMatrix& mass,
                            int m) {
    const int n = static_cast<int>(covariance.rows());
    if (covariance.cols() != n) throw config_error("kl_decompose: covariance must be square");
    if (mass.dim() != n) throw config_error("kl_decompose: mass dimension mismatch");
    if (m < 1 || m > n) throw config_error("kl_decompose: truncation count out of range");

    const Vector w = mass.lumped_diagonal();
    if ((w.array() <= 0.0).any())
        throw numerical_error("kl_decompose: mass matrix is not positive definite (lumped row sums)");

    const Vector s = w.array().sqrt();
    Matrix b = covariance;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) b(i, j) *= s[i] * s[j];

    Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
    if (eig.info() != Eigen::Success)
        throw numerical_error("kl_decompose: eigendecomposition failed");

    // Eigen returns ascending order
    KLBasis basis;
    basis.eigenvalues.resize(m);
    basis.modes.resize(n, m);
    basis.mean = Vector::Zero(n);
    basis.mass_diag = w;

    const double lambda_max = std::max(eig.eigenvalues()(n - 1), 0.0);
    const double clamp_floor = -1e-12 * lambda_max;
    for (int k = 0; k < m; ++k) {
        double lambda = eig.eigenvalues()(n - 1 - k);
        if (lambda < 0.0) {
            if (lambda < clamp_floor)
                throw numerical_error("kl_decompose: covariance has a significantly negative eigenvalue");
            lambda = 0.0;
        }
        basis.eigenvalues[k] = lambda;
        Vector mode = eig.eigenvectors().col(n - 1 - k).array() / s.array();
        int imax = 0;
        mode.cwiseAbs().maxCoeff(&imax);
        if (mode[imax] < 0.0) mode = -mode;
        basis.modes.col(k) = mode;
    }

    basis.total_energy = covariance.diagonal().dot(w);
    return basis;
}

inline double spectral_tail(const KLBasis& basis, int n) {
    if (n < 0) throw config_error("spectral_tail: n must be nonnegative");
    double captured = 0.0;
    const int upto = std::min<int>(n, basis.mode_count());
    for (int i = 0; i < upto; ++i) captured += basis.eigenvalues[i];
    return std::max(basis.total_energy - captured, 0.0);
}

inline Vector sample_field(const KLBasis& basis, int n_trunc, std::uint64_t seed) {
    if (n_trunc < 0 || n_trunc > basis.mode_count())
        throw config_error("sample_field: n_trunc exceeds available modes");
    Rng rng(seed);
    Vector field = basis.mean;
    for (int i = 0; i < n_trunc; ++i)
        field += std::sqrt(basis.eigenvalues[i]) * rng.normal() * basis.modes.col(i);
    return field;
}

// Random initial profile for the 1D transport problem,
//   mu(x) = 1/2 clamp( phi0(x) + sum_k k^{-2} eta_k sin(k pi x / L) ),
// phi0(x) = (x-1)(2-x) on [1,2], clamp to [0,1]. Values land in [0, 1/2].
inline double burgers_ic_bump(double x) {
    return (x >= 1.0 && x <= 2.0) ? (x - 1.0) * (2.0 - x) : 0.0;
}

inline Vector burgers_ic_from_coeffs(const UniformGrid1D& grid, std::span<const double> etas) {
    const double pi = 3.14159265358979323846264338327950288;
    Vector mu(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) {
        const double x = grid.center(i);
        double series = burgers_ic_bump(x);
        for (std::size_t k = 0; k < etas.size(); ++k) {
            const double kk = static_cast<double>(k + 1);
            series += etas[k] / (kk * kk) * std::sin(kk * pi * x / grid.length);
        }
        mu[i] = 0.5 * std::min(std::max(series, 0.0), 1.0);
    }
    return mu;
}

inline Vector sample_burgers_ic(const UniformGrid1D& grid, int series_terms, std::uint64_t seed) {
    if (series_terms < 1) throw config_error("sample_burgers_ic: series truncation must be >= 1");
    Rng rng(seed);
    std::vector<double> etas(static_cast<std::size_t>(series_terms));
    for (auto& e : etas) e = rng.normal();
    return burgers_ic_from_coeffs(grid, etas);
}

}  // namespace romlab
