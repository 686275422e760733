#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "romlab/errors.hpp"
#include "romlab/fem.hpp"
#include "romlab/mesh.hpp"
#include "romlab/random_fields.hpp"
#include "romlab/rng.hpp"

namespace romlab {

struct DarcyProblem {
    StructuredTriMesh mesh;
    double forcing = 10.0;         // -div(e^sigma grad u) = forcing
    double boundary_value = 0.0;
};

struct CookieProblem {
    StructuredTriMesh mesh;
    double epsilon = 0.01;
    double boundary_value = 0.1;
    Point2 inclusion_center{0.5, 0.5};  // Omega_0 is a disk
    double inclusion_radius = 0.2;
    double mu1_min = 1.0, mu1_max = 4.0;
    double mu23_min = 0.1, mu23_max = 0.9;
};

struct BurgersProblem {
    UniformGrid1D grid{5.0, 500};
    double dt = 0.01;
    double t_final = 2.0;
};

// ---------------------------------------------------------------------------
// elliptic solves with constant Dirichlet data, symmetric elimination
// ---------------------------------------------------------------------------

// Reduce A u = b to the interior block, moving boundary contributions to the
// right-hand side, solve the SPD system by sparse Cholesky, and scatter back
// with boundary entries set exactly to the prescribed value.
inline Vector solve_dirichlet_constant(const StructuredTriMesh& mesh,
                                       const SymmetricSparseMatrix& a,
                                       const Vector& load, double boundary_value) {
    const int n = mesh.node_count();
    if (a.dim() != n || load.size() != n)
        throw config_error("solve_dirichlet_constant: dimension mismatch");

    std::vector<int> interior_of(n, -1);
    const std::vector<int> interior = mesh.interior_nodes();
    for (std::size_t k = 0; k < interior.size(); ++k) interior_of[interior[k]] = static_cast<int>(k);
    const int ni = static_cast<int>(interior.size());

    Vector rhs(ni);
    for (int k = 0; k < ni; ++k) rhs[k] = load[interior[k]];

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * a.stored_count());
    const auto& rows = a.stored_rows();
    const auto& cols = a.stored_cols();
    const auto& vals = a.stored_values();
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const int r = rows[k], c = cols[k];
        const int ri = interior_of[r], ci = interior_of[c];
        if (ri >= 0 && ci >= 0) {
            trip.emplace_back(ri, ci, vals[k]);
            if (r != c) trip.emplace_back(ci, ri, vals[k]);
        } else if (ri >= 0) {
            rhs[ri] -= vals[k] * boundary_value;
        } else if (ci >= 0) {
            rhs[ci] -= vals[k] * boundary_value;
        }
    }

    Eigen::SparseMatrix<double> aii(ni, ni);
    aii.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(aii);
    if (llt.info() != Eigen::Success)
        throw numerical_error("solve_dirichlet_constant: Cholesky factorization failed");
    Vector ui = llt.solve(rhs);

    const double rhs_norm = rhs.norm();
    if (rhs_norm > 0.0) {
        const double res = (aii * ui - rhs).norm() / rhs_norm;
        if (res > 1e-10)
            throw numerical_error("solve_dirichlet_constant: relative residual " +
                                  std::to_string(res) + " exceeds 1e-10");
    }

    Vector u = Vector::Constant(n, boundary_value);
    for (int k = 0; k < ni; ++k) u[interior[k]] = ui[k];
    return u;
}

inline Vector solve_darcy(const DarcyProblem& problem, const Vector& sigma) {
    const SymmetricSparseMatrix a = assemble_darcy_stiffness(problem.mesh, sigma);
    const SymmetricSparseMatrix mass = assemble_mass_matrix(problem.mesh);
    const Vector load = problem.forcing * mass.apply(Vector::Ones(problem.mesh.node_count()));
    return solve_dirichlet_constant(problem.mesh, a, load, problem.boundary_value);
}

// generic right-hand side given by nodal values of f, load = M f
inline Vector solve_poisson_nodal_rhs(const StructuredTriMesh& mesh, const Vector& f_nodal) {
    std::vector<double> coeff(mesh.triangle_count(), 1.0);
    const SymmetricSparseMatrix a = assemble_stiffness_with_coeff(mesh, coeff);
    const SymmetricSparseMatrix mass = assemble_mass_matrix(mesh);
    return solve_dirichlet_constant(mesh, a, mass.apply(f_nodal), 0.0);
}

inline Vector solve_cookie(const CookieProblem& problem, const Eigen::Vector3d& mu) {
    if (mu[0] < problem.mu1_min || mu[0] > problem.mu1_max ||
        mu[1] < problem.mu23_min || mu[1] > problem.mu23_max ||
        mu[2] < problem.mu23_min || mu[2] > problem.mu23_max)
        throw config_error("solve_cookie: parameters outside the admissible box");

    const StructuredTriMesh& mesh = problem.mesh;
    std::vector<double> coeff(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Point2 bary{(mesh.nodes[tri[0]].x + mesh.nodes[tri[1]].x + mesh.nodes[tri[2]].x) / 3.0,
                          (mesh.nodes[tri[0]].y + mesh.nodes[tri[1]].y + mesh.nodes[tri[2]].y) / 3.0};
        const bool inside = distance(bary, problem.inclusion_center) <= problem.inclusion_radius;
        coeff[t] = 0.5 + (inside ? mu[0] : 0.0);
    }
    const SymmetricSparseMatrix a = assemble_stiffness_with_coeff(mesh, coeff);

    // Gaussian source interpolated at the nodes, then a consistent load M f
    const double eps2 = problem.epsilon * problem.epsilon;
    const double scale = 1.0 / (2.0 * 3.14159265358979323846 * eps2);
    Vector f(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) {
        const double dx = mesh.nodes[i].x - mu[1];
        const double dy = mesh.nodes[i].y - mu[2];
        f[i] = scale * std::exp(-(dx * dx + dy * dy) / (2.0 * eps2));
    }
    const SymmetricSparseMatrix mass = assemble_mass_matrix(mesh);
    return solve_dirichlet_constant(mesh, a, mass.apply(f), problem.boundary_value);
}

// ---------------------------------------------------------------------------
// inviscid transport: v_t + (v^2/4)_x = 0, Godunov fluxes
// ---------------------------------------------------------------------------

inline double burgers_physical_flux(double v) { return 0.25 * v * v; }

// exact Riemann flux for the convex flux v^2/4 (sonic point at v = 0)
inline double godunov_flux(double vl, double vr) {
    if (vl <= vr) {
        if (vl >= 0.0) return burgers_physical_flux(vl);
        if (vr <= 0.0) return burgers_physical_flux(vr);
        return 0.0;
    }
    return std::max(burgers_physical_flux(vl), burgers_physical_flux(vr));
}

// One conservative update. Left ghost cell is pinned to the inflow value,
// right ghost copies the last cell (zero-gradient outflow). Interface fluxes
// are exposed for conservation bookkeeping.
inline Vector burgers_step(const UniformGrid1D& grid, const Vector& v, double dt,
                           double inflow, std::vector<double>* fluxes_out = nullptr) {
    const int n = grid.n_cells;
    if (v.size() != n) throw config_error("burgers_step: state length mismatch");
    const double h = grid.h();

    const double vmax = v.cwiseAbs().maxCoeff();
    const double cfl = dt * vmax / (2.0 * h);
    if (cfl > 1.0)
        throw numerical_error("burgers_step: CFL " + std::to_string(cfl) +
                              " > 1 (max |v| = " + std::to_string(vmax) + ")");

    std::vector<double> flux(static_cast<std::size_t>(n) + 1);
    flux[0] = godunov_flux(inflow, v[0]);
    for (int i = 1; i < n; ++i) flux[i] = godunov_flux(v[i - 1], v[i]);
    flux[n] = godunov_flux(v[n - 1], v[n - 1]);

    Vector out(n);
    const double lambda = dt / h;
    for (int i = 0; i < n; ++i) out[i] = v[i] - lambda * (flux[i + 1] - flux[i]);
    if (fluxes_out) *fluxes_out = std::move(flux);
    return out;
}

inline Vector solve_burgers(const BurgersProblem& problem, const Vector& ic) {
    if (ic.size() != problem.grid.n_cells)
        throw config_error("solve_burgers: initial condition length mismatch");
    const int steps = static_cast<int>(std::llround(problem.t_final / problem.dt));
    const double inflow = ic[0];
    Vector v = ic;
    for (int s = 0; s < steps; ++s) v = burgers_step(problem.grid, v, problem.dt, inflow);
    return v;
}

// ---------------------------------------------------------------------------
// snapshot generation
// ---------------------------------------------------------------------------

struct SnapshotSet {
    Matrix inputs;    // N x N_h_in, one realization per row
    Matrix outputs;   // N x N_h_out
    int n_train = 0;
    std::uint64_t seed = 0;

    int count() const { return static_cast<int>(inputs.rows()); }
    int n_test() const { return count() - n_train; }

    auto train_inputs() const { return inputs.topRows(n_train); }
    auto train_outputs() const { return outputs.topRows(n_train); }
    auto test_inputs() const { return inputs.bottomRows(n_test()); }
    auto test_outputs() const { return outputs.bottomRows(n_test()); }
};

namespace detail {

inline int train_count(int total, double fraction) {
    int n = static_cast<int>(std::floor(fraction * total + 1e-12));
    return std::clamp(n, 1, total - 1);
}

// fan the per-index work out over a small worker pool; rows are written in
// index order so the result is independent of scheduling
template <typename Fn>
void indexed_for(int count, int jobs, Fn&& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::string> failures(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += jobs) fn(i);
            } catch (const std::exception& e) {
                failures[static_cast<std::size_t>(w)] = e.what();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (!f.empty()) throw numerical_error(f);
}

}  // namespace detail

inline SnapshotSet generate_darcy_snapshots(const DarcyProblem& problem, int count,
                                            std::uint64_t seed, double train_fraction = 0.9,
                                            int kl_modes = 0, int jobs = 1,
                                            double field_length_scale = 1.0) {
    if (count < 2) throw config_error("generate_darcy_snapshots: need at least 2 snapshots");
    const int nh = problem.mesh.node_count();
    const SymmetricSparseMatrix mass = assemble_mass_matrix(problem.mesh);
    const Matrix cov =
        assemble_covariance_matrix(SquaredExponentialKernel{field_length_scale}, problem.mesh);
    const int m = (kl_modes <= 0 || kl_modes > nh) ? nh : kl_modes;
    const KLBasis kl = kl_decompose(cov, mass, m);

    SnapshotSet set;
    set.inputs.resize(count, nh);
    set.outputs.resize(count, nh);
    set.n_train = detail::train_count(count, train_fraction);
    set.seed = seed;
    detail::indexed_for(count, jobs, [&](int i) {
        try {
            const Vector sigma = sample_field(kl, m, mix_seed(seed, static_cast<std::uint64_t>(i)));
            set.inputs.row(i) = sigma.transpose();
            set.outputs.row(i) = solve_darcy(problem, sigma).transpose();
        } catch (const numerical_error& e) {
            throw numerical_error("snapshot " + std::to_string(i) + ": " + e.what());
        }
    });
    return set;
}

inline SnapshotSet generate_burgers_snapshots(const BurgersProblem& problem, int count,
                                              std::uint64_t seed, double train_fraction = 0.9,
                                              int series_terms = 200, int jobs = 1) {
    if (count < 2) throw config_error("generate_burgers_snapshots: need at least 2 snapshots");
    const int nh = problem.grid.n_cells;
    SnapshotSet set;
    set.inputs.resize(count, nh);
    set.outputs.resize(count, nh);
    set.n_train = detail::train_count(count, train_fraction);
    set.seed = seed;
    detail::indexed_for(count, jobs, [&](int i) {
        try {
            const Vector ic =
                sample_burgers_ic(problem.grid, series_terms, mix_seed(seed, static_cast<std::uint64_t>(i)));
            set.inputs.row(i) = ic.transpose();
            set.outputs.row(i) = solve_burgers(problem, ic).transpose();
        } catch (const numerical_error& e) {
            throw numerical_error("snapshot " + std::to_string(i) + ": " + e.what());
        }
    });
    return set;
}

inline SnapshotSet generate_cookie_snapshots(const CookieProblem& problem, int count,
                                             std::uint64_t seed, double train_fraction = 0.9,
                                             int jobs = 1) {
    if (count < 2) throw config_error("generate_cookie_snapshots: need at least 2 snapshots");
    SnapshotSet set;
    set.inputs.resize(count, 3);
    set.outputs.resize(count, problem.mesh.node_count());
    set.n_train = detail::train_count(count, train_fraction);
    set.seed = seed;
    detail::indexed_for(count, jobs, [&](int i) {
        try {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
            Eigen::Vector3d mu;
            mu[0] = rng.uniform(problem.mu1_min, problem.mu1_max);
            mu[1] = rng.uniform(problem.mu23_min, problem.mu23_max);
            mu[2] = rng.uniform(problem.mu23_min, problem.mu23_max);
            set.inputs.row(i) = mu.transpose();
            set.outputs.row(i) = solve_cookie(problem, mu).transpose();
        } catch (const numerical_error& e) {
            throw numerical_error("snapshot " + std::to_string(i) + ": " + e.what());
        }
    });
    return set;
}

}  // namespace romlab
