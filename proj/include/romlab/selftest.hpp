#pragma once

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "romlab/dlrom.hpp"
#include "romlab/fem.hpp"
#include "romlab/gradcheck.hpp"
#include "romlab/mesh.hpp"
#include "romlab/random_fields.hpp"
#include "romlab/reduction.hpp"
#include "romlab/solvers.hpp"

namespace romlab {

// Fast oracle battery behind the `selftest` CLI verb: each check pins one of
// the worked examples with an independently known answer.
inline bool run_selftest(std::ostream& log) {
    struct Check {
        std::string name;
        std::function<bool()> fn;
    };

    std::vector<Check> checks;
    auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };

    checks.push_back({"mesh counts (n_div=2 -> 9 nodes, 8 triangles, 8 boundary)", [&] {
        const auto mesh = build_unit_square_mesh(2);
        return mesh.node_count() == 9 && mesh.triangle_count() == 8 &&
               static_cast<int>(mesh.boundary_nodes.size()) == 8;
    }});
    checks.push_back({"triangle areas sum to 1", [&] {
        const auto mesh = build_unit_square_mesh(7);
        double total = 0.0;
        for (int t = 0; t < mesh.triangle_count(); ++t) total += mesh.triangle_area(t);
        return near(total, 1.0, 1e-12);
    }});
    checks.push_back({"mass matrix entries sum to 1", [&] {
        const auto mesh = build_unit_square_mesh(5);
        return near(assemble_mass_matrix(mesh).sum(), 1.0, 1e-12);
    }});
    checks.push_back({"vh_norm of the constant-1 field is 1", [&] {
        const auto mesh = build_unit_square_mesh(6);
        const auto mass = assemble_mass_matrix(mesh);
        return near(vh_norm(mass, Vector::Ones(mesh.node_count())), 1.0, 1e-12);
    }});
    checks.push_back({"covariance kernel has unit diagonal", [&] {
        const auto mesh = build_unit_square_mesh(3);
        const Matrix c = assemble_covariance_matrix(SquaredExponentialKernel{}, mesh);
        return near(c.diagonal().minCoeff(), 1.0, 1e-15) && near(c(0, 3), std::exp(-1.0), 1e-15);
    }});
    checks.push_back({"two-node covariance eigenvalues w(1 +- rho)", [&] {
        const double w = 0.3, rho = 0.6;
        Matrix c(2, 2);
        c << 1.0, rho, rho, 1.0;
        const auto mass = SymmetricSparseMatrix::diagonal(Vector::Constant(2, w));
        const KLBasis basis = kl_decompose(c, mass, 2);
        return near(basis.eigenvalues[0], w * (1 + rho), 1e-12) &&
               near(basis.eigenvalues[1], w * (1 - rho), 1e-12);
    }});
    checks.push_back({"spectral tail arithmetic on {3,2,1}", [&] {
        KLBasis basis;
        basis.eigenvalues = Vector(3);
        basis.eigenvalues << 3, 2, 1;
        basis.total_energy = 6.0;
        return near(spectral_tail(basis, 0), 6.0, 0.0) && near(spectral_tail(basis, 1), 3.0, 0.0);
    }});
    checks.push_back({"initial profile with zero coefficients: mu(1.5) = 0.125", [&] {
        const auto grid = make_grid_1d(5.0, 5);
        const std::vector<double> etas(4, 0.0);
        const Vector mu = burgers_ic_from_coeffs(grid, etas);
        return near(mu[1], 0.125, 1e-15);
    }});
    checks.push_back({"clamped initial profile saturates at 1/2", [&] {
        const auto grid = make_grid_1d(5.0, 5);
        const std::vector<double> etas = {10.0};
        const Vector mu = burgers_ic_from_coeffs(grid, etas);
        return near(mu[2], 0.5, 1e-15);  // x = 2.5, sin(pi/2) = 1
    }});
    checks.push_back({"Riemann shock sits at 1 + T/4", [&] {
        BurgersProblem problem;
        Vector ic(problem.grid.n_cells);
        for (int i = 0; i < problem.grid.n_cells; ++i)
            ic[i] = problem.grid.center(i) < 1.0 ? 1.0 : 0.0;
        const Vector v = solve_burgers(problem, ic);
        int shock = 0;
        for (int i = 0; i < v.size(); ++i)
            if (v[i] > 0.5) shock = i;
        return std::abs(problem.grid.center(shock) - 1.5) <= 2.0 * problem.grid.h();
    }});
    checks.push_back({"rank-1 snapshots give a single nonzero eigenvalue", [&] {
        const int nh = 6;
        const auto mass = SymmetricSparseMatrix::diagonal(Vector::Constant(nh, 0.5));
        Vector u(nh);
        for (int i = 0; i < nh; ++i) u[i] = 1.0 + i;
        Matrix snaps(4, nh);
        for (int i = 0; i < 4; ++i) snaps.row(i) = u.transpose();
        const PODBasis basis = pod(snaps, mass, 1);
        const double norm2 = mass.quad_form(u);
        return near(basis.eigenvalues[0], norm2, 1e-10 * norm2) &&
               near((basis.modes.col(0) - u / std::sqrt(norm2)).norm(), 0.0, 1e-10);
    }});
    checks.push_back({"two-point log-log slope (1,8),(2,1) -> -3", [&] {
        const auto fit = fit_loglog_slope({1.0, 2.0}, {8.0, 1.0});
        return near(fit.slope, -3.0, 1e-12);
    }});
    checks.push_back({"first Adam step moves by about -lr sign(g)", [&] {
        Network net;
        net.layers = {make_dense_layer(1, 1, Activation::identity())};
        net.layers[0].weights(0, 0) = 0.7;
        AdamConfig cfg;
        AdamState state = AdamState::like(net, cfg);
        NetworkGrads grads;
        grads.layers.resize(1);
        grads.layers[0].weights = Matrix::Constant(1, 1, 3.0);
        grads.layers[0].bias = Vector::Zero(1);
        adam_step(state, net, grads);
        return near(net.layers[0].weights(0, 0), 0.7 - cfg.lr, 1e-6);
    }});
    checks.push_back({"leaky ReLU on [-1, 0, 2]", [&] {
        const Activation act = Activation::leaky(0.1);
        return near(act.value(-1.0), -0.1, 0.0) && near(act.value(0.0), 0.0, 0.0) &&
               near(act.value(2.0), 2.0, 0.0);
    }});
    checks.push_back({"soft clamp on [-1, 0.25, 1]", [&] {
        const Activation act = Activation::soft_clamp();
        return near(act.value(-1.0), -0.1, 1e-15) && near(act.value(0.25), 0.25, 0.0) &&
               near(act.value(1.0), 0.55, 1e-15);
    }});
    checks.push_back({"gradient checks on dense/masked layers", [&] {
        for (const auto& r : gradcheck_suite())
            if (!r.pass) return false;
        return true;
    }});

    bool all_ok = true;
    for (const auto& check : checks) {
        bool ok = false;
        try {
            ok = check.fn();
        } catch (const std::exception& e) {
            log << "FAIL " << check.name << " (exception: " << e.what() << ")\n";
            all_ok = false;
            continue;
        }
        log << (ok ? "ok   " : "FAIL ") << check.name << "\n";
        all_ok = all_ok && ok;
    }
    return all_ok;
}

}  // namespace romlab
