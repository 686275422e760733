#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "romlab/solvers.hpp"

using namespace romlab;

namespace {

// Fourier series oracle for -lap u = 1 on the unit square, zero boundary:
// u(x,y) = sum_{m,n odd} 16 / (pi^4 m n (m^2 + n^2)) sin(m pi x) sin(n pi y)
double poisson_series(double x, double y) {
    const double pi = 3.14159265358979323846;
    double sum = 0.0;
    for (int m = 1; m <= 399; m += 2)
        for (int n = 1; n <= 399; n += 2)
            sum += 16.0 / (std::pow(pi, 4) * m * n * (m * m + n * n)) *
                   std::sin(m * pi * x) * std::sin(n * pi * y);
    return sum;
}

double total_variation(const Vector& v) {
    double tv = 0.0;
    for (int i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
    return tv;
}

}  // namespace

TEST_CASE("darcy solve: scaling, boundary, center value", "[slow]") {
    DarcyProblem problem{build_unit_square_mesh(50)};
    const int nh = problem.mesh.node_count();

    const Vector u0 = solve_darcy(problem, Vector::Zero(nh));

    SECTION("boundary values are exactly zero") {
        for (int i : problem.mesh.boundary_nodes) CHECK(u0[i] == 0.0);
    }

    SECTION("constant sigma rescales the solution by exp(-c)") {
        const Vector u1 = solve_darcy(problem, Vector::Constant(nh, 1.0));
        const double scale = std::exp(-1.0);
        CHECK((u1 - scale * u0).cwiseAbs().maxCoeff() < 1e-10);
    }

    SECTION("center value against the Fourier oracle") {
        // u solves -lap u = 10, so 10x the unit-forcing series
        const double oracle = 10.0 * poisson_series(0.5, 0.5);
        const int center = (50 / 2) * 51 + 25;  // node at (0.5, 0.5)
        CHECK(problem.mesh.nodes[center].x == Approx(0.5));
        CHECK(problem.mesh.nodes[center].y == Approx(0.5));
        CHECK(u0[center] == Approx(oracle).margin(0.002));
    }

    SECTION("maximum principle: nonnegative with nonnegative forcing") {
        Rng rng(3);
        Vector sigma(nh);
        for (int i = 0; i < nh; ++i) sigma[i] = rng.uniform(-0.5, 0.5);
        const Vector u = solve_darcy(problem, sigma);
        CHECK(u.minCoeff() >= -1e-10);
    }
}

TEST_CASE("cookie solve: boundary, source integral, mirror symmetry") {
    CookieProblem problem{build_unit_square_mesh(44)};
    const auto mass = assemble_mass_matrix(problem.mesh);

    SECTION("parameters outside the box are rejected") {
        CHECK_THROWS_AS(solve_cookie(problem, Eigen::Vector3d(0.5, 0.5, 0.5)), config_error);
        CHECK_THROWS_AS(solve_cookie(problem, Eigen::Vector3d(2.0, 0.05, 0.5)), config_error);
    }

    SECTION("boundary nodes carry the Dirichlet value exactly") {
        const Vector u = solve_cookie(problem, Eigen::Vector3d(2.0, 0.3, 0.6));
        for (int i : problem.mesh.boundary_nodes) CHECK(u[i] == 0.1);
    }

    SECTION("discrete source integrates to about 1 despite being under-resolved") {
        // worst case: the bump centered exactly on a lattice node
        const double eps2 = problem.epsilon * problem.epsilon;
        const double scale = 1.0 / (2.0 * 3.14159265358979323846 * eps2);
        Vector f(problem.mesh.node_count());
        for (int i = 0; i < problem.mesh.node_count(); ++i) {
            const double dx = problem.mesh.nodes[i].x - 0.5;
            const double dy = problem.mesh.nodes[i].y - 0.5;
            f[i] = scale * std::exp(-(dx * dx + dy * dy) / (2.0 * eps2));
        }
        const double integral = mass.apply(f).sum();
        CHECK(integral == Approx(1.0).epsilon(0.10));
    }

    SECTION("swapping the source coordinates mirrors the solution") {
        const Eigen::Vector3d mu(1.7, 0.32, 0.71);
        const Eigen::Vector3d swapped(1.7, 0.71, 0.32);
        const Vector u = solve_cookie(problem, mu);
        const Vector v = solve_cookie(problem, swapped);
        const int nn = problem.mesh.n_div + 1;
        double worst = 0.0;
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < nn; ++i)
                worst = std::max(worst, std::abs(u[j * nn + i] - v[i * nn + j]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("godunov flux and transport solve") {
    SECTION("flux picks min over the fan for vl <= vr, max otherwise") {
        CHECK(godunov_flux(1.0, 2.0) == Approx(0.25));   // both positive, min at vl
        CHECK(godunov_flux(-2.0, -1.0) == Approx(0.25)); // both negative, min at vr
        CHECK(godunov_flux(-1.0, 1.0) == 0.0);           // sonic
        CHECK(godunov_flux(1.0, 0.0) == Approx(0.25));   // shock, max
    }

    BurgersProblem problem;

    SECTION("constant state stays constant") {
        const Vector ic = Vector::Constant(problem.grid.n_cells, 0.37);
        const Vector v = solve_burgers(problem, ic);
        CHECK((v - ic).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("Riemann step travels at the Rankine-Hugoniot speed (vl+vr)/4") {
        Vector ic(problem.grid.n_cells);
        for (int i = 0; i < problem.grid.n_cells; ++i)
            ic[i] = problem.grid.center(i) < 1.0 ? 1.0 : 0.0;
        const Vector v = solve_burgers(problem, ic);
        int last_high = 0;
        for (int i = 0; i < v.size(); ++i)
            if (v[i] > 0.5) last_high = i;
        const double shock_x = problem.grid.center(last_high);
        CHECK(std::abs(shock_x - 1.5) <= 2.0 * problem.grid.h());
    }

    SECTION("per-step conservation and nonincreasing total variation") {
        Vector v = sample_burgers_ic(problem.grid, 200, 5);
        const double inflow = v[0];
        const double h = problem.grid.h();
        double tv_prev = total_variation(v);
        for (int s = 0; s < 50; ++s) {
            std::vector<double> fluxes;
            const Vector next = burgers_step(problem.grid, v, problem.dt, inflow, &fluxes);
            const double mass_change = (next.sum() - v.sum()) * h;
            const double boundary_flux = -problem.dt * (fluxes.back() - fluxes.front());
            CHECK(std::abs(mass_change - boundary_flux) < 1e-12);
            const double tv = total_variation(next);
            CHECK(tv <= tv_prev + 1e-12);
            tv_prev = tv;
            v = next;
        }
    }

    SECTION("CFL violation aborts with a diagnostic") {
        const Vector ic = Vector::Constant(problem.grid.n_cells, 5.0);
        CHECK_THROWS_AS(burgers_step(problem.grid, ic, 0.01, 5.0), numerical_error);
    }
}

TEST_CASE("snapshot generation: shapes, split, determinism") {
    SECTION("darcy desk shapes") {
        DarcyProblem problem{build_unit_square_mesh(6)};
        const auto set = generate_darcy_snapshots(problem, 20, 11, 0.9);
        CHECK(set.inputs.rows() == 20);
        CHECK(set.inputs.cols() == 49);
        CHECK(set.outputs.cols() == 49);
        CHECK(set.n_train == 18);
        CHECK(set.n_test() == 2);

        const auto again = generate_darcy_snapshots(problem, 20, 11, 0.9);
        CHECK((set.inputs - again.inputs).cwiseAbs().maxCoeff() == 0.0);
        CHECK((set.outputs - again.outputs).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("burgers split 90:10 and output width") {
        BurgersProblem problem;
        problem.grid = make_grid_1d(5.0, 50);
        problem.dt = 0.05;
        const auto set = generate_burgers_snapshots(problem, 40, 3, 0.9, 50);
        CHECK(set.outputs.cols() == 50);
        CHECK(set.n_train == 36);
        CHECK(set.n_test() == 4);
    }

    SECTION("cookie inputs are the three parameters") {
        CookieProblem problem{build_unit_square_mesh(8)};
        const auto set = generate_cookie_snapshots(problem, 6, 21, 0.75);
        CHECK(set.inputs.cols() == 3);
        CHECK(set.outputs.cols() == 81);
        for (int i = 0; i < set.count(); ++i) {
            CHECK(set.inputs(i, 0) >= 1.0);
            CHECK(set.inputs(i, 0) <= 4.0);
            CHECK(set.inputs(i, 1) >= 0.1);
            CHECK(set.inputs(i, 1) <= 0.9);
        }
    }

    SECTION("jobs > 1 reproduces the single-worker result") {
        DarcyProblem problem{build_unit_square_mesh(5)};
        const auto serial = generate_darcy_snapshots(problem, 12, 4, 0.9, 0, 1);
        const auto parallel = generate_darcy_snapshots(problem, 12, 4, 0.9, 0, 3);
        CHECK((serial.inputs - parallel.inputs).cwiseAbs().maxCoeff() == 0.0);
        CHECK((serial.outputs - parallel.outputs).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("count below 2 is rejected") {
        DarcyProblem problem{build_unit_square_mesh(4)};
        CHECK_THROWS_AS(generate_darcy_snapshots(problem, 1, 1), config_error);
    }
}

TEST_CASE("perturbation ratio stays uniformly bounded over random coefficient pairs") {
    // stability check: ||u_s - u_s'|| <= C ||s - s'||_inf exp(3||s||_inf + 3||s'||_inf)
    // for one modest constant C. The normalized ratio must never blow up, in
    // particular not for large-amplitude draws where the exponential factor
    // does the work.
    DarcyProblem problem{build_unit_square_mesh(10)};
    const auto mass = assemble_mass_matrix(problem.mesh);
    const Matrix cov = assemble_covariance_matrix(SquaredExponentialKernel{}, problem.mesh);
    const KLBasis kl = kl_decompose(cov, mass, problem.mesh.node_count());

    double worst = 0.0;
    for (int k = 0; k < 40; ++k) {
        const Vector s1 = sample_field(kl, kl.mode_count(), mix_seed(400, 2 * k));
        const Vector s2 = sample_field(kl, kl.mode_count(), mix_seed(400, 2 * k + 1));
        const Vector u1 = solve_darcy(problem, s1);
        const Vector u2 = solve_darcy(problem, s2);
        const double num = vh_norm(mass, u1 - u2);
        const double den = (s1 - s2).cwiseAbs().maxCoeff() *
                           std::exp(3.0 * s1.cwiseAbs().maxCoeff() + 3.0 * s2.cwiseAbs().maxCoeff());
        worst = std::max(worst, num / den);
    }
    CHECK(worst < 1.0);
}
