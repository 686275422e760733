#include <catch2/catch.hpp>

#include <cmath>

#include "romlab/fem.hpp"
#include "romlab/random_fields.hpp"

using namespace romlab;

TEST_CASE("covariance matrix agrees with the brute-force kernel oracle") {
    const auto mesh = build_unit_square_mesh(2);
    const SquaredExponentialKernel kernel;
    const Matrix c = assemble_covariance_matrix(kernel, mesh);

    for (int i = 0; i < 9; ++i) CHECK(c(i, i) == 1.0);
    // nodes 0=(0,0) and 2=(1,0) sit at distance 1
    CHECK(c(0, 2) == Approx(std::exp(-1.0)).margin(1e-16));

    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            const double dx = mesh.nodes[i].x - mesh.nodes[j].x;
            const double dy = mesh.nodes[i].y - mesh.nodes[j].y;
            CHECK(std::abs(c(i, j) - std::exp(-(dx * dx + dy * dy))) < 1e-15);
        }
}

TEST_CASE("two-node decomposition reproduces the hand eigenvalues w(1 +- rho)") {
    const double w = 0.25, rho = 0.4;
    Matrix c(2, 2);
    c << 1.0, rho, rho, 1.0;
    const auto mass = SymmetricSparseMatrix::diagonal(Vector::Constant(2, w));
    const KLBasis basis = kl_decompose(c, mass, 2);

    CHECK(basis.eigenvalues[0] == Approx(w * (1 + rho)).epsilon(1e-13));
    CHECK(basis.eigenvalues[1] == Approx(w * (1 - rho)).epsilon(1e-13));
    CHECK(basis.total_energy == Approx(2 * w).epsilon(1e-14));
}

TEST_CASE("decomposition invariants on a mesh-sized kernel") {
    const auto mesh = build_unit_square_mesh(6);
    const auto mass = assemble_mass_matrix(mesh);
    const Matrix c = assemble_covariance_matrix(SquaredExponentialKernel{}, mesh);
    const int nh = mesh.node_count();
    const KLBasis basis = kl_decompose(c, mass, nh);

    SECTION("eigenvalues sorted, clamped nonnegative") {
        for (int i = 1; i < nh; ++i) CHECK(basis.eigenvalues[i] <= basis.eigenvalues[i - 1]);
        CHECK(basis.eigenvalues.minCoeff() >= 0.0);
    }
    SECTION("trace identity") {
        CHECK(basis.eigenvalues.sum() ==
              Approx(basis.total_energy).epsilon(1e-8));
    }
    SECTION("modes orthonormal in the lumped inner product") {
        const Matrix gram = basis.modes.transpose() * basis.mass_diag.asDiagonal() * basis.modes;
        CHECK((gram - Matrix::Identity(nh, nh)).cwiseAbs().maxCoeff() < 1e-8);
    }
    SECTION("spectral tail is nonincreasing and hits zero at full rank") {
        double prev = spectral_tail(basis, 0);
        CHECK(prev == Approx(basis.total_energy));
        for (int n = 1; n <= nh; ++n) {
            const double tail = spectral_tail(basis, n);
            CHECK(tail <= prev + 1e-15);
            prev = tail;
        }
        CHECK(spectral_tail(basis, nh) <= 1e-8 * basis.total_energy);
    }
    SECTION("argument checks") {
        CHECK_THROWS_AS(kl_decompose(c, mass, 0), config_error);
        CHECK_THROWS_AS(kl_decompose(c, mass, nh + 1), config_error);
        CHECK_THROWS_AS(spectral_tail(basis, -1), config_error);
    }
    SECTION("a non-SPD mass matrix is rejected") {
        Vector bad = Vector::Ones(nh);
        bad[3] = 0.0;
        CHECK_THROWS_AS(kl_decompose(c, SymmetricSparseMatrix::diagonal(bad), 2),
                        numerical_error);
    }
}

TEST_CASE("spectral tail arithmetic on a toy spectrum") {
    KLBasis basis;
    basis.eigenvalues = Vector(3);
    basis.eigenvalues << 3.0, 2.0, 1.0;
    basis.total_energy = 6.0;
    CHECK(spectral_tail(basis, 0) == 6.0);
    CHECK(spectral_tail(basis, 1) == 3.0);
    CHECK(spectral_tail(basis, 3) == 0.0);
}

TEST_CASE("field sampling: mean at zero truncation, bitwise determinism") {
    const auto mesh = build_unit_square_mesh(4);
    const auto mass = assemble_mass_matrix(mesh);
    const Matrix c = assemble_covariance_matrix(SquaredExponentialKernel{}, mesh);
    KLBasis basis = kl_decompose(c, mass, mesh.node_count());
    basis.mean = Vector::Constant(mesh.node_count(), 0.75);

    const Vector at_zero = sample_field(basis, 0, 42);
    CHECK((at_zero - basis.mean).cwiseAbs().maxCoeff() == 0.0);

    const Vector a = sample_field(basis, 10, 42);
    const Vector b = sample_field(basis, 10, 42);
    for (int i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    CHECK_THROWS_AS(sample_field(basis, mesh.node_count() + 1, 1), config_error);
}

TEST_CASE("Monte Carlo sampler statistics match the spectrum", "[slow]") {
    const auto mesh = build_unit_square_mesh(8);
    const auto mass = assemble_mass_matrix(mesh);
    const Matrix c = assemble_covariance_matrix(SquaredExponentialKernel{}, mesh);
    const int nh = mesh.node_count();
    const KLBasis basis = kl_decompose(c, mass, nh);
    const int draws = 20000;

    // target pointwise variance sum_i lambda_i phi_i(x)^2
    Vector target = Vector::Zero(nh);
    for (int k = 0; k < nh; ++k)
        target += basis.eigenvalues[k] * basis.modes.col(k).cwiseAbs2();

    Vector mean = Vector::Zero(nh);
    Vector second = Vector::Zero(nh);
    double norm2_mean = 0.0;
    for (int d = 0; d < draws; ++d) {
        const Vector z = sample_field(basis, nh, mix_seed(1234, d));
        mean += z;
        second += z.cwiseAbs2();
        norm2_mean += mass.quad_form(z);
    }
    mean /= draws;
    second /= draws;
    norm2_mean /= draws;

    for (int i : mesh.interior_nodes()) {
        const double var = second[i] - mean[i] * mean[i];
        CHECK(var == Approx(target[i]).epsilon(0.05));
        // mean-zero check at 4 sigma
        CHECK(std::abs(mean[i]) < 4.0 * std::sqrt(target[i] / draws));
    }

    // second moment of the field norm matches the retained energy
    CHECK(norm2_mean == Approx(basis.eigenvalues.sum()).epsilon(0.05));
}

TEST_CASE("1D initial profiles: bump value, clamping, range") {
    const auto grid = make_grid_1d(5.0, 5);  // centers at 0.5, 1.5, 2.5, 3.5, 4.5

    SECTION("zero coefficients give the deterministic bump") {
        const std::vector<double> etas(8, 0.0);
        const Vector mu = burgers_ic_from_coeffs(grid, etas);
        CHECK(mu[1] == Approx(0.125).margin(1e-16));  // x = 1.5, phi0 = 0.25
        CHECK(mu[0] == 0.0);
        CHECK(mu[4] == 0.0);
    }

    SECTION("large positive first coefficient saturates the clamp at 1/2") {
        const std::vector<double> etas = {10.0};
        const Vector mu = burgers_ic_from_coeffs(grid, etas);
        CHECK(mu[2] == 0.5);  // x = 2.5, series value 10 > 1
    }

    SECTION("range stays inside [0, 1/2] for any seed") {
        const auto fine = make_grid_1d(5.0, 500);
        for (std::uint64_t seed : {1ULL, 77ULL, 123456ULL}) {
            const Vector mu = sample_burgers_ic(fine, 200, seed);
            CHECK(mu.minCoeff() >= 0.0);
            CHECK(mu.maxCoeff() <= 0.5);
        }
    }

    SECTION("same seed reproduces identical bits") {
        const auto fine = make_grid_1d(5.0, 100);
        const Vector a = sample_burgers_ic(fine, 50, 9);
        const Vector b = sample_burgers_ic(fine, 50, 9);
        for (int i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }

    SECTION("series truncation must be positive") {
        CHECK_THROWS_AS(sample_burgers_ic(grid, 0, 1), config_error);
    }
}
