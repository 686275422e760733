#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "romlab/fem.hpp"
#include "romlab/mesh.hpp"
#include "romlab/rng.hpp"

using namespace romlab;

namespace {

// quadrature oracle: the 3-point edge-midpoint rule integrates quadratics
// exactly, enough for products of P1 basis functions
double integrate_p1_product(const Point2& a, const Point2& b, const Point2& c, int i, int j) {
    const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    // barycentric coordinates of the edge midpoints
    const double bary[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    double sum = 0.0;
    for (int q = 0; q < 3; ++q) sum += bary[q][i] * bary[q][j];
    return area * sum / 3.0;
}

// independent dense assembly of the variable-coefficient stiffness; the
// gradients come from solving the local linear system rather than the
// closed-form cross products used by the implementation
Matrix dense_stiffness_oracle(const StructuredTriMesh& mesh, const Vector& sigma) {
    const int n = mesh.node_count();
    Matrix a = Matrix::Zero(n, n);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        Eigen::Matrix3d vand;
        for (int k = 0; k < 3; ++k)
            vand.row(k) << 1.0, mesh.nodes[tri[k]].x, mesh.nodes[tri[k]].y;
        // columns of vand^{-1} give the coefficients of each P1 basis function
        const Eigen::Matrix3d coef = vand.inverse();
        const double area = mesh.triangle_area(t);
        const double sbar = (sigma[tri[0]] + sigma[tri[1]] + sigma[tri[2]]) / 3.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                a(tri[i], tri[j]) += std::exp(sbar) * area *
                                     (coef(1, i) * coef(1, j) + coef(2, i) * coef(2, j));
    }
    return a;
}

}  // namespace

TEST_CASE("unit square mesh has the combinatorial counts") {
    // oracle: (n+1)^2 nodes, 2 n^2 triangles, 4 n boundary nodes
    const auto m50 = build_unit_square_mesh(50);
    CHECK(m50.node_count() == 2601);
    CHECK(m50.triangle_count() == 5000);

    const auto m1 = build_unit_square_mesh(1);
    CHECK(m1.node_count() == 4);
    CHECK(m1.triangle_count() == 2);

    const auto m2 = build_unit_square_mesh(2);
    CHECK(m2.node_count() == 9);
    CHECK(m2.triangle_count() == 8);
    CHECK(m2.boundary_nodes.size() == 8);

    CHECK_THROWS_AS(build_unit_square_mesh(0), config_error);
}

TEST_CASE("triangles are positively oriented and tile the square") {
    const auto mesh = build_unit_square_mesh(13);
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double area = mesh.triangle_area(t);
        CHECK(area > 0.0);
        total += area;
    }
    CHECK(total == Approx(1.0).margin(1e-12));
}

TEST_CASE("1D grid geometry") {
    const auto grid = make_grid_1d(5.0, 500);
    CHECK(grid.h() == Approx(0.01));
    CHECK(grid.center(0) == Approx(0.005));
    for (int i = 1; i < grid.n_cells; ++i) CHECK(grid.center(i) > grid.center(i - 1));
    CHECK_THROWS_AS(make_grid_1d(5.0, 0), config_error);
    CHECK_THROWS_AS(make_grid_1d(-1.0, 10), config_error);
}

TEST_CASE("mesh export writes one record per entity") {
    const auto mesh = build_unit_square_mesh(2);
    std::ostringstream os;
    export_mesh_text(mesh, os);
    const std::string text = os.str();
    CHECK(text.find("nodes 9") != std::string::npos);
    CHECK(text.find("triangles 8") != std::string::npos);
}

TEST_CASE("mass matrix matches the quadrature oracle and sums to the measure") {
    const auto mesh = build_unit_square_mesh(2);
    const auto mass = assemble_mass_matrix(mesh);

    Matrix oracle = Matrix::Zero(mesh.node_count(), mesh.node_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                oracle(tri[i], tri[j]) += integrate_p1_product(
                    mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], i, j);
    }
    CHECK((mass.to_dense() - oracle).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(mass.sum() == Approx(1.0).margin(1e-12));
}

TEST_CASE("local mass block is (A/12)[[2,1,1],[1,2,1],[1,1,2]]") {
    const double area = 0.37;
    const Eigen::Matrix3d block = local_mass_block(area);
    Eigen::Matrix3d expected;
    expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    expected *= area / 12.0;
    CHECK((block - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vh_norm basics") {
    const auto mesh = build_unit_square_mesh(2);
    const auto mass = assemble_mass_matrix(mesh);

    CHECK(vh_norm(mass, Vector::Zero(9)) == 0.0);
    CHECK(vh_norm(mass, Vector::Ones(9)) == Approx(1.0).margin(1e-14));
    CHECK_THROWS_AS(vh_norm(mass, Vector::Zero(5)), config_error);

    // single interior hat function against the dense quadrature value
    Vector hat = Vector::Zero(9);
    hat[4] = 1.0;  // the one interior node
    double oracle = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (tri[i] == 4 && tri[j] == 4)
                    oracle += integrate_p1_product(mesh.nodes[tri[0]], mesh.nodes[tri[1]],
                                                   mesh.nodes[tri[2]], i, j);
    }
    CHECK(vh_norm(mass, hat) == Approx(std::sqrt(oracle)).epsilon(1e-12));
}

TEST_CASE("stiffness: constant nullspace, coefficient scaling, dense oracle") {
    const auto mesh = build_unit_square_mesh(2);

    SECTION("sigma = 0 gives zero interior row sums") {
        const auto a = assemble_darcy_stiffness(mesh, Vector::Zero(9));
        const Vector row_sums = a.apply(Vector::Ones(9));
        for (int i : mesh.interior_nodes()) CHECK(std::abs(row_sums[i]) < 1e-12);
    }

    SECTION("constant sigma factors out as exp(c)") {
        const auto a0 = assemble_darcy_stiffness(mesh, Vector::Zero(9));
        const auto a1 = assemble_darcy_stiffness(mesh, Vector::Constant(9, 1.0));
        CHECK((a1.to_dense() - std::exp(1.0) * a0.to_dense()).cwiseAbs().maxCoeff() < 1e-13);
    }

    SECTION("random sigma matches the dense element-loop oracle") {
        Rng rng(99);
        Vector sigma(9);
        for (int i = 0; i < 9; ++i) sigma[i] = rng.uniform(-1.0, 1.0);
        const auto a = assemble_darcy_stiffness(mesh, sigma);
        const Matrix oracle = dense_stiffness_oracle(mesh, sigma);
        CHECK((a.to_dense() - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("dimension mismatch is rejected") {
        CHECK_THROWS_AS(assemble_darcy_stiffness(mesh, Vector::Zero(4)), config_error);
    }
}

TEST_CASE("Pythagoras in the V_h inner product on M-orthogonalized pairs") {
    const auto mesh = build_unit_square_mesh(4);
    const auto mass = assemble_mass_matrix(mesh);
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Vector v(mesh.node_count()), w(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) {
            v[i] = rng.uniform(-1.0, 1.0);
            w[i] = rng.uniform(-1.0, 1.0);
        }
        // project out the v component so v^T M w = 0
        const Vector mv = mass.apply(v);
        w -= v * (w.dot(mv) / v.dot(mv));
        const double lhs = std::pow(vh_norm(mass, v), 2) + std::pow(vh_norm(mass, w), 2);
        const double rhs = std::pow(vh_norm(mass, v + w), 2);
        CHECK(lhs == Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("symmetric sparse storage merges duplicates deterministically") {
    using T = SymmetricSparseMatrix::Triplet;
    const auto m = SymmetricSparseMatrix::from_triplets(
        3, {T{1, 0, 2.0}, T{0, 1, 1.0}, T{2, 2, 5.0}, T{0, 0, 1.0}});
    CHECK(m.stored_count() == 3);  // (0,0), (0,1) merged, (2,2)
    Matrix d = m.to_dense();
    CHECK(d(0, 1) == 3.0);
    CHECK(d(1, 0) == 3.0);
    CHECK(d(0, 0) == 1.0);
    CHECK(d(2, 2) == 5.0);
    CHECK(m.lumped_diagonal()[0] == 4.0);
    CHECK(m.sum() == Approx(12.0));
}
