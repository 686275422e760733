#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "romlab/errors.hpp"

namespace romlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// P1 triangulation of the unit square: (n_div+1)^2 nodes on a row-major
// lattice, every grid cell split along the lower-left to upper-right
// diagonal. The split is fixed so connectivity and assembly order are
// deterministic.
struct StructuredTriMesh {
    int n_div = 0;
    std::vector<Point2> nodes;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<int> boundary_nodes;            // ascending indices
    std::vector<bool> is_boundary;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    double h() const { return 1.0 / n_div; }

    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        const Point2& a = nodes[tri[0]];
        const Point2& b = nodes[tri[1]];
        const Point2& c = nodes[tri[2]];
        return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    }

    std::vector<int> interior_nodes() const {
        std::vector<int> out;
        out.reserve(nodes.size() - boundary_nodes.size());
        for (int i = 0; i < node_count(); ++i)
            if (!is_boundary[i]) out.push_back(i);
        return out;
    }
};

inline StructuredTriMesh build_unit_square_mesh(int n_div) {
    if (n_div < 1) throw config_error("build_unit_square_mesh: n_div must be >= 1");

    StructuredTriMesh mesh;
    mesh.n_div = n_div;
    const int nn = n_div + 1;
    const double h = 1.0 / n_div;

    mesh.nodes.reserve(static_cast<std::size_t>(nn) * nn);
    mesh.is_boundary.assign(static_cast<std::size_t>(nn) * nn, false);
    for (int j = 0; j < nn; ++j) {
        for (int i = 0; i < nn; ++i) {
            mesh.nodes.push_back({i * h, j * h});
            if (i == 0 || j == 0 || i == n_div || j == n_div)
                mesh.is_boundary[static_cast<std::size_t>(j) * nn + i] = true;
        }
    }
    for (int i = 0; i < nn * nn; ++i)
        if (mesh.is_boundary[i]) mesh.boundary_nodes.push_back(i);

    mesh.triangles.reserve(2 * static_cast<std::size_t>(n_div) * n_div);
    for (int j = 0; j < n_div; ++j) {
        for (int i = 0; i < n_div; ++i) {
            const int ll = j * nn + i;
            const int lr = ll + 1;
            const int ul = ll + nn;
            const int ur = ul + 1;
            mesh.triangles.push_back({ll, lr, ur});
            mesh.triangles.push_back({ll, ur, ul});
        }
    }
    return mesh;
}

// debugging aid: one record per line, nodes then elements
inline void export_mesh_text(const StructuredTriMesh& mesh, std::ostream& os) {
    os << "nodes " << mesh.node_count() << "\n";
    for (int i = 0; i < mesh.node_count(); ++i)
        os << i << " " << mesh.nodes[i].x << " " << mesh.nodes[i].y << " "
           << (mesh.is_boundary[i] ? 1 : 0) << "\n";
    os << "triangles " << mesh.triangle_count() << "\n";
    for (int t = 0; t < mesh.triangle_count(); ++t)
        os << t << " " << mesh.triangles[t][0] << " " << mesh.triangles[t][1]
           << " " << mesh.triangles[t][2] << "\n";
}

// 1D finite volume grid on (0, L)
struct UniformGrid1D {
    double length = 1.0;
    int n_cells = 0;

    double h() const { return length / n_cells; }
    double center(int i) const { return (i + 0.5) * h(); }

    std::vector<double> centers() const {
        std::vector<double> c(n_cells);
        for (int i = 0; i < n_cells; ++i) c[i] = center(i);
        return c;
    }
};

inline UniformGrid1D make_grid_1d(double length, int n_cells) {
    if (n_cells < 1) throw config_error("make_grid_1d: n_cells must be >= 1");
    if (!(length > 0.0)) throw config_error("make_grid_1d: length must be positive");
    return UniformGrid1D{length, n_cells};
}

}  // namespace romlab
