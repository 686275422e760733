#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "romlab/errors.hpp"
#include "romlab/mesh.hpp"

namespace romlab {

// Symmetric sparse matrix stored as the upper triangle (r <= c) in sorted
// row-major coordinate form. Assembly goes through a triplet list that is
// stable-sorted and accumulated in insertion order, so identical inputs
// produce bit-identical values.
class SymmetricSparseMatrix {
public:
    struct Triplet {
        int row;
        int col;
        double value;
    };

    SymmetricSparseMatrix() = default;

    static SymmetricSparseMatrix from_triplets(int dim, std::vector<Triplet> triplets) {
        for (auto& t : triplets)
            if (t.row > t.col) std::swap(t.row, t.col);
        std::stable_sort(triplets.begin(), triplets.end(),
                         [](const Triplet& a, const Triplet& b) {
                             return a.row != b.row ? a.row < b.row : a.col < b.col;
                         });
        SymmetricSparseMatrix m;
        m.dim_ = dim;
        for (const auto& t : triplets) {
            if (!m.rows_.empty() && m.rows_.back() == t.row && m.cols_.back() == t.col) {
                m.values_.back() += t.value;
            } else {
                m.rows_.push_back(t.row);
                m.cols_.push_back(t.col);
                m.values_.push_back(t.value);
            }
        }
        return m;
    }

    static SymmetricSparseMatrix diagonal(const Vector& d) {
        SymmetricSparseMatrix m;
        m.dim_ = static_cast<int>(d.size());
        for (int i = 0; i < m.dim_; ++i) {
            m.rows_.push_back(i);
            m.cols_.push_back(i);
            m.values_.push_back(d[i]);
        }
        return m;
    }

    int dim() const { return dim_; }
    std::size_t stored_count() const { return values_.size(); }
    const std::vector<int>& stored_rows() const { return rows_; }
    const std::vector<int>& stored_cols() const { return cols_; }
    const std::vector<double>& stored_values() const { return values_; }

    Vector apply(const Vector& x) const {
        if (x.size() != dim_) throw config_error("SymmetricSparseMatrix::apply: dimension mismatch");
        Vector y = Vector::Zero(dim_);
        for (std::size_t k = 0; k < values_.size(); ++k) {
            const int r = rows_[k];
            const int c = cols_[k];
            y[r] += values_[k] * x[c];
            if (r != c) y[c] += values_[k] * x[r];
        }
        return y;
    }

    double quad_form(const Vector& x) const { return x.dot(apply(x)); }

    double sum() const {
        double total = 0.0;
        for (std::size_t k = 0; k < values_.size(); ++k)
            total += (rows_[k] == cols_[k]) ? values_[k] : 2.0 * values_[k];
        return total;
    }

    // row sums, used as the lumped-mass diagonal
    Vector lumped_diagonal() const {
        Vector d = Vector::Zero(dim_);
        for (std::size_t k = 0; k < values_.size(); ++k) {
            d[rows_[k]] += values_[k];
            if (rows_[k] != cols_[k]) d[cols_[k]] += values_[k];
        }
        return d;
    }

    Matrix to_dense() const {
        Matrix a = Matrix::Zero(dim_, dim_);
        for (std::size_t k = 0; k < values_.size(); ++k) {
            a(rows_[k], cols_[k]) = values_[k];
            a(cols_[k], rows_[k]) = values_[k];
        }
        return a;
    }

    Eigen::SparseMatrix<double> to_eigen() const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(2 * values_.size());
        for (std::size_t k = 0; k < values_.size(); ++k) {
            trip.emplace_back(rows_[k], cols_[k], values_[k]);
            if (rows_[k] != cols_[k]) trip.emplace_back(cols_[k], rows_[k], values_[k]);
        }
        Eigen::SparseMatrix<double> a(dim_, dim_);
        a.setFromTriplets(trip.begin(), trip.end());
        return a;
    }

private:
    int dim_ = 0;
    std::vector<int> rows_;
    std::vector<int> cols_;
    std::vector<double> values_;
};

// exact P1 element matrices -----------------------------------------------

// consistent mass block over one triangle: (A/12) [[2,1,1],[1,2,1],[1,1,2]]
inline Eigen::Matrix3d local_mass_block(double area) {
    Eigen::Matrix3d m;
    m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    return (area / 12.0) * m;
}

// stiffness block coeff * A * (grad l_i . grad l_j) with P1 barycentric
// gradients grad l_i = perp(edge opposite i) / (2A)
inline Eigen::Matrix3d local_stiffness_block(const Point2& a, const Point2& b,
                                             const Point2& c, double coeff) {
    const double area2 = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double gx[3] = {b.y - c.y, c.y - a.y, a.y - b.y};
    const double gy[3] = {c.x - b.x, a.x - c.x, b.x - a.x};
    Eigen::Matrix3d k;
    const double scale = coeff / (2.0 * area2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            k(i, j) = scale * (gx[i] * gx[j] + gy[i] * gy[j]);
    return k;
}

inline SymmetricSparseMatrix assemble_mass_matrix(const StructuredTriMesh& mesh) {
    std::vector<SymmetricSparseMatrix::Triplet> trip;
    trip.reserve(mesh.triangles.size() * 6);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Matrix3d m = local_mass_block(mesh.triangle_area(t));
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                int r = tri[i], c = tri[j];
                if (r > c) std::swap(r, c);
                trip.push_back({r, c, m(i, j)});
            }
    }
    return SymmetricSparseMatrix::from_triplets(mesh.node_count(), trip);
}

// Stiffness of -div(exp(sigma) grad u) with the coefficient frozen per
// element at exp(mean of the three nodal values), i.e. the barycenter value
// of the P1 interpolant.
inline SymmetricSparseMatrix assemble_darcy_stiffness(const StructuredTriMesh& mesh,
                                                      const Vector& sigma) {
    if (sigma.size() != mesh.node_count())
        throw config_error("assemble_darcy_stiffness: sigma length does not match mesh");
    std::vector<SymmetricSparseMatrix::Triplet> trip;
    trip.reserve(mesh.triangles.size() * 6);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double sbar = (sigma[tri[0]] + sigma[tri[1]] + sigma[tri[2]]) / 3.0;
        const Eigen::Matrix3d k = local_stiffness_block(
            mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], std::exp(sbar));
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                int r = tri[i], c = tri[j];
                if (r > c) std::swap(r, c);
                trip.push_back({r, c, k(i, j)});
            }
    }
    return SymmetricSparseMatrix::from_triplets(mesh.node_count(), trip);
}

// generic variable-coefficient P1 stiffness, coefficient given per element
inline SymmetricSparseMatrix assemble_stiffness_with_coeff(
    const StructuredTriMesh& mesh, const std::vector<double>& element_coeff) {
    if (static_cast<int>(element_coeff.size()) != mesh.triangle_count())
        throw config_error("assemble_stiffness_with_coeff: coefficient count mismatch");
    std::vector<SymmetricSparseMatrix::Triplet> trip;
    trip.reserve(mesh.triangles.size() * 6);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Matrix3d k = local_stiffness_block(
            mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], element_coeff[t]);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                int r = tri[i], c = tri[j];
                if (r > c) std::swap(r, c);
                trip.push_back({r, c, k(i, j)});
            }
    }
    return SymmetricSparseMatrix::from_triplets(mesh.node_count(), trip);
}

inline double vh_norm(const SymmetricSparseMatrix& mass, const Vector& v) {
    if (v.size() != mass.dim()) throw config_error("vh_norm: dimension mismatch");
    const double q = mass.quad_form(v);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

}  // namespace romlab
