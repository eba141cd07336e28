// P1 finite elements: stiffness, mass and potential matrices, Dirichlet
// elimination and MatrixMarket export.
#pragma once

#include "mesh.hpp"
#include "potentials.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <ostream>
#include <set>
#include <vector>

namespace mixed_spectra {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

struct DofMap {
    std::vector<int> free_nodes;   // free index -> mesh node
    std::vector<int> node_to_free; // mesh node -> free index, -1 when constrained

    int n_free() const { return static_cast<int>(free_nodes.size()); }
    int n_constrained() const { return static_cast<int>(node_to_free.size() - free_nodes.size()); }
};

/// Constrains every node lying on a boundary facet whose polytope facet is in
/// `dirichlet_facets` (closure included: shared corners are constrained).
inline DofMap make_dofmap(const SimplicialMesh& m, const std::set<int>& dirichlet_facets) {
    std::vector<char> fixed(m.nodes.size(), 0);
    for (const auto& b : m.boundary)
        if (dirichlet_facets.count(b.facet_id))
            for (int i = 0; i < m.dim; ++i) fixed[b.nodes[i]] = 1;
    DofMap d;
    d.node_to_free.assign(m.nodes.size(), -1);
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (fixed[i]) continue;
        d.node_to_free[i] = static_cast<int>(d.free_nodes.size());
        d.free_nodes.push_back(static_cast<int>(i));
    }
    return d;
}

/// Dof map for the Gamma-tagged facets of the mesh.
inline DofMap make_dofmap(const SimplicialMesh& m) {
    std::set<int> g;
    for (const auto& b : m.boundary)
        if (b.tag == FacetTag::Gamma) g.insert(b.facet_id);
    return make_dofmap(m, g);
}

namespace detail {

inline double mesh_scale(const SimplicialMesh& m) {
    Point lo = m.nodes.front(), hi = m.nodes.front();
    for (const auto& x : m.nodes) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    return (hi - lo).norm();
}

struct ElementGeometry {
    double measure;
    Eigen::Matrix<double, 4, 3> grads; // rows: gradients of barycentric coordinates
};

inline ElementGeometry element_geometry(const SimplicialMesh& m, std::size_t e, double min_measure) {
    const auto& el = m.elements[e];
    const int d = m.dim;
    Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
    for (int i = 0; i < d; ++i) jac.col(i).head(d) = (m.nodes[el[i + 1]] - m.nodes[el[0]]).head(d);
    const double det = jac.topLeftCorner(d, d).determinant();
    ElementGeometry g;
    g.measure = std::abs(det) / (d == 2 ? 2.0 : 6.0);
    if (!(g.measure >= min_measure))
        throw DegenerateElement("element " + std::to_string(e) + " has measure " + std::to_string(g.measure));
    g.grads.setZero();
    const Eigen::MatrixXd inv = jac.topLeftCorner(d, d).inverse();
    for (int i = 0; i < d; ++i) g.grads.row(i + 1).head(d) = inv.row(i);
    for (int i = 1; i <= d; ++i) g.grads.row(0) -= g.grads.row(i);
    return g;
}

inline double min_measure(const SimplicialMesh& m) { return 1e-14 * std::pow(mesh_scale(m), m.dim); }

inline SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& t) {
    SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
}

} // namespace detail

/// Element stiffness |T| G G^T for the barycentric gradient matrix G.
inline MatX element_stiffness(const SimplicialMesh& m, std::size_t e) {
    const auto g = detail::element_geometry(m, e, 0.0);
    const int k = m.nodes_per_element();
    return g.measure * g.grads.topRows(k) * g.grads.topRows(k).transpose();
}

/// Exact P1 mass matrix of one simplex: |T| (1 + delta_ij) / ((d+1)(d+2)).
inline MatX element_mass(const SimplicialMesh& m, std::size_t e) {
    const auto g = detail::element_geometry(m, e, 0.0);
    const int k = m.nodes_per_element();
    MatX out = MatX::Constant(k, k, 1.0) + MatX::Identity(k, k);
    return out * (g.measure / ((m.dim + 1) * (m.dim + 2)));
}

inline SparseMatrix assemble_stiffness(const SimplicialMesh& m) {
    const double tiny = detail::min_measure(m);
    const int k = m.nodes_per_element();
    std::vector<Triplet> t;
    t.reserve(m.elements.size() * k * k);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const auto g = detail::element_geometry(m, e, tiny);
        const auto& el = m.elements[e];
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) t.emplace_back(el[i], el[j], g.measure * g.grads.row(i).dot(g.grads.row(j)));
    }
    return detail::from_triplets(m.nodes.size(), t);
}

inline SparseMatrix assemble_mass(const SimplicialMesh& m) {
    const double tiny = detail::min_measure(m);
    const int k = m.nodes_per_element();
    const double denom = (m.dim + 1) * (m.dim + 2);
    std::vector<Triplet> t;
    t.reserve(m.elements.size() * k * k);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const double w = detail::element_geometry(m, e, tiny).measure / denom;
        const auto& el = m.elements[e];
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) t.emplace_back(el[i], el[j], i == j ? 2.0 * w : w);
    }
    return detail::from_triplets(m.nodes.size(), t);
}

/// Degree-2 rule for the potential term: edge midpoints in 2D, the symmetric
/// 4-point rule in 3D. Returns the barycentric coordinates of the points; all
/// weights equal |T| / npoints.
inline std::vector<std::array<double, 4>> potential_rule(int dim) {
    if (dim == 2) return {{0.5, 0.5, 0.0, 0.0}, {0.0, 0.5, 0.5, 0.0}, {0.5, 0.0, 0.5, 0.0}};
    const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0, b = (5.0 - std::sqrt(5.0)) / 20.0;
    return {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
}

inline SparseMatrix assemble_potential(const SimplicialMesh& m, const PotentialSpec& V) {
    const double tiny = detail::min_measure(m);
    const int k = m.nodes_per_element();
    const auto rule = potential_rule(m.dim);
    std::vector<Triplet> t;
    t.reserve(m.elements.size() * k * k);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const double w = detail::element_geometry(m, e, tiny).measure / static_cast<double>(rule.size());
        const auto& el = m.elements[e];
        Eigen::Matrix4d loc = Eigen::Matrix4d::Zero();
        for (const auto& bary : rule) {
            Point x = Point::Zero();
            for (int i = 0; i < k; ++i) x += bary[i] * m.nodes[el[i]];
            const double v = evaluate(V, x) * w;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) loc(i, j) += v * bary[i] * bary[j];
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) t.emplace_back(el[i], el[j], loc(i, j));
    }
    return detail::from_triplets(m.nodes.size(), t);
}

/// Deletes rows and columns of constrained nodes.
inline SparseMatrix constrain(const SparseMatrix& a, const DofMap& d) {
    if (d.n_free() == 0) throw EmptyFreeSet("every node is constrained");
    std::vector<Triplet> t;
    t.reserve(a.nonZeros());
    for (int r = 0; r < d.n_free(); ++r) {
        const int row = d.free_nodes[r];
        for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
            const int c = d.node_to_free[it.col()];
            if (c >= 0) t.emplace_back(r, c, it.value());
        }
    }
    return detail::from_triplets(d.n_free(), t);
}

/// Full (unconstrained) matrices of one mesh; configurations differing only in
/// their Dirichlet facets share them.
struct SystemMatrices {
    SparseMatrix stiffness; // K + A_V
    SparseMatrix mass;
};

inline SystemMatrices assemble_system(const SimplicialMesh& m, const PotentialSpec& V) {
    SystemMatrices s;
    s.stiffness = assemble_stiffness(m);
    if (!(holds<ConstantPotential>(V) && std::get<ConstantPotential>(V.v).c == 0.0 && V.offset == 0.0))
        s.stiffness += assemble_potential(m, V);
    s.mass = assemble_mass(m);
    return s;
}

/// MatrixMarket coordinate real symmetric (lower triangle, 1-based).
inline void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
    std::size_t nnz = 0;
    for (int r = 0; r < a.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(a, r); it; ++it)
            if (it.col() <= r) ++nnz;
    os << "%%MatrixMarket matrix coordinate real symmetric\n" << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
    os.precision(17);
    for (int r = 0; r < a.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(a, r); it; ++it)
            if (it.col() <= r) os << r + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

} // namespace mixed_spectra
