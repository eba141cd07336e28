// Tagged simplicial meshes of convex polytopes with uniform refinement.
#pragma once

#include "geometry.hpp"

#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>
#include <vector>

namespace mixed_spectra {

struct BoundaryFacet {
    std::array<int, 3> nodes{-1, -1, -1}; // 2 used in 2D
    int facet_id = -1;                    // polytope facet containing it
    FacetTag tag = FacetTag::Neumann;
};

struct SimplicialMesh {
    int dim = 2;
    std::vector<Point> nodes;
    std::vector<std::array<int, 4>> elements; // 3 used in 2D
    std::vector<BoundaryFacet> boundary;
    int level = 0;

    int nodes_per_element() const { return dim + 1; }
    int nodes_per_facet() const { return dim; }
};

/// Signed area (2D) or volume (3D) of element e.
inline double element_volume(const SimplicialMesh& m, std::size_t e) {
    const auto& el = m.elements[e];
    const Point& a = m.nodes[el[0]];
    if (m.dim == 2) {
        const Vec3 u = m.nodes[el[1]] - a, v = m.nodes[el[2]] - a;
        return 0.5 * (u.x() * v.y() - u.y() * v.x());
    }
    const Vec3 u = m.nodes[el[1]] - a, v = m.nodes[el[2]] - a, w = m.nodes[el[3]] - a;
    return u.dot(v.cross(w)) / 6.0;
}

inline double mesh_volume(const SimplicialMesh& m) {
    double v = 0.0;
    for (std::size_t e = 0; e < m.elements.size(); ++e) v += element_volume(m, e);
    return v;
}

/// Re-derives boundary facet tags from a partition.
inline void retag(SimplicialMesh& m, const BoundaryPartition& part) {
    for (auto& b : m.boundary) b.tag = tag_of(part, b.facet_id);
}

namespace detail {
inline void orient_positive(SimplicialMesh& m, std::size_t e) {
    if (element_volume(m, e) < 0.0) std::swap(m.elements[e][0], m.elements[e][1]);
}
} // namespace detail

/// Level-0 mesh: fan from the vertex centroid. In 2D one triangle per edge;
/// in 3D each facet is fanned from its first vertex and each facet triangle
/// is joined to the centroid.
inline SimplicialMesh triangulate(const ConvexPolytope& p, const BoundaryPartition& part = {},
                                  const Tolerances& tol = {}) {
    const ConvexityReport cr = check_convex(p, tol);
    if (!cr.ok)
        throw MalformedPolytope("polytope is not convex (vertex " + std::to_string(cr.violating_vertex) +
                                " outside facet " + std::to_string(cr.violating_facet) + ")");
    SimplicialMesh m;
    m.dim = p.dim;
    m.nodes = p.vertices;
    const int c = static_cast<int>(m.nodes.size());
    m.nodes.push_back(p.centroid());
    for (int f = 0; f < static_cast<int>(p.facets.size()); ++f) {
        const auto& fv = p.facets[f];
        if (p.dim == 2) {
            m.elements.push_back({fv[0], fv[1], c, -1});
            m.boundary.push_back({{fv[0], fv[1], -1}, f, tag_of(part, f)});
        } else {
            for (std::size_t i = 1; i + 1 < fv.size(); ++i) {
                m.elements.push_back({fv[0], fv[i], fv[i + 1], c});
                m.boundary.push_back({{fv[0], fv[i], fv[i + 1]}, f, tag_of(part, f)});
            }
        }
        for (std::size_t e = m.elements.size() - (p.dim == 2 ? 1 : fv.size() - 2); e < m.elements.size(); ++e)
            detail::orient_positive(m, e);
    }
    return m;
}

namespace detail {

struct EdgeKey {
    int a, b;
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};
struct EdgeHash {
    std::size_t operator()(const EdgeKey& k) const {
        return std::hash<long long>()((static_cast<long long>(k.a) << 32) ^ static_cast<long long>(k.b));
    }
};

class MidpointTable {
public:
    explicit MidpointTable(std::vector<Point>& nodes) : nodes_(nodes) {}
    int operator()(int u, int v) {
        const EdgeKey k{std::min(u, v), std::max(u, v)};
        auto it = map_.find(k);
        if (it != map_.end()) return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(0.5 * (nodes_[u] + nodes_[v]));
        map_.emplace(k, id);
        return id;
    }

private:
    std::vector<Point>& nodes_;
    std::unordered_map<EdgeKey, int, EdgeHash> map_;
};

} // namespace detail

/// Uniform refinement: triangles split into 4 by edge midpoints, tetrahedra
/// into 8 (four corner tets plus the inner octahedron cut along its shortest
/// diagonal; ties go to the diagonal with the lowest node index).
inline SimplicialMesh refine(const SimplicialMesh& in) {
    SimplicialMesh out;
    out.dim = in.dim;
    out.level = in.level + 1;
    out.nodes = in.nodes;
    detail::MidpointTable mid(out.nodes);
    out.elements.reserve(in.elements.size() * (in.dim == 2 ? 4 : 8));
    for (const auto& el : in.elements) {
        if (in.dim == 2) {
            const int a = el[0], b = el[1], c = el[2];
            const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
            out.elements.push_back({a, ab, ca, -1});
            out.elements.push_back({ab, b, bc, -1});
            out.elements.push_back({ca, bc, c, -1});
            out.elements.push_back({ab, bc, ca, -1});
            continue;
        }
        const int n0 = el[0], n1 = el[1], n2 = el[2], n3 = el[3];
        const int m01 = mid(n0, n1), m02 = mid(n0, n2), m03 = mid(n0, n3);
        const int m12 = mid(n1, n2), m13 = mid(n1, n3), m23 = mid(n2, n3);
        const std::size_t first = out.elements.size();
        out.elements.push_back({n0, m01, m02, m03});
        out.elements.push_back({m01, n1, m12, m13});
        out.elements.push_back({m02, m12, n2, m23});
        out.elements.push_back({m03, m13, m23, n3});
        struct Diagonal {
            int p, q;
            std::array<int, 4> ring;
        };
        const std::array<Diagonal, 3> diags{{{m01, m23, {m02, m03, m13, m12}},
                                             {m02, m13, {m01, m03, m23, m12}},
                                             {m03, m12, {m01, m02, m23, m13}}}};
        int best = 0;
        double best_len = 1e300;
        int best_low = 1 << 30;
        for (int d = 0; d < 3; ++d) {
            const double len = (out.nodes[diags[d].p] - out.nodes[diags[d].q]).norm();
            const int low = std::min(diags[d].p, diags[d].q);
            const double eps = 1e-12 * best_len;
            if (len < best_len - eps || (std::abs(len - best_len) <= eps && low < best_low)) {
                best = d;
                best_len = len;
                best_low = low;
            }
        }
        const Diagonal& dg = diags[best];
        for (int i = 0; i < 4; ++i) out.elements.push_back({dg.p, dg.q, dg.ring[i], dg.ring[(i + 1) % 4]});
        for (std::size_t e = first; e < out.elements.size(); ++e) detail::orient_positive(out, e);
    }
    out.boundary.reserve(in.boundary.size() * (in.dim == 2 ? 2 : 4));
    for (const auto& bf : in.boundary) {
        if (in.dim == 2) {
            const int a = bf.nodes[0], b = bf.nodes[1], ab = mid(a, b);
            out.boundary.push_back({{a, ab, -1}, bf.facet_id, bf.tag});
            out.boundary.push_back({{ab, b, -1}, bf.facet_id, bf.tag});
        } else {
            const int a = bf.nodes[0], b = bf.nodes[1], c = bf.nodes[2];
            const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
            out.boundary.push_back({{a, ab, ca}, bf.facet_id, bf.tag});
            out.boundary.push_back({{ab, b, bc}, bf.facet_id, bf.tag});
            out.boundary.push_back({{ca, bc, c}, bf.facet_id, bf.tag});
            out.boundary.push_back({{ab, bc, ca}, bf.facet_id, bf.tag});
        }
    }
    return out;
}

inline SimplicialMesh refine_times(SimplicialMesh m, int times) {
    for (int i = 0; i < times; ++i) m = refine(m);
    return m;
}

/// Largest element diameter.
inline double mesh_size(const SimplicialMesh& m) {
    double h = 0.0;
    const int k = m.nodes_per_element();
    for (const auto& el : m.elements) {
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) h = std::max(h, (m.nodes[el[i]] - m.nodes[el[j]]).norm());
    }
    return h;
}

/// Smallest triangle angle (2D) or smallest dihedral angle (3D), radians.
inline double min_angle(const SimplicialMesh& m) {
    double best = kPi;
    for (const auto& el : m.elements) {
        if (m.dim == 2) {
            for (int i = 0; i < 3; ++i) {
                const Vec3 u = m.nodes[el[(i + 1) % 3]] - m.nodes[el[i]];
                const Vec3 v = m.nodes[el[(i + 2) % 3]] - m.nodes[el[i]];
                best = std::min(best, std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0)));
            }
            continue;
        }
        // dihedral angle along edge (i,j) from the normals of the two faces containing it
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                int k = -1, l = -1;
                for (int t = 0; t < 4; ++t) {
                    if (t == i || t == j) continue;
                    (k < 0 ? k : l) = t;
                }
                const Point &a = m.nodes[el[i]], &b = m.nodes[el[j]], &c = m.nodes[el[k]], &d = m.nodes[el[l]];
                const Vec3 e = (b - a).normalized();
                Vec3 u = c - a, v = d - a;
                u -= e * e.dot(u);
                v -= e * e.dot(v);
                best = std::min(best, std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0)));
            }
        }
    }
    return best;
}

struct MeshCheck {
    bool positive = true;
    bool conforming = true;
    bool tags_consistent = true;
    double volume = 0.0;
    double min_element_volume = 1e300;
};

/// Orientation, conformity (interior facets shared by 2 elements, boundary
/// facets by 1 and listed) and facet-plane consistency of the boundary list.
inline MeshCheck check_mesh(const SimplicialMesh& m, const ConvexPolytope& p) {
    MeshCheck r;
    std::map<std::array<int, 3>, int> count;
    const int k = m.nodes_per_element();
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const double v = element_volume(m, e);
        r.volume += v;
        r.min_element_volume = std::min(r.min_element_volume, v);
        if (!(v > 0.0)) r.positive = false;
        const auto& el = m.elements[e];
        for (int skip = 0; skip < k; ++skip) {
            std::array<int, 3> f{-1, -1, -1};
            int t = 0;
            for (int i = 0; i < k; ++i)
                if (i != skip) f[t++] = el[i];
            std::sort(f.begin(), f.begin() + t);
            ++count[f];
        }
    }
    std::map<std::array<int, 3>, int> bset;
    for (const auto& b : m.boundary) {
        std::array<int, 3> f = b.nodes;
        std::sort(f.begin(), f.begin() + m.dim);
        ++bset[f];
    }
    for (const auto& [f, c] : count) {
        const bool on_boundary = bset.count(f) > 0;
        if (c == 1 && !on_boundary) r.conforming = false;
        if (c == 2 && on_boundary) r.conforming = false;
        if (c > 2) r.conforming = false;
    }
    for (const auto& [f, c] : bset)
        if (c != 1 || count[f] != 1) r.conforming = false;
    const double s = p.scale();
    for (const auto& b : m.boundary) {
        const FacetFrame fr = facet_frame(p, b.facet_id);
        for (int i = 0; i < m.dim; ++i)
            if (std::abs(fr.normal.dot(m.nodes[b.nodes[i]] - fr.anchor)) > 1e-10 * s) r.tags_consistent = false;
    }
    return r;
}

/// Relabels nodes: new index of old node i is perm[i].
inline SimplicialMesh permute_nodes(const SimplicialMesh& m, const std::vector<int>& perm) {
    SimplicialMesh out = m;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) out.nodes[perm[i]] = m.nodes[i];
    for (auto& el : out.elements)
        for (int i = 0; i < m.nodes_per_element(); ++i) el[i] = perm[el[i]];
    for (auto& b : out.boundary)
        for (int i = 0; i < m.dim; ++i) b.nodes[i] = perm[b.nodes[i]];
    return out;
}

/// Legacy ASCII VTK: elements and boundary facets as cells, with a "tag"
/// cell array (-1 interior element, 0 gamma, 1 gamma_prime, 2 neumann) and
/// the polytope "facet" index (-1 for elements).
inline void write_vtk(std::ostream& os, const SimplicialMesh& m) {
    os << "# vtk DataFile Version 3.0\nmixed_spectra mesh level " << m.level << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << m.nodes.size() << " double\n";
    os.precision(17);
    for (const auto& x : m.nodes) os << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
    const std::size_t ne = m.elements.size(), nb = m.boundary.size();
    const int k = m.nodes_per_element(), kb = m.nodes_per_facet();
    os << "CELLS " << ne + nb << ' ' << ne * (k + 1) + nb * (kb + 1) << '\n';
    for (const auto& el : m.elements) {
        os << k;
        for (int i = 0; i < k; ++i) os << ' ' << el[i];
        os << '\n';
    }
    for (const auto& b : m.boundary) {
        os << kb;
        for (int i = 0; i < kb; ++i) os << ' ' << b.nodes[i];
        os << '\n';
    }
    os << "CELL_TYPES " << ne + nb << '\n';
    const int elem_type = m.dim == 2 ? 5 : 10, facet_type = m.dim == 2 ? 3 : 5;
    for (std::size_t i = 0; i < ne; ++i) os << elem_type << '\n';
    for (std::size_t i = 0; i < nb; ++i) os << facet_type << '\n';
    os << "CELL_DATA " << ne + nb << "\nSCALARS tag int 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < ne; ++i) os << "-1\n";
    for (const auto& b : m.boundary) os << static_cast<int>(b.tag) << '\n';
    os << "SCALARS facet int 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < ne; ++i) os << "-1\n";
    for (const auto& b : m.boundary) os << b.facet_id << '\n';
}

} // namespace mixed_spectra
