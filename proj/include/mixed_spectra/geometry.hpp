// Convex polygons and polyhedra, boundary partitions and per-facet frames.
#pragma once

#include "linalg.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mixed_spectra {

/// A convex polytope in 2D or 3D given by vertices and oriented facets.
///
/// In 2D each facet is an edge {a, b}; the facets form one cycle in positive
/// (counter-clockwise) orientation, so facets[i][1] == facets[i+1][0].
/// In 3D each facet is a planar vertex cycle ordered so that the right-hand
/// rule gives the outward normal.
struct ConvexPolytope {
    int dim = 2;
    std::vector<Point> vertices;
    std::vector<std::vector<int>> facets;

    std::size_t num_facets() const { return facets.size(); }

    Point centroid() const {
        Point c = Point::Zero();
        for (const auto& v : vertices) c += v;
        return c / static_cast<double>(vertices.size());
    }

    /// Bounding-box diagonal; all relative tolerances are measured against it.
    double scale() const {
        Point lo = vertices.front(), hi = vertices.front();
        for (const auto& v : vertices) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        return (hi - lo).norm();
    }
};

/// Dirichlet portions of the boundary, by facet index. Facets in neither set
/// carry a Neumann condition.
struct BoundaryPartition {
    std::set<int> gamma;
    std::set<int> gamma_prime;
};

enum class FacetTag { Gamma = 0, GammaPrime = 1, Neumann = 2 };

inline const char* to_string(FacetTag t) {
    switch (t) {
    case FacetTag::Gamma: return "gamma";
    case FacetTag::GammaPrime: return "gamma_prime";
    case FacetTag::Neumann: return "neumann";
    }
    return "?";
}

inline FacetTag tag_of(const BoundaryPartition& part, int facet) {
    if (part.gamma.count(facet)) return FacetTag::Gamma;
    if (part.gamma_prime.count(facet)) return FacetTag::GammaPrime;
    return FacetTag::Neumann;
}

struct FacetFrame {
    Vec3 normal = Vec3::Zero();
    Vec3 tangent = Vec3::Zero(); // 2D only; zero in 3D
    double measure = 0.0;        // edge length or facet area
    double curvature = 0.0;      // identically zero on straight facets
    Point anchor = Point::Zero(); // a point on the facet plane
};

struct ConvexityReport {
    bool ok = true;
    double worst_violation = 0.0; // largest signed distance outside a facet plane
    int violating_vertex = -1;
    int violating_facet = -1;
};

struct CornerAngle {
    int corner = -1; // vertex index
    double angle = 0.0;
};

struct WalkEdge {
    int facet = -1;
    int start_corner = -1;
    int end_corner = -1;
};

namespace detail {

inline Vec3 newell_normal(const ConvexPolytope& p, const std::vector<int>& f) {
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Point& a = p.vertices[f[i]];
        const Point& b = p.vertices[f[(i + 1) % f.size()]];
        n += a.cross(b);
    }
    return 0.5 * n; // |n| is the facet area
}

inline Point facet_centroid(const ConvexPolytope& p, const std::vector<int>& f) {
    Point c = Point::Zero();
    for (int v : f) c += p.vertices[v];
    return c / static_cast<double>(f.size());
}

} // namespace detail

/// Outward unit normal, positively oriented tangent (2D) and measure.
inline FacetFrame facet_frame(const ConvexPolytope& p, int facet) {
    const auto& f = p.facets.at(facet);
    FacetFrame fr;
    if (p.dim == 2) {
        const Vec3 e = p.vertices[f[1]] - p.vertices[f[0]];
        fr.measure = e.norm();
        fr.tangent = e / fr.measure;
        fr.normal = Vec3(fr.tangent.y(), -fr.tangent.x(), 0.0);
        fr.anchor = p.vertices[f[0]];
    } else {
        const Vec3 n = detail::newell_normal(p, f);
        fr.measure = n.norm();
        fr.normal = n / fr.measure;
        fr.anchor = detail::facet_centroid(p, f);
    }
    return fr;
}

/// Signed area (2D) or volume (3D).
inline double volume(const ConvexPolytope& p) {
    if (p.dim == 2) {
        double a = 0.0;
        for (const auto& f : p.facets) {
            const Point& u = p.vertices[f[0]];
            const Point& v = p.vertices[f[1]];
            a += u.x() * v.y() - v.x() * u.y();
        }
        return 0.5 * a;
    }
    const Point c = p.centroid();
    double vol = 0.0;
    for (const auto& f : p.facets) {
        for (std::size_t i = 1; i + 1 < f.size(); ++i) {
            const Vec3 a = p.vertices[f[0]] - c;
            const Vec3 b = p.vertices[f[i]] - c;
            const Vec3 d = p.vertices[f[i + 1]] - c;
            vol += a.dot(b.cross(d)) / 6.0;
        }
    }
    return vol;
}

/// Structural checks: orientation, non-degeneracy, planarity, closed surface.
/// Throws MalformedPolytope on failure. Convexity is reported separately by
/// check_convex.
inline void validate(const ConvexPolytope& p, const Tolerances& tol = {}) {
    if (p.dim != 2 && p.dim != 3) throw MalformedPolytope("dim must be 2 or 3");
    if (p.vertices.size() < static_cast<std::size_t>(p.dim + 1))
        throw MalformedPolytope("too few vertices");
    if (p.facets.size() < static_cast<std::size_t>(p.dim + 1))
        throw MalformedPolytope("too few facets");
    const double s = p.scale();
    if (!(s > 0.0)) throw MalformedPolytope("zero extent");
    const int nv = static_cast<int>(p.vertices.size());
    for (const auto& f : p.facets) {
        for (int v : f) {
            if (v < 0 || v >= nv) throw MalformedPolytope("facet references unknown vertex");
        }
    }
    if (p.dim == 2) {
        for (const auto& v : p.vertices) {
            if (v.z() != 0.0) throw MalformedPolytope("planar vertex with nonzero z");
        }
        const std::size_t n = p.facets.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& f = p.facets[i];
            if (f.size() != 2) throw MalformedPolytope("2D facet must have two vertices");
            if (p.facets[(i + 1) % n][0] != f[1])
                throw MalformedPolytope("edges do not form an ordered cycle");
            if ((p.vertices[f[1]] - p.vertices[f[0]]).norm() <= tol.degenerate_area * s)
                throw MalformedPolytope("zero-length edge " + std::to_string(i));
        }
        if (!(volume(p) > tol.degenerate_area * s * s))
            throw MalformedPolytope("edge cycle must have positive signed area");
        return;
    }
    std::map<std::pair<int, int>, int> directed;
    const Point c = p.centroid();
    for (std::size_t fi = 0; fi < p.facets.size(); ++fi) {
        const auto& f = p.facets[fi];
        if (f.size() < 3) throw MalformedPolytope("3D facet needs at least 3 vertices");
        const Vec3 n = detail::newell_normal(p, f);
        if (!(n.norm() > tol.degenerate_area * s * s))
            throw MalformedPolytope("degenerate facet " + std::to_string(fi));
        const Vec3 nu = n.normalized();
        const Point fc = detail::facet_centroid(p, f);
        for (int v : f) {
            if (std::abs(nu.dot(p.vertices[v] - fc)) > tol.planarity * s)
                throw MalformedPolytope("non-planar facet " + std::to_string(fi));
        }
        if (!(nu.dot(fc - c) > 0.0))
            throw MalformedPolytope("facet " + std::to_string(fi) + " normal points inward");
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto e = std::make_pair(f[i], f[(i + 1) % f.size()]);
            if (!directed.emplace(e, static_cast<int>(fi)).second)
                throw MalformedPolytope("edge used twice with the same orientation");
        }
    }
    for (const auto& [e, fi] : directed) {
        if (!directed.count({e.second, e.first}))
            throw MalformedPolytope("surface is not closed (edge shared by one facet)");
    }
}

/// Every vertex must lie on the inner side of every facet plane.
inline ConvexityReport check_convex(const ConvexPolytope& p, const Tolerances& tol = {}) {
    validate(p, tol);
    ConvexityReport rep;
    const double s = p.scale();
    for (int fi = 0; fi < static_cast<int>(p.facets.size()); ++fi) {
        const FacetFrame fr = facet_frame(p, fi);
        for (int v = 0; v < static_cast<int>(p.vertices.size()); ++v) {
            const double d = fr.normal.dot(p.vertices[v] - fr.anchor);
            if (d > rep.worst_violation) {
                rep.worst_violation = d;
                rep.violating_vertex = v;
                rep.violating_facet = fi;
            }
        }
    }
    rep.ok = rep.worst_violation <= tol.convexity * s;
    if (!rep.ok && p.dim == 2) {
        // name the reflex corner rather than the farthest outlying vertex
        const std::size_t n = p.facets.size();
        double worst_turn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 a = p.vertices[p.facets[(i + n - 1) % n][0]], b = p.vertices[p.facets[i][0]],
                       c = p.vertices[p.facets[i][1]];
            const double turn = (b - a).x() * (c - b).y() - (b - a).y() * (c - b).x();
            if (turn < worst_turn) {
                worst_turn = turn;
                rep.violating_vertex = p.facets[i][0];
            }
        }
    }
    if (rep.ok) {
        rep.violating_vertex = -1;
        rep.violating_facet = -1;
    }
    return rep;
}

/// Interior angle at each corner; corner i is the start vertex of facet i.
inline std::vector<CornerAngle> interior_angles(const ConvexPolytope& p) {
    if (p.dim != 2) throw MalformedPolytope("interior_angles needs a polygon");
    const std::size_t n = p.facets.size();
    std::vector<CornerAngle> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& prev = p.facets[(i + n - 1) % n];
        const auto& next = p.facets[i];
        const Point& v = p.vertices[next[0]];
        const Vec3 a = p.vertices[prev[0]] - v;
        const Vec3 b = p.vertices[next[1]] - v;
        // counter-clockwise sweep from b to a
        double ang = std::atan2(b.x() * a.y() - b.y() * a.x(), a.dot(b));
        if (ang < 0.0) ang += 2.0 * kPi;
        out.push_back({next[0], ang});
    }
    return out;
}

/// Angle inside the polytope between two facets that share a corner (2D) or
/// an edge (3D): pi minus the angle between their outward normals.
inline double interior_angle_between(const ConvexPolytope& p, int f, int g) {
    const double c = std::clamp(facet_frame(p, f).normal.dot(facet_frame(p, g).normal), -1.0, 1.0);
    return kPi - std::acos(c);
}

/// Pairs of facets sharing a polyhedron edge, keyed by the sorted vertex pair.
struct FacetEdge {
    int a = -1, b = -1;         // vertex indices
    int facet_left = -1, facet_right = -1;
};

inline std::vector<FacetEdge> facet_edges(const ConvexPolytope& p) {
    std::vector<FacetEdge> out;
    if (p.dim == 2) {
        // corner between facet i and its successor
        const int n = static_cast<int>(p.facets.size());
        for (int i = 0; i < n; ++i) out.push_back({p.facets[i][1], p.facets[i][1], i, (i + 1) % n});
        return out;
    }
    std::map<std::pair<int, int>, FacetEdge> edges;
    for (int fi = 0; fi < static_cast<int>(p.facets.size()); ++fi) {
        const auto& f = p.facets[fi];
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto key = std::minmax(f[i], f[(i + 1) % f.size()]);
            auto& e = edges[{key.first, key.second}];
            e.a = key.first;
            e.b = key.second;
            (e.facet_left < 0 ? e.facet_left : e.facet_right) = fi;
        }
    }
    for (auto& [k, e] : edges) out.push_back(e);
    return out;
}

/// Orthonormal basis (columns, d x k) of the directions tangential to every
/// facet in gamma.
inline MatX tangent_space_S(const ConvexPolytope& p, const std::set<int>& gamma,
                            const Tolerances& tol = {}) {
    if (gamma.empty()) throw InvalidPartition("gamma must be nonempty");
    MatX rows(static_cast<Eigen::Index>(gamma.size()), p.dim);
    Eigen::Index r = 0;
    for (int f : gamma) rows.row(r++) = facet_frame(p, f).normal.head(p.dim).transpose();
    return null_space(rows, p.dim, tol.null_space).basis;
}

/// True when the facets in `set` are cyclically contiguous in the edge cycle.
inline bool is_contiguous(const ConvexPolytope& p, const std::set<int>& set) {
    const int n = static_cast<int>(p.facets.size());
    if (set.empty() || static_cast<int>(set.size()) == n) return true;
    int starts = 0;
    for (int f : set) {
        if (!set.count((f + n - 1) % n)) ++starts;
    }
    return starts == 1;
}

/// Edges of the boundary outside gamma, walked in positive orientation from
/// the end point of gamma to its start point.
inline std::vector<WalkEdge> boundary_walk(const ConvexPolytope& p, const std::set<int>& gamma) {
    if (p.dim != 2) throw MalformedPolytope("boundary_walk needs a polygon");
    const int n = static_cast<int>(p.facets.size());
    if (!is_contiguous(p, gamma)) throw GammaNotConnected("gamma edges are not contiguous");
    std::vector<WalkEdge> out;
    if (static_cast<int>(gamma.size()) == n) return out;
    int start = 0;
    if (!gamma.empty()) {
        // first edge after the last gamma edge
        for (int f : gamma) {
            if (!gamma.count((f + 1) % n)) start = (f + 1) % n;
        }
    }
    for (int k = 0; k < n; ++k) {
        const int f = (start + k) % n;
        if (gamma.count(f)) break;
        out.push_back({f, p.facets[f][0], p.facets[f][1]});
    }
    return out;
}

/// True when all facets of `set` lie in one common line/plane.
inline bool facets_coplanar(const ConvexPolytope& p, const std::set<int>& set,
                            double tol_rel = 1e-10) {
    if (set.empty()) return false;
    const FacetFrame ref = facet_frame(p, *set.begin());
    const double s = p.scale();
    for (int f : set) {
        for (int v : p.facets[f]) {
            if (std::abs(ref.normal.dot(p.vertices[v] - ref.anchor)) > tol_rel * s) return false;
        }
    }
    return true;
}

/// Validates a partition against a polytope. `exhaustive` demands that the
/// two Dirichlet sets cover every facet.
inline void validate_partition(const ConvexPolytope& p, const BoundaryPartition& part,
                               bool exhaustive = false) {
    const int n = static_cast<int>(p.facets.size());
    if (part.gamma.empty()) throw InvalidPartition("gamma must be nonempty");
    for (int f : part.gamma)
        if (f < 0 || f >= n) throw InvalidPartition("gamma facet index out of range");
    for (int f : part.gamma_prime) {
        if (f < 0 || f >= n) throw InvalidPartition("gamma_prime facet index out of range");
        if (part.gamma.count(f)) throw InvalidPartition("gamma and gamma_prime intersect");
    }
    if (exhaustive && static_cast<int>(part.gamma.size() + part.gamma_prime.size()) != n)
        throw PartitionNotExhaustive("gamma and gamma_prime do not cover the boundary");
}

// ---------------------------------------------------------------------------
// Builtin domains

inline ConvexPolytope polygon(const std::vector<std::pair<double, double>>& pts) {
    ConvexPolytope p;
    p.dim = 2;
    const int n = static_cast<int>(pts.size());
    for (const auto& [x, y] : pts) p.vertices.emplace_back(x, y, 0.0);
    for (int i = 0; i < n; ++i) p.facets.push_back({i, (i + 1) % n});
    return p;
}

inline ConvexPolytope rectangle(double a, double b) {
    return polygon({{0, 0}, {a, 0}, {a, b}, {0, b}});
}

/// Facets: 0 bottom (y=0), 1 right (x=1), 2 top (y=1), 3 left (x=0).
inline ConvexPolytope unit_square() { return rectangle(1.0, 1.0); }

/// Legs on the axes; facets: 0 leg y=0, 1 hypotenuse, 2 leg x=0.
inline ConvexPolytope right_isoceles_triangle() { return polygon({{0, 0}, {1, 0}, {0, 1}}); }

/// Trapezium with the shorter base on x=0 and the longer base on x=3.
/// Facets: 0 bottom side, 1 longer base (x=3), 2 top side, 3 shorter base (x=0).
inline ConvexPolytope trapezium() { return polygon({{0, 0}, {3, -2}, {3, 6}, {0, 4}}); }

/// Obtuse triangle with the obtuse corner at the origin.
/// Facets: 0 side from the origin to (4,-2), 1 side (4,-2)-(0,4), 2 side on x=0.
inline ConvexPolytope obtuse_triangle() { return polygon({{0, 0}, {4, -2}, {0, 4}}); }

/// Polygonal approximation of the cap of the unit disc above the chord
/// y = h (0 < h < 1), with `arc_segments` edges on the arc. Facet 0 is the
/// chord; the chord-arc corner angles are pi/2 - asin(h) or smaller.
inline ConvexPolytope circular_segment(int arc_segments, double h) {
    const double a0 = std::asin(h), a1 = kPi - a0;
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(std::cos(a1), h);
    pts.emplace_back(std::cos(a0), h);
    for (int i = 1; i < arc_segments; ++i) {
        const double a = a0 + (a1 - a0) * i / arc_segments;
        pts.emplace_back(std::cos(a), std::sin(a));
    }
    return polygon(pts);
}

namespace detail {
inline ConvexPolytope polyhedron(std::vector<Point> verts, std::vector<std::vector<int>> facets) {
    ConvexPolytope p;
    p.dim = 3;
    p.vertices = std::move(verts);
    p.facets = std::move(facets);
    return p;
}
} // namespace detail

/// Facets: 0 z=0, 1 z=1, 2 y=0, 3 x=1, 4 y=1, 5 x=0.
inline ConvexPolytope box(double a, double b, double c) {
    return detail::polyhedron(
        {{0, 0, 0}, {a, 0, 0}, {a, b, 0}, {0, b, 0}, {0, 0, c}, {a, 0, c}, {a, b, c}, {0, b, c}},
        {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}});
}

inline ConvexPolytope unit_cube() { return box(1.0, 1.0, 1.0); }

/// Facets: 0 z=0, 1 y=0, 2 x=0, 3 slanted face x+y+z=1.
inline ConvexPolytope unit_simplex() {
    return detail::polyhedron({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                              {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}});
}

/// Right prism over the unit square with a tilted top z = 1 + (x + y)/4.
/// Facets ordered as in box(): 0 base z=0, 1 top, 2 y=0, 3 x=1, 4 y=1, 5 x=0.
inline ConvexPolytope square_prism() {
    return detail::polyhedron({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1.25}, {1, 1, 1.5}, {0, 1, 1.25}},
                              {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5},
                               {2, 3, 7, 6}, {3, 0, 4, 7}});
}

/// Prism over the rectangle [0,3]x[0,2] cut by two slanted planes; the base
/// meets every side at a right angle, two of the top-side edges are obtuse.
/// Facets: 0 base z=0, 1 x=3, 2 y=2, 3 y=0, 4 x=0, 5 and 6 top faces.
inline ConvexPolytope slanted_prism() {
    return detail::polyhedron({{0, 0, 0}, {3, 0, 0}, {0, 2, 0}, {3, 2, 0}, {0, 0, 4}, {0, 2, 3}, {3, 0, 2}},
                              {{1, 0, 2, 3}, {6, 1, 3}, {3, 2, 5}, {4, 0, 1, 6}, {5, 2, 0, 4}, {5, 4, 6}, {6, 3, 5}});
}

/// Unit-square prism whose top is shifted by `shear` in x; the face x=1
/// side then meets the base at an obtuse angle for shear > 0.
inline ConvexPolytope sheared_prism(double shear) {
    return detail::polyhedron({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {shear, 0, 1}, {1 + shear, 0, 1}, {1 + shear, 1, 1}, {shear, 1, 1}},
                              {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5},
                               {2, 3, 7, 6}, {3, 0, 4, 7}});
}

/// Polygon used to illustrate the walk notation: gamma is facet 6 on x = 9.38.
inline ConvexPolytope walk_polygon() {
    return polygon({{9.38, 7.24}, {6.9, 6.8}, {5, 6}, {3, 4}, {3, 0}, {4.22, -1.64}, {9.38, -3.18}});
}

} // namespace mixed_spectra
