// Deterministic sample points inside a polytope and along its facets.
#pragma once

#include "geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace mixed_spectra {

inline double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

/// Signed distance to the nearest facet plane; negative inside.
inline double plane_distance(const ConvexPolytope& p, const Point& x) {
    double worst = -1e300;
    for (int f = 0; f < static_cast<int>(p.facets.size()); ++f) {
        const FacetFrame fr = facet_frame(p, f);
        worst = std::max(worst, fr.normal.dot(x - fr.anchor));
    }
    return worst;
}

inline bool strictly_inside(const ConvexPolytope& p, const Point& x, double margin) {
    return plane_distance(p, x) < -margin;
}

/// Halton points in the bounding box, kept if they lie inside the polytope at
/// distance at least `margin_rel * scale` from the boundary.
inline std::vector<Point> interior_samples(const ConvexPolytope& p, std::size_t count,
                                           double margin_rel = 1e-6) {
    Point lo = p.vertices.front(), hi = p.vertices.front();
    for (const auto& v : p.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const double margin = margin_rel * p.scale();
    constexpr std::array<unsigned, 3> bases{2, 3, 5};
    std::vector<Point> out;
    out.reserve(count);
    for (std::uint64_t i = 1; out.size() < count; ++i) {
        Point x = Point::Zero();
        for (int a = 0; a < p.dim; ++a)
            x(a) = lo(a) + (hi(a) - lo(a)) * radical_inverse(i, bases[a]);
        if (strictly_inside(p, x, margin)) out.push_back(x);
    }
    return out;
}

/// Points on one facet, ordered along positive orientation in 2D.
/// 2D: `per_facet` equally spaced points including both end points.
/// 3D: points of a barycentric lattice on the facet fan triangles.
inline std::vector<Point> facet_samples(const ConvexPolytope& p, int facet, int per_facet = 33) {
    const auto& f = p.facets.at(facet);
    std::vector<Point> out;
    if (p.dim == 2) {
        const Point& a = p.vertices[f[0]];
        const Point& b = p.vertices[f[1]];
        for (int i = 0; i < per_facet; ++i) {
            const double t = static_cast<double>(i) / (per_facet - 1);
            out.push_back((1.0 - t) * a + t * b);
        }
        return out;
    }
    int n = 1;
    while ((n + 1) * (n + 2) / 2 * static_cast<int>(f.size() - 2) < per_facet) ++n;
    for (std::size_t t = 1; t + 1 < f.size(); ++t) {
        const Point& a = p.vertices[f[0]];
        const Point& b = p.vertices[f[t]];
        const Point& c = p.vertices[f[t + 1]];
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; i + j <= n; ++j) {
                const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
                out.push_back((1.0 - u - v) * a + u * b + v * c);
            }
        }
    }
    return out;
}

} // namespace mixed_spectra
