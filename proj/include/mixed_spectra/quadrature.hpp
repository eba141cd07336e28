// Composite collapsed Gauss-Legendre quadrature over simplicial meshes.
#pragma once

#include "mesh.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <functional>
#include <utility>
#include <vector>

namespace mixed_spectra {

/// Gauss-Legendre nodes and weights on [0, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
    auto build = [](const auto& x, const auto& w, bool odd) {
        std::vector<double> nodes, weights;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double wi = (odd && i == 0) ? w[0] : w[i];
            nodes.push_back(0.5 * (1.0 + x[i]));
            weights.push_back(0.5 * wi);
            if (!(odd && i == 0)) {
                nodes.push_back(0.5 * (1.0 - x[i]));
                weights.push_back(0.5 * wi);
            }
        }
        return std::make_pair(nodes, weights);
    };
    namespace bq = boost::math::quadrature;
    switch (n) {
    case 3: return build(bq::gauss<double, 3>::abscissa(), bq::gauss<double, 3>::weights(), true);
    case 4: return build(bq::gauss<double, 4>::abscissa(), bq::gauss<double, 4>::weights(), false);
    case 5: return build(bq::gauss<double, 5>::abscissa(), bq::gauss<double, 5>::weights(), true);
    case 6: return build(bq::gauss<double, 6>::abscissa(), bq::gauss<double, 6>::weights(), false);
    case 7: return build(bq::gauss<double, 7>::abscissa(), bq::gauss<double, 7>::weights(), true);
    case 8: return build(bq::gauss<double, 8>::abscissa(), bq::gauss<double, 8>::weights(), false);
    default: throw Error("gauss_legendre_unit: supported orders are 3..8");
    }
}

struct QuadraturePoint {
    Point x;
    double weight;
};

/// Points of the collapsed (Duffy) tensor rule on one simplex, `n` nodes per
/// direction; exact for polynomials of degree 2n - 1 - (d - 1).
inline std::vector<QuadraturePoint> simplex_rule(const std::vector<Point>& verts, int dim, int n) {
    const auto [t, w] = gauss_legendre_unit(n);
    std::vector<QuadraturePoint> out;
    if (dim == 2) {
        const Vec3 e1 = verts[1] - verts[0], e2 = verts[2] - verts[0];
        const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double s = t[i], u = t[j] * (1.0 - s);
                out.push_back({verts[0] + s * e1 + u * e2, w[i] * w[j] * (1.0 - s) * jac});
            }
        return out;
    }
    const Vec3 e1 = verts[1] - verts[0], e2 = verts[2] - verts[0], e3 = verts[3] - verts[0];
    const double jac = std::abs(e1.dot(e2.cross(e3)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const double s = t[i], u = t[j] * (1.0 - s), v = t[l] * (1.0 - s) * (1.0 - t[j]);
                out.push_back({verts[0] + s * e1 + u * e2 + v * e3,
                               w[i] * w[j] * w[l] * (1.0 - s) * (1.0 - s) * (1.0 - t[j]) * jac});
            }
    return out;
}

/// Sum of f over every element of the mesh in element order.
inline double integrate(const SimplicialMesh& m, const std::function<double(const Point&)>& f, int n = 5) {
    double total = 0.0;
    std::vector<Point> verts(m.nodes_per_element());
    for (const auto& el : m.elements) {
        for (int i = 0; i < m.nodes_per_element(); ++i) verts[i] = m.nodes[el[i]];
        double part = 0.0;
        for (const auto& q : simplex_rule(verts, m.dim, n)) part += q.weight * f(q.x);
        total += part;
    }
    return total;
}

} // namespace mixed_spectra
