// Manufactured functions with closed-form derivatives and the integral
// identities checked on them.
#pragma once

#include "quadrature.hpp"
#include "sampling.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <string>

namespace mixed_spectra {

enum class BoundaryBehavior { Dirichlet, Neumann, Auto };

struct ManufacturedFunction {
    std::string name;
    std::function<double(const Point&)> value;
    std::function<Vec3(const Point&)> grad;
    std::function<Mat3(const Point&)> hess;
    std::map<int, BoundaryBehavior> declared; // unlisted facets count as Auto
};

struct BoundaryCheck {
    bool ok = true;
    int failing_facet = -1;
    double worst = 0.0;
    std::map<int, BoundaryBehavior> resolved; // Auto resolved to what holds
};

/// Checks the declared behaviour at `per_facet` samples per facet within
/// `tol`. Auto facets pass if either condition holds.
inline BoundaryCheck check_boundary_behavior(const ManufacturedFunction& u, const ConvexPolytope& p,
                                             int per_facet = 33, double tol = 1e-9) {
    BoundaryCheck r;
    for (int f = 0; f < static_cast<int>(p.num_facets()); ++f) {
        const Vec3 nu = facet_frame(p, f).normal;
        double dir = 0.0, neu = 0.0;
        for (const auto& x : facet_samples(p, f, per_facet)) {
            dir = std::max(dir, std::abs(u.value(x)));
            neu = std::max(neu, std::abs(u.grad(x).dot(nu)));
        }
        const auto it = u.declared.find(f);
        const BoundaryBehavior want = it == u.declared.end() ? BoundaryBehavior::Auto : it->second;
        double miss = 0.0;
        switch (want) {
        case BoundaryBehavior::Dirichlet: miss = dir; break;
        case BoundaryBehavior::Neumann: miss = neu; break;
        case BoundaryBehavior::Auto: miss = std::min(dir, neu); break;
        }
        r.resolved[f] = want != BoundaryBehavior::Auto ? want
                        : dir <= neu                  ? BoundaryBehavior::Dirichlet
                                                      : BoundaryBehavior::Neumann;
        if (miss > tol && r.ok) {
            r.ok = false;
            r.failing_facet = f;
        }
        r.worst = std::max(r.worst, miss);
    }
    return r;
}

struct IdentityResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double discrepancy = 0.0; // |lhs - rhs| for identities, rhs - lhs for the inequality
};

struct IdentityOptions {
    int mesh_level = 3; // refinement of the centroid fan used as quadrature cells
    int points = 6;     // Gauss-Legendre nodes per collapsed direction
};

namespace detail {
inline void require_behavior(const ManufacturedFunction& u, const ConvexPolytope& p) {
    const BoundaryCheck bc = check_boundary_behavior(u, p);
    if (!bc.ok)
        throw BoundaryBehaviorViolated(u.name + ": declared boundary behaviour fails on facet " +
                                       std::to_string(bc.failing_facet) + " (max deviation " +
                                       std::to_string(bc.worst) + ")");
}

inline SimplicialMesh quadrature_mesh(const ConvexPolytope& p, int level) {
    return refine_times(triangulate(p), level);
}
} // namespace detail

/// For u vanishing or with vanishing normal derivative on each edge of a
/// polygon: int u_11 u_22 against int u_12^2 (the boundary curvature term is
/// zero on straight edges).
inline IdentityResult check_grisvard(const ManufacturedFunction& u, const ConvexPolytope& p,
                                     const IdentityOptions& opt = {}) {
    if (p.dim != 2) throw Error("check_grisvard: polygon required");
    detail::require_behavior(u, p);
    const SimplicialMesh m = detail::quadrature_mesh(p, opt.mesh_level);
    IdentityResult r;
    r.lhs = integrate(m, [&](const Point& x) { const Mat3 h = u.hess(x); return h(0, 0) * h(1, 1); }, opt.points);
    r.rhs = integrate(m, [&](const Point& x) { const Mat3 h = u.hess(x); return h(0, 1) * h(0, 1); }, opt.points);
    r.discrepancy = std::abs(r.lhs - r.rhs);
    return r;
}

/// int (d_1 d_j u)^2 <= int (d_1^2 u)(d_j^2 u) for u Neumann on the face x_1 = 0
/// and Dirichlet on the rest of a box. `j` is 1-based. discrepancy = slack.
inline IdentityResult check_dimension_reduction(const ManufacturedFunction& u, const ConvexPolytope& box, int j,
                                                const IdentityOptions& opt = {}) {
    if (j < 1 || j > box.dim) throw Error("check_dimension_reduction: index out of range");
    detail::require_behavior(u, box);
    const int a = j - 1;
    const SimplicialMesh m = detail::quadrature_mesh(box, std::min(opt.mesh_level, 2));
    IdentityResult r;
    r.lhs = integrate(m, [&](const Point& x) { const Mat3 h = u.hess(x); return h(0, a) * h(0, a); }, opt.points);
    r.rhs = integrate(m, [&](const Point& x) { const Mat3 h = u.hess(x); return h(0, 0) * h(a, a); }, opt.points);
    r.discrepancy = r.rhs - r.lhs;
    return r;
}

/// int (d_ml u)(d_mj u) = int (d_mm u)(d_lj u) for u vanishing on the whole
/// boundary. Indices are 1-based.
inline IdentityResult check_index_identity(const ManufacturedFunction& u, const ConvexPolytope& p, int m_idx,
                                           int l_idx, int j_idx, const IdentityOptions& opt = {}) {
    for (int idx : {m_idx, l_idx, j_idx})
        if (idx < 1 || idx > p.dim) throw Error("check_index_identity: index out of range");
    ManufacturedFunction all_dirichlet = u;
    for (int f = 0; f < static_cast<int>(p.num_facets()); ++f) all_dirichlet.declared[f] = BoundaryBehavior::Dirichlet;
    detail::require_behavior(all_dirichlet, p);
    const int a = m_idx - 1, b = l_idx - 1, c = j_idx - 1;
    IdentityResult r;
    if (a == b && b == c) return r;
    const SimplicialMesh m = detail::quadrature_mesh(p, p.dim == 2 ? opt.mesh_level : std::min(opt.mesh_level, 2));
    r.lhs = integrate(m, [&](const Point& x) { const Mat3 h = u.hess(x); return h(a, b) * h(a, c); }, opt.points);
    r.rhs = integrate(m, [&](const Point& x) { const Mat3 h = u.hess(x); return h(a, a) * h(b, c); }, opt.points);
    r.discrepancy = std::abs(r.lhs - r.rhs);
    return r;
}

// ---------------------------------------------------------------------------
// Library of manufactured functions

/// sin(pi x) sin(pi y), vanishing on the unit square boundary.
inline ManufacturedFunction sin_sin() {
    ManufacturedFunction u;
    u.name = "sin(pi x) sin(pi y)";
    u.value = [](const Point& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
    u.grad = [](const Point& x) {
        const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
        const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
        return Vec3(kPi * cx * sy, kPi * sx * cy, 0.0);
    };
    u.hess = [](const Point& x) {
        const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
        const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
        const double p2 = kPi * kPi;
        Mat3 h = Mat3::Zero();
        h(0, 0) = -p2 * sx * sy;
        h(1, 1) = -p2 * sx * sy;
        h(0, 1) = h(1, 0) = p2 * cx * cy;
        return h;
    };
    for (int f = 0; f < 4; ++f) u.declared[f] = BoundaryBehavior::Dirichlet;
    return u;
}

/// cos(pi x) cos(pi y), zero normal derivative on the unit square boundary.
inline ManufacturedFunction cos_cos() {
    ManufacturedFunction u;
    u.name = "cos(pi x) cos(pi y)";
    u.value = [](const Point& x) { return std::cos(kPi * x.x()) * std::cos(kPi * x.y()); };
    u.grad = [](const Point& x) {
        const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
        const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
        return Vec3(-kPi * sx * cy, -kPi * cx * sy, 0.0);
    };
    u.hess = [](const Point& x) {
        const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
        const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
        const double p2 = kPi * kPi;
        Mat3 h = Mat3::Zero();
        h(0, 0) = -p2 * cx * cy;
        h(1, 1) = -p2 * cx * cy;
        h(0, 1) = h(1, 0) = p2 * sx * sy;
        return h;
    };
    for (int f = 0; f < 4; ++f) u.declared[f] = BoundaryBehavior::Neumann;
    return u;
}

/// x^2 y^2: neither condition holds on the edges x = 1 and y = 1.
inline ManufacturedFunction x2y2() {
    ManufacturedFunction u;
    u.name = "x^2 y^2";
    u.value = [](const Point& x) { return x.x() * x.x() * x.y() * x.y(); };
    u.grad = [](const Point& x) {
        return Vec3(2 * x.x() * x.y() * x.y(), 2 * x.x() * x.x() * x.y(), 0.0);
    };
    u.hess = [](const Point& x) {
        Mat3 h = Mat3::Zero();
        h(0, 0) = 2 * x.y() * x.y();
        h(1, 1) = 2 * x.x() * x.x();
        h(0, 1) = h(1, 0) = 4 * x.x() * x.y();
        return h;
    };
    return u;
}

/// x(1-x) y(1-y), vanishing on the unit square boundary.
inline ManufacturedFunction bubble_2d() {
    ManufacturedFunction u;
    u.name = "x(1-x) y(1-y)";
    u.value = [](const Point& x) { return x.x() * (1 - x.x()) * x.y() * (1 - x.y()); };
    u.grad = [](const Point& x) {
        return Vec3((1 - 2 * x.x()) * x.y() * (1 - x.y()), x.x() * (1 - x.x()) * (1 - 2 * x.y()), 0.0);
    };
    u.hess = [](const Point& x) {
        Mat3 h = Mat3::Zero();
        h(0, 0) = -2 * x.y() * (1 - x.y());
        h(1, 1) = -2 * x.x() * (1 - x.x());
        h(0, 1) = h(1, 0) = (1 - 2 * x.x()) * (1 - 2 * x.y());
        return h;
    };
    for (int f = 0; f < 4; ++f) u.declared[f] = BoundaryBehavior::Dirichlet;
    return u;
}

/// cos(pi x/2) sin(pi y) sin(pi z) plus eps (1 - x^2)(1 + x^2 y) y(1-y) z(1-z):
/// zero normal derivative on x = 0, zero on the other faces of the unit cube.
/// eps = 0 gives the separable function.
inline ManufacturedFunction mixed_cube_function(double eps = 0.0) {
    ManufacturedFunction u;
    u.name = eps == 0.0 ? "cos(pi x/2) sin(pi y) sin(pi z)" : "cos(pi x/2) sin(pi y) sin(pi z) + perturbation";
    const double h = 0.5 * kPi;
    u.value = [=](const Point& p) {
        const double x = p.x(), y = p.y(), z = p.z();
        return std::cos(h * x) * std::sin(kPi * y) * std::sin(kPi * z) +
               eps * (1 - x * x) * (1 + x * x * y) * y * (1 - y) * z * (1 - z);
    };
    u.grad = [=](const Point& p) {
        const double x = p.x(), y = p.y(), z = p.z();
        const double cx = std::cos(h * x), sx = std::sin(h * x);
        const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
        const double sz = std::sin(kPi * z), cz = std::cos(kPi * z);
        // perturbation factors: A(x,y) = (1-x^2)(1+x^2 y), B(y) = y(1-y), C(z) = z(1-z)
        const double A = (1 - x * x) * (1 + x * x * y);
        const double Ax = -2 * x * (1 + x * x * y) + (1 - x * x) * 2 * x * y;
        const double Ay = (1 - x * x) * x * x;
        const double B = y * (1 - y), By = 1 - 2 * y;
        const double C = z * (1 - z), Cz = 1 - 2 * z;
        return Vec3(-h * sx * sy * sz + eps * Ax * B * C,
                    kPi * cx * cy * sz + eps * (Ay * B + A * By) * C,
                    kPi * cx * sy * cz + eps * A * B * Cz);
    };
    u.hess = [=](const Point& p) {
        const double x = p.x(), y = p.y(), z = p.z();
        const double cx = std::cos(h * x), sx = std::sin(h * x);
        const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
        const double sz = std::sin(kPi * z), cz = std::cos(kPi * z);
        const double p2 = kPi * kPi;
        const double A = (1 - x * x) * (1 + x * x * y);
        const double Ax = -2 * x * (1 + x * x * y) + (1 - x * x) * 2 * x * y;
        const double Axx = -2 * (1 + x * x * y) - 4 * x * x * y + 2 * y - 6 * x * x * y;
        const double Ay = (1 - x * x) * x * x;
        const double Axy = 2 * x - 4 * x * x * x;
        const double B = y * (1 - y), By = 1 - 2 * y, Byy = -2.0;
        const double C = z * (1 - z), Cz = 1 - 2 * z, Czz = -2.0;
        Mat3 m;
        m(0, 0) = -h * h * cx * sy * sz + eps * Axx * B * C;
        m(1, 1) = -p2 * cx * sy * sz + eps * (2 * Ay * By + A * Byy) * C; // A_yy = 0
        m(2, 2) = -p2 * cx * sy * sz + eps * A * B * Czz;
        m(0, 1) = m(1, 0) = -h * kPi * sx * cy * sz + eps * (Axy * B + Ax * By) * C;
        m(0, 2) = m(2, 0) = -h * kPi * sx * sy * cz + eps * Ax * B * Cz;
        m(1, 2) = m(2, 1) = p2 * cx * cy * cz + eps * (Ay * B + A * By) * Cz;
        return m;
    };
    u.declared[5] = BoundaryBehavior::Neumann; // x = 0
    for (int f : {0, 1, 2, 3, 4}) u.declared[f] = BoundaryBehavior::Dirichlet;
    return u;
}

} // namespace mixed_spectra
