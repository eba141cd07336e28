// Potential families V with values, gradients and Hessians, plus the
// sampled subspace (grad V)^perp and a concavity probe.
#pragma once

#include "geometry.hpp"
#include "linalg.hpp"
#include "sampling.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace mixed_spectra {

// ---------------------------------------------------------------------------
// One-dimensional profiles g(t) for separable potentials V(x) = g(u . x)

struct Polynomial {
    std::vector<double> coeffs; // c0 + c1 t + c2 t^2 + ...
};

/// Smooth compactly supported bump amplitude * exp(1 - 1/(1 - s^2)),
/// s = (t - center) / half_width, zero for |s| >= 1.
struct Bump {
    double center = 0.0;
    double half_width = 1.0;
    double amplitude = 1.0;
};

/// Natural cubic spline through (knots[i], values[i]); the end cubics extend
/// beyond the knot range.
struct CubicSpline {
    std::vector<double> knots;
    std::vector<double> values;
    std::vector<double> second; // filled by make_spline

    static CubicSpline make(std::vector<double> t, std::vector<double> y);
};

using Profile = std::variant<Polynomial, Bump, CubicSpline>;

inline CubicSpline CubicSpline::make(std::vector<double> t, std::vector<double> y) {
    const std::size_t n = t.size();
    if (n < 2 || y.size() != n) throw Error("spline needs >= 2 matching knots/values");
    for (std::size_t i = 1; i < n; ++i)
        if (!(t[i] > t[i - 1])) throw Error("spline knots must increase");
    CubicSpline s{std::move(t), std::move(y), std::vector<double>(n, 0.0)};
    if (n > 2) {
        // tridiagonal system for interior second derivatives
        std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = s.knots[i] - s.knots[i - 1], h1 = s.knots[i + 1] - s.knots[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (s.values[i + 1] - s.values[i]) / h1 - (s.values[i] - s.values[i - 1]) / h0;
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double m = sub[i] / diag[i - 1];
            diag[i] -= m * sup[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        s.second[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) s.second[i] = (rhs[i] - sup[i] * s.second[i + 1]) / diag[i];
    }
    return s;
}

struct ProfileValue {
    double g = 0.0, dg = 0.0, d2g = 0.0;
};

inline ProfileValue eval_profile(const Profile& prof, double t) {
    return std::visit(
        [t](const auto& g) -> ProfileValue {
            using G = std::decay_t<decltype(g)>;
            ProfileValue r;
            if constexpr (std::is_same_v<G, Polynomial>) {
                for (std::size_t i = g.coeffs.size(); i-- > 0;) {
                    r.d2g = r.d2g * t + 2.0 * r.dg;
                    r.dg = r.dg * t + r.g;
                    r.g = r.g * t + g.coeffs[i];
                }
            } else if constexpr (std::is_same_v<G, Bump>) {
                const double s = (t - g.center) / g.half_width;
                const double q = 1.0 - s * s;
                if (q <= 0.0) return r;
                const double f = g.amplitude * std::exp(1.0 - 1.0 / q);
                const double w = g.half_width;
                r.g = f;
                r.dg = f * (-2.0 * s / (q * q)) / w;
                r.d2g = f * (4.0 * s * s / std::pow(q, 4) - 2.0 / (q * q) - 8.0 * s * s / std::pow(q, 3)) / (w * w);
            } else {
                const auto& k = g.knots;
                std::size_t i = std::upper_bound(k.begin(), k.end(), t) - k.begin();
                i = std::clamp<std::size_t>(i, 1, k.size() - 1);
                const double h = k[i] - k[i - 1];
                const double a = (k[i] - t) / h, b = (t - k[i - 1]) / h;
                const double m0 = g.second[i - 1], m1 = g.second[i];
                r.g = a * g.values[i - 1] + b * g.values[i] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
                r.dg = (g.values[i] - g.values[i - 1]) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
                r.d2g = a * m0 + b * m1;
            }
            return r;
        },
        prof);
}

// ---------------------------------------------------------------------------
// Potential variants

struct ConstantPotential {
    double c = 0.0;
};

struct LinearPotential {
    Vec3 m = Vec3::Zero();
    double q = 0.0;
};

struct SeparablePotential {
    Vec3 direction = Vec3::UnitX(); // unit length
    Profile g = Polynomial{{0.0}};
};

/// alpha * exp(beta * w . x)
struct ExponentialPotential {
    double alpha = 1.0;
    double beta = 1.0;
    Vec3 w = Vec3::Zero();
};

/// Euclidean distance to a union of boundary facets (segments in 2D, convex
/// planar polygons in 3D). The facet geometry is copied into the potential.
struct DistancePotential {
    int dim = 2;
    std::vector<std::vector<Point>> facets;
    std::vector<int> facet_ids;
};

/// Values on a rectilinear lattice, multilinear interpolation in between,
/// clamped outside. values are stored with the x index fastest.
struct GridPotential {
    int dim = 2;
    std::array<std::vector<double>, 3> axes;
    std::vector<double> values;
};

using PotentialVariant = std::variant<ConstantPotential, LinearPotential, SeparablePotential,
                                      ExponentialPotential, DistancePotential, GridPotential>;

struct PotentialSpec {
    PotentialVariant v = ConstantPotential{};
    double length_scale = 1.0; // finite-difference steps are 1e-5 * length_scale
    double offset = 0.0;       // constant added to every variant

    PotentialSpec() = default;
    PotentialSpec(PotentialVariant var, double scale = 1.0) : v(std::move(var)), length_scale(scale) {}
};

inline std::string variant_name(const PotentialSpec& V) {
    static const char* names[] = {"constant", "linear", "separable", "exponential", "distance", "grid"};
    return names[V.v.index()];
}

inline bool is_analytic(const PotentialSpec& V) {
    return !std::holds_alternative<DistancePotential>(V.v) && !std::holds_alternative<GridPotential>(V.v);
}

/// Distance potential to `facet_set` of `p`.
inline PotentialSpec distance_to_facets(const ConvexPolytope& p, const std::set<int>& facet_set) {
    DistancePotential d;
    d.dim = p.dim;
    for (int f : facet_set) {
        std::vector<Point> pts;
        for (int v : p.facets.at(f)) pts.push_back(p.vertices[v]);
        d.facets.push_back(std::move(pts));
        d.facet_ids.push_back(f);
    }
    return PotentialSpec(std::move(d), p.scale());
}

template <class T, class U>
inline bool holds(const U& u) {
    return std::holds_alternative<T>(u.v);
}

namespace detail {

inline Point closest_on_segment(const Point& a, const Point& b, const Point& x) {
    const Vec3 e = b - a;
    const double t = std::clamp(e.dot(x - a) / e.squaredNorm(), 0.0, 1.0);
    return a + t * e;
}

inline Point closest_on_polygon(const std::vector<Point>& poly, const Point& x) {
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < poly.size(); ++i) n += poly[i].cross(poly[(i + 1) % poly.size()]);
    n.normalize();
    const Point proj = x - n * n.dot(x - poly[0]);
    bool inside = true;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3 e = poly[(i + 1) % poly.size()] - poly[i];
        if (n.dot(e.cross(proj - poly[i])) < 0.0) {
            inside = false;
            break;
        }
    }
    if (inside) return proj;
    Point best = poly[0];
    double bd = 1e300;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point c = closest_on_segment(poly[i], poly[(i + 1) % poly.size()], x);
        const double d = (c - x).squaredNorm();
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    return best;
}

struct Projection {
    Point nearest;
    double distance = 0.0;
    double gap = 1e300; // distance margin to the nearest competing projection
};

inline Projection project(const DistancePotential& d, const Point& x) {
    std::vector<std::pair<double, Point>> cands;
    for (const auto& f : d.facets) {
        const Point c = d.dim == 2 ? closest_on_segment(f[0], f[1], x) : closest_on_polygon(f, x);
        cands.emplace_back((c - x).norm(), c);
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Projection pr{cands[0].second, cands[0].first, 1e300};
    for (std::size_t i = 1; i < cands.size(); ++i) {
        if ((cands[i].second - pr.nearest).norm() > 1e-12 * (1.0 + pr.distance)) {
            pr.gap = cands[i].first - pr.distance;
            break;
        }
    }
    return pr;
}

inline double grid_eval(const GridPotential& g, const Point& x) {
    std::array<std::size_t, 3> i0{0, 0, 0};
    std::array<double, 3> frac{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        const auto& ax = g.axes[a];
        if (ax.size() == 1) continue;
        const double xa = std::clamp(x(a), ax.front(), ax.back());
        std::size_t i = std::upper_bound(ax.begin(), ax.end(), xa) - ax.begin();
        i = std::clamp<std::size_t>(i, 1, ax.size() - 1);
        i0[a] = i - 1;
        frac[a] = (xa - ax[i - 1]) / (ax[i] - ax[i - 1]);
    }
    const std::size_t nx = g.axes[0].size(), ny = g.dim >= 2 ? g.axes[1].size() : 1;
    double v = 0.0;
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::array<std::size_t, 3> idx{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) {
            const int bit = (c >> a) & 1;
            const std::size_t ia = std::min(i0[a] + bit, g.axes[a].size() - 1);
            idx[a] = ia;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        if (w == 0.0) continue;
        v += w * g.values[idx[0] + nx * (idx[1] + ny * idx[2])];
    }
    return v;
}

} // namespace detail

inline double evaluate(const PotentialSpec& V, const Point& x) {
    return V.offset + std::visit(
        [&x](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ConstantPotential>) return p.c;
            else if constexpr (std::is_same_v<P, LinearPotential>) return p.m.dot(x) + p.q;
            else if constexpr (std::is_same_v<P, SeparablePotential>) return eval_profile(p.g, p.direction.dot(x)).g;
            else if constexpr (std::is_same_v<P, ExponentialPotential>) return p.alpha * std::exp(p.beta * p.w.dot(x));
            else if constexpr (std::is_same_v<P, DistancePotential>) return detail::project(p, x).distance;
            else return detail::grid_eval(p, x);
        },
        V.v);
}

struct GradientSample {
    Vec3 value = Vec3::Zero();
    bool sampled = false; // true when obtained by finite differences
};

struct HessianSample {
    Mat3 value = Mat3::Zero();
    bool sampled = false;
};

inline GradientSample gradient(const PotentialSpec& V, const Point& x, const Tolerances& tol = {}) {
    GradientSample out;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ConstantPotential>) {
            } else if constexpr (std::is_same_v<P, LinearPotential>) {
                out.value = p.m;
            } else if constexpr (std::is_same_v<P, SeparablePotential>) {
                out.value = eval_profile(p.g, p.direction.dot(x)).dg * p.direction;
            } else if constexpr (std::is_same_v<P, ExponentialPotential>) {
                out.value = p.beta * p.alpha * std::exp(p.beta * p.w.dot(x)) * p.w;
            } else if constexpr (std::is_same_v<P, DistancePotential>) {
                const auto pr = detail::project(p, x);
                if (pr.distance <= tol.projection_ambiguity * V.length_scale)
                    throw NotDifferentiableHere("point lies on the distance set");
                if (pr.gap <= tol.projection_ambiguity * V.length_scale)
                    throw NotDifferentiableHere("nearest-point projection is ambiguous");
                out.value = (x - pr.nearest) / pr.distance;
            } else {
                const double h = 1e-5 * V.length_scale;
                for (int a = 0; a < p.dim; ++a) {
                    Point xp = x, xm = x;
                    xp(a) += h;
                    xm(a) -= h;
                    out.value(a) = (evaluate(V, xp) - evaluate(V, xm)) / (2.0 * h);
                }
                out.sampled = true;
            }
        },
        V.v);
    return out;
}

inline HessianSample hessian(const PotentialSpec& V, const Point& x, const Tolerances& tol = {}) {
    HessianSample out;
    const double h = 1e-5 * V.length_scale;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ConstantPotential> || std::is_same_v<P, LinearPotential>) {
            } else if constexpr (std::is_same_v<P, SeparablePotential>) {
                out.value = eval_profile(p.g, p.direction.dot(x)).d2g * p.direction * p.direction.transpose();
            } else if constexpr (std::is_same_v<P, ExponentialPotential>) {
                out.value = p.beta * p.beta * p.alpha * std::exp(p.beta * p.w.dot(x)) * p.w * p.w.transpose();
            } else if constexpr (std::is_same_v<P, DistancePotential>) {
                const auto pr = detail::project(p, x);
                // the difference stencil must stay clear of the medial axis
                if (pr.gap <= std::max(4.0 * h, tol.projection_ambiguity * V.length_scale))
                    throw NotDifferentiableHere("nearest-point projection is ambiguous near x");
                const int d = p.dim;
                for (int a = 0; a < d; ++a) {
                    Point xp = x, xm = x;
                    xp(a) += h;
                    xm(a) -= h;
                    out.value.col(a) = (gradient(V, xp, tol).value - gradient(V, xm, tol).value) / (2.0 * h);
                }
                out.value = 0.5 * (out.value + out.value.transpose()).eval();
                out.sampled = true;
            } else {
                const int d = p.dim;
                const double f0 = evaluate(V, x);
                for (int a = 0; a < d; ++a) {
                    for (int b = a; b < d; ++b) {
                        double val;
                        if (a == b) {
                            Point xp = x, xm = x;
                            xp(a) += h;
                            xm(a) -= h;
                            val = (evaluate(V, xp) - 2.0 * f0 + evaluate(V, xm)) / (h * h);
                        } else {
                            Point pp = x, pm = x, mp = x, mm = x;
                            pp(a) += h; pp(b) += h;
                            pm(a) += h; pm(b) -= h;
                            mp(a) -= h; mp(b) += h;
                            mm(a) -= h; mm(b) -= h;
                            val = (evaluate(V, pp) - evaluate(V, pm) - evaluate(V, mp) + evaluate(V, mm)) / (4.0 * h * h);
                        }
                        out.value(a, b) = out.value(b, a) = val;
                    }
                }
                out.sampled = true;
            }
        },
        V.v);
    return out;
}

/// V + c.
inline PotentialSpec shifted(const PotentialSpec& V, double c) {
    PotentialSpec out = V;
    out.offset += c;
    return out;
}

/// inf of V over the polytope. Closed forms are minimized exactly (vertices
/// for affine and monotone variants, a bracketed 1D search for separable
/// profiles); distance potentials vanish on their set; grids are sampled at
/// 1e4 * d interior points.
inline double infimum(const PotentialSpec& V, const ConvexPolytope& p) {
    return V.offset + std::visit(
        [&](const auto& pot) -> double {
            using P = std::decay_t<decltype(pot)>;
            if constexpr (std::is_same_v<P, ConstantPotential>) {
                return pot.c;
            } else if constexpr (std::is_same_v<P, LinearPotential>) {
                double m = 1e300;
                for (const auto& v : p.vertices) m = std::min(m, pot.m.dot(v) + pot.q);
                return m;
            } else if constexpr (std::is_same_v<P, ExponentialPotential>) {
                double m = 1e300;
                for (const auto& v : p.vertices) m = std::min(m, evaluate(V, v) - V.offset);
                return m;
            } else if constexpr (std::is_same_v<P, SeparablePotential>) {
                double lo = 1e300, hi = -1e300;
                for (const auto& v : p.vertices) {
                    lo = std::min(lo, pot.direction.dot(v));
                    hi = std::max(hi, pot.direction.dot(v));
                }
                const auto g = [&](double t) { return eval_profile(pot.g, t).g; };
                constexpr int n = 4096;
                double best = std::min(g(lo), g(hi));
                for (int i = 0; i <= n; ++i) {
                    const double t = lo + (hi - lo) * i / n;
                    const double gi = g(t);
                    if (gi < best) {
                        const double a = std::max(lo, t - (hi - lo) / n), b = std::min(hi, t + (hi - lo) / n);
                        const auto r = boost::math::tools::brent_find_minima(g, a, b, 52);
                        best = std::min(gi, r.second);
                    }
                }
                return best;
            } else if constexpr (std::is_same_v<P, DistancePotential>) {
                return 0.0;
            } else {
                double m = 1e300;
                for (const auto& x : interior_samples(p, 10000 * static_cast<std::size_t>(p.dim)))
                    m = std::min(m, evaluate(V, x) - V.offset);
                return m;
            }
        },
        V.v);
}

// ---------------------------------------------------------------------------
// Sampled subspaces and concavity

struct GradPerpResult {
    MatX basis; // d x k, orthonormal columns
    int used = 0;
    int skipped = 0;
    double max_gradient_norm = 0.0;
    int dim() const { return static_cast<int>(basis.cols()); }
};

/// Minimum number of interior samples used by the subspace and concavity probes.
inline std::size_t default_sample_count(int dim) { return 32u * static_cast<std::size_t>(dim); }

/// Stacked sampled gradients, one row per differentiable sample.
inline MatX gradient_rows(const PotentialSpec& V, const std::vector<Point>& samples, int dim,
                          int* skipped = nullptr, const Tolerances& tol = {}) {
    std::vector<Vec3> g;
    int skip = 0;
    for (const auto& x : samples) {
        try {
            g.push_back(gradient(V, x, tol).value);
        } catch (const NotDifferentiableHere&) {
            ++skip;
        }
    }
    MatX rows(static_cast<Eigen::Index>(g.size()), dim);
    for (std::size_t i = 0; i < g.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = g[i].head(dim).transpose();
    if (skipped) *skipped = skip;
    return rows;
}

/// Directions along which V is constant at every sample.
inline GradPerpResult grad_perp_space(const PotentialSpec& V, const std::vector<Point>& samples, int dim,
                                      const Tolerances& tol = {}) {
    GradPerpResult out;
    MatX rows = gradient_rows(V, samples, dim, &out.skipped, tol);
    out.used = static_cast<int>(rows.rows());
    out.max_gradient_norm = rows.rows() ? rows.rowwise().norm().maxCoeff() : 0.0;
    out.basis = null_space(rows, dim, tol.grad_null_space).basis;
    return out;
}

struct ConcavityVerdict {
    bool concave = true;
    double max_eigenvalue = -std::numeric_limits<double>::infinity();
    double threshold = 0.0;
    int samples = 0;
    int skipped = 0;
    bool sampled_hessian = false;
    std::string method = "hessian";
};

/// concave iff the largest Hessian eigenvalue over the samples is at most
/// tol.concavity times the Hessian magnitude scale (at least 1).
inline ConcavityVerdict concavity_check(const PotentialSpec& V, const std::vector<Point>& samples, int dim,
                                        const Tolerances& tol = {}) {
    ConcavityVerdict out;
    double scale = 1.0;
    std::vector<double> eigs;
    for (const auto& x : samples) {
        try {
            const auto H = hessian(V, x, tol);
            out.sampled_hessian = out.sampled_hessian || H.sampled;
            const MatX Hd = H.value.topLeftCorner(dim, dim);
            Eigen::SelfAdjointEigenSolver<MatX> es(Hd, Eigen::EigenvaluesOnly);
            eigs.push_back(es.eigenvalues()(dim - 1));
            scale = std::max(scale, Hd.cwiseAbs().maxCoeff());
            ++out.samples;
        } catch (const NotDifferentiableHere&) {
            ++out.skipped;
        }
    }
    for (double e : eigs) out.max_eigenvalue = std::max(out.max_eigenvalue, e);
    out.threshold = tol.concavity * scale;
    out.concave = eigs.empty() || out.max_eigenvalue <= out.threshold;
    return out;
}

namespace detail {

inline std::vector<Point> convex_hull_2d(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 1e-14) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

} // namespace detail

struct ReflectedConcavity {
    ConcavityVerdict verdict;
    double max_restriction_mismatch = 0.0; // |dist(x, gamma) - dist(x, boundary of reflection)| on samples in Omega
    bool reflected_convex = false;
};

/// Concavity of dist(., gamma) on a polygon via the reflection over the
/// straight edge gamma_prime: the union with its mirror image must be convex,
/// the distance to its boundary must restrict to dist(., gamma) on the
/// polygon, and midpoint concavity is probed on sample pairs of the union.
inline ReflectedConcavity reflected_distance_concavity(const ConvexPolytope& p, const std::set<int>& gamma,
                                                       const std::set<int>& gamma_prime, std::size_t count = 0) {
    if (p.dim != 2) throw Error("reflected construction is planar only");
    if (gamma_prime.size() != 1) throw GammaPrimeNotStraight("reflection needs a single straight edge");
    const FacetFrame b = facet_frame(p, *gamma_prime.begin());
    std::vector<Point> pts = p.vertices;
    for (const auto& v : p.vertices) pts.push_back(v - 2.0 * b.normal * b.normal.dot(v - b.anchor));
    const std::vector<Point> hull = detail::convex_hull_2d(pts);
    ConvexPolytope tilde;
    tilde.dim = 2;
    tilde.vertices = hull;
    for (int i = 0; i < static_cast<int>(hull.size()); ++i) tilde.facets.push_back({i, (i + 1) % static_cast<int>(hull.size())});

    ReflectedConcavity out;
    // the union is convex iff it equals its hull, i.e. the areas agree
    out.reflected_convex = std::abs(volume(tilde) - 2.0 * volume(p)) <= 1e-10 * volume(p);

    const auto dist_tilde = [&](const Point& x) {
        double m = 1e300;
        for (int f = 0; f < static_cast<int>(tilde.facets.size()); ++f) {
            const FacetFrame fr = facet_frame(tilde, f);
            m = std::min(m, -fr.normal.dot(x - fr.anchor));
        }
        return m;
    };
    const PotentialSpec V = distance_to_facets(p, gamma);
    if (count == 0) count = default_sample_count(2);
    for (const auto& x : interior_samples(p, count))
        out.max_restriction_mismatch = std::max(out.max_restriction_mismatch, std::abs(evaluate(V, x) - dist_tilde(x)));

    const auto s = interior_samples(tilde, 2 * count);
    auto& vd = out.verdict;
    vd.method = "reflected-midpoint";
    vd.threshold = 1e-12 * p.scale();
    for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
        const double gap = dist_tilde(0.5 * (s[i] + s[i + 1])) - 0.5 * (dist_tilde(s[i]) + dist_tilde(s[i + 1]));
        vd.max_eigenvalue = std::max(vd.max_eigenvalue, -gap); // > 0 means a concavity defect
        ++vd.samples;
    }
    vd.concave = out.reflected_convex && vd.max_eigenvalue <= vd.threshold &&
                 out.max_restriction_mismatch <= 1e-9 * p.scale();
    return out;
}

// ---------------------------------------------------------------------------
// Grid potentials from CSV lattices

/// Reads rows "x,y[,z],value" (an optional non-numeric header line is skipped)
/// forming a full tensor lattice.
inline GridPotential read_grid_csv(std::istream& in, int dim) {
    std::vector<std::array<double, 4>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::array<double, 4> r{0, 0, 0, 0};
        std::string cell;
        int c = 0;
        bool ok = true;
        while (std::getline(ss, cell, ',') && c <= dim) {
            try {
                std::size_t used = 0;
                r[c] = std::stod(cell, &used);
            } catch (...) {
                ok = false;
                break;
            }
            ++c;
        }
        if (!ok && rows.empty()) continue; // header
        if (!ok || c != dim + 1) throw ScenarioError("grid csv line " + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) + " numbers");
        if (c == dim + 1) std::swap(r[dim], r[3]);
        rows.push_back(r);
    }
    GridPotential g;
    g.dim = dim;
    for (int a = 0; a < 3; ++a) {
        std::vector<double> ax;
        if (a < dim) {
            for (const auto& r : rows) ax.push_back(r[a]);
            std::sort(ax.begin(), ax.end());
            ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
        } else {
            ax.push_back(0.0);
        }
        g.axes[a] = ax;
    }
    const std::size_t nx = g.axes[0].size(), ny = g.axes[1].size(), nz = g.axes[2].size();
    if (rows.size() != nx * ny * nz) throw ScenarioError("grid csv is not a full tensor lattice");
    g.values.assign(rows.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : rows) {
        std::array<std::size_t, 3> idx{0, 0, 0};
        for (int a = 0; a < dim; ++a)
            idx[a] = std::lower_bound(g.axes[a].begin(), g.axes[a].end(), r[a]) - g.axes[a].begin();
        g.values[idx[0] + nx * (idx[1] + ny * idx[2])] = r[3];
    }
    for (double v : g.values)
        if (std::isnan(v)) throw ScenarioError("grid csv has duplicate lattice points");
    return g;
}

inline GridPotential read_grid_csv_file(const std::string& path, int dim) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("cannot open grid csv " + path);
    return read_grid_csv(f, dim);
}

} // namespace mixed_spectra
