// Hypothesis checks for the eigenvalue comparison results: the boundary
// monotonicity profile, corner and dihedral angles, potential branches and
// the index shift m = dim((grad V)^perp ∩ S(gamma)).
#pragma once

#include "potentials.hpp"
#include "sampling.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mixed_spectra {

/// Identifiers carried by verdicts and claims in reports.
namespace theorem_id {
inline constexpr const char* kStraightSegment = "3.1"; // lambda_1 with Dirichlet on a straight segment
inline constexpr const char* kDualPlanar = "3.6";      // exhaustive planar partition
inline constexpr const char* kDualHigherDim = "4.1";   // exhaustive partition, d >= 3
inline constexpr const char* kIndexShift = "5.2";      // lambda_{k+m}^gamma <= lambda_k^D
inline constexpr const char* kIndexShiftStrict = "5.3";
inline constexpr const char* kAboveInfimum = "2.1"; // lambda_1 > inf V
inline constexpr const char* kTrivialBounds = "1.2"; // monotonicity in the Dirichlet set
inline constexpr const char* kRectangleEquality = "3.1-remark";
} // namespace theorem_id

struct Condition {
    std::string name;
    bool ok = true;
    double margin = 0.0; // signed diagnostic; >= 0 when the condition holds
    bool marginal = false;
    std::string detail;
};

struct HypothesisVerdict {
    std::string theorem;
    std::vector<Condition> conditions;
    bool ok = true;
    std::string branch; // "i", "ii" or "" for potential conditions
    int samples_per_edge = 33;
    int interior_samples = 0;
    std::vector<std::string> notes;
    std::map<std::string, double> metrics;

    void add(Condition c) {
        ok = ok && c.ok;
        conditions.push_back(std::move(c));
    }
    const Condition* find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct HypothesisOptions {
    Tolerances tol;
    int samples_per_edge = 33;
    int interior_samples = 0; // 0 means 32 d
    bool reflected_distance = false; // use the reflection construction for distance potentials
};

// ---------------------------------------------------------------------------
// Monotone boundary profile

struct ProfileEdge {
    int facet = -1;
    double t = 0.0; // (b.tau)(b.nu) on the edge
    bool is_gamma_prime = false;
    std::vector<Point> points;
    std::vector<double> potential;
};

struct EdgeMonotoneProfile {
    std::vector<ProfileEdge> edges;   // ordered along the boundary walk
    std::vector<double> corner_jumps; // t_j - t_{j+1} at interior corners P_1..P_{N-1}
};

struct MonotoneResult {
    bool ok = true;
    double worst_increase = 0.0;
    double value_scale = 0.0;
    double lambda = 0.0;
    double lambda_min = -std::numeric_limits<double>::infinity(); // feasible lambda interval
    double lambda_max = std::numeric_limits<double>::infinity();
    bool feasible_nonempty = true;
    EdgeMonotoneProfile profile;
};

/// Outward unit normal of the straight Dirichlet portion gamma_prime.
inline Vec3 straight_normal(const ConvexPolytope& p, const std::set<int>& gamma_prime, const Tolerances& tol = {}) {
    if (gamma_prime.empty()) throw GammaPrimeNotStraight("gamma_prime is empty");
    if (!facets_coplanar(p, gamma_prime, tol.planarity))
        throw GammaPrimeNotStraight("gamma_prime facets do not share one line/plane");
    return facet_frame(p, *gamma_prime.begin()).normal;
}

inline EdgeMonotoneProfile edge_profile(const ConvexPolytope& p, const std::set<int>& gamma,
                                        const std::set<int>& gamma_prime, const PotentialSpec& V,
                                        int per_edge = 33) {
    if (p.dim != 2) throw Error("edge profile is planar only");
    const Vec3 b = straight_normal(p, gamma_prime);
    EdgeMonotoneProfile prof;
    for (const auto& w : boundary_walk(p, gamma)) {
        ProfileEdge e;
        e.facet = w.facet;
        e.is_gamma_prime = gamma_prime.count(w.facet) > 0;
        const FacetFrame fr = facet_frame(p, w.facet);
        e.t = e.is_gamma_prime ? 0.0 : b.dot(fr.tangent) * b.dot(fr.normal);
        e.points = facet_samples(p, w.facet, std::max(per_edge, 2));
        for (const auto& x : e.points) e.potential.push_back(evaluate(V, x));
        prof.edges.push_back(std::move(e));
    }
    for (std::size_t j = 0; j + 1 < prof.edges.size(); ++j) prof.corner_jumps.push_back(prof.edges[j].t - prof.edges[j + 1].t);
    return prof;
}

/// (lambda - V)(b.tau)(b.nu) sampled along the boundary outside gamma in
/// positive orientation (end points of each edge are the one-sided corner
/// limits) must not increase by more than tol.monotone times its scale.
/// Also returns the interval of lambda values for which this holds.
inline MonotoneResult check_monotone_profile(const ConvexPolytope& p, const std::set<int>& gamma,
                                             const std::set<int>& gamma_prime, const PotentialSpec& V,
                                             double lambda, const HypothesisOptions& opt = {}) {
    MonotoneResult r;
    r.lambda = lambda;
    r.profile = edge_profile(p, gamma, gamma_prime, V, opt.samples_per_edge);
    std::vector<double> t, v, f;
    for (const auto& e : r.profile.edges)
        for (std::size_t i = 0; i < e.points.size(); ++i) {
            t.push_back(e.t);
            v.push_back(e.potential[i]);
            f.push_back((lambda - e.potential[i]) * e.t);
        }
    for (double x : f) r.value_scale = std::max(r.value_scale, std::abs(x));
    const double slack = opt.tol.monotone * r.value_scale;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        r.worst_increase = std::max(r.worst_increase, f[i + 1] - f[i]);
        // f_{i+1} - f_i = lambda (t_{i+1} - t_i) - (V_{i+1} t_{i+1} - V_i t_i) <= slack
        const double a = t[i + 1] - t[i];
        const double c = v[i + 1] * t[i + 1] - v[i] * t[i] + slack;
        if (a > 0.0) r.lambda_max = std::min(r.lambda_max, c / a);
        else if (a < 0.0) r.lambda_min = std::max(r.lambda_min, c / a);
        else if (c < 0.0) r.feasible_nonempty = false;
    }
    if (r.lambda_min > r.lambda_max) r.feasible_nonempty = false;
    r.ok = r.worst_increase <= slack;
    return r;
}

// ---------------------------------------------------------------------------
// Shared pieces

namespace detail {

inline std::vector<Point> interior_points(const ConvexPolytope& p, const HypothesisOptions& opt) {
    const std::size_t n = opt.interior_samples > 0 ? static_cast<std::size_t>(opt.interior_samples)
                                                   : default_sample_count(p.dim);
    return interior_samples(p, n);
}

/// Facet samples pulled by 1e-6 of the way towards the facet centroid so that
/// corners and edges (where normals jump) are excluded.
inline std::vector<Point> open_facet_samples(const ConvexPolytope& p, int f, int per_facet) {
    const Point c = facet_centroid(p, p.facets[f]);
    auto pts = facet_samples(p, f, per_facet);
    for (auto& x : pts) x += 1e-6 * (c - x);
    return pts;
}

inline Condition convexity_condition(const ConvexPolytope& p, const Tolerances& tol) {
    const ConvexityReport cr = check_convex(p, tol);
    return {"convex", cr.ok, -cr.worst_violation, false, cr.ok ? "" : "vertex outside a facet plane"};
}

/// Branch (i): b.grad V vanishes at every sample.
inline Condition constant_along_normal(const PotentialSpec& V, const std::vector<Point>& pts, const Vec3& b,
                                       const Tolerances& tol) {
    double worst = 0.0, gmax = 0.0;
    int skipped = 0;
    for (const auto& x : pts) {
        try {
            const Vec3 g = gradient(V, x, tol).value;
            worst = std::max(worst, std::abs(b.dot(g)));
            gmax = std::max(gmax, g.norm());
        } catch (const NotDifferentiableHere&) {
            ++skipped;
        }
    }
    const double thr = 1e-8 * std::max(1.0, gmax);
    Condition c{"potential_constant_along_b", worst <= thr, thr - worst, false, ""};
    if (skipped) c.detail = std::to_string(skipped) + " non-differentiable samples skipped";
    return c;
}

/// min over samples of (b.grad V)(b.nu) (or b.grad V when use_normal is false).
inline Condition sign_condition(const std::string& name, const PotentialSpec& V, const ConvexPolytope& p,
                                const std::vector<int>& facets, const Vec3& b, bool use_normal, int per_facet,
                                const Tolerances& tol) {
    double worst = std::numeric_limits<double>::infinity(), gmax = 0.0;
    int skipped = 0;
    for (int f : facets) {
        const Vec3 nu = facet_frame(p, f).normal;
        for (const auto& x : open_facet_samples(p, f, per_facet)) {
            try {
                const Vec3 g = gradient(V, x, tol).value;
                gmax = std::max(gmax, g.norm());
                worst = std::min(worst, b.dot(g) * (use_normal ? b.dot(nu) : 1.0));
            } catch (const NotDifferentiableHere&) {
                ++skipped;
            }
        }
    }
    if (!std::isfinite(worst)) worst = 0.0;
    const double thr = tol.potential_sign * std::max(1.0, gmax);
    Condition c{name, worst >= -thr, worst, std::abs(worst) <= thr, ""};
    if (skipped) c.detail = std::to_string(skipped) + " non-differentiable samples skipped";
    return c;
}

inline Condition concavity_condition(const ConvexPolytope& p, const PotentialSpec& V, const std::set<int>& gamma,
                                     const std::set<int>& gamma_prime, const std::vector<Point>& pts,
                                     const HypothesisOptions& opt) {
    if (opt.reflected_distance && holds<DistancePotential>(V) && p.dim == 2) {
        const auto rc = reflected_distance_concavity(p, gamma, gamma_prime, pts.size());
        Condition c{"potential_concave", rc.verdict.concave, -rc.verdict.max_eigenvalue, false,
                    "reflected-domain construction"};
        if (!rc.reflected_convex) c.detail += "; reflected domain not convex";
        return c;
    }
    const auto cv = concavity_check(V, pts, p.dim, opt.tol);
    Condition c{"potential_concave", cv.concave, cv.threshold - cv.max_eigenvalue, false,
                "max Hessian eigenvalue " + std::to_string(cv.max_eigenvalue)};
    if (cv.skipped) c.detail += "; " + std::to_string(cv.skipped) + " samples skipped";
    if (cv.samples == 0) c.detail += "; no differentiable samples";
    return c;
}

/// Corner angle at vertex v of a polygon.
inline double corner_angle(const ConvexPolytope& p, int v) {
    for (const auto& ca : interior_angles(p))
        if (ca.corner == v) return ca.angle;
    throw Error("corner not found");
}

inline Condition endpoint_angles(const ConvexPolytope& p, const std::set<int>& gamma, const Tolerances& tol) {
    const auto walk = boundary_walk(p, gamma);
    Condition c{"gamma_endpoint_angles_acute", true, 0.0, false, ""};
    if (walk.empty()) {
        c.detail = "gamma is the whole boundary";
        return c;
    }
    const int v0 = walk.front().start_corner, v1 = walk.back().end_corner;
    const double a0 = corner_angle(p, v0), a1 = corner_angle(p, v1);
    const double worst = std::max(a0, a1);
    c.margin = kPi / 2 - worst;
    c.ok = worst < kPi / 2 - tol.angle;
    c.marginal = std::abs(worst - kPi / 2) <= tol.angle;
    c.detail = "angles " + std::to_string(a0) + ", " + std::to_string(a1);
    return c;
}

inline std::vector<int> complement(const ConvexPolytope& p, const std::set<int>& s) {
    std::vector<int> out;
    for (int f = 0; f < static_cast<int>(p.num_facets()); ++f)
        if (!s.count(f)) out.push_back(f);
    return out;
}

inline Condition disjoint(const std::set<int>& a, const std::set<int>& b) {
    for (int f : a)
        if (b.count(f)) return {"gamma_disjoint_gamma_prime", false, -1.0, false, "shared facet " + std::to_string(f)};
    return {"gamma_disjoint_gamma_prime", true, 0.0, false, ""};
}

/// Potential branches shared by the exhaustive results: (i) b.grad V = 0, or
/// (ii) V concave and b.grad V >= 0 on gamma_prime.
inline void exhaustive_potential_branch(HypothesisVerdict& hv, const ConvexPolytope& p, const std::set<int>& gamma,
                                        const std::set<int>& gamma_prime, const PotentialSpec& V, const Vec3& b,
                                        const HypothesisOptions& opt) {
    const auto pts = interior_points(p, opt);
    hv.interior_samples = static_cast<int>(pts.size());
    std::vector<Point> all = pts;
    for (int f = 0; f < static_cast<int>(p.num_facets()); ++f)
        for (const auto& x : open_facet_samples(p, f, opt.samples_per_edge)) all.push_back(x);
    Condition b1 = constant_along_normal(V, all, b, opt.tol);
    if (b1.ok) {
        hv.branch = "i";
        hv.add(b1);
        return;
    }
    Condition conc = concavity_condition(p, V, gamma, gamma_prime, pts, opt);
    Condition sign = sign_condition("b_dot_gradV_nonneg_on_gamma_prime", V, p,
                                    std::vector<int>(gamma_prime.begin(), gamma_prime.end()), b, false,
                                    opt.samples_per_edge, opt.tol);
    hv.branch = "ii";
    hv.notes.push_back("branch (i) fails: max |b.gradV| exceeds threshold by " + std::to_string(-b1.margin));
    hv.add(conc);
    hv.add(sign);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Verdicts

/// Straight-segment comparison in the plane.
inline HypothesisVerdict check_straight_segment(const ConvexPolytope& p, const std::set<int>& gamma,
                                           const std::set<int>& gamma_prime, const PotentialSpec& V,
                                           double lambda, const HypothesisOptions& opt = {}) {
    HypothesisVerdict hv;
    hv.theorem = theorem_id::kStraightSegment;
    hv.samples_per_edge = opt.samples_per_edge;
    if (p.dim != 2) throw Error("planar result requires dim = 2");
    hv.add(detail::convexity_condition(p, opt.tol));
    const Vec3 b = straight_normal(p, gamma_prime, opt.tol);
    hv.add({"gamma_prime_straight", true, 0.0, false, ""});
    if (!is_contiguous(p, gamma)) throw GammaNotConnected("gamma edges are not contiguous");
    hv.add({"gamma_connected", true, 0.0, false, ""});
    hv.add(detail::disjoint(gamma, gamma_prime));
    hv.add(detail::endpoint_angles(p, gamma, opt.tol));

    const MonotoneResult mono = check_monotone_profile(p, gamma, gamma_prime, V, lambda, opt);
    Condition mc{"monotone_profile", mono.ok, -mono.worst_increase, false, ""};
    mc.detail = "feasible lambda in [" + std::to_string(mono.lambda_min) + ", " + std::to_string(mono.lambda_max) + "]";
    hv.add(mc);
    hv.metrics["profile_lambda"] = lambda;
    hv.metrics["profile_lambda_min"] = mono.lambda_min;
    hv.metrics["profile_lambda_max"] = mono.lambda_max;
    hv.metrics["profile_worst_increase"] = mono.worst_increase;

    const auto pts = detail::interior_points(p, opt);
    hv.interior_samples = static_cast<int>(pts.size());
    std::vector<Point> all = pts;
    for (int f = 0; f < static_cast<int>(p.num_facets()); ++f)
        for (const auto& x : detail::open_facet_samples(p, f, opt.samples_per_edge)) all.push_back(x);
    Condition b1 = detail::constant_along_normal(V, all, b, opt.tol);
    if (b1.ok) {
        hv.branch = "i";
        hv.add(b1);
        return hv;
    }
    hv.branch = "ii";
    hv.notes.push_back("branch (i) fails: max |b.gradV| exceeds threshold by " + std::to_string(-b1.margin));
    hv.add(detail::concavity_condition(p, V, gamma, gamma_prime, pts, opt));
    hv.add(detail::sign_condition("b_dot_gradV_times_b_dot_nu_nonneg", V, p, detail::complement(p, gamma), b, true,
                                  opt.samples_per_edge, opt.tol));
    return hv;
}

/// Dual configuration in the plane (gamma and gamma_prime cover the boundary).
inline HypothesisVerdict check_dual_planar(const ConvexPolytope& p, const std::set<int>& gamma,
                                             const std::set<int>& gamma_prime, const PotentialSpec& V,
                                             const HypothesisOptions& opt = {}) {
    if (p.dim != 2) throw Error("planar result requires dim = 2");
    validate_partition(p, {gamma, gamma_prime}, true);
    HypothesisVerdict hv;
    hv.theorem = theorem_id::kDualPlanar;
    hv.samples_per_edge = opt.samples_per_edge;
    hv.add(detail::convexity_condition(p, opt.tol));
    const Vec3 b = straight_normal(p, gamma_prime, opt.tol);
    hv.add({"gamma_prime_straight", true, 0.0, false, ""});
    if (!is_contiguous(p, gamma)) throw GammaNotConnected("gamma edges are not contiguous");
    hv.add({"gamma_connected", true, 0.0, false, ""});
    hv.add(detail::disjoint(gamma, gamma_prime));
    hv.add(detail::endpoint_angles(p, gamma, opt.tol));
    detail::exhaustive_potential_branch(hv, p, gamma, gamma_prime, V, b, opt);
    return hv;
}

/// Dihedral angles between gamma facets and gamma_prime facets.
inline Condition dihedral_angles_at_interface(const ConvexPolytope& p, const std::set<int>& gamma,
                                              const std::set<int>& gamma_prime, const Tolerances& tol = {}) {
    double worst = 0.0;
    int wf = -1, wg = -1;
    for (const auto& e : facet_edges(p)) {
        const bool cross = (gamma.count(e.facet_left) && gamma_prime.count(e.facet_right)) || (gamma.count(e.facet_right) && gamma_prime.count(e.facet_left));
        if (!cross) continue;
        const double a = interior_angle_between(p, e.facet_left, e.facet_right);
        if (a > worst) {
            worst = a;
            wf = e.facet_left;
            wg = e.facet_right;
        }
    }
    Condition c{"dihedral_angles_at_most_right", worst <= kPi / 2 + tol.angle, kPi / 2 - worst,
                std::abs(worst - kPi / 2) <= tol.angle, ""};
    c.detail = "largest angle " + std::to_string(worst) + " between facets " + std::to_string(wf) + " and " +
               std::to_string(wg);
    return c;
}

/// Dual configuration in three dimensions.
inline HypothesisVerdict check_dual_higher_dim(const ConvexPolytope& p, const std::set<int>& gamma,
                                           const std::set<int>& gamma_prime, const PotentialSpec& V,
                                           const HypothesisOptions& opt = {}) {
    if (p.dim != 3) throw Error("higher-dimensional result requires dim = 3");
    validate_partition(p, {gamma, gamma_prime}, true);
    HypothesisVerdict hv;
    hv.theorem = theorem_id::kDualHigherDim;
    hv.samples_per_edge = opt.samples_per_edge;
    hv.add(detail::convexity_condition(p, opt.tol));
    const bool planar = facets_coplanar(p, gamma_prime, opt.tol.planarity);
    hv.add({"gamma_prime_planar", planar, 0.0, false, ""});
    hv.add(detail::disjoint(gamma, gamma_prime));
    hv.add(dihedral_angles_at_interface(p, gamma, gamma_prime, opt.tol));
    if (!planar) return hv;
    const Vec3 b = facet_frame(p, *gamma_prime.begin()).normal;
    detail::exhaustive_potential_branch(hv, p, gamma, gamma_prime, V, b, opt);
    return hv;
}

// ---------------------------------------------------------------------------
// Index shift

struct DimensionM {
    int m = 0;
    MatX basis; // d x m
    int dim_s = 0;
    int dim_grad_perp = 0;
    int skipped = 0;
};

/// dim((grad V)^perp ∩ S(gamma)) as the null space of the stacked normals of
/// gamma and gradients scaled by the largest gradient norm.
inline DimensionM dimension_m(const PotentialSpec& V, const std::set<int>& gamma, const ConvexPolytope& p,
                              const HypothesisOptions& opt = {}) {
    DimensionM out;
    const auto pts = detail::interior_points(p, opt);
    int skipped = 0;
    MatX grads = gradient_rows(V, pts, p.dim, &skipped, opt.tol);
    out.skipped = skipped;
    const double gmax = grads.rows() ? grads.rowwise().norm().maxCoeff() : 0.0;
    out.dim_s = static_cast<int>(tangent_space_S(p, gamma, opt.tol).cols());
    out.dim_grad_perp = static_cast<int>(null_space(grads, p.dim, opt.tol.grad_null_space).basis.cols());
    if (gmax > 0.0) grads /= gmax;
    // zero out rows that are numerically null relative to the largest gradient
    for (Eigen::Index i = 0; i < grads.rows(); ++i)
        if (grads.row(i).norm() <= opt.tol.grad_null_space) grads.row(i).setZero();
    MatX rows(static_cast<Eigen::Index>(gamma.size()) + grads.rows(), p.dim);
    Eigen::Index r = 0;
    for (int f : gamma) rows.row(r++) = facet_frame(p, f).normal.head(p.dim).transpose();
    if (grads.rows()) rows.bottomRows(grads.rows()) = grads;
    out.basis = null_space(rows, p.dim, opt.tol.grad_null_space).basis;
    out.m = static_cast<int>(out.basis.cols());
    return out;
}

} // namespace mixed_spectra
