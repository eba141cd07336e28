// Builtin scenario gallery and a bounded worker pool for running scenarios.
#pragma once

#include "verify.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace mixed_spectra {

namespace detail {

inline Scenario make(std::string id, std::string description, ConvexPolytope domain, BoundaryPartition part,
                     PotentialSpec V, std::vector<std::string> theorems) {
    Scenario s;
    s.id = std::move(id);
    s.description = std::move(description);
    s.domain = std::move(domain);
    s.partition = std::move(part);
    if (!holds<DistancePotential>(V) && !holds<GridPotential>(V)) V.length_scale = s.domain.scale();
    s.potential = std::move(V);
    s.theorems = std::move(theorems);
    s.finest_level = s.domain.dim == 2 ? 5 : 4;
    return s;
}

inline PotentialSpec zero() { return PotentialSpec(ConstantPotential{0.0}); }

} // namespace detail

/// Every builtin scenario, in id order.
inline std::vector<Scenario> gallery_scenarios() {
    using detail::make;
    using detail::zero;
    namespace tid = theorem_id;
    std::vector<Scenario> g;

    g.push_back(make("cor-triangle-hypotenuse", "right isoceles triangle, Dirichlet on the legs vs the hypotenuse",
                     right_isoceles_triangle(), {{0, 2}, {1}}, zero(), {tid::kDualPlanar}));

    {
        Scenario s = make("cube-bottom-face", "unit cube, Dirichlet on the bottom face vs the other five",
                          unit_cube(), {{1, 2, 3, 4, 5}, {0}}, zero(), {tid::kDualHigherDim});
        g.push_back(s);
    }

    g.push_back(make("ex-distance-triangle", "right isoceles triangle, V = dist(x, legs)",
                     right_isoceles_triangle(), {{0, 2}, {1}}, distance_to_facets(right_isoceles_triangle(), {0, 2}),
                     {tid::kDualPlanar}));
    g.back().reflected_distance = true;

    g.push_back(make("ex-exponential-balanced", "triangle (0,0),(1,0),(1,1), gamma_prime on y = x, V = exp(x1 + x2)",
                     polygon({{0, 0}, {1, 0}, {1, 1}}), {{0, 1}, {2}},
                     PotentialSpec(ExponentialPotential{1.0, 1.0, Vec3(1, 1, 0)}), {tid::kDualPlanar}));

    {
        Scenario s = make("ex-exponential-disputed", "right isoceles triangle, gamma_prime the hypotenuse, V = exp(x1 + x2)",
                          right_isoceles_triangle(), {{0, 2}, {1}},
                          PotentialSpec(ExponentialPotential{1.0, 1.0, Vec3(1, 1, 0)}), {tid::kDualPlanar});
        s.notes.push_back("hypothesis verdict disputed: exp is convex along (1,1), the concavity branch is not met");
        g.push_back(s);
    }

    g.push_back(make("ex-linear-triangle", "right isoceles triangle, gamma_prime the hypotenuse, V = x1 + 2 x2",
                     right_isoceles_triangle(), {{0, 2}, {1}}, PotentialSpec(LinearPotential{Vec3(1, 2, 0), 0.0}),
                     {tid::kDualPlanar}));

    g.push_back(make("ex-separable-triangle", "triangle (0,0),(2,1),(0,3), gamma_prime on x = 0, V = spline in x2",
                     polygon({{0, 0}, {2, 1}, {0, 3}}), {{0, 1}, {2}},
                     PotentialSpec(SeparablePotential{Vec3::UnitY(), CubicSpline::make({0, 1, 2, 3}, {0, 2, 1, 3})}),
                     {tid::kDualPlanar}));

    g.push_back(make("index-cube-face", "unit cube, Dirichlet on x = 0, V = 5 x1^2", unit_cube(), {{5}, {}},
                     PotentialSpec(SeparablePotential{Vec3::UnitX(), Polynomial{{0, 0, 5}}}), {tid::kIndexShift}));
    g.back().k = 2;

    g.push_back(make("index-simplex-exponential", "unit simplex, Dirichlet on the slanted face, V = exp(x1 + x2 + x3)",
                     unit_simplex(), {{3}, {}}, PotentialSpec(ExponentialPotential{1.0, 1.0, Vec3(1, 1, 1)}),
                     {tid::kIndexShift}));
    g.back().k = 2;
    g.back().finest_level = 5;

    g.push_back(make("index-square-left", "unit square, Dirichlet on x = 0, V = 4 x1", unit_square(), {{3}, {}},
                     PotentialSpec(LinearPotential{Vec3(4, 0, 0), 0.0}), {tid::kIndexShift}));
    g.back().k = 3;

    {
        Scenario s = make("index-square-strict", "unit square, gamma both vertical sides, sigma x = 0, V = 4 x1",
                          unit_square(), {{1, 3}, {}}, PotentialSpec(LinearPotential{Vec3(4, 0, 0), 0.0}),
                          {tid::kIndexShiftStrict});
        s.sigma = {3};
        s.k = 3;
        g.push_back(s);
    }

    g.push_back(make("prism-base", "polyhedron cut by two slanted planes, gamma_prime the base", slanted_prism(),
                     {{1, 2, 3, 4, 5, 6}, {0}}, zero(), {tid::kDualHigherDim}));

    g.push_back(make("rectangle-opposite-edges", "rectangle 2 x 1, Dirichlet on x = 2 vs x = 0", rectangle(2.0, 1.0),
                     {{1}, {3}}, zero(), {tid::kRectangleEquality}));

    for (int f = 0; f < 4; ++f) {
        std::set<int> rest;
        for (int h = 0; h < 4; ++h)
            if (h != f) rest.insert(h);
        g.push_back(make("simplex-face-" + std::to_string(f), "unit simplex, gamma_prime facet " + std::to_string(f),
                         unit_simplex(), {rest, {f}}, zero(), {tid::kDualHigherDim}));
    }

    g.push_back(make("square-prism-base", "square prism with tilted top, gamma_prime the base", square_prism(),
                     {{1, 2, 3, 4, 5}, {0}}, zero(), {tid::kDualHigherDim}));

    {
        Scenario s = make("square-trivial-bounds", "unit square, sigma x = 0 inside gamma x = 0 and y = 0",
                          unit_square(), {{0, 3}, {}}, PotentialSpec(LinearPotential{Vec3(1, 1, 0), 0.0}),
                          {tid::kTrivialBounds});
        s.sigma = {3};
        g.push_back(s);
    }

    g.push_back(make("thm-obtuse-triangle", "obtuse triangle, gamma the long side, gamma_prime on x = 0, V = x . nu",
                     obtuse_triangle(), {{1}, {2}},
                     PotentialSpec(LinearPotential{Vec3(-1, -2, 0) / std::sqrt(5.0), 0.0}), {tid::kStraightSegment}));

    // gamma the longer base x=3, gamma_prime the shorter base x=0; the bump lives on the y-range of gamma_prime
    g.push_back(make("thm-trapezium", "trapezium, gamma the longer base, gamma_prime the shorter base, bump in x2",
                     trapezium(), {{1}, {3}},
                     PotentialSpec(SeparablePotential{Vec3::UnitY(), Bump{2.0, 2.0, 5.0}}), {tid::kStraightSegment}));

    std::sort(g.begin(), g.end(), [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
    return g;
}

/// Keeps scenarios that check theorem `filter` or whose id contains it.
inline std::vector<Scenario> filter_scenarios(std::vector<Scenario> all, const std::string& filter) {
    if (filter.empty()) return all;
    std::vector<Scenario> out;
    for (auto& s : all)
        if (std::find(s.theorems.begin(), s.theorems.end(), filter) != s.theorems.end() ||
            s.id.find(filter) != std::string::npos)
            out.push_back(std::move(s));
    return out;
}

/// Worker count: explicit value, then MIXED_SPECTRA_JOBS, then logical cores.
inline int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MIXED_SPECTRA_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

/// run_scenario with errors captured in the report.
inline ScenarioReport run_guarded(const Scenario& s) {
    try {
        return run_scenario(s);
    } catch (const Error& e) {
        ScenarioReport r;
        r.id = s.id;
        r.description = s.description;
        r.dim = s.domain.dim;
        r.failed = true;
        r.error = e.what();
        return r;
    } catch (const std::exception& e) {
        ScenarioReport r;
        r.id = s.id;
        r.failed = true;
        r.error = e.what();
        return r;
    }
}

/// Runs scenarios on `jobs` workers; reports come back in input order.
inline std::vector<ScenarioReport> run_all(const std::vector<Scenario>& scenarios, int jobs) {
    std::vector<ScenarioReport> out(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < scenarios.size();) out[i] = run_guarded(scenarios[i]);
    };
    const int n = std::max(1, std::min<int>(resolve_jobs(jobs), static_cast<int>(scenarios.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

} // namespace mixed_spectra
