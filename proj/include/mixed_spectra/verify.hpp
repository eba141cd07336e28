// Refinement studies over boundary configurations, extrapolated limits and
// the verdicts for each eigenvalue comparison claim.
#pragma once

#include "eigensolve.hpp"
#include "extrapolate.hpp"
#include "hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mixed_spectra {

struct Scenario {
    std::string id;
    std::string description;
    ConvexPolytope domain;
    BoundaryPartition partition;
    std::set<int> sigma; // nested Dirichlet subset for the strict index-shift and trivial-bound claims
    PotentialSpec potential;
    int levels = 4;        // number of refinement levels solved
    int finest_level = 5;  // refinement count of the finest mesh
    int k = 4;
    double tol = 1e-9;
    std::vector<std::string> theorems;
    bool reflected_distance = false;
    SolverMethod method = SolverMethod::Auto;
    std::vector<std::string> notes;
    std::string export_vtk; // path prefix; empty disables
};

struct LevelRow {
    int level = 0;
    double h = 0.0;
    int n_free = 0;
    std::vector<double> eigenvalues;
    std::vector<double> residuals;
    std::string solver;
};

struct ConfigurationResult {
    std::string name;
    std::set<int> dirichlet;
    int count = 0; // eigenvalues requested
    std::vector<LevelRow> levels;
    std::vector<Extrapolation> extrapolated;
    std::vector<bool> possibly_multiple;
    bool failed = false;
    std::string error;

    double limit(int index) const { return extrapolated.at(index - 1).value; }
    double error_bar(int index) const { return extrapolated.at(index - 1).error_bar; }
    bool has(int index) const { return !failed && index >= 1 && index <= static_cast<int>(extrapolated.size()); }
};

enum class ClaimStatus { Verified, Inconclusive, Violated, InconclusiveByDesign, Failed };

inline const char* to_string(ClaimStatus s) {
    switch (s) {
    case ClaimStatus::Verified: return "verified";
    case ClaimStatus::Inconclusive: return "inconclusive";
    case ClaimStatus::Violated: return "violated";
    case ClaimStatus::InconclusiveByDesign: return "inconclusive-by-design";
    case ClaimStatus::Failed: return "failed";
    }
    return "?";
}

struct ClaimVerdict {
    std::string claim;
    std::string theorem;
    int index = 1;
    double lhs = 0.0; // claimed smaller side
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
    double error_bar = 0.0;
    ClaimStatus status = ClaimStatus::Inconclusive;
    std::string note;
};

/// verified iff margin > 3 err, violated iff margin < -3 err.
inline ClaimStatus classify(double margin, double error_bar) {
    if (!std::isfinite(margin) || !std::isfinite(error_bar)) return ClaimStatus::Inconclusive;
    if (margin > 3.0 * error_bar) return ClaimStatus::Verified;
    if (margin < -3.0 * error_bar) return ClaimStatus::Violated;
    return ClaimStatus::Inconclusive;
}

struct NestedLevelCheck {
    std::string smaller, larger; // configuration names
    int level = 0;
    int index = 1;
    double violation = 0.0; // max(0, lambda_smaller - lambda_larger)
};

struct ScenarioReport {
    std::string id;
    std::string description;
    int dim = 2;
    double inf_potential = 0.0;
    int m = -1; // -1 when not computed
    std::vector<ConfigurationResult> configurations;
    std::vector<HypothesisVerdict> hypotheses;
    std::vector<ClaimVerdict> claims;
    std::vector<NestedLevelCheck> nested_checks;
    std::vector<std::string> notes;
    bool failed = false;
    std::string error;

    const ConfigurationResult* config(const std::string& name) const {
        for (const auto& c : configurations)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline bool wants(const Scenario& s, const char* id) {
    return std::find(s.theorems.begin(), s.theorems.end(), id) != s.theorems.end();
}

inline std::set<int> all_facets(const ConvexPolytope& p) {
    std::set<int> out;
    for (int f = 0; f < static_cast<int>(p.num_facets()); ++f) out.insert(f);
    return out;
}

inline ClaimVerdict compare(const std::string& claim, const char* theorem, int index, const ConfigurationResult& small,
                            int small_index, const ConfigurationResult& large, int large_index) {
    ClaimVerdict c;
    c.claim = claim;
    c.theorem = theorem;
    c.index = index;
    if (!small.has(small_index) || !large.has(large_index)) {
        c.status = ClaimStatus::Failed;
        c.note = "configuration failed or eigenvalue unavailable";
        c.lhs = c.rhs = c.margin = std::numeric_limits<double>::quiet_NaN();
        return c;
    }
    c.lhs = small.limit(small_index);
    c.rhs = large.limit(large_index);
    c.margin = c.rhs - c.lhs;
    c.error_bar = small.error_bar(small_index) + large.error_bar(large_index);
    c.status = classify(c.margin, c.error_bar);
    const auto& es = small.extrapolated[small_index - 1];
    const auto& el = large.extrapolated[large_index - 1];
    if (!es.reliable || !el.reliable) c.note = "extrapolation unreliable";
    if (c.status == ClaimStatus::Verified) c.note += c.note.empty() ? "consistent with strict inequality" : "";
    return c;
}

inline std::string dirichlet_label(const std::set<int>& s) {
    std::string out = "{";
    for (int f : s) out += (out.size() > 1 ? "," : "") + std::to_string(f);
    return out + "}";
}

} // namespace detail

/// Solves every requested configuration on the same mesh sequence.
inline void solve_configurations(const Scenario& s, std::vector<ConfigurationResult>& configs, double inf_v) {
    if (s.levels < 3) throw InsufficientLevels("at least 3 levels are needed, got " + std::to_string(s.levels));
    const int first = s.finest_level - s.levels + 1;
    if (first < 0) throw InsufficientLevels("finest level too coarse for the requested number of levels");
    SimplicialMesh mesh = triangulate(s.domain, s.partition);
    for (int lvl = 0; lvl < first; ++lvl) mesh = refine(mesh);
    SolverOptions base;
    base.tol = s.tol;
    base.method = s.method;
    base.shift = inf_v - 1.0;
    for (int lvl = first; lvl <= s.finest_level; ++lvl) {
        if (lvl > first) mesh = refine(mesh);
        if (!s.export_vtk.empty()) {
            std::ofstream os(s.export_vtk + "_level" + std::to_string(lvl) + ".vtk");
            write_vtk(os, mesh);
        }
        const SystemMatrices sys = assemble_system(mesh, s.potential);
        const double h = mesh_size(mesh);
        for (auto& c : configs) {
            if (c.failed) continue;
            try {
                const DofMap dofs = make_dofmap(mesh, c.dirichlet);
                const SparseMatrix K = constrain(sys.stiffness, dofs), M = constrain(sys.mass, dofs);
                SolverOptions opt = base;
                opt.k = c.count;
                EigenResult r = first_eigenvector_sign_fix(smallest_eigenpairs(K, M, opt));
                LevelRow row;
                row.level = lvl;
                row.h = h;
                row.n_free = dofs.n_free();
                row.eigenvalues = r.eigenvalues;
                row.residuals = r.residuals;
                row.solver = r.solver;
                c.levels.push_back(std::move(row));
                if (lvl == s.finest_level) c.possibly_multiple = r.possibly_multiple;
            } catch (const Error& e) {
                c.failed = true;
                c.error = e.what();
            }
        }
    }
    for (auto& c : configs) {
        if (c.failed) continue;
        try {
            for (int i = 0; i < c.count; ++i) {
                std::vector<LevelValue> seq;
                for (const auto& row : c.levels)
                    if (static_cast<int>(row.eigenvalues.size()) > i) seq.push_back({row.h, row.eigenvalues[i]});
                if (seq.size() < 3) break;
                c.extrapolated.push_back(extrapolate(seq));
            }
        } catch (const Error& e) {
            c.failed = true;
            c.error = e.what();
        }
    }
}

/// Margins lambda*_1 - inf V for every configuration.
inline std::vector<ClaimVerdict> check_above_infimum(const ScenarioReport& r) {
    std::vector<ClaimVerdict> out;
    for (const auto& c : r.configurations) {
        ClaimVerdict v;
        v.claim = "lambda_1[" + c.name + "] > inf V";
        v.theorem = theorem_id::kAboveInfimum;
        v.index = 1;
        v.lhs = r.inf_potential;
        if (!c.has(1)) {
            v.status = ClaimStatus::Failed;
            v.rhs = v.margin = std::numeric_limits<double>::quiet_NaN();
            v.note = "configuration failed";
        } else {
            v.rhs = c.limit(1);
            v.margin = v.rhs - v.lhs;
            v.error_bar = c.error_bar(1);
            v.status = classify(v.margin, v.error_bar);
        }
        out.push_back(v);
    }
    return out;
}

/// Per-level discrete monotonicity lambda_k[smaller] <= lambda_k[larger] on a
/// shared mesh.
inline std::vector<NestedLevelCheck> nested_level_checks(const ConfigurationResult& smaller,
                                                         const ConfigurationResult& larger) {
    std::vector<NestedLevelCheck> out;
    for (const auto& a : smaller.levels)
        for (const auto& b : larger.levels) {
            if (a.level != b.level) continue;
            const std::size_t n = std::min(a.eigenvalues.size(), b.eigenvalues.size());
            for (std::size_t i = 0; i < n; ++i)
                out.push_back({smaller.name, larger.name, a.level, static_cast<int>(i) + 1,
                               std::max(0.0, a.eigenvalues[i] - b.eigenvalues[i])});
        }
    return out;
}

inline ScenarioReport run_scenario(const Scenario& s) {
    ScenarioReport rep;
    rep.id = s.id;
    rep.description = s.description;
    rep.dim = s.domain.dim;
    rep.notes = s.notes;

    validate(s.domain);
    const ConvexityReport cr = check_convex(s.domain);
    if (!cr.ok)
        throw MalformedPolytope("ConvexityReport ok=false worst_violation=" + std::to_string(cr.worst_violation) +
                                " violating_vertex=" + std::to_string(cr.violating_vertex) +
                                " violating_facet=" + std::to_string(cr.violating_facet));
    validate_partition(s.domain, s.partition, false);
    rep.inf_potential = infimum(s.potential, s.domain);

    HypothesisOptions hopt;
    hopt.reflected_distance = s.reflected_distance;

    const bool pair_claims = detail::wants(s, theorem_id::kStraightSegment) || detail::wants(s, theorem_id::kDualPlanar) ||
                             detail::wants(s, theorem_id::kDualHigherDim) ||
                             detail::wants(s, theorem_id::kRectangleEquality);
    const bool shift = detail::wants(s, theorem_id::kIndexShift);
    const bool shift_strict = detail::wants(s, theorem_id::kIndexShiftStrict);
    const bool trivial = detail::wants(s, theorem_id::kTrivialBounds);
    if (shift || shift_strict) {
        const DimensionM dm = dimension_m(s.potential, s.partition.gamma, s.domain, hopt);
        rep.m = dm.m;
    }
    const int extra = std::max(rep.m, 0);

    std::vector<ConfigurationResult> configs;
    auto add = [&](const std::string& name, const std::set<int>& dirichlet, int count) {
        for (auto& c : configs)
            if (c.name == name) {
                c.count = std::max(c.count, count);
                return;
            }
        ConfigurationResult c;
        c.name = name;
        c.dirichlet = dirichlet;
        c.count = count;
        configs.push_back(std::move(c));
    };
    add("gamma", s.partition.gamma, s.k + (shift ? extra : 0));
    if (pair_claims) {
        if (s.partition.gamma_prime.empty()) throw ScenarioError("gamma_prime required for the requested claims");
        add("gamma_prime", s.partition.gamma_prime, s.k);
    }
    if (shift || shift_strict || trivial) add("dirichlet", detail::all_facets(s.domain), s.k);
    if (shift_strict || trivial) {
        if (s.sigma.empty()) throw ScenarioError("sigma required for the requested claims");
        for (int f : s.sigma)
            if (!s.partition.gamma.count(f)) throw ScenarioError("sigma must be a subset of gamma");
        add("sigma", s.sigma, s.k + (shift_strict ? extra : 0));
    }

    solve_configurations(s, configs, rep.inf_potential);
    rep.configurations = configs;
    const auto* g = rep.config("gamma");
    const auto* gp = rep.config("gamma_prime");
    const auto* d = rep.config("dirichlet");
    const auto* sg = rep.config("sigma");

    // hypotheses
    const double lambda_gamma = g && g->has(1) ? g->limit(1) : std::numeric_limits<double>::quiet_NaN();
    auto guarded = [&](const char* theorem, auto&& fn) {
        try {
            rep.hypotheses.push_back(fn());
        } catch (const Error& e) {
            HypothesisVerdict hv;
            hv.theorem = theorem;
            hv.ok = false;
            hv.notes.push_back(e.what());
            rep.hypotheses.push_back(hv);
        }
    };
    if (detail::wants(s, theorem_id::kStraightSegment)) {
        guarded(theorem_id::kStraightSegment, [&] {
            HypothesisVerdict hv = check_straight_segment(s.domain, s.partition.gamma, s.partition.gamma_prime,
                                                          s.potential, lambda_gamma, hopt);
            if (g && g->has(1)) {
                const double err = g->error_bar(1);
                const double lo = hv.metrics["profile_lambda_min"], hi = hv.metrics["profile_lambda_max"];
                hv.metrics["profile_lambda_error_bar"] = err;
                hv.metrics["profile_interval_robust"] = (lambda_gamma - err >= lo && lambda_gamma + err <= hi) ? 1.0 : 0.0;
            }
            return hv;
        });
    }
    if (detail::wants(s, theorem_id::kDualPlanar))
        guarded(theorem_id::kDualPlanar, [&] {
            return check_dual_planar(s.domain, s.partition.gamma, s.partition.gamma_prime, s.potential, hopt);
        });
    if (detail::wants(s, theorem_id::kDualHigherDim))
        guarded(theorem_id::kDualHigherDim, [&] {
            return check_dual_higher_dim(s.domain, s.partition.gamma, s.partition.gamma_prime, s.potential, hopt);
        });

    // claims
    for (const char* id : {theorem_id::kStraightSegment, theorem_id::kDualPlanar, theorem_id::kDualHigherDim}) {
        if (!detail::wants(s, id)) continue;
        rep.claims.push_back(detail::compare("lambda_1[gamma_prime] < lambda_1[gamma]", id, 1, *gp, 1, *g, 1));
    }
    if (detail::wants(s, theorem_id::kRectangleEquality)) {
        ClaimVerdict c = detail::compare("lambda_1[gamma_prime] = lambda_1[gamma]", theorem_id::kRectangleEquality, 1,
                                         *gp, 1, *g, 1);
        if (c.status != ClaimStatus::Failed) {
            c.status = std::abs(c.margin) <= 3.0 * c.error_bar ? ClaimStatus::InconclusiveByDesign : ClaimStatus::Violated;
            c.note = "equality expected by symmetry";
        }
        rep.claims.push_back(c);
    }
    if (shift)
        for (int k = 1; k <= s.k; ++k)
            rep.claims.push_back(detail::compare("lambda_" + std::to_string(k + rep.m) + "[gamma] <= lambda_" +
                                                     std::to_string(k) + "[dirichlet]",
                                                 theorem_id::kIndexShift, k, *g, k + rep.m, *d, k));
    if (shift_strict)
        for (int k = 1; k <= s.k; ++k)
            rep.claims.push_back(detail::compare("lambda_" + std::to_string(k + rep.m) + "[sigma] < lambda_" +
                                                     std::to_string(k) + "[dirichlet]",
                                                 theorem_id::kIndexShiftStrict, k, *sg, k + rep.m, *d, k));
    if (trivial) {
        for (int k = 1; k <= s.k; ++k) {
            rep.claims.push_back(detail::compare("lambda_" + std::to_string(k) + "[sigma] <= lambda_" +
                                                     std::to_string(k) + "[gamma]",
                                                 theorem_id::kTrivialBounds, k, *sg, k, *g, k));
            rep.claims.push_back(detail::compare("lambda_" + std::to_string(k) + "[gamma] <= lambda_" +
                                                     std::to_string(k) + "[dirichlet]",
                                                 theorem_id::kTrivialBounds, k, *g, k, *d, k));
        }
        for (const auto& nc : nested_level_checks(*sg, *g)) rep.nested_checks.push_back(nc);
        for (const auto& nc : nested_level_checks(*g, *d)) rep.nested_checks.push_back(nc);
    }
    for (const auto& c : check_above_infimum(rep)) rep.claims.push_back(c);

    for (const auto& c : rep.configurations)
        if (c.failed) {
            rep.failed = true;
            rep.error += (rep.error.empty() ? "" : "; ") + c.name + ": " + c.error;
        }
    return rep;
}

/// Exit status: 0 when every claim is verified or inconclusive by design, 2 when
/// a configuration failed, 1 otherwise.
inline int exit_code(const std::vector<ScenarioReport>& reports) {
    bool bad = false;
    for (const auto& r : reports) {
        if (r.failed) return 2;
        for (const auto& c : r.claims) {
            if (c.status == ClaimStatus::Failed) return 2;
            if (c.status != ClaimStatus::Verified && c.status != ClaimStatus::InconclusiveByDesign) bad = true;
        }
    }
    return bad ? 1 : 0;
}

} // namespace mixed_spectra
