// JSON and CSV rendering of scenario reports.
#pragma once

#include "scenario.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

namespace mixed_spectra {

namespace detail {

inline Json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

inline Json numbers(const std::vector<double>& xs) {
    Json out = Json::array();
    for (double x : xs) out.push_back(number(x));
    return out;
}

} // namespace detail

inline Json to_json(const Extrapolation& e) {
    return Json{{"value", detail::number(e.value)},
                {"order", detail::number(e.order)},
                {"error_bar", detail::number(e.error_bar)},
                {"reliable", e.reliable},
                {"note", e.note}};
}

inline Json to_json(const HypothesisVerdict& hv) {
    Json conditions = Json::object(), margins = Json::object(), details = Json::object();
    for (const auto& c : hv.conditions) {
        conditions[c.name] = c.ok;
        margins[c.name] = detail::number(c.margin);
        if (!c.detail.empty() || c.marginal)
            details[c.name] = c.marginal ? (c.detail.empty() ? "marginal" : "marginal; " + c.detail) : c.detail;
    }
    Json metrics = Json::object();
    for (const auto& [k, v] : hv.metrics) metrics[k] = detail::number(v);
    return Json{{"theorem", hv.theorem},   {"ok", hv.ok},
                {"conditions", conditions}, {"margins", margins},
                {"details", details},       {"branch", hv.branch},
                {"samples_per_edge", hv.samples_per_edge}, {"interior_samples", hv.interior_samples},
                {"metrics", metrics},       {"notes", hv.notes}};
}

inline Json to_json(const ClaimVerdict& c) {
    return Json{{"claim", c.claim},
                {"theorem", c.theorem},
                {"k", c.index},
                {"lhs", detail::number(c.lhs)},
                {"rhs", detail::number(c.rhs)},
                {"margin", detail::number(c.margin)},
                {"error_bar", detail::number(c.error_bar)},
                {"status", to_string(c.status)},
                {"note", c.note}};
}

inline Json to_json(const ConfigurationResult& c) {
    Json levels = Json::array();
    for (const auto& r : c.levels)
        levels.push_back(Json{{"level", r.level},
                              {"h", detail::number(r.h)},
                              {"n_free", r.n_free},
                              {"eigenvalues", detail::numbers(r.eigenvalues)},
                              {"residuals", detail::numbers(r.residuals)},
                              {"solver", r.solver}});
    Json ex = Json::array();
    for (const auto& e : c.extrapolated) ex.push_back(to_json(e));
    Json mult = Json::array();
    for (bool b : c.possibly_multiple) mult.push_back(b);
    return Json{{"name", c.name},
                {"dirichlet", std::vector<int>(c.dirichlet.begin(), c.dirichlet.end())},
                {"levels", levels},
                {"extrapolated", ex},
                {"possibly_multiple", mult},
                {"failed", c.failed},
                {"error", c.error}};
}

inline Json to_json(const ScenarioReport& r) {
    Json configs = Json::array(), hyps = Json::array(), claims = Json::array(), nested = Json::array();
    for (const auto& c : r.configurations) configs.push_back(to_json(c));
    for (const auto& h : r.hypotheses) hyps.push_back(to_json(h));
    for (const auto& c : r.claims) claims.push_back(to_json(c));
    double worst_nested = 0.0;
    for (const auto& n : r.nested_checks) worst_nested = std::max(worst_nested, n.violation);
    Json out{{"id", r.id},
             {"description", r.description},
             {"dim", r.dim},
             {"inf_potential", detail::number(r.inf_potential)},
             {"configurations", configs},
             {"hypotheses", hyps},
             {"claims", claims},
             {"notes", r.notes},
             {"failed", r.failed},
             {"error", r.error}};
    if (r.m >= 0) out["m"] = r.m;
    if (!r.nested_checks.empty()) out["nested_level_max_violation"] = worst_nested;
    return out;
}

inline Json to_json(const std::vector<ScenarioReport>& reports) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return Json{{"scenarios", arr}, {"exit_code", exit_code(reports)}};
}

inline void write_json(std::ostream& os, const std::vector<ScenarioReport>& reports) {
    os << to_json(reports).dump(2) << '\n';
}

namespace detail {
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}
inline std::string csv_number(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}
} // namespace detail

/// One row per claim.
inline void write_csv(std::ostream& os, const std::vector<ScenarioReport>& reports) {
    os << "scenario,theorem,claim,k,lhs,rhs,margin,error_bar,status\n";
    for (const auto& r : reports)
        for (const auto& c : r.claims)
            os << detail::csv_field(r.id) << ',' << detail::csv_field(c.theorem) << ',' << detail::csv_field(c.claim)
               << ',' << c.index << ',' << detail::csv_number(c.lhs) << ',' << detail::csv_number(c.rhs) << ','
               << detail::csv_number(c.margin) << ',' << detail::csv_number(c.error_bar) << ','
               << to_string(c.status) << '\n';
}

/// Per-level convergence table for eigenvalue index k of one configuration.
inline void write_convergence_table(std::ostream& os, const ConfigurationResult& c, int k) {
    os << "configuration " << c.name << " dirichlet " << detail::dirichlet_label(c.dirichlet) << '\n';
    os << std::setw(6) << "level" << std::setw(14) << "h" << std::setw(10) << "n_free" << std::setw(22)
       << ("lambda_" + std::to_string(k)) << std::setw(10) << "order" << '\n';
    double prev = std::numeric_limits<double>::quiet_NaN(), prev_diff = prev;
    for (const auto& row : c.levels) {
        if (static_cast<int>(row.eigenvalues.size()) < k) continue;
        const double v = row.eigenvalues[k - 1];
        const double diff = v - prev;
        const double order = std::log2(prev_diff / diff);
        os << std::setw(6) << row.level << std::setw(14) << std::setprecision(6) << row.h << std::setw(10)
           << row.n_free << std::setw(22) << std::setprecision(12) << v << std::setw(10) << std::setprecision(4);
        if (std::isfinite(order)) os << order;
        else os << "-";
        os << '\n';
        prev_diff = diff;
        prev = v;
    }
    if (c.has(k)) {
        const auto& e = c.extrapolated[k - 1];
        os << "extrapolated " << std::setprecision(12) << e.value << " order " << std::setprecision(4) << e.order
           << " error_bar " << std::setprecision(3) << e.error_bar;
        if (!e.note.empty()) os << " (" << e.note << ")";
        os << '\n';
    } else if (c.failed) {
        os << "failed: " << c.error << '\n';
    }
}

} // namespace mixed_spectra
