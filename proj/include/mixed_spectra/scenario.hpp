// Scenario files (JSON or TOML) and the builtin domain table.
#pragma once

#include "verify.hpp"

#include <json.hpp>
#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

namespace mixed_spectra {

using Json = nlohmann::json;

struct ScenarioFile {
    Scenario scenario;
    std::string json_out; // optional report paths
    std::string csv_out;
    std::string source;
};

/// Builtin domains addressable by name from scenario files.
inline ConvexPolytope builtin_domain(const std::string& name) {
    static const std::map<std::string, std::function<ConvexPolytope()>> table = {
        {"unit_square", unit_square},
        {"right_isoceles_triangle", right_isoceles_triangle},
        {"trapezium", trapezium},
        {"obtuse_triangle", obtuse_triangle},
        {"unit_cube", unit_cube},
        {"unit_simplex", unit_simplex},
        {"square_prism", square_prism},
        {"slanted_prism", slanted_prism},
        {"walk_polygon", walk_polygon},
    };
    auto it = table.find(name);
    if (it == table.end()) throw ScenarioError("domain: unknown builtin '" + name + "'");
    return it->second();
}

namespace detail {

/// Converts a parsed TOML node to the equivalent JSON value.
inline Json toml_to_json(const toml::node& n) {
    if (auto t = n.as_table()) {
        Json out = Json::object();
        for (auto&& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
        return out;
    }
    if (auto a = n.as_array()) {
        Json out = Json::array();
        for (auto&& v : *a) out.push_back(toml_to_json(v));
        return out;
    }
    if (auto v = n.as_string()) return v->get();
    if (auto v = n.as_integer()) return v->get();
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_boolean()) return v->get();
    throw ScenarioError("unsupported TOML value type");
}

inline std::string where(const std::string& field, const std::string& msg) { return "field '" + field + "': " + msg; }

template <class T>
inline T get(const Json& j, const std::string& field, const std::string& ctx) {
    try {
        return j.at(field).get<T>();
    } catch (const Json::exception& e) {
        throw ScenarioError(where(ctx.empty() ? field : ctx + "." + field, e.what()));
    }
}

template <class T>
inline T get_or(const Json& j, const std::string& field, T fallback, const std::string& ctx) {
    if (!j.contains(field)) return fallback;
    return get<T>(j, field, ctx);
}

inline Vec3 vec(const Json& j, const std::string& field, const std::string& ctx) {
    const auto v = get<std::vector<double>>(j, field, ctx);
    if (v.empty() || v.size() > 3) throw ScenarioError(where(ctx + "." + field, "expected 2 or 3 numbers"));
    Vec3 out = Vec3::Zero();
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

inline std::set<int> facet_set(const Json& j, const std::string& field, const std::string& ctx) {
    if (!j.contains(field)) return {};
    const auto v = get<std::vector<int>>(j, field, ctx);
    return {v.begin(), v.end()};
}

inline ConvexPolytope parse_domain(const Json& d) {
    if (d.is_string()) return builtin_domain(d.get<std::string>());
    if (!d.is_object()) throw ScenarioError(where("domain", "expected a builtin name or an object"));
    if (d.contains("builtin")) {
        const auto name = get<std::string>(d, "builtin", "domain");
        if (name == "rectangle") return rectangle(get<double>(d, "a", "domain"), get<double>(d, "b", "domain"));
        if (name == "box") {
            const auto s = get<std::vector<double>>(d, "size", "domain");
            if (s.size() != 3) throw ScenarioError(where("domain.size", "expected 3 numbers"));
            return box(s[0], s[1], s[2]);
        }
        if (name == "sheared_prism") return sheared_prism(get<double>(d, "shear", "domain"));
        if (name == "circular_segment")
            return circular_segment(get_or<int>(d, "segments", 64, "domain"), get<double>(d, "h", "domain"));
        return builtin_domain(name);
    }
    ConvexPolytope p;
    p.dim = get<int>(d, "dim", "domain");
    if (p.dim != 2 && p.dim != 3) throw ScenarioError(where("domain.dim", "must be 2 or 3"));
    const auto verts = get<std::vector<std::vector<double>>>(d, "vertices", "domain");
    for (std::size_t i = 0; i < verts.size(); ++i) {
        if (static_cast<int>(verts[i].size()) != p.dim)
            throw ScenarioError(where("domain.vertices[" + std::to_string(i) + "]", "wrong coordinate count"));
        p.vertices.emplace_back(verts[i][0], verts[i][1], p.dim == 3 ? verts[i][2] : 0.0);
    }
    if (d.contains("facets")) {
        p.facets = get<std::vector<std::vector<int>>>(d, "facets", "domain");
    } else if (p.dim == 2) {
        const int n = static_cast<int>(p.vertices.size());
        for (int i = 0; i < n; ++i) p.facets.push_back({i, (i + 1) % n});
    } else {
        throw ScenarioError(where("domain.facets", "required in 3D"));
    }
    for (std::size_t f = 0; f < p.facets.size(); ++f)
        for (int v : p.facets[f])
            if (v < 0 || v >= static_cast<int>(p.vertices.size()))
                throw ScenarioError(where("domain.facets[" + std::to_string(f) + "]", "vertex index out of range"));
    return p;
}

inline Profile parse_profile(const Json& g) {
    const std::string ctx = "potential.g";
    if (g.contains("polynomial")) return Polynomial{get<std::vector<double>>(g, "polynomial", ctx)};
    if (g.contains("bump")) {
        const Json& b = g.at("bump");
        return Bump{get<double>(b, "center", ctx + ".bump"), get<double>(b, "half_width", ctx + ".bump"),
                    get_or<double>(b, "amplitude", 1.0, ctx + ".bump")};
    }
    if (g.contains("spline")) {
        const Json& s = g.at("spline");
        try {
            return CubicSpline::make(get<std::vector<double>>(s, "knots", ctx + ".spline"),
                                     get<std::vector<double>>(s, "values", ctx + ".spline"));
        } catch (const ScenarioError&) {
            throw;
        } catch (const Error& e) {
            throw ScenarioError(where(ctx + ".spline", e.what()));
        }
    }
    throw ScenarioError(where(ctx, "expected one of polynomial, bump, spline"));
}

} // namespace detail

/// Potential block; `base_dir` resolves relative grid CSV paths.
inline PotentialSpec parse_potential(const Json& j, const ConvexPolytope& p, const std::string& base_dir = ".") {
    using namespace detail;
    const std::string ctx = "potential";
    const auto variant = get<std::string>(j, "variant", ctx);
    PotentialSpec V;
    if (variant == "constant") {
        V = PotentialSpec(ConstantPotential{get<double>(j, "c", ctx)});
    } else if (variant == "linear") {
        V = PotentialSpec(LinearPotential{vec(j, "m", ctx), get_or<double>(j, "q", 0.0, ctx)});
    } else if (variant == "separable") {
        Vec3 u = vec(j, "direction", ctx);
        if (std::abs(u.norm() - 1.0) > 1e-12) throw ScenarioError(where(ctx + ".direction", "must be a unit vector"));
        if (!j.contains("g")) throw ScenarioError(where(ctx + ".g", "missing"));
        V = PotentialSpec(SeparablePotential{u, parse_profile(j.at("g"))});
    } else if (variant == "exponential") {
        ExponentialPotential e{get<double>(j, "alpha", ctx), get<double>(j, "beta", ctx), vec(j, "w", ctx)};
        if (!(e.alpha > 0.0)) throw ScenarioError(where(ctx + ".alpha", "must be positive"));
        if (e.beta == 0.0) throw ScenarioError(where(ctx + ".beta", "must be nonzero"));
        V = PotentialSpec(e);
    } else if (variant == "distance") {
        const auto facets = facet_set(j, "facets", ctx);
        for (int f : facets)
            if (f < 0 || f >= static_cast<int>(p.num_facets()))
                throw ScenarioError(where(ctx + ".facets", "facet index out of range"));
        if (facets.empty()) throw ScenarioError(where(ctx + ".facets", "must be nonempty"));
        V = distance_to_facets(p, facets);
    } else if (variant == "grid") {
        std::filesystem::path path = get<std::string>(j, "csv", ctx);
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        V = PotentialSpec(read_grid_csv_file(path.string(), p.dim), p.scale());
    } else {
        throw ScenarioError(where(ctx + ".variant", "unknown variant '" + variant + "'"));
    }
    V.offset = get_or<double>(j, "offset", 0.0, ctx);
    if (!holds<DistancePotential>(V) && !holds<GridPotential>(V)) V.length_scale = p.scale();
    return V;
}

inline SolverMethod parse_method(const std::string& s) {
    if (s == "auto") return SolverMethod::Auto;
    if (s == "dense") return SolverMethod::Dense;
    if (s == "iterative") return SolverMethod::Iterative;
    throw ScenarioError(detail::where("solver", "expected auto, dense or iterative"));
}

inline ScenarioFile parse_scenario(const Json& j, const std::string& base_dir = ".") {
    using namespace detail;
    if (!j.is_object()) throw ScenarioError("scenario must be an object");
    ScenarioFile out;
    Scenario& s = out.scenario;
    s.id = get_or<std::string>(j, "id", "scenario", "");
    s.description = get_or<std::string>(j, "description", "", "");
    if (!j.contains("domain")) throw ScenarioError(where("domain", "missing"));
    s.domain = parse_domain(j.at("domain"));
    const Json* part = nullptr;
    if (j.contains("partition")) part = &j.at("partition");
    else if (j.at("domain").is_object() && j.at("domain").contains("partition")) part = &j.at("domain").at("partition");
    if (!part) throw ScenarioError(where("partition", "missing"));
    s.partition.gamma = facet_set(*part, "gamma", "partition");
    s.partition.gamma_prime = facet_set(*part, "gamma_prime", "partition");
    s.sigma = facet_set(*part, "sigma", "partition");
    if (j.contains("potential")) s.potential = parse_potential(j.at("potential"), s.domain, base_dir);
    else s.potential = PotentialSpec(ConstantPotential{0.0}, s.domain.scale());
    s.levels = get_or<int>(j, "levels", 4, "");
    s.finest_level = get_or<int>(j, "finest_level", s.domain.dim == 2 ? 5 : 4, "");
    s.k = get_or<int>(j, "k", 4, "");
    s.tol = get_or<double>(j, "tol", 1e-9, "");
    s.theorems = get_or<std::vector<std::string>>(j, "theorems", {}, "");
    s.reflected_distance = get_or<bool>(j, "reflected_distance", false, "");
    s.method = parse_method(get_or<std::string>(j, "solver", "auto", ""));
    s.notes = get_or<std::vector<std::string>>(j, "notes", {}, "");
    if (j.contains("output")) {
        out.json_out = get_or<std::string>(j.at("output"), "json", "", "output");
        out.csv_out = get_or<std::string>(j.at("output"), "csv", "", "output");
    }
    if (s.k < 1) throw ScenarioError(where("k", "must be >= 1"));
    if (s.levels < 1) throw ScenarioError(where("levels", "must be >= 1"));
    if (s.tol <= 0.0) throw ScenarioError(where("tol", "must be positive"));
    return out;
}

/// Reads a .json or .toml scenario file; parse errors carry line context.
inline ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const std::string base = std::filesystem::path(path).parent_path().string();
    Json j;
    if (std::filesystem::path(path).extension() == ".toml") {
        try {
            j = detail::toml_to_json(toml::parse(text, path));
        } catch (const toml::parse_error& e) {
            throw ScenarioError(path + ":" + std::to_string(e.source().begin.line) + ":" +
                                std::to_string(e.source().begin.column) + ": " + std::string(e.description()));
        }
    } else {
        try {
            j = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw ScenarioError(path + ": " + e.what());
        }
    }
    try {
        ScenarioFile f = parse_scenario(j, base.empty() ? "." : base);
        f.source = path;
        return f;
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

} // namespace mixed_spectra
