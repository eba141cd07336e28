// mixed-spectra: run scenario files, the builtin gallery, or convergence tables.
#include <mixed_spectra/mixed_spectra.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace ms = mixed_spectra;

namespace {

struct Overrides {
    int levels = 0;
    int k = 0;
    double tol = 0.0;
    std::string vtk;
};

void apply(ms::Scenario& s, const Overrides& o) {
    if (o.levels > 0) s.levels = o.levels;
    if (o.k > 0) s.k = o.k;
    if (o.tol > 0.0) s.tol = o.tol;
    if (!o.vtk.empty()) s.export_vtk = o.vtk + "_" + s.id;
}

void emit(const std::vector<ms::ScenarioReport>& reports, const std::string& format, std::ostream& os) {
    if (format == "csv") ms::write_csv(os, reports);
    else ms::write_json(os, reports);
}

bool write_file(const std::string& path, const std::vector<ms::ScenarioReport>& reports, const std::string& format) {
    std::ofstream f(path);
    if (!f) {
        std::cerr << "error: cannot write " << path << '\n';
        return false;
    }
    emit(reports, format, f);
    return true;
}

void summary(const std::vector<ms::ScenarioReport>& reports, std::ostream& os) {
    os << std::left << std::setw(28) << "scenario" << std::setw(12) << "theorem" << std::setw(16) << "margin"
       << std::setw(14) << "error_bar" << "status\n";
    for (const auto& r : reports) {
        if (r.failed && r.claims.empty()) {
            os << std::setw(28) << r.id << "error: " << r.error << '\n';
            continue;
        }
        for (const auto& c : r.claims)
            os << std::setw(28) << r.id << std::setw(12) << c.theorem << std::setw(16) << std::setprecision(6)
               << c.margin << std::setw(14) << std::setprecision(3) << c.error_bar << ms::to_string(c.status) << '\n';
        for (const auto& h : r.hypotheses)
            os << std::setw(28) << r.id << std::setw(12) << h.theorem << std::setw(16) << "hypotheses"
               << std::setw(14) << "" << (h.ok ? "ok" : "not met") << '\n';
        if (r.failed) os << std::setw(28) << r.id << "error: " << r.error << '\n';
    }
}

ms::Scenario find_scenario(const std::string& name) {
    if (std::filesystem::exists(name)) return ms::load_scenario(name).scenario;
    for (auto& s : ms::gallery_scenarios())
        if (s.id == name) return s;
    throw ms::ScenarioError("no scenario file or gallery id '" + name + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed Dirichlet-Neumann eigenvalues of -Laplace + V on convex polytopes"};
    app.require_subcommand(1);
    Overrides o;
    std::string out, format = "json", filter;
    int jobs = 0;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--levels", o.levels, "number of refinement levels")->check(CLI::PositiveNumber);
        sub->add_option("--k", o.k, "eigenvalues per configuration")->check(CLI::PositiveNumber);
        sub->add_option("--tol", o.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "report path");
        sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--export-vtk", o.vtk, "VTK path prefix for every mesh level");
    };

    std::vector<std::string> files;
    auto* run = app.add_subcommand("run", "run scenario files (JSON or TOML)");
    run->add_option("scenario", files, "scenario files")->required();
    common(run);

    auto* gallery = app.add_subcommand("gallery", "run the builtin scenario gallery");
    common(gallery);
    gallery->add_option("--filter", filter, "theorem id or scenario id substring");
    gallery->add_option("--jobs", jobs, "worker threads (default MIXED_SPECTRA_JOBS or logical cores)");

    std::string conv_name;
    auto* conv = app.add_subcommand("convergence", "per-level eigenvalue table for one scenario");
    conv->add_option("scenario", conv_name, "scenario file or gallery id")->required();
    common(conv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            std::vector<ms::ScenarioReport> reports;
            for (const auto& path : files) {
                ms::ScenarioFile sf = ms::load_scenario(path);
                apply(sf.scenario, o);
                std::vector<ms::ScenarioReport> one{ms::run_scenario(sf.scenario)};
                if (!sf.json_out.empty() && !write_file(sf.json_out, one, "json")) return 2;
                if (!sf.csv_out.empty() && !write_file(sf.csv_out, one, "csv")) return 2;
                reports.push_back(std::move(one.front()));
            }
            if (!out.empty()) {
                if (!write_file(out, reports, format)) return 2;
                summary(reports, std::cout);
            } else {
                emit(reports, format, std::cout);
            }
            for (const auto& r : reports)
                if (r.failed) std::cerr << r.id << ": " << r.error << '\n';
            return ms::exit_code(reports);
        }
        if (*gallery) {
            auto scenarios = ms::filter_scenarios(ms::gallery_scenarios(), filter);
            for (auto& s : scenarios) apply(s, o);
            const auto reports = ms::run_all(scenarios, jobs);
            summary(reports, std::cout);
            if (!out.empty() && !write_file(out, reports, format)) return 2;
            return ms::exit_code(reports);
        }
        if (*conv) {
            ms::Scenario s = find_scenario(conv_name);
            apply(s, o);
            const ms::ScenarioReport r = ms::run_scenario(s);
            for (const auto& c : r.configurations) {
                const int k = o.k > 0 ? o.k : 1;
                ms::write_convergence_table(std::cout, c, std::min(k, std::max(c.count, 1)));
                std::cout << '\n';
            }
            if (!out.empty() && !write_file(out, {r}, format)) return 2;
            if (r.failed) {
                std::cerr << r.error << '\n';
                return 2;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
