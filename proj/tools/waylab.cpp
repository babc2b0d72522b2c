#include "waylab/scenario.hpp"
#include "waylab/suite.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using waylab::scenario::json;

namespace {

struct FileOutcome {
    int code = 0;
    std::string report;
    std::string csv;
};

FileOutcome run_file(const std::string& path, const waylab::Tolerance& base, std::optional<double> tol,
                     bool want_csv) {
    FileOutcome out;
    std::ifstream in(path);
    json scenario;
    waylab::scenario::RunResult r;
    if (!in) {
        r.report = {{"schema", waylab::scenario::kSchema}, {"error", "cannot open " + path}};
        r.exit_code = 2;
    } else {
        try {
            scenario = json::parse(in);
            r = waylab::scenario::run(scenario, base, tol);
        } catch (const json::parse_error& e) {
            // parse_error carries the byte offset and, in its message, line and column.
            r.report = {{"schema", waylab::scenario::kSchema}, {"error", path + ": " + e.what()}};
            r.exit_code = 2;
        }
    }
    out.code = r.exit_code;
    out.report = waylab::scenario::dump(r.report);
    if (want_csv) out.csv = waylab::scenario::to_csv(r.report);
    return out;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream o(p, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write " + p.string());
    o << text;
}

int combine(int a, int b) { return std::max(a, b); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"waylab: measurement, conservation and disturbance numerics"};
    app.require_subcommand(1);

    std::vector<std::string> files;
    std::optional<double> tol;
    std::string out_dir;
    std::string format = "json";
    int jobs = 1;
    auto* run = app.add_subcommand("run", "Evaluate scenario files");
    run->add_option("scenario", files, "Scenario JSON files")->required();
    run->add_option("--tol", tol, "Equality tolerance (overrides WAYLAB_TOL and the scenario)");
    run->add_option("--out", out_dir, "Directory for report files (default: stdout)");
    run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    run->add_option("--jobs", jobs, "Scenario files evaluated concurrently")->check(CLI::PositiveNumber);

    std::string name;
    std::vector<std::string> params;
    std::string emit;
    auto* builtin = app.add_subcommand("builtin", "Materialize (and by default run) a builtin scenario");
    builtin->add_option("name", name, "Builtin name")->required();
    builtin->add_option("--param", params, "key=value parameter (repeatable)");
    builtin->add_option("--emit", emit, "Write the scenario JSON here instead of running it");

    auto* suite = app.add_subcommand("suite", "Run the acceptance battery and print its report");
    auto* list = app.add_subcommand("list", "List builtin scenarios and bound families");

    CLI11_PARSE(app, argc, argv);

    waylab::Tolerance base;
    try {
        base = waylab::tolerance_from_env();
    } catch (const std::exception& e) {
        std::cerr << "WAYLAB_TOL: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*run) {
            std::vector<FileOutcome> results(files.size());
            std::atomic<size_t> next{0};
            auto worker = [&] {
                for (size_t i = next++; i < files.size(); i = next++)
                    results[i] = run_file(files[i], base, tol, format == "csv");
            };
            std::vector<std::thread> pool;
            for (int t = 0; t < std::min<int>(jobs, int(files.size())); ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();

            int code = 0;
            if (!out_dir.empty()) fs::create_directories(out_dir);
            for (size_t i = 0; i < files.size(); ++i) {
                code = combine(code, results[i].code);
                const std::string& text = format == "csv" ? results[i].csv : results[i].report;
                if (out_dir.empty()) {
                    std::cout << text;
                } else {
                    fs::path stem = fs::path(files[i]).stem();
                    write_file(fs::path(out_dir) / (stem.string() + ".report.json"), results[i].report);
                    if (format == "csv") write_file(fs::path(out_dir) / (stem.string() + ".report.csv"), results[i].csv);
                }
                if (results[i].code == 2) {
                    json rep = json::parse(results[i].report);
                    std::cerr << files[i] << ": " << rep.value("error", std::string("input error")) << "\n";
                }
            }
            return code;
        }
        if (*builtin) {
            waylab::scenario::Params p;
            for (const auto& kv : params) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "--param expects key=value, got '" << kv << "'\n";
                    return 2;
                }
                p[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            json s = waylab::scenario::builtin(name, p);
            if (!emit.empty()) {
                write_file(emit, waylab::scenario::dump(s));
                return 0;
            }
            waylab::scenario::RunResult r = waylab::scenario::run(s, base);
            std::cout << waylab::scenario::dump(r.report);
            return r.exit_code;
        }
        if (*suite) {
            json report = waylab::suite::battery();
            std::cout << waylab::scenario::dump(report);
            return report["pass"].get<bool>() ? 0 : 1;
        }
        if (*list) {
            std::cout << "builtins:\n";
            for (const auto& b : waylab::scenario::builtin_names()) std::cout << "  " << b << "\n";
            std::cout << "bounds (gate):\n";
            for (const auto& id : waylab::bounds::bound_ids())
                std::cout << "  " << id << " (" << waylab::bounds::gate_name(waylab::bounds::gate_of(id)) << ")\n";
            return 0;
        }
    } catch (const waylab::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
