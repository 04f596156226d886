#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "sarlab/dataset.hpp"
#include "sarlab/engine.hpp"
#include "sarlab/error.hpp"
#include "sarlab/service/server.hpp"

namespace fs = std::filesystem;
using namespace sarlab;

namespace {

void write_result(const fs::path& out, const RunResult& r) {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    sarb::write_sarb(out, r.arrays);
}

void print_summary(const Json& summary) {
    if (summary.contains("warning")) std::cerr << "warning: " << summary["warning"].get<std::string>() << "\n";
    std::cout << summary.dump(2) << "\n";
}

ProgressFn stderr_progress(bool enabled) {
    if (!enabled) return {};
    auto last = std::make_shared<std::atomic<int>>(-1);
    return [last](double f) {
        const int pct = static_cast<int>(f * 100.0);
        int prev = last->load();
        while (pct > prev && !last->compare_exchange_weak(prev, pct)) {
        }
        if (pct > prev && pct % 10 == 0) std::cerr << "  " << pct << "%\n";
    };
}

std::string shape_string(const std::vector<std::int64_t>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
    return out + "]";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sarlab: near-field SAR simulation, reconstruction and dataset generation"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Report progress on stderr");

    auto* sim = app.add_subcommand("simulate", "Simulate a raw echo");
    fs::path sim_config, sim_out;
    sim->add_option("--config", sim_config, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "Output echo container")->required();

    auto* rec = app.add_subcommand("reconstruct", "Reconstruct an image from an echo, or run a full pipeline config");
    std::string rec_algo, rec_interp;
    fs::path rec_echo, rec_grid, rec_out, rec_config;
    bool keep_kspace = false;
    long rec_pad = 0;
    rec->add_option("--algo", rec_algo, "bpa, rma-linear, rma-planar, rma-circular, rma-cylindrical");
    auto* echo_opt = rec->add_option("--echo", rec_echo, "Echo container")->check(CLI::ExistingFile);
    auto* grid_opt = rec->add_option("--grid", rec_grid, "Grid JSON")->check(CLI::ExistingFile);
    auto* cfg_opt = rec->add_option("--config", rec_config, "Pipeline config JSON")->check(CLI::ExistingFile);
    rec->add_option("--out", rec_out, "Output image container")->required();
    rec->add_flag("--keep-kspace", keep_kspace, "Store the intermediate k-space stages");
    rec->add_option("--interp", rec_interp, "Stolt interpolation: linear or cubic");
    rec->add_option("--pad", rec_pad, "Zero-padding factor");
    echo_opt->needs(grid_opt)->excludes(cfg_opt);
    grid_opt->needs(echo_opt);

    auto* ds = app.add_subcommand("dataset", "Generate an LR/HR dataset");
    fs::path ds_spec, ds_out;
    std::optional<std::uint64_t> ds_seed;
    unsigned ds_workers = 0;
    ds->add_option("--spec", ds_spec, "Dataset spec JSON")->required()->check(CLI::ExistingFile);
    ds->add_option("--out-dir", ds_out, "Output directory")->required();
    ds->add_option("--seed", ds_seed, "Override base_seed");
    ds->add_option("--workers", ds_workers, "Worker threads (0: all cores)");

    auto* psf = app.add_subcommand("psf", "Measure point-spread widths against the resolution formulas");
    fs::path psf_config, psf_report, psf_out;
    psf->add_option("--config", psf_config, "Pipeline config JSON with a point target")->required()->check(CLI::ExistingFile);
    psf->add_option("--report", psf_report, "Output report JSON")->required();
    psf->add_option("--out", psf_out, "Optional image container");

    auto* info = app.add_subcommand("info", "List the arrays of a container");
    fs::path info_path;
    info->add_option("file", info_path, "SARB file")->required()->check(CLI::ExistingFile);

    auto* srv = app.add_subcommand("serve", "Run the HTTP job service");
    service::ServerOptions sopt = service::options_from_env();
    srv->add_option("--host", sopt.host, "Bind address");
    srv->add_option("--port", sopt.port, "Port");
    srv->add_option("--data-dir", sopt.data_dir, "Data directory (env SARLAB_DATA_DIR)");
    srv->add_option("--workers", sopt.workers, "Worker threads (env SARLAB_WORKERS)");
    srv->add_option("--cors-origin", sopt.cors_origin, "Allowed CORS origin");
    srv->add_option("--static", sopt.static_dir, "Directory of the web UI bundle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        const auto progress = stderr_progress(verbose);
        if (*sim) {
            const Json cfg = load_json_file(sim_config);
            const RunResult r = run_simulate(cfg, sim_config.parent_path(), progress);
            write_result(sim_out, r);
            print_summary(r.summary);
        } else if (*rec) {
            if (rec_config.empty() && rec_echo.empty()) {
                std::cerr << "error: reconstruct needs --echo and --grid, or --config\n\n" << rec->help();
                return 2;
            }
            auto apply_flags = [&](Json& cfg) {
                Json& r = cfg["reconstruction"];
                if (r.is_null()) r = Json::object();
                if (keep_kspace) r["keep_kspace"] = true;
                if (!rec_interp.empty()) r["interp"] = rec_interp;
                if (rec_pad > 0) r["pad"] = rec_pad;
                if (r.empty()) cfg.erase("reconstruction");
                if (!rec_algo.empty()) cfg["algo"] = rec_algo;
            };
            RunResult r;
            if (!rec_config.empty()) {
                Json cfg = load_json_file(rec_config);
                apply_flags(cfg);
                r = run_pipeline(cfg, rec_config.parent_path(), progress);
            } else {
                Json cfg = {{"grid", load_json_file(rec_grid)}};
                apply_flags(cfg);
                r = run_reconstruct(cfg, sarb::read_sarb(rec_echo), progress);
            }
            write_result(rec_out, r);
            print_summary(r.summary);
        } else if (*ds) {
            Json j = load_json_file(ds_spec);
            if (ds_seed) j["base_seed"] = *ds_seed;
            const DatasetSpec spec = parse_dataset_spec(j, ds_spec.parent_path());
            const auto t0 = std::chrono::steady_clock::now();
            const Manifest m = generate_dataset(spec, ds_out, ds_workers, [&](Index d, Index n) {
                if (verbose) std::cerr << "  " << d << "/" << n << "\n";
            });
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cout << "wrote " << m.samples.size() << " samples to " << ds_out.string() << " in " << secs << " s\n";
            if (!m.failed.empty()) {
                std::cerr << "error: " << m.failed.size() << " samples failed; first (index " << m.failed.front()
                          << "): " << m.errors.front() << "\n";
                return 1;
            }
        } else if (*psf) {
            const Json cfg = load_json_file(psf_config);
            const RunResult r = run_psf(cfg, psf_config.parent_path(), progress);
            if (psf_report.has_parent_path()) fs::create_directories(psf_report.parent_path());
            std::ofstream out(psf_report);
            if (!out) throw IoError("cannot write '" + psf_report.string() + "'");
            out << r.summary.dump(2) << "\n";
            if (!psf_out.empty()) write_result(psf_out, r);
            std::cout << r.summary.dump(2) << "\n";
        } else if (*info) {
            sarb::Reader reader(info_path);
            for (const auto& e : reader.entries())
                std::printf("%-32s %-5s %-20s %llu bytes\n", e.name.c_str(), sarb::to_string(e.dtype).c_str(),
                            shape_string(e.shape).c_str(), static_cast<unsigned long long>(e.byte_size));
        } else if (*srv) {
            return service::serve(sopt);
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
