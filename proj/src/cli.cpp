#include "phstring/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "phstring/audit.hpp"
#include "phstring/config.hpp"
#include "phstring/io.hpp"

namespace phs {

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string framework;
    std::string integrator;
    std::string snapshots;
    int n = -1;
    double dt = -1.0;
    double t_final = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    auto* cfg = cmd->add_option("--config", o.config_path, "Path to a TOML-style config file");
    auto* preset = cmd->add_option("--preset", o.preset, "Built-in preset name (paper-fig1)");
    cfg->excludes(preset);
    cmd->add_option("--framework", o.framework, "jb, sd or both");
    cmd->add_option("--n", o.n, "Number of grid cells");
    cmd->add_option("--dt", o.dt, "Time step (s)");
    cmd->add_option("--t-final", o.t_final, "Final time (s)");
    cmd->add_option("--integrator", o.integrator, "rk4 or midpoint");
    cmd->add_option("--snapshots", o.snapshots, "Comma-separated field snapshot times");
}

std::vector<double> parse_times(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == nullptr || *end != '\0') {
            throw ParseError("invalid snapshot time \"" + tok + "\"");
        }
        out.push_back(v);
    }
    return out;
}

SimConfig load_config(const CommonOpts& o) {
    SimConfig cfg;
    if (!o.config_path.empty()) {
        cfg = parse_config(o.config_path);
    } else if (o.preset == "paper-fig1" || o.preset.empty()) {
        cfg = parse_config_text(paper_fig1_preset_text(), "preset paper-fig1");
    } else {
        throw ParseError("unknown preset \"" + o.preset + "\"");
    }
    if (!o.framework.empty()) apply_override(cfg, "sim.framework", o.framework);
    if (o.n > 0) apply_override(cfg, "sim.n", std::to_string(o.n));
    if (o.dt > 0.0) apply_override(cfg, "sim.dt", format_float(o.dt));
    if (o.t_final > 0.0) apply_override(cfg, "sim.t_final", format_float(o.t_final));
    if (!o.integrator.empty()) apply_override(cfg, "sim.integrator", o.integrator);
    if (!o.snapshots.empty()) cfg.snapshot_times = parse_times(o.snapshots);
    validate_config(cfg);
    return cfg;
}

struct RunOutputs {
    std::vector<fs::path> files;
    RunSummary summary;
};

RunOutputs execute_single(const SimConfig& cfg, const fs::path& out_dir, bool svg,
                          const std::string& traj_name,
                          std::optional<double> equiv_deviation) {
    const SimLog log = run_closed_loop(cfg);

    RunOutputs out;
    const fs::path traj = out_dir / traj_name;
    write_trajectory_csv(log, traj);
    out.files.push_back(traj);

    const auto field_files = write_fields_csv(log, out_dir);
    out.files.insert(out.files.end(), field_files.begin(), field_files.end());

    if (svg) {
        const fs::path plot = out_dir / "plot.svg";
        render_svg(log, plot);
        out.files.push_back(plot);
    }

    // summary scalars recomputed from the emitted CSV so the manifest always
    // matches the artifact on disk
    out.summary = summarize_records(read_trajectory_csv(traj), cfg);
    out.summary.max_equiv_deviation = equiv_deviation;
    return out;
}

int cmd_run(const CommonOpts& o, const std::string& out_dir_s, bool svg) {
    const SimConfig cfg = load_config(o);
    const fs::path out_dir = out_dir_s.empty() ? fs::path(".") : fs::path(out_dir_s);
    fs::create_directories(out_dir);

    std::optional<double> equiv;
    if (cfg.framework == RunFramework::both) {
        const EquivalenceReport rep = equivalence_report(cfg);
        equiv = rep.max_dev_exact;
        std::printf("equivalence: exact %.3e, analytic %.3e, fields %.3e\n", rep.max_dev_exact,
                    rep.max_dev_analytic, rep.max_field_dev);
    }

    std::vector<fs::path> files;
    RunSummary summary;
    if (cfg.framework == RunFramework::both) {
        SimConfig jb_cfg = cfg;
        jb_cfg.framework = RunFramework::jb;
        RunOutputs jb_out = execute_single(jb_cfg, out_dir, svg, "trajectory.csv", equiv);
        SimConfig sd_cfg = cfg;
        sd_cfg.framework = RunFramework::sd;
        const SimLog sd_log = run_closed_loop(sd_cfg);
        const fs::path sd_traj = out_dir / "trajectory_sd.csv";
        write_trajectory_csv(sd_log, sd_traj);
        jb_out.files.push_back(sd_traj);
        files = std::move(jb_out.files);
        summary = jb_out.summary;
    } else {
        RunOutputs out = execute_single(cfg, out_dir, svg, "trajectory.csv", equiv);
        files = std::move(out.files);
        summary = out.summary;
    }

    const fs::path manifest = out_dir / "manifest.json";
    std::vector<fs::path> listed = files;
    listed.push_back(manifest);
    write_manifest(cfg, summary, listed, manifest);

    std::printf("wrote %s (final w_L = %s, final Htilde = %s)\n", manifest.string().c_str(),
                format_float(summary.final_w_L).c_str(),
                format_float(summary.final_Htilde).c_str());
    return 0;
}

int cmd_check(const CommonOpts& o) {
    const SimConfig cfg = load_config(o);
    const auto checks = run_invariant_audit(cfg);
    for (const auto& c : checks) {
        std::printf("[%s] %-68s %11.4e %s %.1e\n", c.ok ? " ok " : "FAIL", c.name.c_str(),
                    c.value, c.flag_expected ? ">" : "<=", c.threshold);
    }
    if (!audit_passed(checks)) {
        std::printf("audit FAILED\n");
        return 4;
    }
    std::printf("audit passed (%zu checks)\n", checks.size());
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& out_dir_s, const std::string& param,
              const std::string& values_csv) {
    const fs::path out_dir = out_dir_s.empty() ? fs::path(".") : fs::path(out_dir_s);
    fs::create_directories(out_dir);

    std::vector<std::string> values;
    std::istringstream in(values_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) values.push_back(tok);
    }
    if (values.empty()) throw ParseError("sweep needs at least one value");

    std::ostringstream table;
    table << "param,value,final_w_L,final_Htilde,max_casimir_drift,max_balance_residual\n";
    for (const auto& v : values) {
        SimConfig cfg = load_config(o);
        apply_override(cfg, param, v);
        validate_config(cfg);
        if (cfg.framework == RunFramework::both) cfg.framework = RunFramework::jb;

        std::string tag = param + "_" + v;
        for (auto& ch : tag) {
            if (ch == '.' || ch == '/') ch = '_';
        }
        const fs::path run_dir = out_dir / ("sweep_" + tag);
        fs::create_directories(run_dir);

        const SimLog log = run_closed_loop(cfg);
        const fs::path traj = run_dir / "trajectory.csv";
        write_trajectory_csv(log, traj);
        const RunSummary s = summarize_records(read_trajectory_csv(traj), cfg);
        write_manifest(cfg, s, {traj, run_dir / "manifest.json"}, run_dir / "manifest.json");

        table << param << ',' << v << ',' << format_float(s.final_w_L) << ','
              << format_float(s.final_Htilde) << ',' << format_float(s.max_casimir_drift) << ','
              << format_float(s.max_balance_residual) << '\n';
        std::printf("sweep %s = %s: final w_L = %s\n", param.c_str(), v.c_str(),
                    format_float(s.final_w_L).c_str());
    }
    write_text_atomic(out_dir / "sweep.csv", table.str());
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"port-Hamiltonian vibrating-string workbench"};
    app.require_subcommand(1);

    CommonOpts run_opts, check_opts, sweep_opts;
    std::string run_out, sweep_out, sweep_param, sweep_values;
    bool run_svg = false;

    CLI::App* run = app.add_subcommand("run", "Simulate a closed-loop scenario");
    add_common(run, run_opts);
    run->add_option("--out", run_out, "Output directory");
    run->add_flag("--svg", run_svg, "Also render plot.svg");

    CLI::App* check = app.add_subcommand("check", "Run the invariant audit");
    add_common(check, check_opts);

    CLI::App* sweep = app.add_subcommand("sweep", "Run a one-parameter sweep");
    add_common(sweep, sweep_opts);
    sweep->add_option("--out", sweep_out, "Output directory");
    sweep->add_option("--param", sweep_param, "Config key, e.g. observer.k")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_opts, run_out, run_svg);
        if (check->parsed()) return cmd_check(check_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_out, sweep_param, sweep_values);
        std::fprintf(stderr, "error: no subcommand given\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

}  // namespace phs
