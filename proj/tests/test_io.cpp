#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "phstring/cli.hpp"
#include "phstring/config.hpp"
#include "phstring/io.hpp"

using namespace phs;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("phstring_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string short_config_text(double t_final = 0.5) {
    std::ostringstream out;
    out << "[string]\nT = 1.0\nrho = 1.0\nL = 1.0\n"
        << "[patch]\nz_p1 = 0.4\nz_p2 = 0.6\n"
        << "[equilibrium]\na = 0.2\nb = 0.5\n"
        << "[controller]\nc1 = 5.0\nc2 = 30.0\n"
        << "[observer]\nk = 30.0\n"
        << "[sim]\nn = 20\ndt = 0.02\nt_final = " << t_final << "\n";
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("shipped preset file matches the embedded preset") {
    const fs::path shipped =
        fs::path(__FILE__).parent_path().parent_path() / "presets" / "paper_fig1.toml";
    REQUIRE(fs::exists(shipped));
    const SimConfig from_file = parse_config(shipped.string());
    const SimConfig embedded = parse_config_text(paper_fig1_preset_text(), "preset");
    CHECK(from_file.c1 == embedded.c1);
    CHECK(from_file.c2 == embedded.c2);
    CHECK(from_file.k == embedded.k);
    CHECK(from_file.n_cells == embedded.n_cells);
    CHECK(from_file.dt == embedded.dt);
    CHECK(from_file.t_final == embedded.t_final);
    CHECK(from_file.observer_slope == embedded.observer_slope);
}

TEST_CASE("embedded preset text and the in-code preset agree") {
    const SimConfig parsed = parse_config_text(paper_fig1_preset_text(), "preset");
    const SimConfig coded = paper_fig1_config();
    CHECK(parsed.params.T == coded.params.T);
    CHECK(parsed.z_p1 == coded.z_p1);
    CHECK(parsed.z_p2 == coded.z_p2);
    CHECK(parsed.eq_a == coded.eq_a);
    CHECK(parsed.eq_b == coded.eq_b);
    CHECK(parsed.c1 == coded.c1);
    CHECK(parsed.c2 == coded.c2);
    CHECK(parsed.k == coded.k);
    CHECK(parsed.n_cells == coded.n_cells);
    CHECK(parsed.dt == coded.dt);
    CHECK(parsed.t_final == coded.t_final);
    CHECK(parsed.observer_slope == coded.observer_slope);
    CHECK((parsed.integrator == coded.integrator));
    CHECK((parsed.framework == coded.framework));
    CHECK((parsed.feedback == coded.feedback));
    CHECK((parsed.observer_init == coded.observer_init));
    CHECK((parsed.plant_init == coded.plant_init));
}

TEST_CASE("preset parses to the documented scenario values") {
    const SimConfig c = parse_config_text(paper_fig1_preset_text(), "preset");
    CHECK(c.c1 == 5.0);
    CHECK(c.c2 == 30.0);
    CHECK(c.k == 30.0);
    CHECK(c.n_cells == 100);
    CHECK(c.dt == 0.005);
    CHECK(c.t_final == 10.0);
    CHECK(c.params.T == 1.0);
    CHECK(c.params.rho == 1.0);
    CHECK(c.params.L == 1.0);
    CHECK(c.z_p1 == 0.4);
    CHECK(c.z_p2 == 0.6);
    CHECK(c.eq_a == 0.2);
    CHECK(c.eq_b == 0.5);
    CHECK(c.integrator == Integrator::rk4);
    CHECK(c.framework == RunFramework::jb);
    CHECK(c.feedback == FeedbackSource::observer);
    CHECK(c.observer_init == ObserverInit::linear);
    CHECK(c.observer_slope == 0.1);
}

TEST_CASE("config validation fails closed") {
    std::string bad_gain = short_config_text();
    bad_gain.replace(bad_gain.find("c1 = 5.0"), 8, "c1 = -1\n");
    try {
        parse_config_text(bad_gain, "test");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("c1 > 0") != std::string::npos);
    }

    const std::string unknown = short_config_text() + "[controller]\nc3 = 1.0\n";
    CHECK_THROWS_AS(parse_config_text(unknown, "test"), ParseError);

    const std::string garbage = short_config_text() + "[sim]\nintegrator = \"euler\"\n";
    CHECK_THROWS_AS(parse_config_text(garbage, "test"), ParseError);

    const std::string no_eq = short_config_text() + "[sim]\nnothing here\n";
    CHECK_THROWS_AS(parse_config_text(no_eq, "test"), ParseError);

    CHECK_THROWS_AS(parse_config("definitely_missing_file.toml"), ParseError);

    std::string cfl = short_config_text();
    cfl.replace(cfl.find("dt = 0.02"), 9, "dt = 0.04");
    CHECK_THROWS_AS(parse_config_text(cfl, "test"), CflViolation);
}

TEST_CASE("overrides reuse the config keys") {
    SimConfig c = parse_config_text(paper_fig1_preset_text(), "preset");
    apply_override(c, "sim.n", "50");
    apply_override(c, "sim.dt", "0.01");
    apply_override(c, "observer.k", "12.5");
    CHECK(c.n_cells == 50);
    CHECK(c.dt == 0.01);
    CHECK(c.k == 12.5);
    CHECK_THROWS_AS(apply_override(c, "observer.gain", "1"), ParseError);
    CHECK_THROWS_AS(apply_override(c, "sim.dt", "fast"), ParseError);
}

TEST_CASE("float formatting round-trips doubles exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double v = uni(rng) * std::pow(10.0, (i % 61) - 30);
        const std::string s = format_float(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(std::strtod(format_float(0.1).c_str(), nullptr) == 0.1);
}

TEST_CASE("trajectory csv round-trips the logged floats") {
    const fs::path dir = make_temp_dir("csv");
    SimConfig c = parse_config_text(short_config_text(), "test");
    const SimLog log = run_closed_loop(c);
    const fs::path path = dir / "trajectory.csv";
    write_trajectory_csv(log, path);

    const auto records = read_trajectory_csv(path);
    REQUIRE(records.size() == log.records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].t == log.records[i].t);
        CHECK(records[i].u == log.records[i].u);
        CHECK(records[i].ybar == log.records[i].ybar);
        CHECK(records[i].yhat_bar == log.records[i].yhat_bar);
        CHECK(records[i].H == log.records[i].H);
        CHECK(records[i].Hc == log.records[i].Hc);
        CHECK(records[i].Hcl == log.records[i].Hcl);
        CHECK(records[i].Htilde == log.records[i].Htilde);
        CHECK(records[i].casimir == log.records[i].casimir);
        CHECK(records[i].w_L == log.records[i].w_L);
        CHECK(records[i].what_L == log.records[i].what_L);
    }
    fs::remove_all(dir);
}

TEST_CASE("empty logs are refused before any file is created") {
    const fs::path dir = make_temp_dir("empty");
    SimLog log;
    CHECK_THROWS_AS(write_trajectory_csv(log, dir / "trajectory.csv"), IoError);
    CHECK(!fs::exists(dir / "trajectory.csv"));
    CHECK_THROWS_AS(render_svg(log, dir / "plot.svg"), IoError);
    CHECK(!fs::exists(dir / "plot.svg"));
    fs::remove_all(dir);
}

TEST_CASE("run command writes the documented artifacts") {
    const fs::path dir = make_temp_dir("run");
    const int rc = run_command({"run", "--preset", "paper-fig1", "--t-final", "1.0",
                                "--out", dir.string(), "--snapshots", "0,0.5", "--svg"});
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "fields_t0.csv"));
    CHECK(fs::exists(dir / "fields_t0.5.csv"));
    CHECK(fs::exists(dir / "plot.svg"));
    CHECK(slurp(dir / "plot.svg").find("<svg") != std::string::npos);

    // manifest summary equals recomputation from the emitted csv
    const auto records = read_trajectory_csv(dir / "trajectory.csv");
    SimConfig cfg = parse_config_text(paper_fig1_preset_text(), "preset");
    apply_override(cfg, "sim.t_final", "1.0");
    const RunSummary s = summarize_records(records, cfg);
    const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["summary"]["final_w_L"].get<std::string>() == format_float(s.final_w_L));
    CHECK(manifest["summary"]["final_Htilde"].get<std::string>() ==
          format_float(s.final_Htilde));
    CHECK(manifest["summary"]["max_casimir_drift"].get<std::string>() ==
          format_float(s.max_casimir_drift));
    CHECK(manifest["summary"]["max_balance_residual"].get<std::string>() ==
          format_float(s.max_balance_residual));
    for (const auto& f : manifest["outputs"]) {
        CHECK(fs::exists(dir / f.get<std::string>()));
    }
    fs::remove_all(dir);
}

TEST_CASE("run command is deterministic at the byte level") {
    const fs::path dir_a = make_temp_dir("det_a");
    const fs::path dir_b = make_temp_dir("det_b");
    CHECK(run_command({"run", "--preset", "paper-fig1", "--t-final", "1.0", "--out",
                       dir_a.string()}) == 0);
    CHECK(run_command({"run", "--preset", "paper-fig1", "--t-final", "1.0", "--out",
                       dir_b.string()}) == 0);
    CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("run command maps error classes onto exit codes") {
    CHECK(run_command({"run", "--config", "missing.toml"}) == 2);
    const fs::path dir = make_temp_dir("badcfg");
    {
        std::ofstream out(dir / "bad.toml");
        out << short_config_text() << "[controller]\nc1 = -3\n";
    }
    CHECK(run_command({"run", "--config", (dir / "bad.toml").string()}) == 2);
    CHECK(run_command({"bogus"}) == 2);

    // the midpoint fixed-point iteration diverges far beyond the wave CFL
    {
        std::ofstream out(dir / "stiff.toml");
        out << short_config_text(1.0) << "[sim]\nintegrator = \"midpoint\"\ndt = 0.5\n";
    }
    CHECK(run_command({"run", "--config", (dir / "stiff.toml").string(), "--out",
                       (dir / "o").string()}) == 3);
    fs::remove_all(dir);
}

TEST_CASE("run command with framework both writes both trajectories") {
    const fs::path dir = make_temp_dir("both");
    const int rc = run_command({"run", "--preset", "paper-fig1", "--framework", "both",
                                "--t-final", "0.5", "--out", dir.string()});
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "trajectory_sd.csv"));
    const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["summary"].contains("max_equiv_deviation"));
    const double dev = std::strtod(
        manifest["summary"]["max_equiv_deviation"].get<std::string>().c_str(), nullptr);
    CHECK(dev <= 1e-10);
    fs::remove_all(dir);
}

TEST_CASE("check command audits the preset") {
    CHECK(run_command({"check", "--preset", "paper-fig1"}) == 0);
}

TEST_CASE("sweep command emits per-run artifacts and a summary table") {
    const fs::path dir = make_temp_dir("sweep");
    const int rc = run_command({"sweep", "--preset", "paper-fig1", "--t-final", "0.5",
                                "--param", "observer.k", "--values", "10,30", "--out",
                                dir.string()});
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "sweep_observer_k_10" / "trajectory.csv"));
    CHECK(fs::exists(dir / "sweep_observer_k_30" / "trajectory.csv"));
    const std::string table = slurp(dir / "sweep.csv");
    CHECK(table.find("param,value,final_w_L") != std::string::npos);
    CHECK(table.find("observer.k,10,") != std::string::npos);
    CHECK(table.find("observer.k,30,") != std::string::npos);
    fs::remove_all(dir);
}
