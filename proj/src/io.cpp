#include "phstring/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace phs {

namespace fs = std::filesystem;

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path.string() + " (" + ec.message() + ")");
}

namespace {

const char* kTrajectoryHeader = "t,u,ybar,yhat_bar,H,Hc,Hcl,Htilde,casimir,w_L,what_L";

double parse_double_token(const std::string& tok, const fs::path& path) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == nullptr || *end != '\0' || tok.empty()) {
        throw IoError("malformed number \"" + tok + "\" in " + path.string());
    }
    return v;
}

}  // namespace

void write_trajectory_csv(const SimLog& log, const fs::path& path) {
    if (log.records.empty()) throw IoError("refusing to write empty trajectory log");
    std::ostringstream out;
    out << kTrajectoryHeader << '\n';
    for (const auto& r : log.records) {
        out << format_float(r.t) << ',' << format_float(r.u) << ',' << format_float(r.ybar)
            << ',' << format_float(r.yhat_bar) << ',' << format_float(r.H) << ','
            << format_float(r.Hc) << ',' << format_float(r.Hcl) << ',' << format_float(r.Htilde)
            << ',' << format_float(r.casimir) << ',' << format_float(r.w_L) << ','
            << format_float(r.what_L) << '\n';
    }
    write_text_atomic(path, out.str());
}

std::vector<SimRecord> read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) {
        throw IoError("unexpected trajectory header in " + path.string());
    }
    std::vector<SimRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string tok;
        double vals[11];
        for (int i = 0; i < 11; ++i) {
            if (!std::getline(row, tok, ',')) {
                throw IoError("short row in " + path.string());
            }
            vals[i] = parse_double_token(tok, path);
        }
        SimRecord r;
        r.t = vals[0];
        r.u = vals[1];
        r.ybar = vals[2];
        r.yhat_bar = vals[3];
        r.H = vals[4];
        r.Hc = vals[5];
        r.Hcl = vals[6];
        r.Htilde = vals[7];
        r.casimir = vals[8];
        r.w_L = vals[9];
        r.what_L = vals[10];
        records.push_back(r);
    }
    return records;
}

std::vector<fs::path> write_fields_csv(const SimLog& log, const fs::path& dir) {
    std::vector<fs::path> written;
    const bool jb = log.framework == Framework::jb;
    const char* header = jb ? "z,w,p,w_hat,p_hat" : "z,q,p,q_hat,p_hat";
    const Grid grid = build_grid(log.config.params.L, log.config.n_cells, log.config.z_p1,
                                 log.config.z_p2);
    for (const auto& snap : log.snapshots) {
        char tbuf[32];
        std::snprintf(tbuf, sizeof(tbuf), "%g", snap.t);
        const fs::path path = dir / (std::string("fields_t") + tbuf + ".csv");
        std::ostringstream out;
        out << header << '\n';
        for (std::size_t i = 0; i < snap.plant_first.size(); ++i) {
            out << format_float(grid.nodes[i]) << ',' << format_float(snap.plant_first[i]) << ','
                << format_float(snap.plant_second[i]) << ',' << format_float(snap.obs_first[i])
                << ',' << format_float(snap.obs_second[i]) << '\n';
        }
        write_text_atomic(path, out.str());
        written.push_back(path);
    }
    return written;
}

RunSummary summarize_records(const std::vector<SimRecord>& records, const SimConfig& config) {
    if (records.empty()) throw IoError("cannot summarize an empty record set");
    RunSummary s;
    s.final_w_L = records.back().w_L;
    s.final_Htilde = records.back().Htilde;
    for (const auto& r : records) {
        s.max_casimir_drift =
            std::max(s.max_casimir_drift, std::abs(r.casimir - records.front().casimir));
    }
    s.max_balance_residual = power_balance_report(records, config).plant_residual;
    return s;
}

namespace {

nlohmann::json config_json(const SimConfig& c) {
    nlohmann::json j;
    j["string"] = {{"T", c.params.T}, {"rho", c.params.rho}, {"L", c.params.L}};
    j["patch"] = {{"z_p1", c.z_p1}, {"z_p2", c.z_p2}};
    j["equilibrium"] = {{"a", c.eq_a}, {"b", c.eq_b}};
    j["controller"] = {{"c1", c.c1}, {"c2", c.c2}};
    j["observer"] = {{"k", c.k}};
    const char* integ = c.integrator == Integrator::rk4 ? "rk4" : "midpoint";
    const char* fw = c.framework == RunFramework::jb   ? "jb"
                     : c.framework == RunFramework::sd ? "sd"
                                                       : "both";
    const char* fb = c.feedback == FeedbackSource::plant ? "plant" : "observer";
    j["sim"] = {{"n", c.n_cells},       {"dt", c.dt}, {"t_final", c.t_final},
                {"integrator", integ},  {"framework", fw},
                {"feedback", fb}};
    j["init"] = {{"plant", c.plant_init == PlantInit::rest ? "rest" : "eigenmode"},
                 {"plant_amplitude", c.plant_amplitude},
                 {"observer", c.observer_init == ObserverInit::linear       ? "linear"
                              : c.observer_init == ObserverInit::copy_plant ? "copy"
                                                                            : "rest"},
                 {"observer_slope", c.observer_slope}};
    return j;
}

}  // namespace

void write_manifest(const SimConfig& config, const RunSummary& summary,
                    const std::vector<fs::path>& outputs, const fs::path& path) {
    nlohmann::json j;
    j["artifact_version"] = "1.0.0";
    j["config"] = config_json(config);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& p : outputs) files.push_back(p.filename().string());
    j["outputs"] = files;
    nlohmann::json s;
    s["final_w_L"] = format_float(summary.final_w_L);
    s["final_Htilde"] = format_float(summary.final_Htilde);
    s["max_casimir_drift"] = format_float(summary.max_casimir_drift);
    s["max_balance_residual"] = format_float(summary.max_balance_residual);
    if (summary.max_equiv_deviation) {
        s["max_equiv_deviation"] = format_float(*summary.max_equiv_deviation);
    }
    j["summary"] = s;
    write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace phs
