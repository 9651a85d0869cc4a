#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phstring/sim.hpp"

namespace phs {

// 17 significant digits; round-trips doubles exactly.
std::string format_float(double v);

// Write-temp-then-rename so partial files never appear under the final name.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

void write_trajectory_csv(const SimLog& log, const std::filesystem::path& path);
std::vector<SimRecord> read_trajectory_csv(const std::filesystem::path& path);

// One fields_t<t>.csv per logged snapshot; returns the created paths.
std::vector<std::filesystem::path> write_fields_csv(const SimLog& log,
                                                    const std::filesystem::path& dir);

// Self-contained line plots of the deflection traces and the energies.
void render_svg(const SimLog& log, const std::filesystem::path& path);

struct RunSummary {
    double final_w_L = 0.0;
    double final_Htilde = 0.0;
    double max_casimir_drift = 0.0;
    double max_balance_residual = 0.0;
    std::optional<double> max_equiv_deviation;
};

// Summary scalars recomputed from (typically re-parsed) trajectory records,
// so the manifest always agrees with the CSV artifact.
RunSummary summarize_records(const std::vector<SimRecord>& records, const SimConfig& config);

void write_manifest(const SimConfig& config, const RunSummary& summary,
                    const std::vector<std::filesystem::path>& outputs,
                    const std::filesystem::path& path);

}  // namespace phs
