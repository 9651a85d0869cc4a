#pragma once

#include <string>
#include <vector>

#include "phstring/sim.hpp"

namespace phs {

struct AuditCheck {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    // Most checks pass when value <= threshold; flag checks (perturbed
    // ansatz detection) pass when value > threshold.
    bool flag_expected = false;
    bool ok = false;
};

// Per-step relative mismatch between the logged directional derivative of
// Htilde and -k (ybar - yhat)^2; steps with reference below 1e-12 skipped.
double max_relative_htilde_identity_error(const SimLog& log, double k);

// Same for d(Hcl)/dt against -c2 ybar^2 (meaningful on plant-fed loops).
double max_relative_hcl_identity_error(const SimLog& log, double c2);

// Structural invariant audit: discrete operator identities, Casimir
// residuals of the string ansatz plus perturbed-ansatz detection,
// stationarity of the target equilibrium, and run-based balance checks on
// the given configuration (observer-fed and plant-fed twin).
std::vector<AuditCheck> run_invariant_audit(const SimConfig& config);

bool audit_passed(const std::vector<AuditCheck>& checks);

}  // namespace phs
