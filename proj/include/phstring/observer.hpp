#pragma once

#include "phstring/string_model.hpp"

namespace phs {

enum class Framework {
    jb,
    sd,
};

// Copy of the plant driven by the applied input u and the measured
// integrated output only, with error injection k g(z) (ybar - ybar_hat) on
// the momentum equation (the w/q injection gain is zero for the string).
// The per-field gain profiles are kept general in the data model.
struct ObserverState {
    Framework framework = Framework::jb;
    JetBundleState jb;   // valid when framework == jb
    StokesDiracState sd; // valid when framework == sd
    double k = 0.0;
    Field gain_first;   // injection profile on the w / q equation
    Field gain_second;  // injection profile on the p equation
};

ObserverState make_jb_observer(const StringModel& m, double k, Field w0, Field p0);
ObserverState make_sd_observer(const StringModel& m, double k, Field q0, Field p0);

// Estimated integrated output ybar_hat.
double observer_output(const ObserverState& obs, const StringModel& m);

FieldPair observer_rhs_jb(const ObserverState& obs, double u, double y_bar_meas,
                          const StringModel& m);
FieldPair observer_rhs_sd(const ObserverState& obs, double u, double y_bar_meas,
                          const StringModel& m);

struct ErrorDiagnostics {
    double H_tilde = 0.0;           // energy of the observer error (not H + H_hat)
    double dissipation_rate = 0.0;  // -k (ybar - ybar_hat)^2
    double innovation = 0.0;        // ybar - ybar_hat
};

ErrorDiagnostics error_energy(const JetBundleState& plant, const ObserverState& obs,
                              const StringModel& m);
ErrorDiagnostics error_energy(const StokesDiracState& plant, const ObserverState& obs,
                              const StringModel& m);

}  // namespace phs
