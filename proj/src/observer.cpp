#include "phstring/observer.hpp"

#include <cstddef>

namespace phs {

namespace {

Field default_momentum_gain(const StringModel& m, double k) {
    Field gain = m.patch.input_profile;
    for (double& v : gain) v *= k;
    return gain;
}

}  // namespace

ObserverState make_jb_observer(const StringModel& m, double k, Field w0, Field p0) {
    ObserverState obs;
    obs.framework = Framework::jb;
    obs.jb.w = std::move(w0);
    obs.jb.p = std::move(p0);
    obs.k = k;
    obs.gain_first.assign(static_cast<std::size_t>(m.grid.num_nodes()), 0.0);
    obs.gain_second = default_momentum_gain(m, k);
    return obs;
}

ObserverState make_sd_observer(const StringModel& m, double k, Field q0, Field p0) {
    ObserverState obs;
    obs.framework = Framework::sd;
    obs.sd.q = std::move(q0);
    obs.sd.p = std::move(p0);
    apply_sd_bc(obs.sd);
    obs.k = k;
    obs.gain_first.assign(static_cast<std::size_t>(m.grid.num_nodes()), 0.0);
    obs.gain_second = default_momentum_gain(m, k);
    return obs;
}

double observer_output(const ObserverState& obs, const StringModel& m) {
    return integrated_output(obs.framework == Framework::jb ? obs.jb.p : obs.sd.p, m);
}

FieldPair observer_rhs_jb(const ObserverState& obs, double u, double y_bar_meas,
                          const StringModel& m) {
    if (obs.framework != Framework::jb) {
        throw FrameworkMismatch("observer_rhs_jb on a Stokes-Dirac observer");
    }
    const double innovation = y_bar_meas - integrated_output(obs.jb.p, m);
    FieldPair out = jb_rhs(obs.jb, u, m);
    for (std::size_t i = 1; i < out.first.size(); ++i) {
        out.first[i] += obs.gain_first[i] * innovation;
        out.second[i] += obs.gain_second[i] * innovation;
    }
    return out;
}

FieldPair observer_rhs_sd(const ObserverState& obs, double u, double y_bar_meas,
                          const StringModel& m) {
    if (obs.framework != Framework::sd) {
        throw FrameworkMismatch("observer_rhs_sd on a jet-bundle observer");
    }
    const double innovation = y_bar_meas - integrated_output(obs.sd.p, m);
    FieldPair out = sd_rhs(obs.sd, u, m);
    const std::size_t last = out.first.size() - 1;
    for (std::size_t i = 0; i < out.first.size(); ++i) {
        if (i != last) out.first[i] += obs.gain_first[i] * innovation;
        if (i != 0) out.second[i] += obs.gain_second[i] * innovation;
    }
    return out;
}

ErrorDiagnostics error_energy(const JetBundleState& plant, const ObserverState& obs,
                              const StringModel& m) {
    if (obs.framework != Framework::jb) {
        throw FrameworkMismatch("plant is jet-bundle, observer is not");
    }
    JetBundleState err;
    err.w.resize(plant.w.size());
    err.p.resize(plant.p.size());
    for (std::size_t i = 0; i < plant.w.size(); ++i) {
        err.w[i] = plant.w[i] - obs.jb.w[i];
        err.p[i] = plant.p[i] - obs.jb.p[i];
    }
    ErrorDiagnostics d;
    d.H_tilde = hamiltonian_jb(err, m);
    d.innovation = integrated_output(plant.p, m) - integrated_output(obs.jb.p, m);
    d.dissipation_rate = -obs.k * d.innovation * d.innovation;
    return d;
}

ErrorDiagnostics error_energy(const StokesDiracState& plant, const ObserverState& obs,
                              const StringModel& m) {
    if (obs.framework != Framework::sd) {
        throw FrameworkMismatch("plant is Stokes-Dirac, observer is not");
    }
    StokesDiracState err;
    err.q.resize(plant.q.size());
    err.p.resize(plant.p.size());
    for (std::size_t i = 0; i < plant.q.size(); ++i) {
        err.q[i] = plant.q[i] - obs.sd.q[i];
        err.p[i] = plant.p[i] - obs.sd.p[i];
    }
    ErrorDiagnostics d;
    d.H_tilde = hamiltonian_sd(err, m);
    d.innovation = integrated_output(plant.p, m) - integrated_output(obs.sd.p, m);
    d.dissipation_rate = -obs.k * d.innovation * d.innovation;
    return d;
}

}  // namespace phs
