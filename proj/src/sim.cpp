#include "phstring/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>

namespace phs {

SimConfig paper_fig1_config() { return SimConfig{}; }

std::vector<double> rk4_step(const std::vector<double>& x, const RhsFn& f, double dt) {
    const std::size_t n = x.size();
    std::vector<double> tmp(n), out(n);

    const std::vector<double> k1 = f(x);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    const std::vector<double> k2 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    const std::vector<double> k4 = f(tmp);

    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i] + w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    return out;
}

std::vector<double> implicit_midpoint_step(const std::vector<double>& x, const RhsFn& f,
                                           double dt) {
    const std::size_t n = x.size();
    std::vector<double> y(n), mid(n);

    // explicit Euler predictor
    std::vector<double> k = f(x);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + dt * k[i];

    for (int iter = 0; iter < 50; ++iter) {
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (x[i] + y[i]);
        k = f(mid);
        double diff = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yn = x[i] + dt * k[i];
            diff = std::max(diff, std::abs(yn - y[i]));
            scale = std::max(scale, std::abs(yn));
            y[i] = yn;
        }
        if (diff <= 1e-12 * scale) return y;
    }
    throw NumericError("implicit midpoint fixed-point iteration did not converge");
}

namespace {

struct Prepared {
    StringModel model;
    EquilibriumProfile prof;
    Field q_d_analytic;
    Field psi1_exact;
    Field psi1_analytic;
    double u_s = 0.0;
    double x_c_d = 0.0;  // patch integral of w_d
    double v_c_d = 0.0;  // -<Psi1, q_d>
    ControllerState ctrl;
};

void validate_common(const SimConfig& c) {
    if (!(c.params.T > 0.0) || !(c.params.rho > 0.0) || !(c.params.L > 0.0)) {
        throw ValidationError("string parameters must be positive (T, rho, L > 0)");
    }
    if (c.c1 < 0.0 || c.c2 < 0.0) {
        throw ValidationError("controller gains must be nonnegative");
    }
    if (c.k < 0.0) {
        throw ValidationError("observer gain must satisfy k >= 0");
    }
    if (!(c.dt > 0.0)) {
        throw ValidationError("dt > 0");
    }
    if (!(c.t_final >= c.dt)) {
        throw ValidationError("t_final >= dt");
    }
}

Prepared prepare(const SimConfig& c) {
    validate_common(c);

    Prepared p;
    p.model = make_string_model(c.params, c.n_cells, c.z_p1, c.z_p2);

    if (c.integrator == Integrator::rk4) {
        const double wave_speed = std::sqrt(c.params.T / c.params.rho);
        const double dt_max = 0.5 * p.model.grid.dz / wave_speed;
        if (c.dt > dt_max * (1.0 + 1e-12)) {
            throw CflViolation("rk4 requires dt <= 0.5 dz sqrt(rho/T)");
        }
    }

    p.prof = equilibrium_profile(c.eq_a, c.eq_b, p.model.patch, c.params, p.model.grid);
    p.q_d_analytic = equilibrium_strain_analytic(p.prof, p.model.patch, p.model.grid);
    p.psi1_exact = psi1_field_discrete(p.model);
    p.psi1_analytic = psi1_field(p.model.grid, p.model.patch);
    p.u_s = feedforward_us(c.eq_b, c.params.T);
    p.x_c_d = target_xcd(p.prof.w_d, p.model);
    p.v_c_d = -inner_h(p.psi1_exact, p.prof.q_d, p.model.grid);

    p.ctrl.c1 = c.c1;
    p.ctrl.c2 = c.c2;
    p.ctrl.u_s = p.u_s;
    return p;
}

Field linear_ramp(const Grid& g, double slope) {
    Field f(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i) {
        f[static_cast<std::size_t>(i)] = slope * g.nodes[static_cast<std::size_t>(i)];
    }
    return f;
}

Field eigenmode_bump(const Grid& g, double amplitude) {
    Field f(static_cast<std::size_t>(g.num_nodes()));
    const double kz = M_PI / (2.0 * g.length);
    for (int i = 0; i < g.num_nodes(); ++i) {
        f[static_cast<std::size_t>(i)] =
            amplitude * std::sin(kz * g.nodes[static_cast<std::size_t>(i)]);
    }
    return f;
}

Field plant_w0(const SimConfig& c, const Grid& g) {
    if (c.plant_init == PlantInit::eigenmode) return eigenmode_bump(g, c.plant_amplitude);
    return Field(static_cast<std::size_t>(g.num_nodes()), 0.0);
}

Field observer_w0(const SimConfig& c, const Grid& g, const Field& plant_w) {
    switch (c.observer_init) {
        case ObserverInit::linear:
            return linear_ramp(g, c.observer_slope);
        case ObserverInit::copy_plant:
            return plant_w;
        case ObserverInit::rest:
        default:
            return Field(static_cast<std::size_t>(g.num_nodes()), 0.0);
    }
}

// Stage-consistent interconnection: the total control law evaluated from the
// controller state, with damping injection from the measured output.
double applied_control(const ControllerState& ctrl, double ybar) {
    return -controller_output(ctrl) - ctrl.c2 * ybar;
}

struct JbLoop {
    const SimConfig* cfg = nullptr;
    const Prepared* prep = nullptr;
    JetBundleState plant;
    ObserverState obs;
    double x_c = 0.0;
    std::size_t nn = 0;  // nodes per field

    void init(const SimConfig& c, const Prepared& p) {
        cfg = &c;
        prep = &p;
        nn = static_cast<std::size_t>(p.model.grid.num_nodes());
        plant.w = plant_w0(c, p.model.grid);
        plant.p.assign(nn, 0.0);
        const Field w0_hat = observer_w0(c, p.model.grid, plant.w);
        obs = make_jb_observer(p.model, c.k, w0_hat, Field(nn, 0.0));
        x_c = quad_patch(c.feedback == FeedbackSource::observer ? obs.jb.w : plant.w,
                         p.model.grid);
    }

    std::vector<double> pack() const {
        std::vector<double> x(4 * nn + 1);
        for (std::size_t i = 0; i < nn; ++i) {
            x[i] = plant.w[i];
            x[nn + i] = plant.p[i];
            x[2 * nn + i] = obs.jb.w[i];
            x[3 * nn + i] = obs.jb.p[i];
        }
        x[4 * nn] = x_c;
        return x;
    }

    void unpack(const std::vector<double>& x) {
        for (std::size_t i = 0; i < nn; ++i) {
            plant.w[i] = x[i];
            plant.p[i] = x[nn + i];
            obs.jb.w[i] = x[2 * nn + i];
            obs.jb.p[i] = x[3 * nn + i];
        }
        x_c = x[4 * nn];
    }

    struct Eval {
        double ybar = 0.0, yhat = 0.0, u = 0.0, dxc = 0.0;
        FieldPair plant_d, obs_d;
    };

    Eval eval(const JetBundleState& pl, const ObserverState& ob, double xc,
              const double* frozen_u) const {
        Eval e;
        e.ybar = integrated_output(pl.p, prep->model);
        e.yhat = integrated_output(ob.jb.p, prep->model);
        ControllerState ctrl = prep->ctrl;
        ctrl.x_c = xc;
        ctrl.x_c_d = prep->x_c_d;
        e.u = frozen_u ? *frozen_u : applied_control(ctrl, e.ybar);
        e.plant_d = jb_rhs(pl, e.u, prep->model);
        e.obs_d = observer_rhs_jb(ob, e.u, e.ybar, prep->model);
        e.dxc = cfg->feedback == FeedbackSource::observer ? e.yhat : e.ybar;
        return e;
    }

    RhsFn rhs_fn(const double* frozen_u) {
        return [this, frozen_u](const std::vector<double>& x) {
            JetBundleState pl{Field(x.begin(), x.begin() + static_cast<long>(nn)),
                              Field(x.begin() + static_cast<long>(nn),
                                    x.begin() + static_cast<long>(2 * nn))};
            ObserverState ob = obs;  // gain profiles; fields overwritten
            ob.jb.w.assign(x.begin() + static_cast<long>(2 * nn),
                           x.begin() + static_cast<long>(3 * nn));
            ob.jb.p.assign(x.begin() + static_cast<long>(3 * nn),
                           x.begin() + static_cast<long>(4 * nn));
            const Eval e = eval(pl, ob, x[4 * nn], frozen_u);
            std::vector<double> dx(x.size());
            for (std::size_t i = 0; i < nn; ++i) {
                dx[i] = e.plant_d.first[i];
                dx[nn + i] = e.plant_d.second[i];
                dx[2 * nn + i] = e.obs_d.first[i];
                dx[3 * nn + i] = e.obs_d.second[i];
            }
            dx[4 * nn] = e.dxc;
            return dx;
        };
    }

    SimRecord record(double t) const {
        const Eval e = eval(plant, obs, x_c, nullptr);
        SimRecord r;
        r.t = t;
        r.u = e.u;
        r.ybar = e.ybar;
        r.yhat_bar = e.yhat;
        r.H = hamiltonian_jb(plant, prep->model);
        ControllerState ctrl = prep->ctrl;
        ctrl.x_c = x_c;
        ctrl.x_c_d = prep->x_c_d;
        r.Hc = controller_energy(ctrl);
        r.Hcl = r.H + r.Hc;
        const ErrorDiagnostics diag = error_energy(plant, obs, prep->model);
        r.Htilde = diag.H_tilde;
        r.casimir = casimir_value(
            x_c, cfg->feedback == FeedbackSource::observer ? obs.jb.w : plant.w, prep->model);
        r.w_L = plant.w.back();
        r.what_L = obs.jb.w.back();

        JetBundleState err;
        err.w.resize(nn);
        err.p.resize(nn);
        FieldPair err_d;
        err_d.first.resize(nn);
        err_d.second.resize(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            err.w[i] = plant.w[i] - obs.jb.w[i];
            err.p[i] = plant.p[i] - obs.jb.p[i];
            err_d.first[i] = e.plant_d.first[i] - e.obs_d.first[i];
            err_d.second[i] = e.plant_d.second[i] - e.obs_d.second[i];
        }
        r.htilde_rate = hamiltonian_jb_rate(err, err_d, prep->model);
        const double y_c = controller_output(ctrl);
        r.hcl_rate = hamiltonian_jb_rate(plant, e.plant_d, prep->model) +
                     (ctrl.c1 > 0.0 ? y_c * e.dxc : 0.0);
        return r;
    }

    FieldSnapshot snapshot(double t) const {
        return FieldSnapshot{t, plant.w, plant.p, obs.jb.w, obs.jb.p};
    }
};

struct SdLoop {
    const SimConfig* cfg = nullptr;
    const Prepared* prep = nullptr;
    StokesDiracState plant;
    ObserverState obs;
    double x_c = 0.0;  // v_c
    std::size_t nn = 0;

    void init(const SimConfig& c, const Prepared& p) {
        cfg = &c;
        prep = &p;
        nn = static_cast<std::size_t>(p.model.grid.num_nodes());
        const Field w0 = plant_w0(c, p.model.grid);
        plant.q = d1(w0, p.model.grid);
        plant.p.assign(nn, 0.0);
        apply_sd_bc(plant);
        const Field w0_hat = observer_w0(c, p.model.grid, w0);
        obs = make_sd_observer(p.model, c.k, d1(w0_hat, p.model.grid), Field(nn, 0.0));
        const Field& q_src = c.feedback == FeedbackSource::observer ? obs.sd.q : plant.q;
        x_c = -inner_h(prep->psi1_exact, q_src, p.model.grid);
    }

    std::vector<double> pack() const {
        std::vector<double> x(4 * nn + 1);
        for (std::size_t i = 0; i < nn; ++i) {
            x[i] = plant.q[i];
            x[nn + i] = plant.p[i];
            x[2 * nn + i] = obs.sd.q[i];
            x[3 * nn + i] = obs.sd.p[i];
        }
        x[4 * nn] = x_c;
        return x;
    }

    void unpack(const std::vector<double>& x) {
        for (std::size_t i = 0; i < nn; ++i) {
            plant.q[i] = x[i];
            plant.p[i] = x[nn + i];
            obs.sd.q[i] = x[2 * nn + i];
            obs.sd.p[i] = x[3 * nn + i];
        }
        x_c = x[4 * nn];
    }

    struct Eval {
        double ybar = 0.0, yhat = 0.0, u = 0.0, dxc = 0.0;
        FieldPair plant_d, obs_d;
    };

    Eval eval(const StokesDiracState& pl, const ObserverState& ob, double xc,
              const double* frozen_u) const {
        Eval e;
        e.ybar = integrated_output(pl.p, prep->model);
        e.yhat = integrated_output(ob.sd.p, prep->model);
        ControllerState ctrl = prep->ctrl;
        ctrl.x_c = xc;
        ctrl.x_c_d = prep->v_c_d;
        e.u = frozen_u ? *frozen_u : applied_control(ctrl, e.ybar);
        e.plant_d = sd_rhs(pl, e.u, prep->model);
        e.obs_d = observer_rhs_sd(ob, e.u, e.ybar, prep->model);
        e.dxc = cfg->feedback == FeedbackSource::observer ? e.yhat : e.ybar;
        return e;
    }

    RhsFn rhs_fn(const double* frozen_u) {
        return [this, frozen_u](const std::vector<double>& x) {
            StokesDiracState pl{Field(x.begin(), x.begin() + static_cast<long>(nn)),
                                Field(x.begin() + static_cast<long>(nn),
                                      x.begin() + static_cast<long>(2 * nn))};
            ObserverState ob = obs;
            ob.sd.q.assign(x.begin() + static_cast<long>(2 * nn),
                           x.begin() + static_cast<long>(3 * nn));
            ob.sd.p.assign(x.begin() + static_cast<long>(3 * nn),
                           x.begin() + static_cast<long>(4 * nn));
            const Eval e = eval(pl, ob, x[4 * nn], frozen_u);
            std::vector<double> dx(x.size());
            for (std::size_t i = 0; i < nn; ++i) {
                dx[i] = e.plant_d.first[i];
                dx[nn + i] = e.plant_d.second[i];
                dx[2 * nn + i] = e.obs_d.first[i];
                dx[3 * nn + i] = e.obs_d.second[i];
            }
            dx[4 * nn] = e.dxc;
            return dx;
        };
    }

    SimRecord record(double t) const {
        const Eval e = eval(plant, obs, x_c, nullptr);
        SimRecord r;
        r.t = t;
        r.u = e.u;
        r.ybar = e.ybar;
        r.yhat_bar = e.yhat;
        r.H = hamiltonian_sd(plant, prep->model);
        ControllerState ctrl = prep->ctrl;
        ctrl.x_c = x_c;
        ctrl.x_c_d = prep->v_c_d;
        r.Hc = controller_energy(ctrl);
        r.Hcl = r.H + r.Hc;
        const ErrorDiagnostics diag = error_energy(plant, obs, prep->model);
        r.Htilde = diag.H_tilde;
        const Field& q_src = cfg->feedback == FeedbackSource::observer ? obs.sd.q : plant.q;
        r.casimir = casimir_value_sd(x_c, q_src, prep->psi1_exact, prep->model);
        r.w_L = cumtrapz(plant.q, prep->model.grid).back();
        r.what_L = cumtrapz(obs.sd.q, prep->model.grid).back();

        StokesDiracState err;
        err.q.resize(nn);
        err.p.resize(nn);
        FieldPair err_d;
        err_d.first.resize(nn);
        err_d.second.resize(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            err.q[i] = plant.q[i] - obs.sd.q[i];
            err.p[i] = plant.p[i] - obs.sd.p[i];
            err_d.first[i] = e.plant_d.first[i] - e.obs_d.first[i];
            err_d.second[i] = e.plant_d.second[i] - e.obs_d.second[i];
        }
        r.htilde_rate = hamiltonian_sd_rate(err, err_d, prep->model);
        const double y_c = controller_output(ctrl);
        r.hcl_rate = hamiltonian_sd_rate(plant, e.plant_d, prep->model) +
                     (ctrl.c1 > 0.0 ? y_c * e.dxc : 0.0);
        return r;
    }

    FieldSnapshot snapshot(double t) const {
        return FieldSnapshot{t, plant.q, plant.p, obs.sd.q, obs.sd.p};
    }
};

long step_count(const SimConfig& c) {
    return static_cast<long>(std::floor(c.t_final / c.dt + 1e-9));
}

std::set<long> snapshot_steps(const SimConfig& c, long n_steps) {
    std::set<long> idx;
    for (double t : c.snapshot_times) {
        const long i = std::lround(t / c.dt);
        if (i >= 0 && i <= n_steps) idx.insert(i);
    }
    return idx;
}

void check_finite(const std::vector<double>& x) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw NonFiniteState("state became non-finite during integration");
        }
    }
}

template <class Loop>
SimLog run_loop(const SimConfig& config, const Prepared& prep, Framework fw) {
    Loop loop;
    loop.init(config, prep);

    const long n_steps = step_count(config);
    const std::set<long> snap_at = snapshot_steps(config, n_steps);

    SimLog log;
    log.config = config;
    log.framework = fw;
    log.records.reserve(static_cast<std::size_t>(n_steps) + 1);

    std::vector<double> x = loop.pack();
    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * config.dt;
        loop.unpack(x);
        log.records.push_back(loop.record(t));
        if (snap_at.count(step) != 0) log.snapshots.push_back(loop.snapshot(t));
        if (step == n_steps) break;

        double u_hold = 0.0;
        const double* frozen = nullptr;
        if (config.stage_frozen_control) {
            u_hold = log.records.back().u;
            frozen = &u_hold;
        }
        const RhsFn f = loop.rhs_fn(frozen);
        x = config.integrator == Integrator::rk4 ? rk4_step(x, f, config.dt)
                                                 : implicit_midpoint_step(x, f, config.dt);
        check_finite(x);
    }
    return log;
}

}  // namespace

SimLog run_closed_loop(const SimConfig& config) {
    if (config.framework == RunFramework::both) {
        throw ConfigError("run_closed_loop needs framework jb or sd");
    }
    const Prepared prep = prepare(config);
    if (config.framework == RunFramework::jb) {
        return run_loop<JbLoop>(config, prep, Framework::jb);
    }
    return run_loop<SdLoop>(config, prep, Framework::sd);
}

PowerBalanceReport power_balance_report(const SimLog& log, const SimConfig& config) {
    return power_balance_report(log.records, config);
}

PowerBalanceReport power_balance_report(const std::vector<SimRecord>& rec,
                                        const SimConfig& config) {
    PowerBalanceReport rep;
    if (rec.size() < 2) return rep;

    double max_h = 0.0, max_hcl = 0.0;
    for (const auto& r : rec) {
        max_h = std::max(max_h, std::abs(r.H));
        max_hcl = std::max(max_hcl, std::abs(r.Hcl));
    }
    const double h_scale = std::max(max_h, 1e-300);
    const double hcl_scale = std::max(max_hcl, 1e-300);

    for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
        const double dt = rec[i + 1].t - rec[i].t;
        const double supplied =
            0.5 * dt * (rec[i].u * rec[i].ybar + rec[i + 1].u * rec[i + 1].ybar);
        rep.plant_residual =
            std::max(rep.plant_residual, std::abs(rec[i + 1].H - rec[i].H - supplied));
        const double dissipated =
            0.5 * dt * config.c2 * (rec[i].ybar * rec[i].ybar + rec[i + 1].ybar * rec[i + 1].ybar);
        rep.closed_loop_residual = std::max(
            rep.closed_loop_residual, std::abs(rec[i + 1].Hcl - rec[i].Hcl + dissipated));
        rep.max_hcl_uptick = std::max(rep.max_hcl_uptick, rec[i + 1].Hcl - rec[i].Hcl);
        rep.max_htilde_uptick = std::max(rep.max_htilde_uptick, rec[i + 1].Htilde - rec[i].Htilde);
    }
    rep.plant_residual /= h_scale;
    rep.closed_loop_residual /= hcl_scale;
    return rep;
}

EquivalenceReport equivalence_report(const SimConfig& config) {
    SimConfig base = config;
    base.framework = RunFramework::jb;
    const Prepared prep = prepare(base);

    JbLoop jb;
    jb.init(base, prep);
    SimConfig sd_cfg = base;
    sd_cfg.framework = RunFramework::sd;
    SdLoop sd;
    sd.init(sd_cfg, prep);

    ControllerState ctrl = prep.ctrl;
    ctrl.x_c_d = prep.x_c_d;

    const long n_steps = step_count(base);
    EquivalenceReport rep;

    std::vector<double> x_jb = jb.pack();
    std::vector<double> x_sd = sd.pack();
    for (long step = 0;; ++step) {
        jb.unpack(x_jb);
        sd.unpack(x_sd);

        const Field& w_feed =
            base.feedback == FeedbackSource::observer ? jb.obs.jb.w : jb.plant.w;
        const double ybar = integrated_output(jb.plant.p, prep.model);
        const double u_jb = control_law_jb(ctrl, w_feed, ybar, prep.model);
        const Field q_feed = d1(w_feed, prep.model.grid);
        const double u_sd_exact =
            control_law_sd(ctrl, q_feed, prep.prof.q_d, ybar, prep.psi1_exact, prep.model);
        const double u_sd_analytic =
            control_law_sd(ctrl, q_feed, prep.q_d_analytic, ybar, prep.psi1_analytic, prep.model);
        rep.max_dev_exact = std::max(rep.max_dev_exact, std::abs(u_jb - u_sd_exact));
        rep.max_dev_analytic = std::max(rep.max_dev_analytic, std::abs(u_jb - u_sd_analytic));

        const Field q_of_w = d1(jb.plant.w, prep.model.grid);
        for (std::size_t i = 0; i < jb.nn; ++i) {
            // q(L) is pinned to zero in the Stokes-Dirac run
            if (i + 1 < jb.nn) {
                rep.max_field_dev =
                    std::max(rep.max_field_dev, std::abs(sd.plant.q[i] - q_of_w[i]));
            }
            rep.max_field_dev = std::max(rep.max_field_dev, std::abs(sd.plant.p[i] - jb.plant.p[i]));
        }

        if (step == n_steps) break;
        const RhsFn f_jb = jb.rhs_fn(nullptr);
        const RhsFn f_sd = sd.rhs_fn(nullptr);
        if (base.integrator == Integrator::rk4) {
            x_jb = rk4_step(x_jb, f_jb, base.dt);
            x_sd = rk4_step(x_sd, f_sd, base.dt);
        } else {
            x_jb = implicit_midpoint_step(x_jb, f_jb, base.dt);
            x_sd = implicit_midpoint_step(x_sd, f_sd, base.dt);
        }
        check_finite(x_jb);
        check_finite(x_sd);
    }
    return rep;
}

}  // namespace phs
