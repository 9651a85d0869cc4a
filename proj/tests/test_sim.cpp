#include <cmath>
#include <limits>

#include "doctest.h"
#include "phstring/audit.hpp"
#include "phstring/sim.hpp"

using namespace phs;

namespace {

SimConfig conservative_config() {
    SimConfig c = paper_fig1_config();
    c.eq_a = 0.0;
    c.eq_b = 0.0;
    c.c1 = 0.0;
    c.c2 = 0.0;
    c.k = 0.0;
    c.plant_init = PlantInit::eigenmode;
    c.plant_amplitude = 0.1;
    c.observer_init = ObserverInit::rest;
    c.dt = 0.2 * (1.0 / 100.0);
    return c;
}

}  // namespace

TEST_CASE("rk4 step on dx/dt = -x") {
    const RhsFn f = [](const std::vector<double>& x) {
        return std::vector<double>{-x[0]};
    };
    const auto out = rk4_step({1.0}, f, 0.1);
    // degree-4 Taylor polynomial of exp(-0.1)
    CHECK(out[0] == doctest::Approx(0.9048375).epsilon(1e-15));
}

TEST_CASE("implicit midpoint step on dx/dt = -x") {
    const RhsFn f = [](const std::vector<double>& x) {
        return std::vector<double>{-x[0]};
    };
    const auto out = implicit_midpoint_step({1.0}, f, 0.1);
    CHECK(out[0] == doctest::Approx(0.95 / 1.05).epsilon(1e-12));
}

TEST_CASE("flat equilibrium with zero gains is a fixed point") {
    SimConfig c = paper_fig1_config();
    c.eq_a = 0.0;
    c.eq_b = 0.0;
    c.c1 = 0.0;
    c.c2 = 0.0;
    c.k = 0.0;
    c.observer_init = ObserverInit::rest;
    c.t_final = 0.1;
    const SimLog log = run_closed_loop(c);
    for (const auto& r : log.records) {
        CHECK(r.u == 0.0);
        CHECK(r.H == 0.0);
        CHECK(r.w_L == 0.0);
    }
}

TEST_CASE("conservative run preserves the energy") {
    const SimConfig c = conservative_config();
    const SimLog log = run_closed_loop(c);
    const double h0 = log.records.front().H;
    CHECK(h0 > 0.0);
    for (const auto& r : log.records) {
        CHECK(std::abs(r.H - h0) <= 1e-6 * h0);
    }
    const PowerBalanceReport rep = power_balance_report(log, c);
    CHECK(rep.plant_residual <= 1e-8);

    // with k = 0 and u = 0 the observer-error energy is conserved as well
    const double ht0 = log.records.front().Htilde;
    CHECK(ht0 > 0.0);
    for (const auto& r : log.records) {
        CHECK(std::abs(r.Htilde - ht0) <= 1e-6 * ht0);
    }
}

TEST_CASE("cfl guard rejects oversized rk4 steps") {
    SimConfig c = paper_fig1_config();
    c.dt = 0.6 * (c.params.L / c.n_cells);
    CHECK_THROWS_AS(run_closed_loop(c), CflViolation);
}

TEST_CASE("non-finite states are detected") {
    SimConfig c = paper_fig1_config();
    c.plant_init = PlantInit::eigenmode;
    c.plant_amplitude = std::numeric_limits<double>::infinity();
    c.t_final = 0.05;
    CHECK_THROWS_AS(run_closed_loop(c), NonFiniteState);
}

TEST_CASE("run_closed_loop rejects framework both") {
    SimConfig c = paper_fig1_config();
    c.framework = RunFramework::both;
    CHECK_THROWS_AS(run_closed_loop(c), ConfigError);
}

TEST_CASE("record structure: count, monotone time, snapshots") {
    SimConfig c = paper_fig1_config();
    c.t_final = 1.0;
    c.snapshot_times = {0.0, 0.5};
    const SimLog log = run_closed_loop(c);
    CHECK(log.records.size() ==
          static_cast<std::size_t>(std::floor(c.t_final / c.dt + 1e-9)) + 1);
    for (std::size_t i = 1; i < log.records.size(); ++i) {
        CHECK(log.records[i].t > log.records[i - 1].t);
    }
    REQUIRE(log.snapshots.size() == 2);
    CHECK(log.snapshots[0].t == 0.0);
    CHECK(log.snapshots[1].t == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(log.snapshots[0].obs_first.back() == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("identical configurations give bit-identical logs") {
    SimConfig c = paper_fig1_config();
    c.t_final = 2.0;
    const SimLog a = run_closed_loop(c);
    const SimLog b = run_closed_loop(c);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].u == b.records[i].u);
        CHECK(a.records[i].H == b.records[i].H);
        CHECK(a.records[i].w_L == b.records[i].w_L);
        CHECK(a.records[i].casimir == b.records[i].casimir);
    }
}

TEST_CASE("observer-fed preset: casimir conservation and observer decay") {
    const SimConfig c = paper_fig1_config();
    const SimLog log = run_closed_loop(c);

    const double c0 = log.records.front().casimir;
    for (const auto& r : log.records) {
        CHECK(std::abs(r.casimir - c0) <= 1e-6);
    }
    // kappa = 0 by initialization
    CHECK(std::abs(c0) <= 1e-14);

    const double h0 = log.records.front().Htilde;
    CHECK(h0 == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(log.records.back().Htilde / h0 <= 0.05);

    double uptick = 0.0;
    for (std::size_t i = 1; i < log.records.size(); ++i) {
        uptick = std::max(uptick, log.records[i].Htilde - log.records[i - 1].Htilde);
    }
    CHECK(uptick <= 1e-10 * h0);

    CHECK(max_relative_htilde_identity_error(log, c.k) <= 1e-6);
}

TEST_CASE("plant-fed loop satisfies the closed-loop dissipation identities") {
    SimConfig c = paper_fig1_config();
    c.feedback = FeedbackSource::plant;
    const SimLog log = run_closed_loop(c);

    CHECK(max_relative_hcl_identity_error(log, c.c2) <= 1e-6);

    const PowerBalanceReport rep = power_balance_report(log, c);
    CHECK(rep.closed_loop_residual <= 1e-6);
    CHECK(rep.plant_residual <= 1e-5);

    double max_hcl = 0.0;
    for (const auto& r : log.records) max_hcl = std::max(max_hcl, r.Hcl);
    CHECK(rep.max_hcl_uptick <= 1e-9 * max_hcl);

    // plant-fed casimir uses the plant fields
    const double c0 = log.records.front().casimir;
    for (const auto& r : log.records) {
        CHECK(std::abs(r.casimir - c0) <= 1e-6);
    }
}

TEST_CASE("per-step balance residual converges at third order in dt") {
    SimConfig coarse = paper_fig1_config();
    coarse.feedback = FeedbackSource::plant;
    coarse.n_cells = 50;
    coarse.dt = 0.5 * (1.0 / 50.0);
    coarse.t_final = 2.0;
    SimConfig fine = coarse;
    fine.dt = 0.5 * coarse.dt;

    const double r_coarse =
        power_balance_report(run_closed_loop(coarse), coarse).plant_residual;
    const double r_fine = power_balance_report(run_closed_loop(fine), fine).plant_residual;
    CHECK(r_coarse / r_fine >= 7.5);
}

TEST_CASE("implicit midpoint on the preset keeps the structure") {
    SimConfig c = paper_fig1_config();
    c.integrator = Integrator::implicit_midpoint;
    c.t_final = 2.0;
    const SimLog log = run_closed_loop(c);
    const double c0 = log.records.front().casimir;
    for (const auto& r : log.records) {
        CHECK(std::abs(r.casimir - c0) <= 1e-6);
    }
    CHECK(max_relative_htilde_identity_error(log, c.k) <= 1e-6);

    // agrees with rk4 to integrator accuracy
    SimConfig c_rk = c;
    c_rk.integrator = Integrator::rk4;
    const SimLog log_rk = run_closed_loop(c_rk);
    CHECK(std::abs(log.records.back().w_L - log_rk.records.back().w_L) <= 1e-3);
}

TEST_CASE("equivalence report: exact mode to roundoff, analytic mode O(dz^2)") {
    const SimConfig c = paper_fig1_config();
    const EquivalenceReport rep = equivalence_report(c);
    CHECK(rep.max_dev_exact <= 1e-10);
    CHECK(rep.max_dev_analytic > rep.max_dev_exact);

    SimConfig fine = c;
    fine.n_cells = 200;
    fine.dt = 0.5 * (1.0 / 200.0);
    const EquivalenceReport rep_fine = equivalence_report(fine);
    const double ratio = rep.max_dev_analytic / rep_fine.max_dev_analytic;
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.175));

    SimConfig zero_gain = c;
    zero_gain.c1 = 0.0;
    zero_gain.c2 = 0.0;
    zero_gain.t_final = 0.5;
    const EquivalenceReport rep_zero = equivalence_report(zero_gain);
    CHECK(rep_zero.max_dev_exact == 0.0);
    CHECK(rep_zero.max_dev_analytic == 0.0);
}

TEST_CASE("mesh refinement changes the settled tip deflection below 1e-3") {
    SimConfig a = paper_fig1_config();
    a.n_cells = 200;
    a.dt = 0.5 * (1.0 / 200.0);
    SimConfig b = a;
    b.n_cells = 400;
    b.dt = 0.5 * (1.0 / 400.0);
    const double wa = run_closed_loop(a).records.back().w_L;
    const double wb = run_closed_loop(b).records.back().w_L;
    CHECK(std::abs(wa - wb) <= 1e-3);
}

TEST_CASE("stokes-dirac preset run mirrors the jet-bundle behaviour") {
    SimConfig c = paper_fig1_config();
    c.framework = RunFramework::sd;
    const SimLog log = run_closed_loop(c);

    const double c0 = log.records.front().casimir;
    for (const auto& r : log.records) {
        CHECK(std::abs(r.casimir - c0) <= 1e-6);
    }
    const double h0 = log.records.front().Htilde;
    CHECK(log.records.back().Htilde / h0 <= 0.05);
    CHECK(max_relative_htilde_identity_error(log, c.k) <= 1e-6);
    double uptick = 0.0;
    for (std::size_t i = 1; i < log.records.size(); ++i) {
        uptick = std::max(uptick, log.records[i].Htilde - log.records[i - 1].Htilde);
    }
    CHECK(uptick <= 1e-10 * h0);

    SimConfig cj = paper_fig1_config();
    const SimLog log_jb = run_closed_loop(cj);
    CHECK(std::abs(log.records.back().w_L - log_jb.records.back().w_L) <= 5e-3);
}
