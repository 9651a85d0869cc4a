#pragma once

#include <array>

#include "phstring/grid.hpp"

namespace phs {

struct StringParams {
    double T = 1.0;    // Young's modulus (N)
    double rho = 1.0;  // mass density (kg/m)
    double L = 1.0;    // length (m)
};

// In-domain actuator acting like a piezoelectric patch between z_p1 and z_p2.
struct PatchActuator {
    double z_p1 = 0.0;
    double z_p2 = 0.0;
    // Closed-interval node indicator, g(z) = h(z - z_p1) - h(z - z_p2) with
    // h(0) = 1: exactly 1 on [z_p1, z_p2], 0 elsewhere.
    Field indicator;
    // Discrete input distribution: 1 strictly inside the patch, 1/2 at the
    // edge nodes. This is the H-adjoint of quad_patch, so the power supplied
    // through the patch is exactly u * integrated_output.
    Field input_profile;
};

PatchActuator make_patch(const Grid& g);

// Plant state in derivative variables x = (w, p), w(0) = 0 clamped.
struct JetBundleState {
    Field w;  // deflection (m)
    Field p;  // momentum density (kg/s)
};

// Plant state in energy variables chi = (q, p) with the strain q = w_z.
struct StokesDiracState {
    Field q;
    Field p;
};

// Desired piecewise equilibrium: linear ramp, downward parabola over the
// patch, constant tip. C^1 continuity ties a = 2 b (z_p2 - z_p1).
struct EquilibriumProfile {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;  // tip height, b (z_p2 - z_p1)^2 + a z_p1
    Field w_d;
    Field q_d;  // d1(w_d)
};

EquilibriumProfile equilibrium_profile(double a, double b, const PatchActuator& patch,
                                       const StringParams& params, const Grid& g);

// Exact derivative of the equilibrium sampled on nodes (continuous,
// piecewise-linear; kinks in slope at the patch edges).
Field equilibrium_strain_analytic(const EquilibriumProfile& prof, const PatchActuator& patch,
                                  const Grid& g);

// Constant input holding the equilibrium: T w^d_zz + g u_s = 0 on the patch.
double feedforward_us(double b, double T);

// Everything the field equations need, with the dissipation blocks of the
// general pH form carried explicitly (zero for the undamped string).
struct StringModel {
    Grid grid;
    StringParams params;
    PatchActuator patch;
    std::array<std::array<double, 2>, 2> R_jb{{{0.0, 0.0}, {0.0, 0.0}}};
    std::array<std::array<double, 2>, 2> G0_sd{{{0.0, 0.0}, {0.0, 0.0}}};
};

StringModel make_string_model(const StringParams& params, int n_cells, double z_p1, double z_p2);

struct FieldPair {
    Field first;
    Field second;
};

// dw = p/rho, dp = T w_zz + g u; pinned node derivatives forced to zero.
FieldPair jb_rhs(const JetBundleState& s, double u, const StringModel& m);

// dq = (p/rho)_z, dp = (T q)_z + g u; pinned components (q at L, p at 0)
// have zero derivative, which together with apply_sd_bc on the initial data
// realizes the W_B boundary conditions by projection.
FieldPair sd_rhs(const StokesDiracState& s, double u, const StringModel& m);

// Projects a Stokes-Dirac state onto the boundary conditions p(0) = 0,
// T q(L) = 0.
void apply_sd_bc(StokesDiracState& s);

// Collocated integrated output: current through the actuator,
// ybar = integral of g p/rho.
double integrated_output(const Field& p, const StringModel& m);

double hamiltonian_jb(const JetBundleState& s, const StringModel& m);
double hamiltonian_sd(const StokesDiracState& s, const StringModel& m);

// Exact differentials of the discrete Hamiltonians along a state direction;
// used by the power-balance and dissipation-identity audits.
double hamiltonian_jb_rate(const JetBundleState& s, const FieldPair& ds, const StringModel& m);
double hamiltonian_sd_rate(const StokesDiracState& s, const FieldPair& ds, const StringModel& m);

struct BoundaryPorts {
    std::array<double, 2> f_bnd{};
    std::array<double, 2> e_bnd{};
};

BoundaryPorts boundary_ports(const StokesDiracState& s, const StringParams& params);

// W_B [f; e]; equals (p(0)/rho, T q(L)) and vanishes on admissible states.
std::array<double, 2> wb_residual(const BoundaryPorts& bp);

StokesDiracState map_jb_to_sd(const JetBundleState& s, const Grid& g);
JetBundleState map_sd_to_jb(const StokesDiracState& s, const Grid& g);

}  // namespace phs
