#pragma once

#include <array>

#include "phstring/string_model.hpp"

namespace phs {

// One-dimensional dynamic controller with integrator structure
// dx_c/dt = u_c, shaped energy H_c = c1/2 (x_c - x_c_d - u_s/c1)^2 and
// dissipative output feedback u' = -c2 ybar.
struct ControllerState {
    double x_c = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double u_s = 0.0;
    double x_c_d = 0.0;
};

// dx_c/dt; the controller input is the (estimated) integrated output.
double controller_step_rhs(const ControllerState& ctrl, double y_bar_hat);

// Controller output y_c = c1 (x_c - x_c_d) - u_s, written without the
// u_s/c1 shift so zero-gain configurations stay well defined.
double controller_output(const ControllerState& ctrl);

// Shaped controller energy; zero-gain controllers carry no energy.
double controller_energy(const ControllerState& ctrl);

// x_c^d = integral of g w^d.
double target_xcd(const Field& w_d, const StringModel& m);

// Total control law in derivative variables:
// u = -c1 (int g w - x_c_d) - c2 ybar + u_s. The observer-fed loop passes
// the estimated deflection.
double control_law_jb(const ControllerState& ctrl, const Field& w, double y_bar,
                      const StringModel& m);

// Total control law in energy variables:
// u = -c1 (-int Psi1 q + int Psi1 q_d) - c2 ybar + u_s.
double control_law_sd(const ControllerState& ctrl, const Field& q, const Field& q_d,
                      double y_bar, const Field& psi1, const StringModel& m);

// Casimir profile Psi1(z) = -integral_z^L g, closed form.
double psi1(double z, const PatchActuator& patch);
Field psi1_field(const Grid& g, const PatchActuator& patch);

// Discrete antiderivative: the unique Psi with Psi(L) = 0 satisfying
// (D1 Psi)_i = g_i at every node i >= 1, so that summation by parts turns
// -<Psi, D1 w> into the patch integral of w exactly. On node-aligned patches
// it coincides with the sampled closed form.
Field psi1_field_discrete(const StringModel& m);

// Structural-invariant ansatz in derivative variables, C = x_c + int C dz.
struct CasimirAnsatzJB {
    Field dC_dw;
    Field dC_dp;
    Field boundary_coeff;  // dC/d(w_z)
};

// Ansatz in energy variables, C = Gamma v_c + int Psi^T chi dz.
struct CasimirAnsatzSD {
    double Gamma = 1.0;
    Field Psi1;
    Field Psi2;
    double B_c = 1.0;
};

CasimirAnsatzJB string_ansatz_jb(const StringModel& m);
CasimirAnsatzSD string_ansatz_sd(const StringModel& m);

// Node residuals of the four invariance conditions plus summary norms.
struct CasimirResiduals {
    double r_controller = 0.0;           // condition (a)
    Field r_domain;                      // condition (b), per node
    Field r_input;                       // condition (c), per node
    std::array<double, 2> r_boundary{};  // condition (d)

    double domain_max = 0.0;  // max |r_domain|, patch-edge kink nodes excluded
    double input_l1 = 0.0;    // quad(|r_input|)
    double input_l2 = 0.0;    // sqrt(quad(r_input^2))
    double boundary_max = 0.0;

    double worst() const;
};

CasimirResiduals casimir_residuals_jb(const CasimirAnsatzJB& ansatz, const StringModel& m);
CasimirResiduals casimir_residuals_sd(const CasimirAnsatzSD& ansatz, const StringModel& m);

// Conserved quantity of the closed loop, C = x_c - int g w.
double casimir_value(double x_c, const Field& w, const StringModel& m);

// Energy-variable counterpart, C = v_c + int Psi1 q.
double casimir_value_sd(double v_c, const Field& q, const Field& psi1, const StringModel& m);

}  // namespace phs
