#include "phstring/string_model.hpp"

#include <cmath>
#include <cstddef>

namespace phs {

PatchActuator make_patch(const Grid& g) {
    PatchActuator p;
    p.z_p1 = g.z_p1();
    p.z_p2 = g.z_p2();
    const std::size_t n = static_cast<std::size_t>(g.num_nodes());
    p.indicator.assign(n, 0.0);
    p.input_profile.assign(n, 0.0);
    for (int i = g.patch_lo; i <= g.patch_hi; ++i) {
        p.indicator[static_cast<std::size_t>(i)] = 1.0;
        p.input_profile[static_cast<std::size_t>(i)] =
            (i == g.patch_lo || i == g.patch_hi) ? 0.5 : 1.0;
    }
    return p;
}

EquilibriumProfile equilibrium_profile(double a, double b, const PatchActuator& patch,
                                       const StringParams& params, const Grid& g) {
    (void)params;
    if (a < 0.0 || b < 0.0) {
        throw ConfigError("equilibrium shape parameters must be nonnegative");
    }
    const double width = patch.z_p2 - patch.z_p1;
    if (std::abs(a - 2.0 * b * width) > 1e-12) {
        throw KinkMismatch("C1 continuity requires a = 2 b (z_p2 - z_p1)");
    }

    EquilibriumProfile prof;
    prof.a = a;
    prof.b = b;
    prof.c = b * width * width + a * patch.z_p1;
    prof.w_d.resize(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i) {
        const double z = g.nodes[static_cast<std::size_t>(i)];
        double v;
        if (z < patch.z_p1) {
            v = a * z;
        } else if (z < patch.z_p2) {
            v = -b * (z - patch.z_p2) * (z - patch.z_p2) + prof.c;
        } else {
            v = prof.c;
        }
        prof.w_d[static_cast<std::size_t>(i)] = v;
    }
    prof.q_d = d1(prof.w_d, g);
    return prof;
}

Field equilibrium_strain_analytic(const EquilibriumProfile& prof, const PatchActuator& patch,
                                  const Grid& g) {
    Field q(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i) {
        const double z = g.nodes[static_cast<std::size_t>(i)];
        double v;
        if (z < patch.z_p1) {
            v = prof.a;
        } else if (z < patch.z_p2) {
            v = -2.0 * prof.b * (z - patch.z_p2);
        } else {
            v = 0.0;
        }
        q[static_cast<std::size_t>(i)] = v;
    }
    return q;
}

double feedforward_us(double b, double T) { return 2.0 * b * T; }

StringModel make_string_model(const StringParams& params, int n_cells, double z_p1, double z_p2) {
    StringModel m;
    m.grid = build_grid(params.L, n_cells, z_p1, z_p2);
    m.params = params;
    m.patch = make_patch(m.grid);
    return m;
}

FieldPair jb_rhs(const JetBundleState& s, double u, const StringModel& m) {
    const std::size_t n = s.w.size();
    FieldPair out;
    out.first.resize(n);
    out.second.resize(n);

    // co-energy components: delta_w H = -T w_zz, delta_p H = p/rho
    const Field wzz = d2(s.w, m.grid, Bc::clamped_free);
    const double T = m.params.T;
    const double inv_rho = 1.0 / m.params.rho;
    const auto& R = m.R_jb;
    for (std::size_t i = 0; i < n; ++i) {
        const double e_w = -T * wzz[i];
        const double e_p = s.p[i] * inv_rho;
        out.first[i] = e_p - (R[0][0] * e_w + R[0][1] * e_p);
        out.second[i] = -e_w - (R[1][0] * e_w + R[1][1] * e_p) + m.patch.input_profile[i] * u;
    }
    out.first[0] = 0.0;  // clamped node excluded from the unknowns
    out.second[0] = 0.0;
    return out;
}

FieldPair sd_rhs(const StokesDiracState& s, double u, const StringModel& m) {
    const std::size_t n = s.q.size();
    const double T = m.params.T;
    const double inv_rho = 1.0 / m.params.rho;

    Field stress(n), velocity(n);
    for (std::size_t i = 0; i < n; ++i) {
        stress[i] = T * s.q[i];
        velocity[i] = s.p[i] * inv_rho;
    }
    const Field d_stress = d1(stress, m.grid);
    const Field d_velocity = d1(velocity, m.grid);

    FieldPair out;
    out.first.resize(n);
    out.second.resize(n);
    const auto& G0 = m.G0_sd;
    for (std::size_t i = 0; i < n; ++i) {
        out.first[i] = d_velocity[i] - (G0[0][0] * stress[i] + G0[0][1] * velocity[i]);
        out.second[i] = d_stress[i] - (G0[1][0] * stress[i] + G0[1][1] * velocity[i]) +
                        m.patch.input_profile[i] * u;
    }
    out.first[n - 1] = 0.0;  // T q(L) = 0
    out.second[0] = 0.0;     // p(0) = 0
    return out;
}

void apply_sd_bc(StokesDiracState& s) {
    s.p[0] = 0.0;
    s.q[s.q.size() - 1] = 0.0;
}

double integrated_output(const Field& p, const StringModel& m) {
    return quad_patch(p, m.grid) / m.params.rho;
}

double hamiltonian_jb(const JetBundleState& s, const StringModel& m) {
    const std::size_t n = s.w.size();
    const Field h = quad_weights(m.grid);
    const double inv_rho = 1.0 / m.params.rho;

    double kinetic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        kinetic += 0.5 * h[i] * s.p[i] * s.p[i] * inv_rho;
    }
    // Elastic energy from cell-midpoint strains. The compact w_zz stencil of
    // jb_rhs is the exact H-weighted gradient of this form, which makes the
    // discrete power balance dH/dt = u*ybar hold to roundoff.
    double elastic = 0.0;
    const double half_t_over_dz = 0.5 * m.params.T / m.grid.dz;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dw = s.w[i + 1] - s.w[i];
        elastic += half_t_over_dz * dw * dw;
    }
    return kinetic + elastic;
}

double hamiltonian_sd(const StokesDiracState& s, const StringModel& m) {
    const std::size_t n = s.q.size();
    const Field h = quad_weights(m.grid);
    const double T = m.params.T;
    const double inv_rho = 1.0 / m.params.rho;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += 0.5 * h[i] * (T * s.q[i] * s.q[i] + s.p[i] * s.p[i] * inv_rho);
    }
    return acc;
}

double hamiltonian_jb_rate(const JetBundleState& s, const FieldPair& ds, const StringModel& m) {
    const std::size_t n = s.w.size();
    const Field h = quad_weights(m.grid);
    const double inv_rho = 1.0 / m.params.rho;
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rate += h[i] * s.p[i] * ds.second[i] * inv_rho;
    }
    const double t_over_dz = m.params.T / m.grid.dz;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        rate += t_over_dz * (s.w[i + 1] - s.w[i]) * (ds.first[i + 1] - ds.first[i]);
    }
    return rate;
}

double hamiltonian_sd_rate(const StokesDiracState& s, const FieldPair& ds, const StringModel& m) {
    const std::size_t n = s.q.size();
    const Field h = quad_weights(m.grid);
    const double T = m.params.T;
    const double inv_rho = 1.0 / m.params.rho;
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rate += h[i] * (T * s.q[i] * ds.first[i] + s.p[i] * ds.second[i] * inv_rho);
    }
    return rate;
}

BoundaryPorts boundary_ports(const StokesDiracState& s, const StringParams& params) {
    const std::size_t last = s.q.size() - 1;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // co-energy at the ends: Q chi = (T q, p/rho)
    const double stress_L = params.T * s.q[last];
    const double vel_L = s.p[last] / params.rho;
    const double stress_0 = params.T * s.q[0];
    const double vel_0 = s.p[0] / params.rho;

    BoundaryPorts bp;
    // f = (P1 Qchi(L) - P1 Qchi(0)) / sqrt(2), P1 = [[0,1],[1,0]]
    bp.f_bnd[0] = inv_sqrt2 * (vel_L - vel_0);
    bp.f_bnd[1] = inv_sqrt2 * (stress_L - stress_0);
    bp.e_bnd[0] = inv_sqrt2 * (stress_L + stress_0);
    bp.e_bnd[1] = inv_sqrt2 * (vel_L + vel_0);
    return bp;
}

std::array<double, 2> wb_residual(const BoundaryPorts& bp) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {inv_sqrt2 * (-bp.f_bnd[0] + bp.e_bnd[1]), inv_sqrt2 * (bp.f_bnd[1] + bp.e_bnd[0])};
}

StokesDiracState map_jb_to_sd(const JetBundleState& s, const Grid& g) {
    StokesDiracState out;
    out.q = d1(s.w, g);
    out.p = s.p;
    return out;
}

JetBundleState map_sd_to_jb(const StokesDiracState& s, const Grid& g) {
    JetBundleState out;
    out.w = cumtrapz(s.q, g);
    out.p = s.p;
    return out;
}

}  // namespace phs
