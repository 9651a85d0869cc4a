#pragma once

#include <vector>

#include "phstring/errors.hpp"

namespace phs {

// Node-sampled scalar field on a Grid.
using Field = std::vector<double>;

// Uniform 1-D mesh on [0, L] with n_cells cells (n_cells + 1 nodes).
// The actuator-patch edges are snapped onto nodes at construction time;
// off-node edges are rejected so the patch indicator stays a clean
// node-aligned profile.
struct Grid {
    int n_cells = 0;
    double length = 0.0;
    double dz = 0.0;
    std::vector<double> nodes;
    int patch_lo = 0;  // node index of z_p1
    int patch_hi = 0;  // node index of z_p2

    int num_nodes() const { return n_cells + 1; }
    double z_p1() const { return nodes[static_cast<std::size_t>(patch_lo)]; }
    double z_p2() const { return nodes[static_cast<std::size_t>(patch_hi)]; }
};

Grid build_grid(double length, int n_cells, double z_p1, double z_p2);

// Trapezoid weights (dz/2, dz, ..., dz, dz/2). Strictly positive, sum to L.
Field quad_weights(const Grid& g);

// Composite trapezoid rule over the whole domain.
double quad(const Field& f, const Grid& g);

// Trapezoid rule restricted to the actuator patch [z_p1, z_p2]. This is the
// discrete realization of integrals against the patch indicator; using the
// half-weight edge convention keeps it exact for piecewise-linear integrands
// and adjoint to the distributed forcing profile.
double quad_patch(const Field& f, const Grid& g);

// First derivative: second-order central stencil in the interior with
// one-sided closures. Together with the trapezoid weights H the operator
// satisfies the exact summation-by-parts identity
//   a^T H (D1 b) + (D1 a)^T H b = a_n b_n - a_0 b_0.
Field d1(const Field& f, const Grid& g);

enum class Bc {
    none,
    clamped_free,  // w(0) = 0 pinned, w_z(L) = 0 via mirror ghost node
};

// Second derivative. bc = none uses one-sided second-order closures at both
// ends; bc = clamped_free zeroes the pinned node and closes the free end with
// the mirror ghost w_{n+1} = w_{n-1}. Unreliable at nodes where the stencil
// spans a curvature kink of a piecewise profile.
Field d2(const Field& f, const Grid& g, Bc bc);

// Cumulative trapezoid antiderivative with F(0) = 0.
Field cumtrapz(const Field& f, const Grid& g);

// H-weighted inner product, sum_i H_i a_i b_i = quad(a*b).
double inner_h(const Field& a, const Field& b, const Grid& g);

bool all_finite(const Field& f);

}  // namespace phs
