#include "phstring/grid.hpp"

#include <cmath>
#include <cstddef>

namespace phs {

namespace {

int snap_to_node(double z, double dz, const char* which) {
    const double ratio = z / dz;
    const double idx = std::round(ratio);
    if (std::abs(ratio - idx) > 1e-9) {
        throw PatchOffGrid(std::string(which) + " does not lie on a grid node");
    }
    return static_cast<int>(idx);
}

void check_size(const Field& f, const Grid& g) {
    if (f.size() != static_cast<std::size_t>(g.num_nodes())) {
        throw Error("field length does not match grid");
    }
}

}  // namespace

Grid build_grid(double length, int n_cells, double z_p1, double z_p2) {
    if (!(length > 0.0)) {
        throw NonPositiveLength("grid length must be positive");
    }
    if (n_cells < 8) {
        throw ConfigError("n_cells must be at least 8");
    }
    if (!(0.0 < z_p1 && z_p1 < z_p2 && z_p2 < length)) {
        throw ConfigError("patch edges must satisfy 0 < z_p1 < z_p2 < L");
    }

    Grid g;
    g.n_cells = n_cells;
    g.length = length;
    g.dz = length / n_cells;
    g.nodes.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) {
        // L*(i/n) instead of i*dz so the end node lands exactly on L
        g.nodes[static_cast<std::size_t>(i)] =
            length * (static_cast<double>(i) / static_cast<double>(n_cells));
    }
    g.patch_lo = snap_to_node(z_p1, g.dz, "z_p1");
    g.patch_hi = snap_to_node(z_p2, g.dz, "z_p2");
    return g;
}

Field quad_weights(const Grid& g) {
    Field w(static_cast<std::size_t>(g.num_nodes()), g.dz);
    w.front() = 0.5 * g.dz;
    w.back() = 0.5 * g.dz;
    return w;
}

double quad(const Field& f, const Grid& g) {
    check_size(f, g);
    const int n = g.n_cells;
    double acc = 0.5 * (f[0] + f[static_cast<std::size_t>(n)]);
    for (int i = 1; i < n; ++i) {
        acc += f[static_cast<std::size_t>(i)];
    }
    return acc * g.dz;
}

double quad_patch(const Field& f, const Grid& g) {
    check_size(f, g);
    const int lo = g.patch_lo;
    const int hi = g.patch_hi;
    double acc = 0.5 * (f[static_cast<std::size_t>(lo)] + f[static_cast<std::size_t>(hi)]);
    for (int i = lo + 1; i < hi; ++i) {
        acc += f[static_cast<std::size_t>(i)];
    }
    return acc * g.dz;
}

Field d1(const Field& f, const Grid& g) {
    check_size(f, g);
    const int n = g.n_cells;
    Field out(f.size());
    out[0] = (f[1] - f[0]) / g.dz;
    for (int i = 1; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        out[k] = (f[k + 1] - f[k - 1]) / (2.0 * g.dz);
    }
    out[static_cast<std::size_t>(n)] =
        (f[static_cast<std::size_t>(n)] - f[static_cast<std::size_t>(n) - 1]) / g.dz;
    return out;
}

Field d2(const Field& f, const Grid& g, Bc bc) {
    check_size(f, g);
    const int n = g.n_cells;
    const double inv_dz2 = 1.0 / (g.dz * g.dz);
    Field out(f.size());

    if (bc == Bc::clamped_free) {
        double max_abs = 0.0;
        for (double v : f) max_abs = std::max(max_abs, std::abs(v));
        if (std::abs(f[0]) > 1e-9 * max_abs) {
            throw BcViolation("clamped_free requires f(0) = 0");
        }
    }

    for (int i = 1; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        out[k] = (f[k - 1] - 2.0 * f[k] + f[k + 1]) * inv_dz2;
    }

    const std::size_t nn = static_cast<std::size_t>(n);
    if (bc == Bc::clamped_free) {
        out[0] = 0.0;  // pinned Dirichlet node; never drives dynamics
        out[nn] = 2.0 * (f[nn - 1] - f[nn]) * inv_dz2;  // mirror ghost f_{n+1} = f_{n-1}
    } else {
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv_dz2;
        out[nn] = (2.0 * f[nn] - 5.0 * f[nn - 1] + 4.0 * f[nn - 2] - f[nn - 3]) * inv_dz2;
    }
    return out;
}

Field cumtrapz(const Field& f, const Grid& g) {
    check_size(f, g);
    Field out(f.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * g.dz * (f[i - 1] + f[i]);
    }
    return out;
}

double inner_h(const Field& a, const Field& b, const Grid& g) {
    check_size(a, g);
    check_size(b, g);
    const std::size_t n = a.size();
    double acc = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc * g.dz;
}

bool all_finite(const Field& f) {
    for (double v : f) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace phs
