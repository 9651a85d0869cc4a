#include <cmath>
#include <random>

#include "doctest.h"
#include "phstring/grid.hpp"

using namespace phs;

namespace {

Field sample(const Grid& g, double (*fn)(double)) {
    Field f(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i) {
        f[static_cast<std::size_t>(i)] = fn(g.nodes[static_cast<std::size_t>(i)]);
    }
    return f;
}

double max_abs_err(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("build_grid snaps patch edges onto nodes") {
    const Grid g = build_grid(1.0, 10, 0.4, 0.6);
    CHECK(g.dz == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(g.patch_lo == 4);
    CHECK(g.patch_hi == 6);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 1.0);

    const Grid g2 = build_grid(2.0, 20, 0.4, 0.6);
    CHECK(g2.dz == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(g2.patch_lo == 4);
    CHECK(g2.patch_hi == 6);

    for (int i = 0; i + 1 < g.num_nodes(); ++i) {
        CHECK(std::abs(g.nodes[i + 1] - g.nodes[i] - g.dz) <= 1e-12 * g.length);
    }
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(1.0, 10, 0.45, 0.6), PatchOffGrid);
    CHECK_THROWS_AS(build_grid(-1.0, 10, 0.4, 0.6), NonPositiveLength);
    CHECK_THROWS_AS(build_grid(0.0, 10, 0.4, 0.6), NonPositiveLength);
    CHECK_THROWS_AS(build_grid(1.0, 4, 0.25, 0.5), ConfigError);
    CHECK_THROWS_AS(build_grid(1.0, 10, 0.6, 0.4), ConfigError);
}

TEST_CASE("quad: trapezoid rule") {
    const Grid g = build_grid(1.0, 10, 0.4, 0.6);
    CHECK(quad(Field(11, 1.0), g) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(quad(sample(g, [](double z) { return z; }), g) ==
          doctest::Approx(0.5).epsilon(1e-14));

    // direct-summation oracle for f(z) = z^2 on n = 10
    double oracle = 0.0;
    for (int i = 1; i <= 9; ++i) oracle += (0.1 * i) * (0.1 * i);
    oracle = 0.1 * (oracle + 0.5 * 1.0);
    CHECK(oracle == doctest::Approx(0.335).epsilon(1e-12));
    CHECK(quad(sample(g, [](double z) { return z * z; }), g) ==
          doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("quad weights are positive and sum to L") {
    for (int n : {10, 50, 200}) {
        const Grid g = build_grid(2.0, n, 0.8, 1.2);
        const Field w = quad_weights(g);
        double sum = 0.0;
        for (double v : w) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(g.length).epsilon(1e-13));
    }
}

TEST_CASE("d1: exact on constants and linears at every node") {
    const Grid g = build_grid(1.0, 10, 0.4, 0.6);
    const Field c = d1(Field(11, 5.0), g);
    for (double v : c) CHECK(std::abs(v) <= 1e-14);
    const Field lin = d1(sample(g, [](double z) { return 3.0 * z; }), g);
    for (double v : lin) CHECK(v == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("d1: SBP check on a = z, b = z^2") {
    const Grid g = build_grid(1.0, 10, 0.4, 0.6);
    const Field a = sample(g, [](double z) { return z; });
    const Field b = sample(g, [](double z) { return z * z; });
    const double lhs = inner_h(a, d1(b, g), g) + inner_h(d1(a, g), b, g);
    CHECK(std::abs(lhs - 1.0) <= 1e-13);
}

TEST_CASE("SBP bilinear identity for random fields") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int n : {10, 50, 200}) {
        const Grid g = build_grid(1.0, n, 0.4, 0.6);
        for (int trial = 0; trial < 100; ++trial) {
            Field a(static_cast<std::size_t>(g.num_nodes())), b(a.size());
            for (auto& v : a) v = uni(rng);
            for (auto& v : b) v = uni(rng);
            const double lhs = inner_h(a, d1(b, g), g) + inner_h(d1(a, g), b, g);
            const double rhs = a.back() * b.back() - a.front() * b.front();
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("discrete fundamental theorem: quad(d1 f) = f(L) - f(0)") {
    const Grid g = build_grid(1.0, 64, 0.25, 0.5);
    const Field f = sample(g, [](double z) { return std::exp(z) + std::sin(3.0 * z); });
    CHECK(std::abs(quad(d1(f, g), g) - (f.back() - f.front())) <= 1e-12);
}

TEST_CASE("d2 with bc=none: exact on linears and quadratics") {
    const Grid g = build_grid(1.0, 10, 0.4, 0.6);
    const Field lin = d2(sample(g, [](double z) { return z; }), g, Bc::none);
    for (double v : lin) CHECK(std::abs(v) <= 1e-12);
    const Field quadf = d2(sample(g, [](double z) { return z * z; }), g, Bc::none);
    for (double v : quadf) CHECK(v == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("d2 with clamped_free: piecewise equilibrium profile") {
    // Eq-of-equilibrium shape with a=0.2, b=0.5, patch [0.4, 0.6], c=0.1
    const Grid g = build_grid(1.0, 10, 0.4, 0.6);
    Field w(11);
    for (int i = 0; i <= 10; ++i) {
        const double z = g.nodes[static_cast<std::size_t>(i)];
        if (z < 0.4) {
            w[static_cast<std::size_t>(i)] = 0.2 * z;
        } else if (z < 0.6) {
            w[static_cast<std::size_t>(i)] = -0.5 * (z - 0.6) * (z - 0.6) + 0.1;
        } else {
            w[static_cast<std::size_t>(i)] = 0.1;
        }
    }
    const Field wzz = d2(w, g, Bc::clamped_free);
    // interior patch node(s)
    for (int i = g.patch_lo + 1; i < g.patch_hi; ++i) {
        CHECK(std::abs(wzz[static_cast<std::size_t>(i)] - (-1.0)) <= 1e-12);
    }
    // at least one cell away from the patch edges, outside the patch
    for (int i = 1; i <= g.patch_lo - 1; ++i) {
        CHECK(std::abs(wzz[static_cast<std::size_t>(i)]) <= 1e-12);
    }
    for (int i = g.patch_hi + 1; i <= 10; ++i) {
        CHECK(std::abs(wzz[static_cast<std::size_t>(i)]) <= 1e-12);
    }
}

TEST_CASE("d2 clamped_free rejects violated Dirichlet data") {
    const Grid g = build_grid(1.0, 10, 0.4, 0.6);
    Field f(11, 1.0);
    CHECK_THROWS_AS(d2(f, g, Bc::clamped_free), BcViolation);
}

TEST_CASE("d1 and d2 converge at second order on sin(pi z)") {
    auto d1_err = [](int n) {
        const Grid g = build_grid(1.0, n, 0.4, 0.6);
        const Field f = sample(g, [](double z) { return std::sin(M_PI * z); });
        Field exact(f.size());
        for (int i = 0; i < g.num_nodes(); ++i) {
            exact[static_cast<std::size_t>(i)] =
                M_PI * std::cos(M_PI * g.nodes[static_cast<std::size_t>(i)]);
        }
        return max_abs_err(d1(f, g), exact);
    };
    auto d2_err = [](int n) {
        const Grid g = build_grid(1.0, n, 0.4, 0.6);
        const Field f = sample(g, [](double z) { return std::sin(M_PI * z); });
        Field exact(f.size());
        for (int i = 0; i < g.num_nodes(); ++i) {
            exact[static_cast<std::size_t>(i)] =
                -M_PI * M_PI * std::sin(M_PI * g.nodes[static_cast<std::size_t>(i)]);
        }
        return max_abs_err(d2(f, g, Bc::none), exact);
    };
    const double r1 = d1_err(50) / d1_err(100);
    const double r2 = d2_err(50) / d2_err(100);
    CHECK(r1 == doctest::Approx(4.0).epsilon(0.125));
    CHECK(r2 == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("cumtrapz inverts d1 to second order") {
    const Grid g = build_grid(1.0, 100, 0.4, 0.6);
    const Field w = sample(g, [](double z) { return std::sin(M_PI * z / 2.0); });
    const Field back = cumtrapz(d1(w, g), g);
    CHECK(max_abs_err(w, back) <= 5.0 * g.dz * g.dz);
}
