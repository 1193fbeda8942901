#include <catch2/catch_amalgamated.hpp>

#include "srflow/kernel.hpp"
#include "srflow/step_layer.hpp"

using namespace srflow;

namespace {

// Adaptive Simpson over uniform initial panels, so narrow plateaus of the
// integrand cannot be missed by the first probe points.
template <typename F>
Real integrate_panels(const F& f, const Real& a, const Real& b, int panels, const Real& tol) {
    Real total = 0;
    for (int i = 0; i < panels; ++i) {
        Real lo = a + (b - a) * i / panels;
        Real hi = a + (b - a) * (i + 1) / panels;
        total += adaptive_simpson(f, lo, hi, tol / panels);
    }
    return total;
}

}  // namespace

TEST_CASE("bump kernel: boundary values, symmetry, monotonicity") {
    BumpKernel k;
    REQUIRE(k.theta(Real(-1)) == 0);
    REQUIRE(k.theta(Real(0)) == 0);
    REQUIRE(k.theta(Real(1)) == 1);
    REQUIRE(k.theta(Real(2)) == 1);
    REQUIRE(mp::abs(k.theta(Real(1) / 2) - Real(1) / 2) < 1e-60);
    Real prev = -1;
    for (int i = 0; i <= 40; ++i) {
        Real x = Real(i) / 40;
        Real v = k.theta(x);
        REQUIRE(v >= prev);
        REQUIRE(v >= 0);
        REQUIRE(v <= 1);
        // theta(x) + theta(1-x) = 1
        REQUIRE(mp::abs(v + k.theta(1 - x) - 1) < 1e-60);
        prev = v;
    }
}

TEST_CASE("bump kernel: finite-difference derivatives are consistent") {
    BumpKernel k;
    // theta'(1/2) = 2 for the exp(-1/x) partition ramp (closed form).
    REQUIRE(mp::abs(k.theta_deriv(Real(1) / 2, 1) - 2) < 1e-12);
    // derivative of order r integrates back: compare d/dx of theta_deriv(.,1)
    // against theta_deriv(.,2) at a few points.
    for (double x : {0.2, 0.35, 0.5, 0.71}) {
        Real h("1e-9");
        Real d2 = (k.theta_deriv(Real(x) + h, 1) - k.theta_deriv(Real(x) - h, 1)) / (2 * h);
        REQUIRE(mp::abs(d2 - k.theta_deriv(Real(x), 2)) < 1e-6 * (1 + mp::abs(d2)));
    }
    REQUIRE(k.theta_deriv(Real(0), 1) == 0);
    REQUIRE(k.theta_deriv(Real(1), 3) == 0);
    REQUIRE(k.sup_deriv(1) >= 2);
}

TEST_CASE("bump kernel: ramp integral vs adaptive Simpson oracle") {
    BumpKernel k;
    for (double v : {0.1, 0.3, 0.5, 0.77, 0.96}) {
        Real oracle = integrate_panels([&](const Real& t) { return k.theta(t); }, Real(0),
                                       Real(v), 16, Real("1e-22"));
        REQUIRE(mp::abs(k.ramp_integral(Real(v)) - oracle) < 1e-16);
    }
    REQUIRE(mp::abs(k.ramp_integral(Real(1)) - Real(1) / 2) < 1e-30);
    REQUIRE(k.ramp_integral(Real(0)) == 0);
    REQUIRE(mp::abs(k.ramp_integral(Real(3)) - Real(5) / 2) < 1e-30);
}

TEST_CASE("bump kernel: fast table paths agree with exact evaluators") {
    BumpKernel k;
    REQUIRE(mp::abs(k.theta_prime(Real(1) / 2) - 2) < 1e-60);  // closed form at midpoint
    Rng rng(31337);
    for (int i = 0; i < 200; ++i) {
        Real x(rng.uniform01());
        REQUIRE(mp::abs(k.theta_fast(x) - k.theta(x)) < 1e-15);
        REQUIRE(mp::abs(k.ramp_integral(x) - k.ramp_integral_exact(x)) < 1e-16);
        REQUIRE(mp::abs(k.theta_prime(x) - k.theta_deriv(x, 1)) < 1e-12);
    }
}

TEST_CASE("step layer: requires n >= 17") {
    BumpKernel k;
    REQUIRE_THROWS_AS(build_step_layer(16, BigInt(8), k), std::invalid_argument);
    REQUIRE_NOTHROW(build_step_layer(17, BigInt(8), k));
}

TEST_CASE("step layer: plateau, zero zones, and W' = +-1 structure") {
    BumpKernel k;
    const int n = 20;
    const BigInt q = 8;
    StepLayer layer = build_step_layer(n, q, k);
    Real qr(q);

    // theta_n at x = 2/(n q) equals 1.
    REQUIRE(mp::abs(layer.theta_n(Real(2) / (n * qr)) - 1) < 1e-40);
    // W_n at x = 1/(2 n q) equals 0 (inside [0, 1/(n q)]).
    REQUIRE(mp::abs(layer.W(Real(1) / (2 * n * qr))) < 1e-40);
    // W vanishes on [0, 1/(nq)] and [1/q - 1/(nq), 1/q].
    REQUIRE(mp::abs(layer.W(Real(1) / (n * qr) * Real("0.99"))) < 1e-40);
    REQUIRE(mp::abs(layer.W(Real(1) / qr - Real(1) / (2 * n * qr))) < 1e-40);

    auto [jlo, jhi] = layer.J();
    Real lo = to_real(jlo), hi = to_real(jhi);
    REQUIRE(lo < hi);
    std::vector<Real> offsets{Real(0), Real(1) / (4 * qr), Real(1) / (2 * qr),
                              Real(3) / (4 * qr)};
    std::vector<int> signs{+1, -1, -1, +1};
    for (std::size_t w = 0; w < offsets.size(); ++w) {
        for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            Real x = lo + (hi - lo) * Real(frac) + offsets[w];
            REQUIRE(mp::abs(layer.W_deriv(x) - signs[w]) < 1e-10);
        }
    }
}

TEST_CASE("step layer: zero average and profile consistency") {
    BumpKernel k;
    StepLayer layer = build_step_layer(17, BigInt(4), k);
    // int_0^{1/q} W = 0 within quadrature tolerance.
    Real integral = integrate_panels([&](const Real& x) { return layer.W(x); }, Real(0),
                                     Real(1) / Real(4), 64, Real("1e-18"));
    REQUIRE(mp::abs(integral) < 1e-14);

    // p(u) = q W(u/q).
    for (double u : {0.07, 0.13, 0.26, 0.49, 0.61, 0.88}) {
        REQUIRE(mp::abs(layer.profile(Real(u)) - Real(4) * layer.W(Real(u) / 4)) < 1e-40);
    }

    // U via the profile form matches direct adaptive quadrature of theta_n.
    for (double x : {0.01, 0.03, 0.05, 0.2}) {
        Real direct = integrate_panels([&](const Real& t) { return layer.theta_n(t); }, Real(0),
                                       Real(x), 64, Real("1e-20"));
        REQUIRE(mp::abs(layer.U(Real(x)) - direct) < 1e-15);
    }

    // Profile inert windows: p vanishes on all three.
    for (auto& [wl, wh] : layer.inert_windows_u()) {
        Real mid = (to_real(wl) + to_real(wh)) / 2;
        REQUIRE(mp::abs(layer.profile(mid)) < 1e-40);
    }
}
