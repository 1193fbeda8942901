#pragma once

// Smooth bump kernel theta: 0 on (-inf,0], 1 on [1,inf), the standard
// exp(-1/x) partition ramp in between. All step-layer plateaus and ramps
// are built from theta and its antiderivative R(v) = int_0^v theta.
//
// theta and R are also served from dense Hermite-interpolated tables
// (built lazily once); the cubic interpolation error is ~1e-16, far below
// every tolerance in this library, and the exact evaluators remain
// available as oracles.

#include <mutex>
#include <vector>

#include "srflow/bigmath.hpp"

namespace srflow {

class BumpKernel {
  public:
    BumpKernel() = default;

    Real theta(const Real& x) const {
        if (x <= 0) return Real(0);
        if (x >= 1) return Real(1);
        Real h = mp::exp(Real(-1) / x);
        Real g = mp::exp(Real(-1) / (Real(1) - x));
        return h / (h + g);
    }

    // theta' = H G (x^-2 + (1-x)^-2) / (H+G)^2, closed form.
    Real theta_prime(const Real& x) const {
        if (x <= 0 || x >= 1) return Real(0);
        Real h = mp::exp(Real(-1) / x);
        Real g = mp::exp(Real(-1) / (Real(1) - x));
        Real s = h + g;
        Real ix = Real(1) / (x * x) + Real(1) / ((Real(1) - x) * (Real(1) - x));
        return h * g * ix / (s * s);
    }

    // Central finite differences in MP arithmetic; orders 1..3.
    Real theta_deriv(const Real& x, int order) const {
        if (x <= 0 || x >= 1) return Real(0);
        const Real h = Real("1e-10");
        switch (order) {
            case 1:
                return (theta(x + h) - theta(x - h)) / (2 * h);
            case 2:
                return (theta(x + h) - 2 * theta(x) + theta(x - h)) / (h * h);
            case 3:
                return (theta(x + 2 * h) - 2 * theta(x + h) + 2 * theta(x - h) -
                        theta(x - 2 * h)) /
                       (2 * h * h * h);
            default:
                throw std::invalid_argument("theta_deriv: order must be 1..3");
        }
    }

    // Table-backed theta (cubic Hermite; error well below 1e-16).
    Real theta_fast(const Real& x) const {
        if (x <= 0) return Real(0);
        if (x >= 1) return Real(1);
        ensure_theta_table();
        return hermite(theta_vals_, theta_derivs_, theta_grid_n_, x);
    }

    // R(v) = int_0^v theta(t) dt for v in [0,1]; extended linearly beyond.
    // Table-backed (cumulative Simpson at nodes, Hermite in between).
    Real ramp_integral(const Real& v) const {
        if (v <= 0) return Real(0);
        if (v >= 1) return v - Real(1) / 2;  // int_0^1 theta = 1/2 (symmetry)
        ensure_ramp_table();
        return hermite(ramp_vals_, ramp_derivs_, ramp_grid_n_, v);
    }

    // Exact variant: grid value plus a corrective Simpson panel.
    Real ramp_integral_exact(const Real& v) const {
        if (v <= 0) return Real(0);
        if (v >= 1) return v - Real(1) / 2;
        ensure_ramp_table();
        Real pos = v * ramp_grid_n_;
        auto idx = static_cast<std::size_t>(pos.convert_to<long>());
        if (idx >= static_cast<std::size_t>(ramp_grid_n_)) idx = ramp_grid_n_ - 1;
        Real a = Real(static_cast<long>(idx)) / ramp_grid_n_;
        return ramp_vals_[idx] + simpson_panel(a, v);
    }

    // sup |theta^{(r)}| over (0,1), grid-scanned with mild inflation. Used
    // for constructive C^r bound constants; r = 0 returns 1 exactly.
    Real sup_deriv(int order) const {
        if (order == 0) return Real(1);
        std::scoped_lock lk(mu_);
        if (sup_cache_.size() < 4) sup_cache_.resize(4, Real(0));
        if (sup_cache_[static_cast<std::size_t>(order)] != 0)
            return sup_cache_[static_cast<std::size_t>(order)];
        Real best = 0;
        const int grid = 2000;
        for (int i = 1; i < grid; ++i) {
            Real x = Real(i) / grid;
            Real d = mp::abs(theta_deriv(x, order));
            if (d > best) best = d;
        }
        best *= Real("1.1");
        sup_cache_[static_cast<std::size_t>(order)] = best;
        return best;
    }

  private:
    static Real hermite(const std::vector<Real>& vals, const std::vector<Real>& derivs, int n,
                        const Real& x) {
        Real pos = x * n;
        auto idx = static_cast<std::size_t>(pos.convert_to<long>());
        if (idx >= static_cast<std::size_t>(n)) idx = static_cast<std::size_t>(n) - 1;
        Real h = Real(1) / n;
        Real t = pos - Real(static_cast<long>(idx));
        Real t2 = t * t, t3 = t2 * t;
        Real h00 = 2 * t3 - 3 * t2 + 1;
        Real h10 = t3 - 2 * t2 + t;
        Real h01 = -2 * t3 + 3 * t2;
        Real h11 = t3 - t2;
        return vals[idx] * h00 + derivs[idx] * (h * h10) + vals[idx + 1] * h01 +
               derivs[idx + 1] * (h * h11);
    }

    void ensure_theta_table() const {
        std::scoped_lock lk(mu_);
        if (!theta_vals_.empty()) return;
        const int m = theta_grid_n_;
        theta_vals_.resize(static_cast<std::size_t>(m) + 1);
        theta_derivs_.resize(static_cast<std::size_t>(m) + 1);
        for (int i = 0; i <= m; ++i) {
            Real x = Real(i) / m;
            theta_vals_[static_cast<std::size_t>(i)] = theta(x);
            theta_derivs_[static_cast<std::size_t>(i)] = theta_prime(x);
        }
    }

    void ensure_ramp_table() const {
        std::scoped_lock lk(mu_);
        if (!ramp_vals_.empty()) return;
        const int m = ramp_grid_n_;
        ramp_vals_.resize(static_cast<std::size_t>(m) + 1);
        ramp_derivs_.resize(static_cast<std::size_t>(m) + 1);
        Real h = Real(1) / m;
        ramp_vals_[0] = 0;
        ramp_derivs_[0] = 0;
        Real left = theta(Real(0));
        for (int i = 0; i < m; ++i) {
            Real a = Real(i) * h;
            Real mid = theta(a + h / 2);
            Real right = theta(a + h);
            ramp_vals_[static_cast<std::size_t>(i) + 1] =
                ramp_vals_[static_cast<std::size_t>(i)] + h / 6 * (left + 4 * mid + right);
            ramp_derivs_[static_cast<std::size_t>(i) + 1] = right;
            left = right;
        }
    }

    Real simpson_panel(const Real& a, const Real& b) const {
        Real h = b - a;
        if (h <= 0) return Real(0);
        Real mid = theta((a + b) / 2);
        Real coarse = h / 6 * (theta(a) + 4 * mid + theta(b));
        Real m1 = theta(a + h / 4), m2 = theta(b - h / 4);
        Real fine = h / 12 * (theta(a) + 4 * m1 + 2 * mid + 4 * m2 + theta(b));
        return fine + (fine - coarse) / 15;
    }

    static constexpr int theta_grid_n_ = 32768;
    static constexpr int ramp_grid_n_ = 16384;
    mutable std::mutex mu_;
    mutable std::vector<Real> theta_vals_, theta_derivs_;
    mutable std::vector<Real> ramp_vals_, ramp_derivs_;
    mutable std::vector<Real> sup_cache_;
};

// Adaptive Simpson for test oracles and the U_n quadrature surface.
template <typename F>
Real adaptive_simpson(const F& f, const Real& a, const Real& b, const Real& tol,
                      int max_depth = 40) {
    struct Impl {
        const F& f;
        int max_depth;
        Real run(const Real& a, const Real& b, const Real& fa, const Real& fb, const Real& fm,
                 const Real& whole, const Real& tol, int depth) {
            Real m = (a + b) / 2;
            Real lm = (a + m) / 2, rm = (m + b) / 2;
            Real flm = f(lm), frm = f(rm);
            Real left = (m - a) / 6 * (fa + 4 * flm + fm);
            Real right = (b - m) / 6 * (fm + 4 * frm + fb);
            Real delta = left + right - whole;
            if (depth >= max_depth || mp::abs(delta) <= 15 * tol)
                return left + right + delta / 15;
            return run(a, m, fa, fm, flm, left, tol / 2, depth + 1) +
                   run(m, b, fm, fb, frm, right, tol / 2, depth + 1);
        }
    };
    if (b <= a) return Real(0);
    Real fa = f(a), fb = f(b), fm = f((a + b) / 2);
    Real whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return Impl{f, max_depth}.run(a, b, fa, fb, fm, whole, tol, 0);
}

}  // namespace srflow
