#pragma once

// Step layer for one level n with denominator q: the plateau function
// theta_n, its antiderivative U_n, the tent V_n, and the zero-mean W_n
// supported inside one period [0, 1/q]. Everything is driven by a rescaled
// one-period profile p(u) = q * W_n(u/q) on u in [0,1), whose shape depends
// only on the level index n, not on q.

#include <utility>

#include "srflow/bigmath.hpp"
#include "srflow/kernel.hpp"

namespace srflow {

class StepLayer {
  public:
    StepLayer(int n, BigInt q, const BumpKernel* kernel)
        : n_(n), q_(std::move(q)), kernel_(kernel) {
        if (n < 17)
            throw std::invalid_argument(
                "StepLayer: n must be >= 17 so the plateau J_n is nonempty");
        if (q_ < 1) throw std::invalid_argument("StepLayer: q must be >= 1");
    }

    int level() const { return n_; }
    const BigInt& q() const { return q_; }
    const BumpKernel& kernel() const { return *kernel_; }

    // --- rescaled profile, u in one period [0,1) ---------------------------
    // Hot paths run on the kernel's Hermite tables (error ~1e-16); the
    // *_exact variants evaluate theta / R directly and serve as oracles.

    // theta_n in profile coordinates: 1 on [2/n, 1/4 - 2/n], 0 outside
    // [1/n, 1/4 - 1/n].
    Real theta_profile(const Real& u) const {
        Real nu = Real(n_) * u;
        return kernel_->theta_fast(nu - 1) - kernel_->theta_fast(nu - Real(n_) / 4 + 2);
    }

    Real theta_profile_exact(const Real& u) const {
        Real nu = Real(n_) * u;
        return kernel_->theta(nu - 1) - kernel_->theta(nu - Real(n_) / 4 + 2);
    }

    // G(u) = int-of-theta_profile scaled so that U_n(x) = G(q x)/(n q).
    Real g_profile(const Real& u) const {
        Real nu = Real(n_) * u;
        return ramp(nu - 1) - ramp(nu - Real(n_) / 4 + 2);
    }

    // p(u) = q W_n(u/q): slopes +-1, zero on [0,1/n], [1/2-1/n,1/2+1/n],
    // [1-1/n,1]; zero mean.
    Real profile(const Real& u) const {
        return (g_profile(u) - g_profile(u - Real(1) / 4) - g_profile(u - Real(1) / 2) +
                g_profile(u - Real(3) / 4)) /
               n_;
    }

    Real profile_deriv(const Real& u) const {
        return theta_profile(u) - theta_profile(u - Real(1) / 4) -
               theta_profile(u - Real(1) / 2) + theta_profile(u - Real(3) / 4);
    }

    Real profile_deriv_exact(const Real& u) const {
        return theta_profile_exact(u) - theta_profile_exact(u - Real(1) / 4) -
               theta_profile_exact(u - Real(1) / 2) + theta_profile_exact(u - Real(3) / 4);
    }

    // --- absolute-coordinate evaluators ------------------------------------

    Real theta_n(const Real& x) const { return theta_profile(to_u(x)); }

    // U_n(x) = int_{-inf}^x theta_n(t) dt.
    Real U(const Real& x) const { return g_profile(to_u(x)) / (Real(n_) * Real(q_)); }

    Real V(const Real& x) const {
        Real u = to_u(x);
        return (g_profile(u) - g_profile(u - Real(1) / 4)) / (Real(n_) * Real(q_));
    }

    Real W(const Real& x) const { return profile(to_u(x)) / Real(q_); }

    Real W_deriv(const Real& x) const { return profile_deriv(to_u(x)); }

    // J_n = [2/(n q), 1/(4q) - 2/(n q)] in absolute coordinates.
    std::pair<Rational, Rational> J() const {
        return {Rational(2, BigInt(n_) * q_), Rational(1, 4 * q_) - Rational(2, BigInt(n_) * q_)};
    }

    // Profile-space inert windows (W vanishes identically): [0, 1/n],
    // [1/2 - 1/n, 1/2 + 1/n], [1 - 1/n, 1].
    std::vector<std::pair<Rational, Rational>> inert_windows_u() const {
        Rational inv_n(1, n_);
        return {{Rational(0), inv_n},
                {Rational(1, 2) - inv_n, Rational(1, 2) + inv_n},
                {Rational(1) - inv_n, Rational(1)}};
    }

  private:
    Real to_u(const Real& x) const { return x * Real(q_); }

    // R_theta(v): 0 for v<=0, int_0^v theta on [0,1], v - 1/2 beyond.
    Real ramp(const Real& v) const { return kernel_->ramp_integral(v); }

    int n_;
    BigInt q_;
    const BumpKernel* kernel_;
};

inline StepLayer build_step_layer(int n, BigInt q, const BumpKernel& kernel) {
    return StepLayer(n, std::move(q), &kernel);
}

}  // namespace srflow
