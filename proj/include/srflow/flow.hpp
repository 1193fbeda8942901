#pragma once

// The special flow over the torus translation R_{alpha,alpha'} under the
// ceiling phi: points (x, y, s) with 0 <= s < phi(x,y) and the
// identification (z, s + phi(z)) ~ (Tz, s). Base coordinates are exact
// rationals (samples are dyadic, translations add the rational surrogate),
// the fiber coordinate is multiprecision real.

#include <functional>
#include <utility>
#include <vector>

#include "srflow/bigmath.hpp"
#include "srflow/birkhoff.hpp"
#include "srflow/ceiling.hpp"
#include "srflow/cfrac.hpp"

namespace srflow {

struct FlowPoint {
    Rational x, y;
    Real s{0};
    bool ambiguous = false;  // fiber boundary within numerical band at creation
};

class FlowMap {
  public:
    FlowMap(const CeilingFunction* ceiling, const FrequencyPair* pair)
        : ceiling_(ceiling), pair_(pair), ev_(ceiling, pair) {
        // time-varying numerical band: layer truncation + profile tables
        static_band_ = ceiling_->eval_band() + Real("1e-50");
    }

    const CeilingFunction& ceiling() const { return *ceiling_; }
    const FrequencyPair& pair() const { return *pair_; }
    const BirkhoffEvaluator& birkhoff() const { return ev_; }

    Real phi(const Rational& x, const Rational& y) const { return ceiling_->eval(x, y); }

    FlowPoint canonical(Rational x, Rational y, Real s) const {
        FlowPoint p{mod1(x), mod1(y), std::move(s)};
        int guard = 0;
        while (true) {
            Real h = phi(p.x, p.y);
            if (p.s >= 0 && p.s < h) break;
            if (p.s < 0) {
                step_base(p, -1);
                p.s += phi(p.x, p.y);
            } else {
                p.s -= h;
                step_base(p, +1);
            }
            if (++guard > 1000)
                throw PrecisionError("canonical: fiber normalization did not settle");
        }
        return p;
    }

    // N(t, s, z): the largest N with S_N phi(z) <= t + s. Time is split into
    // an exact integer part and a real part so that astronomically large
    // integer times lose nothing.
    BigInt fiber_count_split(const BigInt& t_int, const Real& t_frac, const FlowPoint& p,
                             bool* ambiguous = nullptr) const {
        if (t_int < 0 || t_frac < 0)
            throw std::invalid_argument("fiber_count: t must be >= 0");
        // target: tau = t_int + tau_frac
        Real tau_frac = t_frac + p.s;

        // iterate N <- t_int + floor(tau_frac - L(N)); contraction factor
        // sup(layers) < 1 by the positivity margin.
        BigInt N = t_int;
        Real band = 0;
        for (int it = 0; it < 64; ++it) {
            if (N < 0) N = 0;
            LayerSum L = ev_.sm_layers(N, p.x, p.y);
            band = L.band + static_band_;
            BigInt next = t_int + floor_to_bigint(tau_frac - L.value);
            if (next < 0) next = 0;
            if (next == N) break;
            N = next;
        }
        // local exact adjustment: want S_N phi <= tau < S_{N+1} phi.
        // residual r(N) = tau - S_N phi = (t_int - N) + (tau_frac - L(N)).
        auto residual = [&](const BigInt& NN) {
            LayerSum L = ev_.sm_layers(NN, p.x, p.y);
            band = L.band + static_band_;
            return Real(Rational(t_int - NN)) + (tau_frac - L.value);
        };
        Real r = residual(N);
        int guard = 0;
        while (r < 0 && N > 0) {
            --N;
            r = residual(N);
            if (++guard > 128) throw PrecisionError("fiber_count: no convergence (down)");
        }
        while (true) {
            Rational zx = mod1(p.x + Rational(N) * pair_->alpha.value);
            Rational zy = mod1(p.y + Rational(N) * pair_->alpha_prime.value);
            Real h = phi(zx, zy);
            if (r < h) {
                if (ambiguous) *ambiguous = (r <= band || h - r <= band);
                break;
            }
            ++N;
            r = residual(N);
            if (++guard > 128) throw PrecisionError("fiber_count: no convergence (up)");
        }
        return N;
    }

    BigInt fiber_count(const Real& t, const FlowPoint& p, bool* ambiguous = nullptr) const {
        if (t < 0) throw std::invalid_argument("fiber_count: t must be >= 0");
        Real ti = mp::floor(t);
        return fiber_count_split(floor_to_bigint(t), t - ti, p, ambiguous);
    }

    // T^t for real t >= 0.
    FlowPoint advance(const FlowPoint& p, const Real& t) const {
        if (t < 0) throw std::invalid_argument("advance: t must be >= 0 (use advance_steps)");
        Real ti = mp::floor(t);
        return advance_split(floor_to_bigint(ti), t - ti, p);
    }

    // T^n for integer n of either sign.
    FlowPoint advance_steps(const FlowPoint& p, const BigInt& n) const {
        if (n >= 0) return advance_split(n, Real(0), p);
        BigInt m = -n;
        // backward: z' = z - m w, s' = s + (S_m phi(z') - m), then canonical.
        Rational zx = mod1(p.x - Rational(m) * pair_->alpha.value);
        Rational zy = mod1(p.y - Rational(m) * pair_->alpha_prime.value);
        LayerSum L = ev_.sm_layers(m, zx, zy);
        FlowPoint out = canonical(zx, zy, p.s + L.value);
        Real band = L.band + static_band_;
        Real h = phi(out.x, out.y);
        out.ambiguous = p.ambiguous || out.s <= band || h - out.s <= band;
        return out;
    }

    FlowPoint advance_split(const BigInt& t_int, const Real& t_frac, const FlowPoint& p) const {
        bool amb = false;
        BigInt N = fiber_count_split(t_int, t_frac, p, &amb);
        LayerSum L = ev_.sm_layers(N, p.x, p.y);
        FlowPoint out;
        out.x = mod1(p.x + Rational(N) * pair_->alpha.value);
        out.y = mod1(p.y + Rational(N) * pair_->alpha_prime.value);
        out.s = Real(Rational(t_int - N)) + t_frac + p.s - L.value;
        if (out.s < 0) {  // numerical dust at the fiber floor
            out.s = 0;
            amb = true;
        }
        out.ambiguous = p.ambiguous || amb;
        return out;
    }

    const Real& static_band() const { return static_band_; }

  private:
    void step_base(FlowPoint& p, int dir) const {
        p.x = mod1(p.x + Rational(dir) * pair_->alpha.value);
        p.y = mod1(p.y + Rational(dir) * pair_->alpha_prime.value);
    }

    const CeilingFunction* ceiling_;
    const FrequencyPair* pair_;
    BirkhoffEvaluator ev_;
    Real static_band_;
};

// Euclidean distance in the cover with circle metric on the base, minimized
// over fiber-shift representatives j in {-1, 0, +1} applied to either point.
inline Real quotient_distance(const FlowPoint& p, const FlowPoint& q, const FlowMap& map) {
    auto dist = [](const Rational& dx, const Rational& dy, const Real& ds) {
        Real cx = to_real(circle_norm(dx));
        Real cy = to_real(circle_norm(dy));
        return mp::sqrt(cx * cx + cy * cy + ds * ds);
    };
    const Rational& a = map.pair().alpha.value;
    const Rational& ap = map.pair().alpha_prime.value;

    auto shifted = [&](const FlowPoint& r, int j) {
        // j=+1: (Tz, s - phi(z)); j=-1: (T^{-1}z, s + phi(T^{-1}z))
        FlowPoint out = r;
        if (j == 1) {
            out.s = r.s - map.phi(r.x, r.y);
            out.x = mod1(r.x + a);
            out.y = mod1(r.y + ap);
        } else if (j == -1) {
            out.x = mod1(r.x - a);
            out.y = mod1(r.y - ap);
            out.s = r.s + map.phi(out.x, out.y);
        }
        return out;
    };

    Real best = dist(p.x - q.x, p.y - q.y, p.s - q.s);
    for (int j : {-1, 1}) {
        FlowPoint qs = shifted(q, j);
        Real d1 = dist(p.x - qs.x, p.y - qs.y, p.s - qs.s);
        if (d1 < best) best = d1;
        FlowPoint ps = shifted(p, j);
        Real d2 = dist(ps.x - q.x, ps.y - q.y, ps.s - q.s);
        if (d2 < best) best = d2;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Measure-correct sampling of points of M_phi.

struct MeasureSampler {
    enum class Mode {
        ProductOnMphi,  // the flow-invariant normalized product measure
        BaseHaar        // Haar base marginal, uniform fiber fraction
    };

    std::uint64_t seed = 1;
    Mode mode = Mode::ProductOnMphi;
    unsigned coord_bits = 512;
};

inline std::vector<FlowPoint> sample_points(const MeasureSampler& sampler, int count,
                                            const FlowMap& map) {
    if (count < 1) throw std::invalid_argument("sample_points: count must be >= 1");
    Rng rng(sampler.seed);
    const CeilingFunction& c = map.ceiling();
    Real phi_max = 1 + c.sup_layers();
    std::vector<FlowPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    while (out.size() < static_cast<std::size_t>(count)) {
        FlowPoint p;
        p.x = rng.uniform_dyadic(sampler.coord_bits);
        p.y = rng.uniform_dyadic(sampler.coord_bits);
        Real u = Real(rng.uniform_dyadic(64));
        Real h = map.phi(p.x, p.y);
        if (sampler.mode == MeasureSampler::Mode::ProductOnMphi) {
            Real sv = u * phi_max;
            if (sv >= h) continue;  // rejection against phi
            p.s = sv;
        } else {
            p.s = u * h;
        }
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orbit recurrences: distances d(xi, T^{t} xi) at the given integer times,
// flagged as witnesses when they beat the radius schedule.

struct RecurrenceEvent {
    BigInt t;
    Real distance;
    bool witness;
    bool ambiguous;
};

inline std::vector<RecurrenceEvent> orbit_recurrences(
    const FlowMap& map, const FlowPoint& point, const std::vector<BigInt>& times,
    const std::function<Real(const BigInt&)>& radius) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] < times[i - 1])
            throw std::invalid_argument("orbit_recurrences: times must be sorted ascending");
    std::vector<RecurrenceEvent> out;
    out.reserve(times.size());
    for (const BigInt& t : times) {
        FlowPoint image = map.advance_steps(point, t);
        Real d = quotient_distance(point, image, map);
        out.push_back({t, d, d <= radius(t), image.ambiguous});
    }
    return out;
}

}  // namespace srflow
