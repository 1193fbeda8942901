#pragma once

// Birkhoff sums S_m f(z) = sum_{l<m} f(z + l (alpha, alpha')) for trig
// polynomials, in closed form through geometric factors
//   Y(m,k) = (1 - e^{2 pi i m k a}) / (1 - e^{2 pi i k a})
//          = [sin(pi {mka}) / sin(pi {ka})] e^{i pi ({mka} - {ka})},
// with every phase reduced modulo 1 in exact rational arithmetic first.
// Near-resonant rotations therefore cost nothing in accuracy: the reduced
// phases are exact, and true resonances ({ka} = 0) take the m-branch.
//
// Layer sums over a ceiling function select per layer between
//   - a skip bound (m * sup too small to matter),
//   - the resonant branch ({q a} = 0: S_m = m * value),
//   - a stationary branch (m |{q a}| tiny: the orbit of {q x} is frozen, so
//     S_m X~ = m A p(u) up to a certified band),
//   - the closed form over coefficients.

#include <utility>
#include <vector>

#include "srflow/bigmath.hpp"
#include "srflow/ceiling.hpp"
#include "srflow/cfrac.hpp"
#include "srflow/trigpoly.hpp"

namespace srflow {

struct GeometricFactor {
    BigInt m, k;
    Complex value;
    Real err;
    bool resonant = false;  // {k rotation} == 0 (value = m exactly)
};

// Core form: sum_{l<m} e^{2 pi i l rho} from the exact reduced phase rho.
inline Complex geometric_value(const BigInt& m, const Rational& rho, Real* err_out = nullptr,
                               bool* resonant_out = nullptr) {
    if (resonant_out) *resonant_out = false;
    if (rho == 0) {
        if (resonant_out) *resonant_out = true;
        if (err_out) *err_out = 0;
        return Complex(Real(Rational(m)), Real(0));
    }
    Rational a = signed_mod1(Rational(m) * rho);
    Rational b = signed_mod1(rho);
    Real sa = mp::sin(pi_real() * to_real(a));
    Real sb = mp::sin(pi_real() * to_real(b));
    Real ratio = sa / sb;
    Complex rot = cis_turn((a - b) / 2);
    Complex v = rot * ratio;
    if (err_out) *err_out = 32 * real_eps() * mp::abs(ratio);
    return v;
}

inline GeometricFactor geometric_sum(const BigInt& m, const BigInt& k, const Rational& rotation) {
    if (m < 0) throw std::invalid_argument("geometric_sum: m must be >= 0");
    GeometricFactor f;
    f.m = m;
    f.k = k;
    if (m == 0) {
        f.value = Complex(Real(0), Real(0));
        f.err = 0;
        return f;
    }
    Rational rho = mod1(Rational(k) * rotation);
    f.value = geometric_value(m, rho, &f.err, &f.resonant);
    return f;
}

struct BirkhoffQuery {
    const TrigPolynomial* poly = nullptr;
    BigInt m;
    Rational x, y;          // base point
    Rational rot_x, rot_y;  // alpha, alpha'
};

struct BirkhoffValue {
    Real value{0};
    Real deriv{0};
    Real err{0};
};

namespace detail {
inline const Rational& axis_pos(const BirkhoffQuery& q) {
    return q.poly->axis == Axis::Y ? q.y : q.x;
}
inline const Rational& axis_rot(const BirkhoffQuery& q) {
    return q.poly->axis == Axis::Y ? q.rot_y : q.rot_x;
}
}  // namespace detail

// Closed form: S_m f and S_m f' at the base point, O(#coefficients).
inline BirkhoffValue birkhoff_closed(const BirkhoffQuery& q) {
    if (q.m < 0) throw std::invalid_argument("birkhoff_closed: m must be >= 0");
    BirkhoffValue out;
    if (q.m == 0 || !q.poly || q.poly->coef.empty()) return out;
    const Rational& pos = detail::axis_pos(q);
    const Rational& rot = detail::axis_rot(q);
    Real m_real{Rational(q.m)};
    out.value = q.poly->c0() * m_real;
    for (const auto& [k, c] : q.poly->coef) {
        if (k <= 0) continue;  // real-valued: pair with -k gives 2 Re(...)
        Rational rho = mod1(Rational(k) * rot);
        Real gerr = 0;
        Complex Y = geometric_value(q.m, rho, &gerr);
        Complex e = cis_turn(mod1(Rational(k) * pos));
        Complex term = c * Y * e;
        out.value += 2 * term.re;
        // derivative gains 2 pi i k
        Real w = two_pi() * to_real(Rational(k));
        out.deriv += -2 * w * term.im;
        out.err += 2 * c.abs() * (gerr + 16 * real_eps() * Y.abs()) * (1 + w);
    }
    return out;
}

// Direct accumulation (oracle); per-coefficient running rotations with
// periodic exact resynchronization.
inline BirkhoffValue birkhoff_direct(const BirkhoffQuery& q, std::int64_t budget = 10000000,
                                     int resync_stride = 1024) {
    if (q.m < 0) throw std::invalid_argument("birkhoff_direct: m must be >= 0");
    if (q.m > budget) throw std::invalid_argument("birkhoff_direct: m exceeds direct-sum budget");
    BirkhoffValue out;
    const auto m = q.m.convert_to<std::int64_t>();
    if (m == 0 || q.poly->coef.empty()) return out;
    const Rational& pos = detail::axis_pos(q);
    const Rational& rot = detail::axis_rot(q);

    struct Term {
        BigInt k;
        Complex c;
        Complex phase;  // e^{2 pi i k (pos + l rot)}
        Complex step;   // e^{2 pi i k rot}
        Real w;         // 2 pi k
    };
    std::vector<Term> terms;
    for (const auto& [k, c] : q.poly->coef) {
        if (k <= 0) continue;
        terms.push_back({k, c, cis_turn(mod1(Rational(k) * pos)),
                         cis_turn(mod1(Rational(k) * rot)), two_pi() * to_real(Rational(k))});
    }
    Real c0 = q.poly->c0();
    for (std::int64_t l = 0; l < m; ++l) {
        out.value += c0;
        if (l > 0 && l % resync_stride == 0) {
            for (auto& t : terms)
                t.phase = cis_turn(mod1(Rational(t.k) * (pos + Rational(l) * rot)));
        }
        for (auto& t : terms) {
            Complex term = t.c * t.phase;
            out.value += 2 * term.re;
            out.deriv += -2 * t.w * term.im;
            t.phase = t.phase * t.step;
        }
    }
    out.err = Real(m) * real_eps() * 64;
    return out;
}

// ---------------------------------------------------------------------------
// Precomputed closed-form factors for one (x-layer, m): the per-harmonic
// products w_j = c_{j q} Y(m, j q). Phases are kept as raw numerators over
// the fixed denominator of alpha, so no rational renormalization happens in
// the inner loop. Evaluating S_m X~ at x = (k0 + u)/q needs only phases
// {j u} because the carried frequencies are multiples of q.
// signed fractional part num/den -> value in [-1/2, 1/2), as Real, without
// constructing a normalized rational. The signed numerator is formed in
// exact integer arithmetic; converting first and subtracting would cancel
// catastrophically for phases near 1.
inline Real signed_turn(const BigInt& num, const BigInt& den) {
    if (2 * num >= den) return Real(num - den) / Real(den);
    return Real(num) / Real(den);
}

struct XClosedFactors {
    std::vector<long> j;          // harmonic index
    std::vector<Complex> w;       // c_{j q} * Y(m, j q)
    std::vector<Complex> w_deriv; // (2 pi i j q) c_{j q} * Y(m, j q)
    Real err{0};        // accumulated error of the value form
    Real err_deriv{0};  // accumulated error of the derivative form
    BigInt q;
};

inline XClosedFactors x_closed_factors(const XLayer& xl, const BigInt& m, const Rational& alpha) {
    XClosedFactors out;
    out.q = xl.q;
    const BigInt den = denominator(alpha);
    const BigInt step = (xl.q * numerator(alpha)) % den;  // numerator of {q alpha}
    BigInt num = 0;
    long last_j = 0;
    Real qw = two_pi() * to_real(Rational(xl.q));
    for (const auto& [k, c] : xl.poly.coef) {
        if (k <= 0) continue;
        long j = static_cast<long>((k / xl.q).convert_to<std::int64_t>());
        while (last_j < j) {  // advance the exact phase numerator to j*step mod den
            num += step;
            if (num >= den) num -= den;
            ++last_j;
        }
        Real gerr = 0;
        Complex Y;
        if (num == 0) {
            Y = Complex(Real(Rational(m)), Real(0));
        } else {
            // a = {m j q alpha}, b = {j q alpha} as raw numerators over den
            BigInt anum = (m * num) % den;
            Real a = signed_turn(anum, den);
            Real b = signed_turn(num, den);
            Real sa = mp::sin(pi_real() * a);
            Real sb = mp::sin(pi_real() * b);
            Real ratio = sa / sb;
            Real half = (a - b) / 2;
            Complex rot(mp::cos(two_pi() * half), mp::sin(two_pi() * half));
            Y = rot * ratio;
            gerr = 32 * real_eps() * mp::abs(ratio);
        }
        Complex wj = c * Y;
        out.j.push_back(j);
        out.w.push_back(wj);
        out.w_deriv.push_back(Complex(-wj.im, wj.re) * (qw * j));
        out.err += 2 * c.abs() * gerr;
        out.err_deriv += 2 * c.abs() * gerr * qw * j;
    }
    return out;
}

// S_m X~ at x with {q x} = u (x = (k0+u)/q for any integer residue k0).
inline BirkhoffValue eval_x_factors(const XClosedFactors& f, const Rational& u) {
    BirkhoffValue out;
    for (std::size_t i = 0; i < f.j.size(); ++i) {
        Complex e = cis_turn(mod1(Rational(f.j[i]) * u));
        Complex t = f.w[i] * e;
        out.value += 2 * t.re;
        Complex td = f.w_deriv[i] * e;
        out.deriv += 2 * td.re;
    }
    out.err = f.err;
    return out;
}

// ---------------------------------------------------------------------------
// Certified layer-sum evaluation over a ceiling function.
struct LayerSum {
    Real value{0};
    Real band{0};  // |true - value| <= band
};

class BirkhoffEvaluator {
  public:
    BirkhoffEvaluator(const CeilingFunction* ceiling, const FrequencyPair* pair)
        : ceiling_(ceiling), pair_(pair) {
        for (const auto& xl : ceiling_->x_layers) {
            Rational rho = mod1(Rational(xl.q) * pair_->alpha.value);
            x_rho_.push_back(rho);
            x_delta_.push_back(mp::abs(to_real(signed_mod1(rho))));
        }
        for (std::size_t i = 0; i < ceiling_->y_layers.size(); ++i)
            y_rho_.push_back(mod1(Rational(ceiling_->y_freq(i)) * pair_->alpha_prime.value));
    }

    // S_m (phi - 1)(x, y) with a certified error band.
    LayerSum sm_layers(const BigInt& m, const Rational& x, const Rational& y) const {
        LayerSum total;
        Real m_real{Rational(m)};
        for (std::size_t i = 0; i < ceiling_->x_layers.size(); ++i) {
            LayerSum part = sm_x_layer(i, m, m_real, x);
            total.value += part.value;
            total.band += part.band;
        }
        for (std::size_t i = 0; i < ceiling_->y_layers.size(); ++i) {
            LayerSum part = sm_y_layer(i, m, m_real, y);
            total.value += part.value;
            total.band += part.band;
        }
        return total;
    }

    // S_m phi = m + S_m(layers).
    LayerSum sm_phi(const BigInt& m, const Rational& x, const Rational& y) const {
        LayerSum s = sm_layers(m, x, y);
        s.value += Real(Rational(m));
        return s;
    }

    LayerSum sm_x_layer(std::size_t i, const BigInt& m, const Real& m_real,
                        const Rational& x) const {
        const XLayer& xl = ceiling_->x_layers[i];
        LayerSum out;
        Real msup = m_real * xl.sup_bound();
        if (msup <= skip_eps) {
            out.band = msup;
            return out;
        }
        if (x_rho_[i] == 0) {  // exact resonance for every carried frequency
            out.value = m_real * xl.eval_profile(x);
            out.band = m_real * (xl.trunc_sup_err() + profile_eval_eps * xl.amplitude);
            return out;
        }
        if (m_real * x_delta_[i] <= stationary_threshold) {
            // frozen orbit of u = {q x}: S_m X~ = m A p(u) +- band
            Real u = to_real(mod1(Rational(xl.q) * x));
            out.value = m_real * xl.amplitude * xl.steps.profile(u);
            Real drift = m_real * m_real * x_delta_[i] * Real("1.01");  // sup|p'| <= 1
            out.band = xl.amplitude * drift +
                       m_real * (xl.trunc_sup_err() + profile_eval_eps * xl.amplitude);
            return out;
        }
        // closed form over coefficients
        BirkhoffQuery q{&xl.poly, m, x, Rational(0), pair_->alpha.value,
                        pair_->alpha_prime.value};
        BirkhoffValue v = birkhoff_closed(q);
        out.value = v.value;
        out.band = v.err;
        return out;
    }

    LayerSum sm_y_layer(std::size_t i, const BigInt& m, const Real& m_real,
                        const Rational& y) const {
        LayerSum out;
        Real amp = ceiling_->y_amplitude(i);
        if (m_real * amp <= skip_eps) {
            out.band = m_real * amp;
            return out;
        }
        const BigInt& freq = ceiling_->y_freq(i);
        Real gerr = 0;
        bool resonant = false;
        Complex Y = geometric_value(m, y_rho_[i], &gerr, &resonant);
        Complex e = cis_turn(mod1(Rational(freq) * y));
        // layer = (amp/2) e^{2 pi i f y} + conj: S_m = amp Re(Y e)
        out.value = amp * (Y * e).re;
        out.band = amp * (gerr + 16 * real_eps() * Y.abs());
        return out;
    }

    const CeilingFunction& ceiling() const { return *ceiling_; }
    const FrequencyPair& pair() const { return *pair_; }
    const Real& x_delta(std::size_t i) const { return x_delta_[i]; }
    const Rational& x_rho(std::size_t i) const { return x_rho_[i]; }
    const Rational& y_rho(std::size_t i) const { return y_rho_[i]; }

    Real skip_eps = Real("1e-34");
    Real stationary_threshold = Real("1e-6");
    // Hermite-table evaluation error of the step profiles (validated in tests).
    Real profile_eval_eps = Real("1e-15");

  private:
    const CeilingFunction* ceiling_;
    const FrequencyPair* pair_;
    std::vector<Rational> x_rho_;
    std::vector<Real> x_delta_;
    std::vector<Rational> y_rho_;
};

// ---------------------------------------------------------------------------
// Stretch profile: |D S_m phi| against the scaled threshold m A q / n on the
// good set (points whose rescaled coordinate avoids 3/n-neighbourhoods of
// the quarters j/4).

struct StretchPoint {
    Rational pos;  // x or y, depending on axis
    Real abs_deriv;
    bool in_good_set;
    bool pass;
};

struct StretchProfile {
    int level = 0;
    BigInt m;
    Axis axis = Axis::X;
    Real threshold;
    Real window_lo, window_hi;
    bool m_in_window = false;
    Real drift;  // m * ||q rot||: validity of the frozen-zone argument
    std::vector<StretchPoint> points;
    double pass_fraction = 0;
};

inline StretchProfile stretch_profile(const CeilingFunction& ceiling, const FrequencyPair& pair,
                                      int level, const BigInt& m, Axis axis, int grid) {
    if (grid < 1) throw std::invalid_argument("stretch_profile: grid must be >= 1");
    std::size_t idx = static_cast<std::size_t>(level - ceiling.n0);
    if (idx >= ceiling.x_layers.size())
        throw std::invalid_argument("stretch_profile: level has no built layer");
    const int n = level;

    StretchProfile out;
    out.level = level;
    out.m = m;
    out.axis = axis;

    const bool on_x = (axis == Axis::X);
    const XLayer& xl = ceiling.x_layers[idx];
    Real amp = on_x ? xl.amplitude : ceiling.y_amplitude(idx);
    BigInt q = on_x ? xl.q : ceiling.y_freq(idx);
    const Rational& rot = on_x ? pair.alpha.value : pair.alpha_prime.value;

    // m-window [A(n,q_n)^-2 / 2, 2 A(n,q'_n)^-2]; the y-axis window closes at
    // the next level's x-amplitude.
    Real a_lo = amp;
    Real a_hi;
    if (on_x) {
        a_hi = ceiling.y_amplitude(idx);
    } else if (idx + 1 < ceiling.x_layers.size()) {
        a_hi = ceiling.x_layers[idx + 1].amplitude;
    } else {
        a_hi = amp;  // terminal level: degenerate window
    }
    out.window_lo = Real(1) / (2 * a_lo * a_lo);
    out.window_hi = 2 / (a_hi * a_hi);
    Real m_real{Rational(m)};
    out.m_in_window = (m > 0) && (m_real >= out.window_lo) && (m_real <= out.window_hi);
    out.threshold = m_real * amp * Real(q) / n;
    out.drift = m_real * to_real(circle_norm(Rational(q) * rot));

    // Precompute per-harmonic factors for all x-layers (axis X) once; layers
    // whose maximal possible contribution m * ||X~'||_coef is negligible
    // against the threshold are folded into the error band instead.
    std::vector<XClosedFactors> factors;
    std::vector<char> skip;
    std::vector<Real> skip_band;
    if (on_x) {
        for (const auto& layer : ceiling.x_layers) {
            Real bound = m_real * layer.poly.coef_norm(1);
            if (bound <= Real("1e-30") * out.threshold) {
                skip.push_back(1);
                skip_band.push_back(bound);
                factors.emplace_back();
            } else {
                skip.push_back(0);
                skip_band.push_back(Real(0));
                factors.push_back(x_closed_factors(layer, m, pair.alpha.value));
            }
        }
    }

    Rational margin(3, n);
    for (int i = 0; i < grid; ++i) {
        Rational pos(i, grid);
        Rational u = mod1(Rational(q) * pos);
        bool good = true;
        for (int jq = 0; jq <= 4 && good; ++jq) {
            Rational d = u - Rational(jq, 4);
            if (d < 0) d = -d;
            if (d <= margin) good = false;
        }
        Real deriv = 0, band = 0;
        if (on_x) {
            for (std::size_t li = 0; li < ceiling.x_layers.size(); ++li) {
                const XLayer& layer = ceiling.x_layers[li];
                if (skip[li]) {
                    band += skip_band[li];
                    continue;
                }
                Rational ul = mod1(Rational(layer.q) * pos);
                BirkhoffValue v = eval_x_factors(factors[li], ul);
                deriv += v.deriv;
                band += factors[li].err_deriv;
            }
        } else {
            Real gerr = 0;
            for (std::size_t li = 0; li < ceiling.y_layers.size(); ++li) {
                Real a = ceiling.y_amplitude(li);
                const BigInt& f = ceiling.y_freq(li);
                Real w = two_pi() * to_real(Rational(f));
                if (m_real * a * w <= Real("1e-40") * out.threshold) {
                    band += m_real * a * w;
                    continue;
                }
                Complex Y = geometric_value(m, mod1(Rational(f) * pair.alpha_prime.value), &gerr);
                Complex e = cis_turn(mod1(Rational(f) * pos));
                deriv += -a * w * (Y * e).im;
                band += a * w * (gerr + 16 * real_eps() * Y.abs());
            }
        }
        StretchPoint pt;
        pt.pos = pos;
        pt.abs_deriv = mp::abs(deriv);
        pt.in_good_set = good;
        pt.pass = !good || (pt.abs_deriv - band >= out.threshold);
        out.points.push_back(pt);
    }
    int good_count = 0, pass_count = 0;
    for (const auto& p : out.points)
        if (p.in_good_set) {
            ++good_count;
            if (p.pass) ++pass_count;
        }
    out.pass_fraction = good_count ? static_cast<double>(pass_count) / good_count : 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Recurrence estimate: |S_{q_n q'_n} phi - q_n q'_n| over the C_n grid
// (1/n^2 <= {q_n x} <= 1/n - 1/n^2, y over the circle). The certified
// layer-sum interval is complemented by a closed-form spot check of the
// level-n polynomial on the u-grid.

struct RecurrencePoint {
    Rational x, y;
    Real deviation;
    Real band;
};

struct RecurrenceEstimate {
    int level = 0;
    BigInt t;  // q_n q'_n
    Real max_deviation{0};
    Real max_band{0};
    Real closed_max{0};  // spot check: max |S_t X~_n| over the u-grid, closed form
    Real tolerance;
    bool pass = false;
    std::vector<RecurrencePoint> points;
};

inline RecurrenceEstimate recurrence_estimate(const CeilingFunction& ceiling,
                                              const FrequencyPair& pair, int level, int grid,
                                              const Real& tolerance) {
    std::size_t idx = static_cast<std::size_t>(level - ceiling.n0);
    if (idx >= ceiling.x_layers.size())
        throw std::invalid_argument("recurrence_estimate: level has no built layer");
    const XLayer& xl = ceiling.x_layers[idx];
    const int n = level;
    BigInt t = xl.q * ceiling.y_freq(idx);

    BirkhoffEvaluator ev(&ceiling, &pair);
    RecurrenceEstimate out;
    out.level = level;
    out.t = t;
    out.tolerance = tolerance;

    const int residues = 3;
    const int y_samples = 4;
    int u_samples = std::max(2, grid / (residues * y_samples));
    Rational u_lo(1, n * n);
    Rational u_hi = Rational(1, n) - Rational(1, n * n);

    // closed-form spot check of the level-n layer on the u-grid
    XClosedFactors fac = x_closed_factors(xl, t, pair.alpha.value);
    for (int iu = 0; iu < u_samples; ++iu) {
        Rational u = u_lo + (u_hi - u_lo) * Rational(2 * iu + 1, 2 * u_samples);
        Real v = mp::abs(eval_x_factors(fac, u).value);
        if (v > out.closed_max) out.closed_max = v;
    }

    for (int r = 0; r < residues; ++r) {
        BigInt k0 = (xl.q * r) / residues;
        for (int iu = 0; iu < u_samples; ++iu) {
            Rational u = u_lo + (u_hi - u_lo) * Rational(2 * iu + 1, 2 * u_samples);
            Rational x = (Rational(k0) + u) / Rational(xl.q);
            for (int iy = 0; iy < y_samples; ++iy) {
                Rational y(iy, y_samples);
                LayerSum s = ev.sm_layers(t, x, y);  // S_t phi - t
                RecurrencePoint pt{x, y, mp::abs(s.value), s.band};
                if (pt.deviation > out.max_deviation) out.max_deviation = pt.deviation;
                if (pt.band > out.max_band) out.max_band = pt.band;
                out.points.push_back(std::move(pt));
            }
        }
    }
    out.pass = (out.max_deviation + out.max_band <= tolerance);
    return out;
}

}  // namespace srflow
