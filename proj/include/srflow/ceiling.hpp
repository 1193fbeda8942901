#pragma once

// Ceiling function construction. Each x-layer is the Fourier truncation of
// the periodized step profile X_hat_n(x) = A_n * p_n({q_n x}); because the
// rescaled profile p_n depends only on the level index n, its coefficients
// are computed once from a one-period FFT and lifted to frequencies j*q_n.
// Y-layers are plain cosines. The assembled ceiling is 1 + sum of layers
// with a certified positivity margin.

#include <functional>
#include <utility>
#include <vector>

#include "srflow/bigmath.hpp"
#include "srflow/fft.hpp"
#include "srflow/kernel.hpp"
#include "srflow/step_layer.hpp"
#include "srflow/trigpoly.hpp"

namespace srflow {

struct AmplitudeSchedule {
    enum class Kind { PaperLiteral, Poly, ExpMild };
    Kind kind = Kind::Poly;
    int power = 4;
    Real exp_cap = Real("1e-300");
    std::string name = "poly";

    // A(n, q): the prefactor replacing exp(-q^4).
    Real value(int /*level*/, const BigInt& q) const {
        switch (kind) {
            case Kind::PaperLiteral: {
                if (bit_length(q) > 8)
                    throw PrecisionError("paper-literal amplitude underflows for q > 190");
                BigInt q4 = q * q * q * q;
                return mp::exp(-Real(q4));
            }
            case Kind::Poly: {
                Real a = 1;
                Real qr(q);
                for (int i = 0; i < power; ++i) a /= qr;
                return a;
            }
            case Kind::ExpMild: {
                if (bit_length(q) > 10) return exp_cap;
                Real a = mp::exp(-Real(q));
                return a < exp_cap ? exp_cap : a;
            }
        }
        throw std::logic_error("AmplitudeSchedule: bad kind");
    }

    static AmplitudeSchedule paper_literal() { return {Kind::PaperLiteral, 4, Real("1e-300"), "paper-literal"}; }
    static AmplitudeSchedule poly(int power = 4) {
        return {Kind::Poly, power, Real("1e-300"), power == 4 ? "poly" : "poly" + std::to_string(power)};
    }
    static AmplitudeSchedule exp_mild() { return {Kind::ExpMild, 4, Real("1e-300"), "exp-mild"}; }
};

// Pre-truncation periodized evaluator X_hat (spec op build_xhat). `scale` is
// the amplitude A_n; the builder applies the q_n factor of the prefactor, so
// max |X_hat'| = scale * q_n on the plateau union.
struct XhatEvaluator {
    const StepLayer* layer;
    Real scale;

    Real eval_unit(const Real& x) const {  // x interpreted mod 1
        Real u = x * Real(layer->q());
        u -= mp::floor(u);
        return scale * layer->profile(u);
    }
    Real eval(const Rational& x) const {
        return scale * layer->profile(to_real(mod1(Rational(layer->q()) * x)));
    }
    Real deriv(const Rational& x) const {
        return scale * Real(layer->q()) *
               layer->profile_deriv(to_real(mod1(Rational(layer->q()) * x)));
    }
};

inline XhatEvaluator build_xhat(const StepLayer& layer, Real scale) {
    if (scale <= 0) throw std::invalid_argument("build_xhat: scale must be positive");
    return XhatEvaluator{&layer, std::move(scale)};
}

// One x-layer: the trig polynomial X_tilde_n plus the profile data used by
// fast evaluation paths and by certified error bands.
struct XLayer {
    int n = 0;
    BigInt q;
    Real amplitude;      // A_n
    StepLayer steps;
    TrigPolynomial poly; // frequencies j q_n, |j| <= jmax
    int jmax = 0;

    // Profile-coefficient tails (d_j are coefficients of p_n):
    Real dsum_abs;        // sum_{0<|j|<=jmax} |d_j|
    Real tail_dsum;       // bound for sum_{|j|>jmax} |d_j|
    Real tail_deriv_dsum; // bound for sum_{|j|>jmax} 2 pi |j| |d_j|
    Real profile_sup;     // sup |p_n| = 1/4 - 3/n (exact) checked on the grid

    Real sup_bound() const { return amplitude * (profile_sup + tail_dsum); }
    Real trunc_sup_err() const { return amplitude * tail_dsum; }               // sup|X~ - X^|
    Real trunc_deriv_err() const { return amplitude * Real(q) * tail_deriv_dsum; }

    Real eval_profile(const Rational& x) const {
        return amplitude * steps.profile(to_real(mod1(Rational(q) * x)));
    }
    Real eval_profile_deriv(const Rational& x) const {
        return amplitude * Real(q) * steps.profile_deriv(to_real(mod1(Rational(q) * x)));
    }
};

struct XLayerBuildOptions {
    Real tail_target = Real("1e-14");  // requested bound on sum_{|j|>J} |d_j|
    std::size_t fft_min = 4096;
    std::size_t fft_max = 1 << 16;
};

inline XLayer build_x_layer(int n, const BigInt& q, const Real& amplitude,
                            const BumpKernel& kernel, const XLayerBuildOptions& opt = {}) {
    if (amplitude <= 0) throw std::invalid_argument("build_x_layer: amplitude must be positive");
    StepLayer steps = build_step_layer(n, q, kernel);

    for (std::size_t N = opt.fft_min; N <= opt.fft_max; N <<= 1) {
        // Sample p' (combination of 8 theta ramps; no quadrature involved).
        std::vector<Real> samples(N);
        for (std::size_t i = 0; i < N; ++i)
            samples[i] = steps.profile_deriv(Real(static_cast<long>(i)) / Real(static_cast<unsigned long>(N)));
        std::vector<Complex> e = fourier_coefficients(samples);  // coefficients of p'

        // d_j = e_j / (2 pi i j); |d_j| = |e_j| / (2 pi j).
        std::size_t half = N / 2;
        std::vector<Real> dabs(half + 1), eabs(half + 1);
        for (std::size_t j = 1; j <= half; ++j) {
            eabs[j] = e[j].abs();
            dabs[j] = eabs[j] / (two_pi() * static_cast<long>(j));
        }

        // Decay must be established: last octave well below the previous one.
        Real oct_last = 0, oct_prev = 0;
        for (std::size_t j = half / 2 + 1; j <= half; ++j) oct_last += dabs[j];
        for (std::size_t j = half / 4 + 1; j <= half / 2; ++j) oct_prev += dabs[j];
        if (!(oct_last < oct_prev / 4)) continue;  // need a bigger grid

        // tail(J) = 2 * (sum_{J<j<=half} |d_j| + alias slack), slack = oct_last.
        std::vector<Real> suffix(half + 2, Real(0));
        for (std::size_t j = half; j >= 1; --j) suffix[j] = suffix[j + 1] + dabs[j];
        std::size_t J = 0;
        for (std::size_t j = 1; j < half; ++j) {
            if (2 * (suffix[j + 1] + oct_last) <= opt.tail_target) {
                J = j;
                break;
            }
        }
        if (J == 0) continue;  // target unreachable at this grid size

        XLayer layer{n, q, amplitude, steps, {}, static_cast<int>(J), Real(0), Real(0), Real(0), Real(0)};
        layer.poly.axis = Axis::X;
        layer.poly.real_valued = true;
        // sanity: the profile has exact zero mean
        if (!(e[0].abs() < Real("1e-40")))
            throw PrecisionError("build_x_layer: profile mean did not vanish");
        // Even harmonics vanish identically (p(u + 1/2) = -p(u)); anything at
        // FFT-noise level is dropped rather than stored.
        Real noise_floor = 0;
        for (std::size_t j = 1; j <= J; ++j)
            if (dabs[j] > noise_floor) noise_floor = dabs[j];
        noise_floor *= Real("1e-50");
        for (std::size_t j = 1; j <= J; ++j) {
            if (dabs[j] <= noise_floor) continue;
            Complex dj = e[j] / Complex(Real(0), two_pi() * static_cast<long>(j));  // e_j/(2 pi i j)
            Complex c = dj * amplitude;
            layer.poly.set(BigInt(static_cast<unsigned long>(j)) * q, c);
            layer.poly.set(BigInt(static_cast<unsigned long>(j)) * q * -1, c.conj());
            layer.dsum_abs += dj.abs();
        }
        layer.poly.degree_bound = BigInt(static_cast<unsigned long>(J)) * q + 1;
        layer.tail_dsum = 2 * (suffix[J + 1] + oct_last);
        Real tail_deriv = 0;
        for (std::size_t j = J + 1; j <= half; ++j) tail_deriv += eabs[j];
        Real eoct = 0;
        for (std::size_t j = half / 2 + 1; j <= half; ++j) eoct += eabs[j];
        layer.tail_deriv_dsum = 2 * (tail_deriv + eoct);
        layer.profile_sup = Real(1) / 4 - Real(3) / n;
        return layer;
    }
    throw PrecisionError("build_x_layer: tail target unreachable within FFT budget");
}

inline TrigPolynomial build_y_layer(int /*n*/, const BigInt& q_prime, const Real& amplitude) {
    if (amplitude <= 0) throw std::invalid_argument("build_y_layer: amplitude must be positive");
    return TrigPolynomial::cosine(Axis::Y, q_prime, amplitude);
}

// Generic Fourier truncation of a periodic evaluator from equispaced
// samples; returns the polynomial and a truncation-error estimate derived
// from the computed coefficient decay.
struct TruncationResult {
    TrigPolynomial poly;
    Real tail_bound;
};

inline TruncationResult fourier_truncate(const std::function<Real(const Real&)>& f, long degree,
                                         std::size_t sample_count) {
    if (degree < 1) throw std::invalid_argument("fourier_truncate: degree must be >= 1");
    if (sample_count < 4 * static_cast<std::size_t>(degree))
        throw std::invalid_argument("fourier_truncate: degree too large for sample budget");
    std::size_t N = 1;
    while (N < sample_count) N <<= 1;
    std::vector<Real> samples(N);
    for (std::size_t i = 0; i < N; ++i)
        samples[i] = f(Real(static_cast<long>(i)) / Real(static_cast<unsigned long>(N)));
    std::vector<Complex> c = fourier_coefficients(samples);
    TruncationResult out;
    out.poly.axis = Axis::X;
    out.poly.real_valued = true;
    out.poly.degree_bound = degree;
    Real c0 = c[0].re;
    if (mp::abs(c0) > Real("1e-60")) out.poly.set(BigInt(0), Complex(c0, Real(0)));
    std::size_t half = N / 2;
    for (std::size_t k = 1; k < static_cast<std::size_t>(degree) && k <= half; ++k) {
        out.poly.set(BigInt(static_cast<unsigned long>(k)), c[k]);
        out.poly.set(-BigInt(static_cast<unsigned long>(k)), c[k].conj());
    }
    // tail estimate: kept-out computed coefficients plus one alias octave
    Real tail = 0, oct = 0;
    for (std::size_t k = static_cast<std::size_t>(degree); k <= half; ++k) tail += c[k].abs();
    for (std::size_t k = half / 2 + 1; k <= half; ++k) oct += c[k].abs();
    out.tail_bound = 2 * (tail + oct);
    return out;
}

struct CeilingFunction {
    int n0 = 0;
    std::vector<XLayer> x_layers;
    std::vector<TrigPolynomial> y_layers;  // cosines: amplitude/2 at +-q'_n
    Real positivity_margin;

    Real sup_layers() const {
        Real s = 0;
        for (const auto& xl : x_layers) s += xl.sup_bound();
        for (const auto& yl : y_layers) s += yl.coef_norm(0);
        return s;
    }

    // Fast evaluation through step profiles; off the true phi (which uses the
    // truncated polynomials) by at most eval_band().
    Real eval(const Rational& x, const Rational& y) const {
        Real v = 1;
        for (const auto& xl : x_layers) v += xl.eval_profile(x);
        for (const auto& yl : y_layers) v += yl.eval(y);
        return v;
    }

    // Exact-polynomial evaluation (slow; validation and small fixtures).
    Real eval_poly(const Rational& x, const Rational& y) const {
        Real v = 1;
        for (const auto& xl : x_layers) v += xl.poly.eval(x);
        for (const auto& yl : y_layers) v += yl.eval(y);
        return v;
    }

    Real eval_band() const {
        Real b = 0;
        for (const auto& xl : x_layers) b += xl.trunc_sup_err();
        return b;
    }

    Real min_bound() const { return Real(1) - sup_layers(); }

    const Real& y_amplitude(std::size_t i) const { return y_amp_[i]; }
    const BigInt& y_freq(std::size_t i) const { return y_freq_[i]; }

    std::vector<Real> y_amp_;
    std::vector<BigInt> y_freq_;
};

inline CeilingFunction assemble_ceiling(std::vector<XLayer> x_layers,
                                        std::vector<TrigPolynomial> y_layers, int n0) {
    CeilingFunction c;
    c.n0 = n0;
    c.x_layers = std::move(x_layers);
    c.y_layers = std::move(y_layers);
    for (const auto& yl : c.y_layers) {
        BigInt freq = 0;
        Real amp = 0;
        for (const auto& [k, cf] : yl.coef)
            if (k > 0) {
                freq = k;
                amp = 2 * cf.abs();
            }
        c.y_freq_.push_back(freq);
        c.y_amp_.push_back(amp);
    }
    c.positivity_margin = c.min_bound();
    if (!(c.positivity_margin > 0))
        throw std::domain_error("assemble_ceiling: positivity violated (sum of layer sups >= 1)");
    return c;
}

}  // namespace srflow
