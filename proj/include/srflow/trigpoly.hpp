#pragma once

// Sparse trigonometric polynomials with exact integer frequencies (which can
// be astronomically large) and multiprecision coefficients. Evaluation
// reduces every phase k*x modulo 1 in exact rational arithmetic before any
// trig call, so huge frequencies lose nothing.

#include <map>
#include <utility>

#include "srflow/bigmath.hpp"

namespace srflow {

enum class Axis { X, Y, Const };

struct TrigPolynomial {
    Axis axis = Axis::Const;
    bool real_valued = true;
    BigInt degree_bound = 0;  // c_k = 0 for |k| >= degree_bound (0 = unset)
    std::map<BigInt, Complex> coef;

    static TrigPolynomial constant(Real value) {
        TrigPolynomial p;
        p.coef[0] = Complex(std::move(value));
        p.degree_bound = 1;
        return p;
    }

    // amplitude * cos(2 pi freq pos): two conjugate coefficients.
    static TrigPolynomial cosine(Axis axis, BigInt freq, const Real& amplitude) {
        TrigPolynomial p;
        p.axis = axis;
        p.coef[freq] = Complex(amplitude / 2, Real(0));
        p.coef[-freq] = Complex(amplitude / 2, Real(0));
        p.degree_bound = mp::abs(freq) + 1;
        return p;
    }

    Real c0() const {
        auto it = coef.find(BigInt(0));
        return it == coef.end() ? Real(0) : it->second.re;
    }

    void set(BigInt k, Complex c) {
        if (c.re == 0 && c.im == 0) return;
        if (mp::abs(k) + 1 > degree_bound) degree_bound = mp::abs(k) + 1;
        coef[std::move(k)] = std::move(c);
    }

    void enforce_symmetry() {
        for (auto& [k, c] : coef) {
            if (k < 0) continue;
            auto it = coef.find(-k);
            if (it != coef.end()) {
                Complex avg = (c + it->second.conj()) / Real(2);
                c = avg;
                if (k != 0) it->second = avg.conj();
            }
        }
    }

    // Value at pos for a real-valued polynomial: c0 + sum_{k>0} 2 Re(c_k e^{2 pi i k pos}).
    Real eval(const Rational& pos) const {
        Real total = c0();
        for (const auto& [k, c] : coef) {
            if (k <= 0) continue;
            Complex rot = cis_turn(mod1(Rational(k) * pos));
            total += 2 * (c.re * rot.re - c.im * rot.im);
        }
        return total;
    }

    Real eval_deriv(const Rational& pos) const {
        // d/dpos of sum c_k e^{2 pi i k pos}: coefficient gains 2 pi i k.
        Real total = 0;
        for (const auto& [k, c] : coef) {
            if (k <= 0) continue;  // pair with -k, real-valued assumed
            Complex rot = cis_turn(mod1(Rational(k) * pos));
            Complex ck = c * rot;
            // 2 Re(2 pi i k c e) = -4 pi k Im(c e)
            total += -2 * two_pi() * to_real(Rational(k)) * ck.im;
        }
        return total;
    }

    TrigPolynomial derivative() const {
        TrigPolynomial d;
        d.axis = axis;
        d.real_valued = real_valued;
        d.degree_bound = degree_bound;
        for (const auto& [k, c] : coef) {
            if (k == 0) continue;
            Real w = two_pi() * to_real(Rational(k));
            d.coef[k] = Complex(-w * c.im, w * c.re);  // (2 pi i k) c
        }
        return d;
    }

    // sum over k of |c_k| (2 pi |k|)^r  -- an upper bound for sup |D^r f|.
    Real coef_norm(int r) const {
        Real total = 0;
        for (const auto& [k, c] : coef) {
            Real term = c.abs();
            if (r > 0) {
                Real w = two_pi() * to_real(Rational(mp::abs(k)));
                for (int i = 0; i < r; ++i) term *= w;
            }
            total += term;
        }
        return total;
    }

    std::size_t term_count() const { return coef.size(); }
};

}  // namespace srflow
