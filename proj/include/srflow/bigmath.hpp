#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace srflow {

namespace mp = boost::multiprecision;

using BigInt = mp::cpp_int;
using Rational = mp::cpp_rational;

// Working real type: 70 decimal digits, binary exponent range ~ +-2^30,
// so quantities like q^-4 for q ~ 10^5000 stay representable.
using Real = mp::number<mp::cpp_bin_float<70>>;

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const Real& pi_real() {
    static const Real value = []{
        // 80 digits of pi; rounded into Real once.
        return Real("3.14159265358979323846264338327950288419716939937510582097494459230781640628620899");
    }();
    return value;
}

inline const Real& two_pi() {
    static const Real value = 2 * pi_real();
    return value;
}

inline Real real_eps() { return std::numeric_limits<Real>::epsilon(); }

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
    return -floor_div(-a, b);
}

// Fractional part of a rational, reduced to [0,1).
inline Rational mod1(const Rational& x) {
    BigInt num = numerator(x), den = denominator(x);
    BigInt m = num % den;
    if (m < 0) m += den;
    return Rational(m, den);
}

// Distance to the nearest integer, ||x||.
inline Rational circle_norm(const Rational& x) {
    Rational f = mod1(x);
    Rational other = 1 - f;
    return f <= other ? f : other;
}

// Signed representative of x mod 1 in [-1/2, 1/2).
inline Rational signed_mod1(const Rational& x) {
    Rational f = mod1(x);
    if (2 * numerator(f) >= denominator(f)) f -= 1;
    return f;
}

inline Real to_real(const Rational& x) { return Real(x); }

inline BigInt floor_to_bigint(const Real& x) {
    Real f = mp::floor(x);
    BigInt out;
    // cpp_bin_float -> cpp_int conversion is exact for integral values.
    out = f.convert_to<BigInt>();
    if (Real(out) > x) --out;  // guard against convert_to rounding up
    return out;
}

inline std::size_t bit_length(const BigInt& x) {
    if (x == 0) return 0;
    return static_cast<std::size_t>(mp::msb(mp::abs(x))) + 1;
}

// Minimal complex number over Real (std::complex is not specified for
// user-defined floating point types).
struct Complex {
    Real re{0}, im{0};

    Complex() = default;
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    explicit Complex(Real r) : re(std::move(r)) {}

    Complex operator+(const Complex& o) const { return {re + o.re, im + o.im}; }
    Complex operator-(const Complex& o) const { return {re - o.re, im - o.im}; }
    Complex operator*(const Complex& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Complex operator*(const Real& s) const { return {re * s, im * s}; }
    Complex operator/(const Real& s) const { return {re / s, im / s}; }
    Complex operator/(const Complex& o) const {
        Real d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex conj() const { return {re, -im}; }
    Real abs() const { return mp::sqrt(re * re + im * im); }
    Real abs2() const { return re * re + im * im; }
};

// e^{2 pi i phase} with phase given as a fraction of a turn; callers reduce
// phase mod 1 exactly before converting, so the MP trig sees small arguments.
inline Complex cis_turn(const Real& phase) {
    Real a = two_pi() * phase;
    return {mp::cos(a), mp::sin(a)};
}

inline Complex cis_turn(const Rational& phase) { return cis_turn(to_real(signed_mod1(phase))); }

// Deterministic RNG helpers (all randomness in the library is seeded).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform01() {
        return (eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
        std::uniform_int_distribution<std::int64_t> d(lo, hi);
        return d(eng_);
    }

    // Uniform dyadic rational in [0,1) with `bits` random bits.
    Rational uniform_dyadic(unsigned bits) {
        BigInt num = 0;
        unsigned filled = 0;
        while (filled < bits) {
            num <<= 64;
            num |= eng_();
            filled += 64;
        }
        if (filled > bits) num >>= (filled - bits);
        BigInt den = BigInt(1) << bits;
        return Rational(num, den);
    }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace srflow
