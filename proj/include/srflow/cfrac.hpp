#pragma once

// Exact continued-fraction machinery: convergents, best-approximation
// checks, two-sided error bounds, and schedule-driven design of frequency
// pairs whose denominators interlace with prescribed growth.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srflow/bigmath.hpp"

namespace srflow {

struct PartialQuotients {
    std::vector<BigInt> a;  // a[0] may be zero; a[i] >= 1 for i >= 1

    std::size_t n_terms() const { return a.size(); }

    void validate() const {
        if (a.empty()) throw std::invalid_argument("PartialQuotients: empty quotient list");
        for (std::size_t i = 1; i < a.size(); ++i)
            if (a[i] <= 0)
                throw std::invalid_argument("PartialQuotients: a[i] must be >= 1 for i >= 1");
    }
};

struct ConvergentRow {
    int n = 0;
    BigInt p, q;
};

struct ConvergentTable {
    std::vector<ConvergentRow> rows;

    int max_index() const { return static_cast<int>(rows.size()) - 1; }
    const BigInt& p(int n) const { return rows.at(static_cast<std::size_t>(n)).p; }
    const BigInt& q(int n) const { return rows.at(static_cast<std::size_t>(n)).q; }

    // Exact value of the finite continued fraction, p_N / q_N.
    Rational value() const {
        const ConvergentRow& last = rows.back();
        return Rational(last.p, last.q);
    }
};

// p0=a0, p1=a0*a1+1, q0=1, q1=a1, then p_n = a_n p_{n-1} + p_{n-2} and
// q_n = a_n q_{n-1} + q_{n-2}.
inline ConvergentTable convergents(const PartialQuotients& pq) {
    pq.validate();
    const auto& a = pq.a;
    ConvergentTable t;
    t.rows.reserve(a.size());
    t.rows.push_back({0, a[0], 1});
    if (a.size() == 1) return t;
    t.rows.push_back({1, a[0] * a[1] + 1, a[1]});
    for (std::size_t n = 2; n < a.size(); ++n) {
        BigInt p = a[n] * t.rows[n - 1].p + t.rows[n - 2].p;
        BigInt q = a[n] * t.rows[n - 1].q + t.rows[n - 2].q;
        t.rows.push_back({static_cast<int>(n), std::move(p), std::move(q)});
    }
    return t;
}

// Eq-(2)-style sandwich: (lower, upper) = (1/(q_n(q_n+q_{n+1})), 1/(q_n q_{n+1})).
inline std::pair<Rational, Rational> two_sided_error(const ConvergentTable& t, int n) {
    if (n < 0 || n + 1 > t.max_index())
        throw std::out_of_range("two_sided_error: need rows n and n+1");
    const BigInt& qn = t.q(n);
    const BigInt& qn1 = t.q(n + 1);
    return {Rational(1, qn * (qn + qn1)), Rational(1, qn * qn1)};
}

// A frequency value: exact rational surrogate plus an optional approximate
// real with certified error bound (used when callers bring float inputs).
struct FrequencyValue {
    Rational exact;
    Real approx{0};
    Real approx_err{0};
    bool have_exact = true;

    static FrequencyValue from_rational(Rational r) {
        FrequencyValue v;
        v.exact = std::move(r);
        v.approx = to_real(v.exact);
        v.approx_err = 0;
        return v;
    }
    static FrequencyValue from_approx(Real value, Real err) {
        FrequencyValue v;
        v.have_exact = false;
        v.approx = std::move(value);
        v.approx_err = std::move(err);
        return v;
    }
};

// ||k * alpha|| with a certified error bound. The exact route is used
// whenever a rational surrogate is available; the approximate route
// requires |k| * err to stay below the requested tolerance.
struct CircleDistance {
    Real value;
    Real err;
};

inline CircleDistance circle_distance(const BigInt& k, const FrequencyValue& alpha,
                                      const Real& tolerance = Real(1e-30)) {
    if (k == 0) return {Real(0), Real(0)};
    if (alpha.have_exact) {
        Rational d = circle_norm(Rational(k) * alpha.exact);
        Real v = to_real(d);
        return {v, 4 * real_eps() * v};
    }
    Real err = to_real(Rational(mp::abs(k))) * alpha.approx_err;
    if (err > tolerance)
        throw PrecisionError("circle_distance: |k| * err exceeds requested tolerance");
    Real prod = to_real(Rational(k)) * alpha.approx;
    Real frac = prod - mp::floor(prod);
    Real v = (std::min)(frac, Real(1) - frac);
    return {v, err + 4 * real_eps() * (mp::abs(prod) + 1)};
}

struct BestApproxViolation {
    int n;
    BigInt k;
    Rational norm_k, norm_qn1;
};

struct BestApproxReport {
    std::vector<BestApproxViolation> violations;
    BigInt k_checked = 0;
    bool ok() const { return violations.empty(); }
};

// Checks ||q_{n-1} alpha|| < ||k alpha|| for every 1 <= k < q_n (k != q_{n-1}),
// for each n with q_n <= k_max bound coverage. Exact rational arithmetic.
inline BestApproxReport best_approx_check(const ConvergentTable& t, const Rational& alpha,
                                          const BigInt& k_max) {
    if (k_max > t.rows.back().q)
        throw std::invalid_argument("best_approx_check: k_max exceeds table range");
    BestApproxReport rep;
    std::vector<Rational> norms;  // ||k alpha|| for k = 0..k_max
    std::size_t km = static_cast<std::size_t>(k_max.convert_to<std::int64_t>());
    norms.resize(km + 1);
    Rational step = alpha;
    Rational acc = 0;
    for (std::size_t k = 1; k <= km; ++k) {
        acc = mod1(acc + step);
        norms[k] = (2 * numerator(acc) <= denominator(acc)) ? acc : Rational(1) - acc;
    }
    for (int n = 1; n <= t.max_index(); ++n) {
        const BigInt& qn = t.q(n);
        const BigInt& qprev = t.q(n - 1);
        if (qprev > k_max) break;
        Rational ref = norms[static_cast<std::size_t>(qprev.convert_to<std::int64_t>())];
        BigInt upper = qn - 1;
        if (k_max < upper) upper = k_max;
        for (BigInt k = 1; k <= upper; ++k) {
            if (k == qprev) continue;
            const Rational& nk = norms[static_cast<std::size_t>(k.convert_to<std::int64_t>())];
            if (nk <= ref) rep.violations.push_back({n, k, nk, ref});
        }
        if (upper > rep.k_checked) rep.k_checked = upper;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Growth schedules.

// ceil(e^k) computed exactly via the rational Taylor series of e^k.
// Throws when the result would need more than max_bits bits.
inline BigInt exp_integer_ceil(const BigInt& k, std::size_t max_bits = 1 << 20) {
    if (k <= 0) throw std::invalid_argument("exp_integer_ceil: k must be positive");
    // e^k has about k * log2(e) bits.
    double bits_est = k.convert_to<double>() * 1.4426950408889634;
    if (bits_est > static_cast<double>(max_bits))
        throw PrecisionError("exp_integer_ceil: requested denominator exceeds bit budget");
    // Partial sum S = sum_{i<=M} k^i / i!; remainder < 2 k^{M+1}/(M+1)! once
    // M >= 2k, and we push M until the remainder bound cannot straddle an
    // integer boundary together with S.
    Rational term = 1, sum = 1;
    BigInt i = 1;
    Rational remainder_bound;
    while (true) {
        term *= Rational(k, i);
        sum += term;
        if (i > 2 * k) {
            remainder_bound = term * 2;  // geometric ratio <= 1/2 beyond 2k
            BigInt lo = floor_div(numerator(sum), denominator(sum));
            Rational hi_val = sum + remainder_bound;
            BigInt hi = floor_div(numerator(hi_val), denominator(hi_val));
            if (lo == hi) return lo + 1;  // e^k is irrational, ceil = floor + 1
        }
        ++i;
        if (i > 8 * k + 64) throw PrecisionError("exp_integer_ceil: series did not settle");
    }
}

// g(level, prev) -> required minimum next denominator. `Composite` applies a
// geometric run-up below `active_from` and the power law at active levels;
// this keeps early denominators small enough that the early recurrence
// times q_n q'_n fit inside sampled potential windows.
struct GrowthSchedule {
    enum class Kind { PaperLiteral, Power, ExpMild, Composite };

    Kind kind = Kind::Power;
    int power = 3;
    BigInt runup_factor = 100;
    int active_from = 1;
    std::size_t max_bits = 1 << 20;
    std::string name = "cubic";

    BigInt min_next(int level, const BigInt& prev) const {
        switch (kind) {
            case Kind::PaperLiteral: {
                BigInt e = prev * prev * prev * prev * prev;
                return exp_integer_ceil(e, max_bits);
            }
            case Kind::Power:
                return pow_check(prev, power);
            case Kind::ExpMild:
                return exp_integer_ceil(prev, max_bits);
            case Kind::Composite:
                if (level < active_from) {
                    BigInt r = runup_factor * prev;
                    check_bits(r);
                    return r;
                }
                return pow_check(prev, power);
        }
        throw std::logic_error("GrowthSchedule: bad kind");
    }

    static GrowthSchedule paper_literal() {
        GrowthSchedule g;
        g.kind = Kind::PaperLiteral;
        g.name = "paper-literal";
        return g;
    }
    static GrowthSchedule pure_power(int p) {
        GrowthSchedule g;
        g.kind = Kind::Power;
        g.power = p;
        g.name = p == 3 ? "cubic" : ("power" + std::to_string(p));
        return g;
    }
    static GrowthSchedule exp_mild() {
        GrowthSchedule g;
        g.kind = Kind::ExpMild;
        g.name = "exp-mild";
        return g;
    }
    static GrowthSchedule composite(BigInt runup, int p, int active_from) {
        GrowthSchedule g;
        g.kind = Kind::Composite;
        g.runup_factor = std::move(runup);
        g.power = p;
        g.active_from = active_from;
        g.name = "cubic";
        return g;
    }

  private:
    BigInt pow_check(const BigInt& prev, int p) const {
        BigInt r = 1;
        for (int i = 0; i < p; ++i) r *= prev;
        if (r < prev + 1) r = prev + 1;  // keep schedules strictly growing from q=1
        check_bits(r);
        return r;
    }
    void check_bits(const BigInt& r) const {
        if (bit_length(r) > max_bits)
            throw PrecisionError("GrowthSchedule: requested denominator exceeds bit budget");
    }
};

struct FrequencySide {
    PartialQuotients quotients;
    ConvergentTable table;
    Rational value;  // exact rational surrogate (value of the finite fraction)

    FrequencyValue freq_value() const { return FrequencyValue::from_rational(value); }
};

// A designed pair (alpha, alpha'). Active levels are n0 .. n0+levels-1;
// alpha's table carries one closing denominator beyond the last active level.
struct FrequencyPair {
    FrequencySide alpha, alpha_prime;
    GrowthSchedule schedule;
    int n0 = 1;
    int levels = 0;
    int value_precision_bits = 0;
    bool closed = true;  // alpha's table extends one index past the last active level

    int last_active() const { return n0 + levels - 1; }

    const BigInt& q(int n) const { return alpha.table.q(n); }
    const BigInt& q_prime(int n) const { return alpha_prime.table.q(n); }

    BigInt recurrence_time(int n) const { return q(n) * q_prime(n); }
};

// Greedy construction: the next partial quotient is ceil(target / q_prev),
// so q_next = a q_prev + q_prevprev >= target. Seeds supply (a0, a1); the
// seed a1 of each side is bumped if it misses its target.
inline FrequencyPair design_pair(const GrowthSchedule& schedule, int levels,
                                 const PartialQuotients& seed_alpha,
                                 const PartialQuotients& seed_alpha_prime, int n0 = 1,
                                 bool require_closing = true) {
    if (levels < 1) throw std::invalid_argument("design_pair: levels must be >= 1");
    if (seed_alpha.a.size() < 2 || seed_alpha_prime.a.size() < 2)
        throw std::invalid_argument("design_pair: seeds must supply a0 and a1");
    seed_alpha.validate();
    seed_alpha_prime.validate();

    const int n1 = n0 + levels - 1;
    std::vector<BigInt> a{seed_alpha.a[0], seed_alpha.a[1]};
    std::vector<BigInt> ap{seed_alpha_prime.a[0], seed_alpha_prime.a[1]};

    // q-trackers: (q_{n-1}, q_n) for the current top index.
    BigInt qa_prev = 1, qa = a[1];
    BigInt qp_prev = 1, qp = ap[1];

    auto extend = [](std::vector<BigInt>& quots, BigInt& q_prev, BigInt& q, const BigInt& target) {
        BigInt an = ceil_div(target, q);
        if (an < 1) an = 1;
        quots.push_back(an);
        BigInt q_next = an * q + q_prev;
        q_prev = q;
        q = q_next;
    };

    // level n covers: q'_n >= g(n, q_n), then q_{n+1} >= g(n, q'_n).
    bool closed = true;
    for (int n = 1; n <= n1; ++n) {
        BigInt target_p = schedule.min_next(n, qa);
        if (n == 1) {
            if (qp < target_p) {  // bump seed a'_1
                ap[1] = target_p;
                qp = target_p;
            }
        } else {
            extend(ap, qp_prev, qp, target_p);
        }
        try {
            BigInt target_a = schedule.min_next(n, qp);
            extend(a, qa_prev, qa, target_a);  // produces q_{n+1}
        } catch (const PrecisionError&) {
            if (require_closing || n < n1) throw;
            closed = false;  // last closing denominator does not fit the budget
        }
    }

    FrequencyPair pair;
    pair.closed = closed;
    pair.alpha.quotients = PartialQuotients{std::move(a)};
    pair.alpha_prime.quotients = PartialQuotients{std::move(ap)};
    pair.alpha.table = convergents(pair.alpha.quotients);
    pair.alpha_prime.table = convergents(pair.alpha_prime.quotients);
    pair.alpha.value = pair.alpha.table.value();
    pair.alpha_prime.value = pair.alpha_prime.table.value();
    pair.schedule = schedule;
    pair.n0 = n0;
    pair.levels = levels;
    pair.value_precision_bits =
        static_cast<int>(bit_length(denominator(pair.alpha.value)));
    return pair;
}

struct InterlaceCheck {
    bool ok = true;
    std::vector<int> failing_levels;
};

// Exact big-integer verification of q'_n >= g(n,q_n) and q_{n+1} >= g(n,q'_n).
inline InterlaceCheck check_interlacing(const FrequencyPair& pair) {
    InterlaceCheck out;
    for (int n = 1; n <= pair.last_active(); ++n) {
        bool good = pair.q_prime(n) >= pair.schedule.min_next(n, pair.q(n));
        bool need_close = pair.closed || n < pair.last_active();
        if (good && need_close)
            good = pair.alpha.table.max_index() >= n + 1 &&
                   pair.q(n + 1) >= pair.schedule.min_next(n, pair.q_prime(n));
        if (!good) {
            out.ok = false;
            out.failing_levels.push_back(n);
        }
    }
    return out;
}

}  // namespace srflow
