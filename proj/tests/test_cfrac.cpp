#include <catch2/catch_amalgamated.hpp>

#include "srflow/cfrac.hpp"

using namespace srflow;

namespace {

// Independent oracle: evaluate a finite continued fraction by folding from
// the right in exact rational arithmetic.
Rational fold_value(const std::vector<BigInt>& a) {
    Rational v = a.back();
    for (auto it = a.rbegin() + 1; it != a.rend(); ++it) v = Rational(*it) + 1 / v;
    return v;
}

PartialQuotients ones(std::size_t n) {
    PartialQuotients pq;
    pq.a.assign(n, 1);
    pq.a[0] = 0;
    return pq;
}

}  // namespace

TEST_CASE("convergents: seed formulas and Fibonacci denominators") {
    ConvergentTable t = convergents(PartialQuotients{{0, 1, 1, 1, 1, 1}});
    std::vector<BigInt> q_expect{1, 1, 2, 3, 5, 8};
    REQUIRE(t.rows.size() == 6);
    for (int n = 0; n <= 5; ++n) REQUIRE(t.q(n) == q_expect[static_cast<std::size_t>(n)]);

    ConvergentTable t2 = convergents(PartialQuotients{{0, 2}});
    REQUIRE(t2.p(1) == 1);
    REQUIRE(t2.q(1) == 2);
}

TEST_CASE("convergents: exact value matches right-fold oracle") {
    std::vector<BigInt> a{0, 1, 2, 3};
    ConvergentTable t = convergents(PartialQuotients{{0, 1, 2, 3}});
    REQUIRE(t.p(3) == 7);
    REQUIRE(t.q(3) == 10);
    REQUIRE(t.value() == fold_value(a));

    Rng rng(20240811);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<BigInt> quots{BigInt(rng.uniform_int(0, 5))};
        int len = static_cast<int>(rng.uniform_int(2, 12));
        for (int i = 1; i < len; ++i) quots.push_back(BigInt(rng.uniform_int(1, 1000000)));
        ConvergentTable table = convergents(PartialQuotients{quots});
        REQUIRE(table.value() == fold_value(quots));
    }
}

TEST_CASE("convergents: recurrence identity, coprimality, monotone q") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<BigInt> quots{BigInt(rng.uniform_int(0, 3))};
        int len = static_cast<int>(rng.uniform_int(2, 12));
        for (int i = 1; i < len; ++i) quots.push_back(BigInt(rng.uniform_int(1, 1000000)));
        ConvergentTable t = convergents(PartialQuotients{quots});
        for (int n = 1; n <= t.max_index(); ++n) {
            BigInt det = t.p(n - 1) * t.q(n) - t.p(n) * t.q(n - 1);
            REQUIRE(det == ((n % 2 == 0) ? 1 : -1));
            REQUIRE(mp::gcd(t.p(n), t.q(n)) == 1);
            if (n >= 2) REQUIRE(t.q(n) > t.q(n - 1));
        }
    }
}

TEST_CASE("convergents: rejects bad input") {
    REQUIRE_THROWS_AS(convergents(PartialQuotients{{}}), std::invalid_argument);
    REQUIRE_THROWS_AS(convergents(PartialQuotients{{0, 0, 1}}), std::invalid_argument);
    REQUIRE_THROWS_AS(convergents(PartialQuotients{{1, -2}}), std::invalid_argument);
}

TEST_CASE("two_sided_error: direct substitution and sandwich") {
    ConvergentTable fib = convergents(ones(8));  // q: 1,1,2,3,5,8,13,21
    auto [lo, hi] = two_sided_error(fib, 3);
    REQUIRE(lo == Rational(1, 24));
    REQUIRE(hi == Rational(1, 15));
    REQUIRE_THROWS_AS(two_sided_error(fib, 7), std::out_of_range);

    // Sandwich for the truncation [0,1,2,3] at n = 1 with exact alpha = 7/10.
    ConvergentTable t = convergents(PartialQuotients{{0, 1, 2, 3}});
    Rational alpha = t.value();
    for (int n = 0; n + 1 <= t.max_index(); ++n) {
        auto [l, h] = two_sided_error(t, n);
        Rational err = alpha - Rational(t.p(n), t.q(n));
        if (n % 2 == 1) err = -err;
        REQUIRE(err >= l);
        REQUIRE(err <= h);
    }
}

TEST_CASE("best_approx_check: golden pair and brute-force cross-check") {
    ConvergentTable g = convergents(ones(10));
    BestApproxReport rep = best_approx_check(g, g.value(), BigInt(20));
    REQUIRE(rep.ok());

    // a = [0,1,2,3]: brute-force ||k alpha|| over k in {1,2} with alpha = 7/10.
    ConvergentTable t = convergents(PartialQuotients{{0, 1, 2, 3}});
    Rational alpha = t.value();
    Rational n1 = circle_norm(Rational(1) * alpha);
    Rational n2 = circle_norm(Rational(2) * alpha);
    REQUIRE(n1 == Rational(3, 10));
    REQUIRE(n2 == Rational(4, 10));
    REQUIRE(circle_norm(Rational(t.q(1)) * alpha) < n2);
    BestApproxReport rep2 = best_approx_check(t, alpha, BigInt(3));
    REQUIRE(rep2.ok());

    REQUIRE_THROWS_AS(best_approx_check(t, alpha, BigInt(100)), std::invalid_argument);
}

TEST_CASE("best_approx_check: randomized tables have zero violations") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<BigInt> quots{0};
        for (int i = 1; i < 9; ++i) quots.push_back(BigInt(rng.uniform_int(1, 9)));
        ConvergentTable t = convergents(PartialQuotients{quots});
        BigInt kmax = (std::min)(t.rows.back().q, BigInt(500));
        REQUIRE(best_approx_check(t, t.value(), kmax).ok());
    }
}

TEST_CASE("circle_distance: zero, sandwich bracket, triangle inequality") {
    REQUIRE(circle_distance(BigInt(0), FrequencyValue::from_rational(Rational(1, 3))).value == 0);

    // Eq.(2) times q_n: ||q_n alpha|| lies in [1/(q_n+q_{n+1}), 1/q_{n+1}].
    ConvergentTable g = convergents(ones(20));
    FrequencyValue golden = FrequencyValue::from_rational(g.value());
    CircleDistance d = circle_distance(g.q(2), golden);
    REQUIRE(d.value >= to_real(Rational(1, g.q(2) + g.q(3))));
    REQUIRE(d.value <= to_real(Rational(1, g.q(3))));

    // ||m q_n alpha|| <= m ||q_n alpha||.
    for (int m : {2, 3, 7}) {
        CircleDistance dm = circle_distance(m * g.q(4), golden);
        CircleDistance d1 = circle_distance(g.q(4), golden);
        REQUIRE(dm.value <= m * d1.value + 1e-40);
    }

    // Approximate route: insufficient precision must throw.
    FrequencyValue sloppy = FrequencyValue::from_approx(Real("0.618"), Real("1e-3"));
    REQUIRE_THROWS_AS(circle_distance(BigInt(1000000), sloppy), PrecisionError);
}

TEST_CASE("exp_integer_ceil: small cases and the level-1 tower value") {
    REQUIRE(exp_integer_ceil(BigInt(1)) == 3);
    REQUIRE(exp_integer_ceil(BigInt(2)) == 8);
    REQUIRE(exp_integer_ceil(BigInt(5)) == 149);
    REQUIRE(exp_integer_ceil(BigInt(32)) == BigInt("78962960182681"));
    REQUIRE_THROWS_AS(exp_integer_ceil(BigInt(10000000)), PrecisionError);
}

TEST_CASE("design_pair: cubic schedule interlaces exactly") {
    GrowthSchedule cubic = GrowthSchedule::pure_power(3);
    FrequencyPair pair = design_pair(cubic, 3, PartialQuotients{{0, 1}}, PartialQuotients{{0, 1}});
    InterlaceCheck chk = check_interlacing(pair);
    REQUIRE(chk.ok);
    for (int n = 1; n <= pair.last_active(); ++n) {
        REQUIRE(pair.q_prime(n) >= pair.q(n) * pair.q(n) * pair.q(n));
        REQUIRE(pair.q(n + 1) >= pair.q_prime(n) * pair.q_prime(n) * pair.q_prime(n));
    }
    REQUIRE_THROWS_AS(design_pair(cubic, 0, PartialQuotients{{0, 1}}, PartialQuotients{{0, 1}}),
                      std::invalid_argument);
}

TEST_CASE("design_pair: paper-literal schedule at one tiny level") {
    GrowthSchedule lit = GrowthSchedule::paper_literal();
    // The closing denominator q_2 >= e^{(q'_1)^5} cannot fit any budget, so the
    // pair is built without it (documentation-only schedule).
    FrequencyPair pair = design_pair(lit, 1, PartialQuotients{{0, 2}}, PartialQuotients{{0, 1}}, 1,
                                     /*require_closing=*/false);
    REQUIRE(pair.q(1) == 2);
    REQUIRE(pair.q_prime(1) >= BigInt("78962960182681"));  // ceil(e^{q_1^5}) = ceil(e^32)
    REQUIRE_FALSE(pair.closed);
    REQUIRE(check_interlacing(pair).ok);
    REQUIRE_THROWS_AS(design_pair(lit, 1, PartialQuotients{{0, 2}}, PartialQuotients{{0, 1}}),
                      PrecisionError);
}

TEST_CASE("design_pair: composite run-up keeps early levels small") {
    GrowthSchedule sched = GrowthSchedule::composite(BigInt(100), 3, 5);
    FrequencyPair pair = design_pair(sched, 6, PartialQuotients{{0, 2}}, PartialQuotients{{0, 2}});
    REQUIRE(check_interlacing(pair).ok);
    // run-up region: q'_n ~ 100 q_n, far below the cube
    REQUIRE(pair.q_prime(1) < pair.q(1) * pair.q(1) * pair.q(1) * 200);
    // active region: cube growth
    REQUIRE(pair.q_prime(5) >= pair.q(5) * pair.q(5) * pair.q(5));
}
