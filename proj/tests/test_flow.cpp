#include <catch2/catch_amalgamated.hpp>

#include "srflow/flow.hpp"

using namespace srflow;

namespace {

const BumpKernel& kernel() {
    static BumpKernel k;
    return k;
}

FrequencyPair golden_pair() {
    FrequencyPair pair;
    std::vector<BigInt> a(25, 1), ap(24, 1);
    a[0] = 0;
    ap[0] = 0;
    ap[23] = 2;
    pair.alpha.quotients = PartialQuotients{a};
    pair.alpha_prime.quotients = PartialQuotients{ap};
    pair.alpha.table = convergents(pair.alpha.quotients);
    pair.alpha_prime.table = convergents(pair.alpha_prime.quotients);
    pair.alpha.value = pair.alpha.table.value();
    pair.alpha_prime.value = pair.alpha_prime.table.value();
    pair.n0 = 17;
    pair.levels = 1;
    return pair;
}

// A ceiling with layers big enough that the fiber structure really varies.
CeilingFunction fat_ceiling() {
    XLayerBuildOptions opt;
    opt.tail_target = Real("1e-10");
    XLayer xl = build_x_layer(17, BigInt(3), Real(3), kernel(), opt);
    return assemble_ceiling({xl}, {build_y_layer(17, BigInt(4), Real(1) / 10)}, 17);
}

const CeilingFunction& unit_ceiling() {
    static CeilingFunction c = assemble_ceiling({}, {}, 17);
    return c;
}

}  // namespace

TEST_CASE("flow: phi == 1 suspension matches the explicit formula") {
    FrequencyPair pair = golden_pair();
    FlowMap map(&unit_ceiling(), &pair);

    Rng rng(99);
    for (int i = 0; i < 40; ++i) {
        FlowPoint p;
        p.x = Rational(rng.uniform_int(0, 1 << 28), 1 << 28);
        p.y = Rational(rng.uniform_int(0, 1 << 28), 1 << 28);
        p.s = Real(rng.uniform_int(0, 999)) / 1000;
        Real t = Real(rng.uniform_int(0, 1 << 26)) / (1 << 10);  // up to ~65536.0
        FlowPoint q = map.advance(p, t);
        BigInt n = floor_to_bigint(t + p.s);
        REQUIRE(q.x == mod1(p.x + Rational(n) * pair.alpha.value));
        REQUIRE(q.y == mod1(p.y + Rational(n) * pair.alpha_prime.value));
        Real frac = t + p.s - Real(Rational(n));
        REQUIRE(mp::abs(q.s - frac) < 1e-12);
    }

    // t = 0 is the identity
    FlowPoint p{Rational(1, 3), Rational(2, 7), Real(1) / 2};
    FlowPoint q = map.advance(p, Real(0));
    REQUIRE((q.x == p.x && q.y == p.y));
    REQUIRE(q.s == p.s);

    // fiber_count: s = 0, t = 7.3 -> 7; t = 0 -> 0
    FlowPoint o{Rational(0), Rational(0), Real(0)};
    REQUIRE(map.fiber_count(Real(73) / 10, o) == 7);
    REQUIRE(map.fiber_count(Real(0), p) == 0);
    REQUIRE_THROWS_AS(map.fiber_count(Real(-1), p), std::invalid_argument);
}

TEST_CASE("flow: fiber_count against a cumulative-sum oracle on a fat ceiling") {
    FrequencyPair pair = golden_pair();
    CeilingFunction fat = fat_ceiling();
    FlowMap map(&fat, &pair);

    Rng rng(123);
    for (int rep = 0; rep < 10; ++rep) {
        FlowPoint p;
        p.x = Rational(rng.uniform_int(0, 1 << 28), 1 << 28);
        p.y = Rational(rng.uniform_int(0, 1 << 28), 1 << 28);
        p.s = 0;
        p = map.canonical(p.x, p.y, Real(rng.uniform(0, 0.5)));

        // cumulative sums of phi along the orbit
        std::vector<Real> S{Real(0)};
        Rational zx = p.x, zy = p.y;
        for (int l = 0; l < 220; ++l) {
            S.push_back(S.back() + fat.eval(zx, zy));
            zx = mod1(zx + pair.alpha.value);
            zy = mod1(zy + pair.alpha_prime.value);
        }
        for (int k = 0; k < 20; ++k) {
            Real t = Real(rng.uniform_int(0, 180 * 1000)) / 1000;
            BigInt want = 0;
            while (S[static_cast<std::size_t>(want.convert_to<long>() + 1)] <= t + p.s)
                ++want;
            REQUIRE(map.fiber_count(t, p) == want);
        }
    }
}

TEST_CASE("flow: fiber_count is monotone in t") {
    FrequencyPair pair = golden_pair();
    CeilingFunction fat = fat_ceiling();
    FlowMap map(&fat, &pair);
    FlowPoint p = map.canonical(Rational(5, 17), Rational(3, 11), Real(1) / 4);
    BigInt prev = 0;
    for (int i = 0; i <= 50; ++i) {
        BigInt n = map.fiber_count(Real(i) * Real(17) / 10, p);
        REQUIRE(n >= prev);
        prev = n;
    }
}

TEST_CASE("flow: semigroup property and canonical invariant") {
    FrequencyPair pair = golden_pair();
    CeilingFunction fat = fat_ceiling();
    FlowMap map(&fat, &pair);
    Rng rng(7);
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        FlowPoint p = map.canonical(Rational(rng.uniform_int(0, 1 << 28), 1 << 28),
                                    Rational(rng.uniform_int(0, 1 << 28), 1 << 28),
                                    Real(rng.uniform(0, 0.6)));
        Real t1 = Real(rng.uniform_int(0, 40000)) / 1000;
        Real t2 = Real(rng.uniform_int(0, 40000)) / 1000;
        FlowPoint a = map.advance(map.advance(p, t1), t2);
        FlowPoint b = map.advance(p, t1 + t2);
        if (a.ambiguous || b.ambiguous) continue;
        ++checked;
        REQUIRE(a.x == b.x);
        REQUIRE(a.y == b.y);
        REQUIRE(mp::abs(a.s - b.s) < 1e-9);
        Real h = map.phi(a.x, a.y);
        REQUIRE(a.s >= 0);
        REQUIRE(a.s < h);
    }
    REQUIRE(checked >= 95);
}

TEST_CASE("flow: integer steps invert exactly") {
    FrequencyPair pair = golden_pair();
    CeilingFunction fat = fat_ceiling();
    FlowMap map(&fat, &pair);
    Rng rng(31);
    for (int i = 0; i < 30; ++i) {
        FlowPoint p = map.canonical(Rational(rng.uniform_int(0, 1 << 28), 1 << 28),
                                    Rational(rng.uniform_int(0, 1 << 28), 1 << 28),
                                    Real(rng.uniform(0, 0.5)));
        BigInt n(rng.uniform_int(-200, 200));
        FlowPoint q = map.advance_steps(map.advance_steps(p, n), -n);
        REQUIRE(q.x == p.x);
        REQUIRE(q.y == p.y);
        // the fiber coordinate is defined up to the ceiling's truncation band;
        // crossings during the round trip each contribute at most one band
        REQUIRE(mp::abs(q.s - p.s) < 300 * map.static_band() + Real("1e-25"));
    }
}

TEST_CASE("quotient_distance: zero, identification, brute-force oracle") {
    FrequencyPair pair = golden_pair();
    CeilingFunction fat = fat_ceiling();
    FlowMap map(&fat, &pair);

    FlowPoint p = map.canonical(Rational(2, 7), Rational(1, 5), Real(1) / 3);
    REQUIRE(quotient_distance(p, p, map) == 0);

    // (x, y, phi - eps) is close to (x + a, y + a', 0)
    Real eps("1e-9");
    Real h = map.phi(p.x, p.y);
    FlowPoint near_top{p.x, p.y, h - eps};
    FlowPoint wrapped{mod1(p.x + pair.alpha.value), mod1(p.y + pair.alpha_prime.value), Real(0)};
    REQUIRE(quotient_distance(near_top, wrapped, map) <= eps * 2);

    // brute force over seven shifts applied to q
    Rng rng(55);
    auto shift_many = [&](FlowPoint r, int j) {
        while (j > 0) {
            r.s -= map.phi(r.x, r.y);
            r.x = mod1(r.x + pair.alpha.value);
            r.y = mod1(r.y + pair.alpha_prime.value);
            --j;
        }
        while (j < 0) {
            r.x = mod1(r.x - pair.alpha.value);
            r.y = mod1(r.y - pair.alpha_prime.value);
            r.s += map.phi(r.x, r.y);
            ++j;
        }
        return r;
    };
    auto euclid = [&](const FlowPoint& a, const FlowPoint& b) {
        Real cx = to_real(circle_norm(a.x - b.x));
        Real cy = to_real(circle_norm(a.y - b.y));
        Real ds = a.s - b.s;
        return mp::sqrt(cx * cx + cy * cy + ds * ds);
    };
    for (int i = 0; i < 20; ++i) {
        FlowPoint a = map.canonical(Rational(rng.uniform_int(0, 1 << 20), 1 << 20),
                                    Rational(rng.uniform_int(0, 1 << 20), 1 << 20),
                                    Real(rng.uniform(0, 0.8)));
        FlowPoint b = map.canonical(Rational(rng.uniform_int(0, 1 << 20), 1 << 20),
                                    Rational(rng.uniform_int(0, 1 << 20), 1 << 20),
                                    Real(rng.uniform(0, 0.8)));
        Real brute = euclid(a, b);
        for (int j = -3; j <= 3; ++j) {
            Real d1 = euclid(a, shift_many(b, j));
            Real d2 = euclid(shift_many(a, j), b);
            if (d1 < brute) brute = d1;
            if (d2 < brute) brute = d2;
        }
        REQUIRE(mp::abs(quotient_distance(a, b, map) - brute) < 1e-40);
    }
}

TEST_CASE("sampler: determinism, rejection correctness, contract errors") {
    FrequencyPair pair = golden_pair();
    CeilingFunction fat = fat_ceiling();
    FlowMap map(&fat, &pair);

    MeasureSampler s;
    s.seed = 42;
    s.coord_bits = 128;
    auto a = sample_points(s, 50, map);
    auto b = sample_points(s, 50, map);
    REQUIRE(a.size() == 50);
    for (int i = 0; i < 50; ++i) {
        REQUIRE(a[static_cast<std::size_t>(i)].x == b[static_cast<std::size_t>(i)].x);
        REQUIRE(a[static_cast<std::size_t>(i)].s == b[static_cast<std::size_t>(i)].s);
    }
    for (const auto& p : a) {
        REQUIRE(p.s >= 0);
        REQUIRE(p.s < map.phi(p.x, p.y));
    }
    REQUIRE_THROWS_AS(sample_points(s, 0, map), std::invalid_argument);

    // base-Haar mode: empirical mean of phi over samples ~ 1 within 3 stderr
    MeasureSampler bh;
    bh.seed = 7;
    bh.mode = MeasureSampler::Mode::BaseHaar;
    bh.coord_bits = 128;
    auto pts = sample_points(bh, 4000, map);
    Real mean = 0, sq = 0;
    for (const auto& p : pts) {
        Real v = map.phi(p.x, p.y);
        mean += v;
        sq += v * v;
    }
    mean /= 4000;
    Real var = sq / 4000 - mean * mean;
    Real stderr_ = mp::sqrt(var / 4000);
    REQUIRE(mp::abs(mean - 1) <= 3 * stderr_);
}

TEST_CASE("orbit_recurrences: rotation recurrence at convergent denominators") {
    FrequencyPair pair = golden_pair();
    FlowMap map(&unit_ceiling(), &pair);
    FlowPoint p = map.canonical(Rational(1, 3), Rational(2, 7), Real(1) / 10);

    std::vector<BigInt> times{BigInt(0)};
    for (int n : {8, 12, 16, 20}) times.push_back(pair.alpha.table.q(n));
    auto events = orbit_recurrences(map, p, times, [](const BigInt&) { return Real(1) / 100; });
    REQUIRE(events[0].distance == 0);
    for (std::size_t i = 1; i < events.size(); ++i) {
        const BigInt& t = events[i].t;
        // distance ~ hypot(||t a||, ||t a'||): both tiny for shared-prefix pair
        Real dx = to_real(circle_norm(Rational(t) * pair.alpha.value));
        Real dy = to_real(circle_norm(Rational(t) * pair.alpha_prime.value));
        Real expect = mp::sqrt(dx * dx + dy * dy);
        REQUIRE(mp::abs(events[i].distance - expect) < 1e-20);
        REQUIRE(events[i].witness == (events[i].distance <= Real(1) / 100));
    }
    std::vector<BigInt> bad{BigInt(5), BigInt(3)};
    REQUIRE_THROWS_AS(orbit_recurrences(map, p, bad, [](const BigInt&) { return Real(1); }),
                      std::invalid_argument);
}
