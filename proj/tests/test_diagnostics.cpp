#include <catch2/catch_amalgamated.hpp>

#include "srflow/diagnostics.hpp"
#include "srflow/verify.hpp"

using namespace srflow;

namespace {

const BumpKernel& kernel() {
    static BumpKernel k;
    return k;
}

// Interlaced two-level pair at laptop scale: run-up factor 4, cubic active
// levels 17 and 18.
const FrequencyPair& mini_pair() {
    static FrequencyPair pair = design_pair(GrowthSchedule::composite(BigInt(4), 3, 17), 2,
                                            PartialQuotients{{0, 2}}, PartialQuotients{{0, 2}},
                                            17);
    return pair;
}

const CeilingFunction& mini_ceiling() {
    static CeilingFunction c = [] {
        XLayerBuildOptions opt;
        opt.tail_target = Real("1e-13");
        AmplitudeSchedule amps = AmplitudeSchedule::poly();
        std::vector<XLayer> xs;
        std::vector<TrigPolynomial> ys;
        const FrequencyPair& pair = mini_pair();
        for (int n = pair.n0; n <= pair.last_active(); ++n) {
            xs.push_back(build_x_layer(n, pair.q(n), amps.value(n, pair.q(n)), kernel(), opt));
            ys.push_back(build_y_layer(n, pair.q_prime(n), amps.value(n, pair.q_prime(n))));
        }
        return assemble_ceiling(std::move(xs), std::move(ys), pair.n0);
    }();
    return c;
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

const CeilingFunction& unit_ceiling() {
    static CeilingFunction c = assemble_ceiling({}, {}, 17);
    return c;
}

}  // namespace

TEST_CASE("stats: spearman, rank-sum, quartiles") {
    std::vector<double> inc{1, 2, 3, 4, 5, 6}, dec{9, 7, 5, 3, 2, 1}, idx{0, 1, 2, 3, 4, 5};
    REQUIRE(spearman(idx, inc) == 1.0);
    REQUIRE(spearman(idx, dec) == -1.0);

    Rng rng(17);
    std::vector<double> a, b, c;
    for (int i = 0; i < 40; ++i) {
        a.push_back(rng.uniform01());
        b.push_back(rng.uniform01());
        c.push_back(rng.uniform01() + 3.0);  // clearly separated
    }
    REQUIRE(mann_whitney(a, b).p_two_sided > 0.001);
    REQUIRE(mann_whitney(a, c).p_two_sided < 1e-8);

    Quartiles q = quartiles({1, 2, 3, 4, 5, 6, 7, 8, 9});
    REQUIRE(q.q2 == 5.0);
    REQUIRE(q.q1 == 3.0);
    REQUIRE(q.q3 == 7.0);
}

TEST_CASE("verify_properties: two-level mini construction passes (1)-(6)") {
    const FrequencyPair& pair = mini_pair();
    const CeilingFunction& ceil = mini_ceiling();
    REQUIRE(check_interlacing(pair).ok);

    VerifyOptions opt;
    opt.r1_tol = Real("1e-9");
    opt.grid = 96;
    Prop36Report rep = verify_properties(ceil, pair, opt);
    for (const auto& e : rep.entries) {
        INFO("property " << e.property << " level " << e.level << " r " << e.r << " note "
                         << e.note);
        REQUIRE(e.pass);
    }
    // property 1 margins are exactly zero defects
    REQUIRE(rep.find(1, 17)->measured == 0);
    REQUIRE(rep.find(1, 18)->measured == 0);
    // empty lower sums at the first level
    REQUIRE(rep.find(5, 17)->infinite_margin);
    REQUIRE(rep.find(6, 17)->infinite_margin);
    REQUIRE_FALSE(rep.find(5, 18)->infinite_margin);
}

TEST_CASE("recurrence_census: interval measures and witness fraction") {
    const FrequencyPair& pair = mini_pair();
    const CeilingFunction& ceil = mini_ceiling();
    FlowMap map(&ceil, &pair);

    CensusOptions opt;
    opt.levels = {2, 3, 17, 18};
    opt.samples = 1500;
    opt.seed = 20240810;
    opt.radius = Real("1e-4");
    RecurrenceCensus census = recurrence_census(map, opt);

    REQUIRE(census.levels.size() == 4);
    for (const auto& lvl : census.levels) {
        INFO("level " << lvl.n);
        REQUIRE(std::fabs(lvl.empirical - lvl.exact_length) <=
                3 * lvl.stderr_exact + 1e-12);
    }
    REQUIRE_FALSE(census.levels[0].active);
    REQUIRE(census.levels[2].active);
    REQUIRE(census.levels[3].active);

    // witnesses only come from the active-level inert windows; the union of
    // those windows has measure ~ 4/17 + 4/18 with margins and grazers
    REQUIRE(census.witness_fraction > 0.30);
    REQUIRE(census.witness_fraction < 0.65);
    REQUIRE(!census.alpha_hats.empty());

    // independence heuristic vs empirical union of C_n memberships
    REQUIRE(std::fabs(census.empirical_union - census.predicted_union) < 0.05);
}

TEST_CASE("correlation: constants vanish and the rotation control is exact") {
    FrequencyPair pair = golden_pair();
    FlowMap map(&unit_ceiling(), &pair);

    Observable one{[](const FlowPoint&) { return 1.0; }, 1.0, 0.0, "one"};
    Observable cosx{[](const FlowPoint& p) { return std::cos(2 * M_PI * unit_coord(p.x)); },
                    1.0, 2 * M_PI, "cosx"};

    CorrelationOptions opt;
    opt.grid_x = 32;
    opt.grid_y = 4;
    opt.s_nodes = 2;

    REQUIRE(correlation_at(map, one, one, BigInt(7), 32, 4, 2, 0) < 1e-12);

    // phi == 1: N(t,s,z) = t for integer t, so cor(t) = |cos(2 pi t alpha)| / 2
    for (long t : {3L, 21L, 144L}) {
        double got = correlation_at(map, cosx, cosx, BigInt(t), 64, 2, 2, 0);
        double want =
            std::fabs(std::cos(2 * M_PI * unit_coord(mod1(Rational(t) * pair.alpha.value)))) / 2;
        REQUIRE(std::fabs(got - want) < 1e-6);
    }
}

TEST_CASE("correlation: dispersion kills correlations on the mini pair") {
    const FrequencyPair& pair = mini_pair();
    const CeilingFunction& ceil = mini_ceiling();
    FlowMap map(&ceil, &pair);
    Observable cosx{[](const FlowPoint& p) { return std::cos(2 * M_PI * unit_coord(p.x)); },
                    1.0, 2 * M_PI, "cosx"};

    // dispersion onset: L-range ~ t A_17 sup|p|; pick t with range >> 1
    Real a17 = ceil.x_layers[0].amplitude;
    BigInt t_disp = floor_to_bigint(Real(1e6) / a17);
    double late = correlation_at(map, cosx, cosx, t_disp, 48, 4, 2, 0);
    REQUIRE(late < 0.05);

    // far below onset the flow is still rigid: value matches the rotation
    BigInt t_rigid(1000);
    double early = correlation_at(map, cosx, cosx, t_rigid, 48, 4, 2, 0);
    double want = std::fabs(std::cos(
                      2 * M_PI * unit_coord(mod1(Rational(t_rigid) * pair.alpha.value)))) / 2;
    REQUIRE(std::fabs(early - want) < 1e-3);
}

TEST_CASE("localization_contrast: disorder direction and report shape") {
    FrequencyPair pair = golden_pair();
    FlowMap map(&unit_ceiling(), &pair);
    Observable v1 = observable_smooth();

    ContrastOptions strong;
    strong.samples = 6;
    strong.half_size = 60;
    strong.seed = 5;
    strong.disorder_scale = 6.0;
    strong.coord_bits = 128;
    ContrastReport rs = localization_contrast(map, v1, strong);

    ContrastOptions weak = strong;
    weak.disorder_scale = 0.4;
    ContrastReport rw = localization_contrast(map, v1, weak);

    REQUIRE(rs.control_ipr.size() == 6);
    REQUIRE(rw.control_ipr.size() == 6);
    // stronger disorder localizes harder: larger control IPR
    REQUIRE(rs.control_median_ipr > rw.control_median_ipr);

    // structured population recorded with rank statistics
    REQUIRE(rs.structured_ipr.size() == 6);
    REQUIRE(rs.ipr_rank.p_two_sided >= 0);
    REQUIRE_THROWS_AS(localization_contrast(map, v1, ContrastOptions{2, 60, 1, 1e-3, 1.0, 0, 128}),
                      std::invalid_argument);
}
