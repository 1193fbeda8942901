#pragma once

// End-to-end statistical experiments: the recurrence census over sampled
// points, mixing correlation decay under the flow-invariant measure, and
// the structured-vs-random localization contrast.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srflow/flow.hpp"
#include "srflow/parallel.hpp"
#include "srflow/schrodinger.hpp"
#include "srflow/stats.hpp"

namespace srflow {

// ---------------------------------------------------------------------------
// Recurrence census.

struct CensusOptions {
    std::vector<int> levels;   // literal level indices to census C_n membership
    int samples = 10000;
    std::uint64_t seed = 1;
    unsigned coord_bits = 0;   // 0: derived from the pair's top denominator
    Real radius{"1e-4"};       // witness radius at the recurrence times
    int threads = 0;
};

struct CensusLevelSummary {
    int n = 0;
    bool active = false;       // has a built layer (witness distances computed)
    double exact_length = 0;   // |C_n| = max(0, 1/n - 2/n^2)
    double empirical = 0;
    double stderr_exact = 0;   // sqrt(p(1-p)/N) at the exact p
    int witnesses = 0;         // distance <= radius at t_n = q_n q'_n
};

struct RecurrenceCensus {
    std::vector<CensusLevelSummary> levels;
    int samples = 0;
    double witness_fraction = 0;   // fraction of samples with >= 1 witness
    double empirical_union = 0;    // fraction in >= 1 censused C_n
    double predicted_union = 0;    // 1 - prod(1 - |C_n|): independence heuristic
    std::vector<double> alpha_hats;  // log(-log d)/log t per witness
    Real radius{0};
};

inline RecurrenceCensus recurrence_census(const FlowMap& map, const CensusOptions& opt) {
    if (opt.samples < 100)
        throw std::invalid_argument("recurrence_census: need at least 100 samples");
    const FrequencyPair& pair = map.pair();
    const CeilingFunction& ceiling = map.ceiling();

    MeasureSampler sampler;
    sampler.seed = opt.seed;
    sampler.mode = MeasureSampler::Mode::ProductOnMphi;
    unsigned bits = opt.coord_bits;
    if (bits == 0) {
        std::size_t need = 256;
        for (const auto& xl : ceiling.x_layers) need = std::max(need, bit_length(xl.q) + 192);
        bits = static_cast<unsigned>(need);
    }
    sampler.coord_bits = bits;
    std::vector<FlowPoint> pts = sample_points(sampler, opt.samples, map);

    RecurrenceCensus out;
    out.samples = opt.samples;
    out.radius = opt.radius;

    struct LevelInfo {
        int n;
        BigInt q;
        bool active;
        BigInt t;
    };
    std::vector<LevelInfo> infos;
    for (int n : opt.levels) {
        if (n < 1 || n > pair.alpha.table.max_index())
            throw std::invalid_argument("recurrence_census: level outside the convergent table");
        LevelInfo li{n, pair.q(n), false, BigInt(0)};
        if (n >= ceiling.n0 &&
            n < ceiling.n0 + static_cast<int>(ceiling.x_layers.size()) &&
            n <= pair.alpha_prime.table.max_index()) {
            li.active = true;
            li.t = pair.q(n) * pair.q_prime(n);
        }
        infos.push_back(std::move(li));
    }

    const std::size_t L = infos.size();
    std::vector<std::vector<char>> member(L, std::vector<char>(pts.size(), 0));
    std::vector<std::vector<double>> dist(L, std::vector<double>(pts.size(), -1));
    std::vector<std::vector<char>> witness(L, std::vector<char>(pts.size(), 0));

    parallel_for(pts.size(), [&](std::size_t s) {
        const FlowPoint& p = pts[s];
        for (std::size_t li = 0; li < L; ++li) {
            const LevelInfo& info = infos[li];
            Rational u = mod1(Rational(info.q) * p.x);
            int n = info.n;
            Rational lo(1, n * n);
            Rational hi = Rational(1, n) - Rational(1, n * n);
            bool in = (u >= lo && u <= hi);
            member[li][s] = in ? 1 : 0;
            if (info.active) {
                FlowPoint image = map.advance_steps(p, info.t);
                Real d = quotient_distance(p, image, map);
                dist[li][s] = d.convert_to<double>();
                if (d <= opt.radius) witness[li][s] = 1;
            }
        }
    }, opt.threads);

    double pred = 1.0;
    for (std::size_t li = 0; li < L; ++li) {
        CensusLevelSummary sum;
        sum.n = infos[li].n;
        sum.active = infos[li].active;
        double len = 1.0 / sum.n - 2.0 / (static_cast<double>(sum.n) * sum.n);
        sum.exact_length = std::max(0.0, len);
        int cnt = 0, wits = 0;
        for (std::size_t s = 0; s < pts.size(); ++s) {
            cnt += member[li][s];
            wits += witness[li][s];
        }
        sum.empirical = static_cast<double>(cnt) / static_cast<double>(pts.size());
        sum.stderr_exact =
            std::sqrt(sum.exact_length * (1 - sum.exact_length) / static_cast<double>(pts.size()));
        sum.witnesses = wits;
        out.levels.push_back(sum);
        pred *= 1.0 - sum.exact_length;
    }
    out.predicted_union = 1.0 - pred;

    int any_member = 0, any_witness = 0;
    for (std::size_t s = 0; s < pts.size(); ++s) {
        bool m = false, w = false;
        for (std::size_t li = 0; li < L; ++li) {
            m = m || member[li][s];
            if (witness[li][s]) {
                w = true;
                double d = dist[li][s];
                if (d > 0 && d < 1) {
                    double t_log = mp::log(Real(Rational(infos[li].t))).convert_to<double>();
                    out.alpha_hats.push_back(std::log(-std::log(d)) / t_log);
                }
            }
        }
        any_member += m ? 1 : 0;
        any_witness += w ? 1 : 0;
    }
    out.empirical_union = static_cast<double>(any_member) / static_cast<double>(pts.size());
    out.witness_fraction = static_cast<double>(any_witness) / static_cast<double>(pts.size());
    return out;
}

// ---------------------------------------------------------------------------
// Correlation decay under the flow-invariant product measure on M_phi.

struct CorrelationOptions {
    int grid_x = 48;
    int grid_y = 8;
    int s_nodes = 4;
    double converge_tol = 0.02;
    int threads = 0;
};

struct CorrelationPoint {
    BigInt t;
    double cor = 0;          // refined-grid value
    double cor_coarse = 0;
    bool converged = false;
};

struct CorrelationSeries {
    std::vector<CorrelationPoint> points;
    double cor0 = 0;             // covariance of (f, g) at t = 0
    double trend_spearman = 0;   // Spearman of cor vs time order
};

namespace detail {

struct CorrelationGrid {
    std::vector<Rational> xs, ys;
    std::vector<Real> phi;      // phi at each (x,y)
    std::vector<Real> layers;   // S-layer base value L(t, x, y) placeholder per time
    Real phi_sum{0};
    int s_nodes = 4;
};

inline double observable_mean(const Observable& f, const CorrelationGrid& g) {
    // mean under dz ds / integral(phi): fiber integral via midpoint s-nodes
    Real acc = 0;
    std::size_t nodes = g.xs.size();
    for (std::size_t i = 0; i < nodes; ++i) {
        Real fiber = 0;
        for (int k = 0; k < g.s_nodes; ++k) {
            Real s = g.phi[i] * (2 * k + 1) / (2 * g.s_nodes);
            fiber += Real(f.eval(FlowPoint{g.xs[i], g.ys[i], s}));
        }
        acc += fiber * g.phi[i] / g.s_nodes;
    }
    return (acc / g.phi_sum).convert_to<double>();
}

}  // namespace detail

inline double correlation_at(const FlowMap& map, const Observable& f, const Observable& g,
                             const BigInt& t, int grid_x, int grid_y, int s_nodes, int threads) {
    const FrequencyPair& pair = map.pair();
    const BirkhoffEvaluator& ev = map.birkhoff();

    detail::CorrelationGrid grid;
    grid.s_nodes = s_nodes;
    for (int i = 0; i < grid_x; ++i)
        for (int j = 0; j < grid_y; ++j) {
            grid.xs.push_back(Rational(2 * i + 1, 2 * grid_x));
            grid.ys.push_back(Rational(2 * j + 1, 2 * grid_y));
        }
    std::size_t nodes = grid.xs.size();
    grid.phi.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) grid.phi[i] = map.phi(grid.xs[i], grid.ys[i]);
    grid.phi_sum = 0;
    for (const Real& v : grid.phi) grid.phi_sum += v;

    double mean_f = detail::observable_mean(f, grid);
    double mean_g = detail::observable_mean(g, grid);

    // The shared-L shortcut needs |dL/dN| = sup(layers) tiny enough that the
    // fiber count is exact: |N - t| <= t sup, so the L-drift is t sup^2.
    Real sup = map.ceiling().sup_layers();
    bool fast = sup < Real("1e-3") && Real(Rational(t)) * sup * sup < Real("1e-6");

    std::vector<double> fiber_cov(nodes, 0.0);
    parallel_for(nodes, [&](std::size_t i) {
        const Rational& x = grid.xs[i];
        const Rational& y = grid.ys[i];
        Real h = grid.phi[i];
        LayerSum L;
        if (fast) L = ev.sm_layers(t, x, y);
        double acc = 0;
        for (int k = 0; k < s_nodes; ++k) {
            Real s = h * (2 * k + 1) / (2 * s_nodes);
            FlowPoint image;
            if (fast) {
                // N = t + floor(s - L), residual r = (s - L) - floor(s - L)
                Real sl = s - L.value;
                BigInt d = floor_to_bigint(sl);
                BigInt N = t + d;
                Real r = sl - Real(Rational(d));
                image.x = mod1(x + Rational(N) * pair.alpha.value);
                image.y = mod1(y + Rational(N) * pair.alpha_prime.value);
                Real hi = map.phi(image.x, image.y);
                if (r >= hi) {  // rare sliver when phi(image) < 1
                    image.x = mod1(image.x + pair.alpha.value);
                    image.y = mod1(image.y + pair.alpha_prime.value);
                    r -= hi;
                }
                image.s = r;
            } else {
                image = map.advance_split(t, Real(0), FlowPoint{x, y, s});
            }
            acc += f.eval(image) * g.eval(FlowPoint{x, y, s});
        }
        fiber_cov[i] = acc;
    }, threads);

    Real total = 0;
    for (std::size_t i = 0; i < nodes; ++i)
        total += Real(fiber_cov[i]) * grid.phi[i] / s_nodes;
    double mixed = (total / grid.phi_sum).convert_to<double>();
    return std::fabs(mixed - mean_f * mean_g);
}

inline CorrelationSeries correlation_decay(const FlowMap& map, const Observable& f,
                                           const Observable& g, const std::vector<BigInt>& times,
                                           const CorrelationOptions& opt = {}) {
    CorrelationSeries out;
    out.cor0 =
        correlation_at(map, f, g, BigInt(0), opt.grid_x, opt.grid_y, opt.s_nodes, opt.threads);
    std::vector<double> series;
    std::vector<double> order;
    for (std::size_t i = 0; i < times.size(); ++i) {
        CorrelationPoint pt;
        pt.t = times[i];
        pt.cor_coarse = correlation_at(map, f, g, times[i], opt.grid_x, opt.grid_y, opt.s_nodes,
                                       opt.threads);
        pt.cor = correlation_at(map, f, g, times[i], 2 * opt.grid_x, opt.grid_y, 2 * opt.s_nodes,
                                opt.threads);
        pt.converged = std::fabs(pt.cor - pt.cor_coarse) <= opt.converge_tol;
        series.push_back(pt.cor);
        order.push_back(static_cast<double>(i));
        out.points.push_back(std::move(pt));
    }
    if (series.size() >= 3) out.trend_spearman = spearman(order, series);
    return out;
}

// ---------------------------------------------------------------------------
// Localization contrast: structured traces against variance-matched iid
// controls, compared through per-trace median localization metrics.

struct ContrastOptions {
    int samples = 20;
    int half_size = 200;       // truncation (2N+1) x (2N+1)
    std::uint64_t seed = 1;
    double edge_mass_max = 1e-3;
    double disorder_scale = 1.0;  // control deviation multiplier
    int threads = 0;
    unsigned coord_bits = 0;
};

struct ContrastReport {
    std::vector<double> structured_ipr, control_ipr;      // per-base-point medians
    std::vector<double> structured_decay, control_decay;
    double structured_median_ipr = 0, control_median_ipr = 0;
    Quartiles structured_quartiles{0, 0, 0}, control_quartiles{0, 0, 0};
    RankSum ipr_rank{0, 0, 1}, decay_rank{0, 0, 1};
    int kept_structured = 0, kept_control = 0;  // eigenvectors surviving the edge filter
};

namespace detail {

struct TraceStats {
    double median_ipr = -1;
    double median_decay = 0;
    int kept = 0;
};

inline TraceStats spectrum_stats(const PotentialTrace& t, int half_size, double edge_max) {
    Spectrum s = truncated_spectrum(t, half_size, true);
    std::vector<double> iprs, decays;
    for (const auto& u : s.eigenvectors) {
        LocalizationMetrics m = localization_metrics(u);
        if (m.edge_mass >= edge_max) continue;
        iprs.push_back(m.ipr);
        decays.push_back(m.decay_rate);
    }
    TraceStats st;
    st.kept = static_cast<int>(iprs.size());
    if (!iprs.empty()) {
        st.median_ipr = median(iprs);
        st.median_decay = median(decays);
    }
    return st;
}

}  // namespace detail

inline ContrastReport localization_contrast(const FlowMap& map, const Observable& obs,
                                            const ContrastOptions& opt) {
    if (opt.samples < 4)
        throw std::invalid_argument("localization_contrast: need at least 4 samples");
    if (opt.half_size < 8)
        throw std::invalid_argument("localization_contrast: half_size too small");

    MeasureSampler sampler;
    sampler.seed = opt.seed;
    unsigned bits = opt.coord_bits;
    if (bits == 0) {
        std::size_t need = 256;
        for (const auto& xl : map.ceiling().x_layers) need = std::max(need, bit_length(xl.q) + 192);
        bits = static_cast<unsigned>(need);
    }
    sampler.coord_bits = bits;
    std::vector<FlowPoint> pts = sample_points(sampler, opt.samples, map);

    std::vector<detail::TraceStats> st_structured(pts.size()), st_control(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        PotentialTrace trace = sample_potential(map, obs, pts[i], opt.half_size);
        st_structured[i] = detail::spectrum_stats(trace, opt.half_size, opt.edge_mass_max);

        // control: iid uniform matched to this trace's mean and variance
        double mean = 0, var = 0;
        for (double v : trace.v) mean += v;
        mean /= static_cast<double>(trace.v.size());
        for (double v : trace.v) var += (v - mean) * (v - mean);
        var /= static_cast<double>(trace.v.size());
        double halfwidth = std::sqrt(3.0 * var) * opt.disorder_scale;
        Rng rng(opt.seed * 7919 + i + 1);
        std::vector<double> cv(trace.v.size());
        for (auto& v : cv) v = mean + rng.uniform(-halfwidth, halfwidth);
        PotentialTrace control = PotentialTrace::from_samples(std::move(cv));
        st_control[i] = detail::spectrum_stats(control, opt.half_size, opt.edge_mass_max);
    }, opt.threads);

    ContrastReport rep;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (st_structured[i].median_ipr >= 0) {
            rep.structured_ipr.push_back(st_structured[i].median_ipr);
            rep.structured_decay.push_back(st_structured[i].median_decay);
            rep.kept_structured += st_structured[i].kept;
        }
        if (st_control[i].median_ipr >= 0) {
            rep.control_ipr.push_back(st_control[i].median_ipr);
            rep.control_decay.push_back(st_control[i].median_decay);
            rep.kept_control += st_control[i].kept;
        }
    }
    if (rep.structured_ipr.size() >= 4 && rep.control_ipr.size() >= 4) {
        rep.structured_median_ipr = median(rep.structured_ipr);
        rep.control_median_ipr = median(rep.control_ipr);
        rep.structured_quartiles = quartiles(rep.structured_ipr);
        rep.control_quartiles = quartiles(rep.control_ipr);
        rep.ipr_rank = mann_whitney(rep.structured_ipr, rep.control_ipr);
        rep.decay_rank = mann_whitney(rep.structured_decay, rep.control_decay);
    }
    return rep;
}

}  // namespace srflow
