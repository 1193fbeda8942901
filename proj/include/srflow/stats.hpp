#pragma once

// Small statistics helpers: midrank Spearman correlation, Mann-Whitney
// rank-sum with normal approximation, medians and quartiles.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace srflow {

inline std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

// Spearman rank correlation (Pearson correlation of midranks).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("spearman: need two equal series of length >= 3");
    std::vector<double> rx = midranks(x), ry = midranks(y);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(rx.size());
    my /= static_cast<double>(ry.size());
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

struct RankSum {
    double u_statistic;   // Mann-Whitney U of the first sample
    double z;             // normal approximation with tie correction
    double p_two_sided;
};

inline RankSum mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t na = a.size(), nb = b.size();
    if (na < 2 || nb < 2) throw std::invalid_argument("mann_whitney: samples too small");
    std::vector<double> all;
    all.reserve(na + nb);
    all.insert(all.end(), a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::vector<double> ranks = midranks(all);
    double ra = 0;
    for (std::size_t i = 0; i < na; ++i) ra += ranks[i];
    double u = ra - static_cast<double>(na) * (na + 1) / 2.0;
    double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
    // tie correction
    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0;
    std::size_t i = 0;
    const std::size_t n = na + nb;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    double nn = static_cast<double>(n);
    double var = (static_cast<double>(na) * nb / 12.0) * ((nn + 1) - tie_sum / (nn * (nn - 1)));
    RankSum out;
    out.u_statistic = u;
    if (var <= 0) {
        out.z = 0;
        out.p_two_sided = 1;
        return out;
    }
    double cc = (u > mu) ? -0.5 : (u < mu ? 0.5 : 0.0);  // continuity correction
    out.z = (u - mu + cc) / std::sqrt(var);
    out.p_two_sided = std::erfc(std::fabs(out.z) / std::sqrt(2.0));
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

struct Quartiles {
    double q1, q2, q3;
};

inline Quartiles quartiles(std::vector<double> v) {
    if (v.size() < 4) throw std::invalid_argument("quartiles: need >= 4 values");
    std::sort(v.begin(), v.end());
    auto at = [&](double f) {
        double pos = f * (static_cast<double>(v.size()) - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= v.size()) return v.back();
        return v[lo] * (1 - frac) + v[lo + 1] * frac;
    };
    return {at(0.25), at(0.5), at(0.75)};
}

}  // namespace srflow
