#pragma once

// Symmetric tridiagonal eigensolver: QL with implicit Wilkinson shifts
// (tql2 lineage), eigenvalues ascending, optional eigenvectors.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace srflow {

struct TridiagEigen {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // vectors[i] is the i-th eigenvector
};

inline TridiagEigen tridiag_eigen(std::vector<double> d, std::vector<double> e,
                                  bool want_vectors = true) {
    const std::size_t n = d.size();
    if (n == 0) throw std::invalid_argument("tridiag_eigen: empty matrix");
    if (e.size() != n - 1 && !(n == 1 && e.empty()))
        throw std::invalid_argument("tridiag_eigen: subdiagonal must have n-1 entries");
    e.push_back(0.0);

    std::vector<std::vector<double>> z;
    if (want_vectors) {
        z.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) z[i][i] = 1.0;  // z[row][col]
    }

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 64) throw std::runtime_error("tridiag_eigen: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (want_vectors) {
                        for (std::size_t k = 0; k < n; ++k) {
                            f = z[k][i + 1];
                            z[k][i + 1] = s * z[k][i] + c * f;
                            z[k][i] = c * z[k][i] - s * f;
                        }
                    }
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    // sort ascending, carrying vectors along
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    TridiagEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = d[order[i]];
    if (want_vectors) {
        out.vectors.assign(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) out.vectors[i][k] = z[k][order[i]];
    }
    return out;
}

}  // namespace srflow
