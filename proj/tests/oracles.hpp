#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's estimators.

#include <array>
#include <cmath>
#include <random>

namespace oracle {

/// P(X = x) = q^((x-1)^beta) - q^(x^beta), straight from the definition.
inline double dw_pmf(double q, double beta, int x) {
    return std::pow(q, std::pow(x - 1.0, beta)) - std::pow(q, std::pow(static_cast<double>(x), beta));
}

/// Weighted log-likelihood; `truncated` renormalises the pmf over ticks 1..15.
inline double dw_loglik(const std::array<double, 15>& w, double q, double beta, bool truncated = false) {
    double z = 0.0;
    if (truncated) {
        for (int i = 1; i <= 15; ++i) z += dw_pmf(q, beta, i);
    }
    double s = 0.0;
    double total = 0.0;
    for (int i = 1; i <= 15; ++i) {
        if (w[i - 1] > 0) {
            s += w[i - 1] * std::log(dw_pmf(q, beta, i));
            total += w[i - 1];
        }
    }
    return truncated ? s - total * std::log(z) : s;
}

struct GridPoint {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
};

/// Exhaustive scan of the DW likelihood on a regular (q, beta) grid.
inline GridPoint dw_grid_mle(const std::array<double, 15>& w, double q_lo, double q_hi, double b_lo, double b_hi,
                             double step, bool truncated = false) {
    GridPoint best{0, 0, -INFINITY};
    const int nq = static_cast<int>(std::lround((q_hi - q_lo) / step));
    const int nb = static_cast<int>(std::lround((b_hi - b_lo) / step));
    for (int i = 0; i <= nq; ++i) {
        const double q = q_lo + i * step;
        for (int j = 0; j <= nb; ++j) {
            const double b = b_lo + j * step;
            const double ll = dw_loglik(w, q, b, truncated);
            if (ll > best.value) best = {q, b, ll};
        }
    }
    return best;
}

/// Inverse-CDF draw from DW(q, beta): smallest x with q^(x^beta) <= u.
inline int dw_draw(std::mt19937_64& rng, double q, double beta) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(rng);
    while (u <= 0.0) u = u01(rng);
    const double r = std::log(u) / std::log(q);
    const int x = static_cast<int>(std::ceil(std::pow(r, 1.0 / beta)));
    return x < 1 ? 1 : x;
}

/// Per-tick counts (ticks 1..15) of n DW draws; draws beyond 15 are dropped.
inline std::array<double, 15> dw_sample_density(std::uint64_t seed, double q, double beta, int n) {
    std::mt19937_64 rng(seed);
    std::array<double, 15> c{};
    double kept = 0;
    for (int k = 0; k < n; ++k) {
        const int x = dw_draw(rng, q, beta);
        if (x <= 15) {
            c[x - 1] += 1;
            kept += 1;
        }
    }
    for (auto& v : c) v /= kept;
    return c;
}

inline double pow_rss(const std::array<double, 15>& w, double k, double alpha) {
    double s = 0.0;
    for (int i = 1; i <= 15; ++i) {
        const double r = w[i - 1] - k * std::pow(static_cast<double>(i), -alpha);
        s += r * r;
    }
    return s;
}

}  // namespace oracle
