#include "lobrate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "lobrate/error.hpp"

namespace lobrate::stats {

double l1_error(std::span<const double> observed, std::span<const double> fitted) {
    if (observed.size() != fitted.size()) {
        throw Error(Errc::LengthMismatch, "l1_error on vectors of length " + std::to_string(observed.size()) +
                                              " and " + std::to_string(fitted.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) sum += std::fabs(observed[i] - fitted[i]);
    return sum;
}

std::vector<double> nps(std::span<const double> errors) {
    std::vector<double> out(errors.size(), 1.0);
    if (errors.empty()) return out;
    const double best = *std::min_element(errors.begin(), errors.end());
    if (best <= 0.0) {
        // A perfect fit: it scores 1, anything imperfect is unboundedly worse.
        for (std::size_t i = 0; i < errors.size(); ++i) {
            out[i] = errors[i] <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        }
        return out;
    }
    for (std::size_t i = 0; i < errors.size(); ++i) out[i] = errors[i] / best;
    return out;
}

MeanSd mean_sd(std::span<const double> xs) {
    MeanSd out;
    if (xs.empty()) return out;
    const double n = static_cast<double>(xs.size());
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
    return out;
}

double student_t_two_tailed(double t, double df) {
    if (!(df > 0.0)) throw Error(Errc::DomainError, "student t needs df > 0");
    if (std::isinf(t)) return 0.0;
    return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b, Tail tail) {
    if (a.size() < 2 || b.size() < 2) {
        throw Error(Errc::InsufficientData, "welch_t_test needs at least two observations per sample");
    }
    const auto sa = mean_sd(a);
    const auto sb = mean_sd(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sa.sd * sa.sd / na;
    const double vb = sb.sd * sb.sd / nb;

    TestResult r;
    if (va + vb == 0.0) {
        if (sa.mean != sb.mean) {
            throw Error(Errc::ZeroVariance, "both samples are constant with different means");
        }
        r.statistic = 0.0;
        r.degrees_of_freedom = na + nb - 2.0;
        r.p_value = tail == Tail::Two ? 1.0 : 0.5;
        r.flagged = true;
        return r;
    }
    r.statistic = (sa.mean - sb.mean) / std::sqrt(va + vb);
    r.degrees_of_freedom = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    const double two = student_t_two_tailed(r.statistic, r.degrees_of_freedom);
    if (tail == Tail::Two) {
        r.p_value = two;
    } else {
        r.p_value = r.statistic < 0.0 ? 0.5 * two : 1.0 - 0.5 * two;
    }
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

double chi_square_sf(double x, double df) {
    if (!(df > 0.0)) throw Error(Errc::DomainError, "chi-square needs df > 0");
    if (x <= 0.0) return 1.0;
    return reg_inc_gamma_upper(0.5 * df, 0.5 * x);
}

TestResult chi_square_uniformity_counts(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw Error(Errc::InsufficientData, "chi-square needs at least two categories");
    const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) throw Error(Errc::AllZero, "every observed count is zero");
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    TestResult r;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        r.statistic += d * d / expected;
    }
    r.degrees_of_freedom = static_cast<double>(counts.size() - 1);
    r.p_value = std::clamp(chi_square_sf(r.statistic, r.degrees_of_freedom), 0.0, 1.0);
    return r;
}

TestResult chi_square_uniformity(std::span<const double> ratios) {
    if (ratios.size() != static_cast<std::size_t>(kCancelTicks)) {
        throw Error(Errc::LengthMismatch, "chi_square_uniformity expects 10 ratios, got " +
                                              std::to_string(ratios.size()));
    }
    std::array<std::uint64_t, kCancelTicks> counts{};
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] >= 0.0 && ratios[i] <= 1.0)) {
            throw Error(Errc::DomainError, "cancellation ratio outside [0, 1]");
        }
        counts[i] = static_cast<std::uint64_t>(std::round(100.0 * ratios[i]));
    }
    return chi_square_uniformity_counts(counts);
}

}  // namespace lobrate::stats
