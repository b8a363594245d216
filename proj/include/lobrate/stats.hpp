#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lobrate/special.hpp"
#include "lobrate/types.hpp"

namespace lobrate::stats {

struct TestResult {
    double statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    /// Set when a convention, not the data, decided the result
    /// (e.g. two identical constant samples).
    bool flagged = false;
};

enum class Tail {
    Two,
    /// Alternative: mean of sample a is below mean of sample b.
    Less,
};

/// Sum of absolute differences; both inputs must have the same length.
double l1_error(std::span<const double> observed, std::span<const double> fitted);

/// Each error divided by the smallest one. All-zero errors score 1.
std::vector<double> nps(std::span<const double> errors);

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b, Tail tail = Tail::Two);

/// Two-tailed P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_tailed(double t, double df);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double df);

/// Rounds ratios x100 (half away from zero) into counts and tests them
/// against equal expected counts with 9 degrees of freedom.
TestResult chi_square_uniformity(std::span<const double> ratios);
/// Same test on integer counts directly.
TestResult chi_square_uniformity_counts(std::span<const std::uint64_t> counts);

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n - 1); 0 for n < 2
};
MeanSd mean_sd(std::span<const double> xs);

}  // namespace lobrate::stats
