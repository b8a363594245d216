#pragma once

// Batch fitting of analysis instances and the comparison tables built on top.
//
// fit_instances_parallel() spreads instances over OpenMP threads; the serial
// version is the reference it is tested against. Both produce identical
// results in instance order.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobrate/dist.hpp"
#include "lobrate/rates.hpp"
#include "lobrate/stats.hpp"

namespace lobrate::analysis {

struct FamilyFit {
    dist::FamilyTag family = dist::FamilyTag::Geometric;
    /// Empty when the estimator threw (the batch keeps going).
    std::optional<dist::FitResult> result;
    dist::TickCurve curve{};
    double l1_error = 0.0;
    std::string error;
};

struct InstanceFit {
    rates::BucketKey key;
    dist::TickCurve density{};
    std::vector<FamilyFit> fits;

    const FamilyFit* find(dist::FamilyTag family) const noexcept;
};

InstanceFit fit_instance(const rates::Instance& instance, std::span<const dist::FamilyTag> families,
                         const dist::FitOptions& options);

std::vector<InstanceFit> fit_instances_serial(std::span<const rates::Instance> instances,
                                              std::span<const dist::FamilyTag> families,
                                              const dist::FitOptions& options);

/// `threads` <= 0 uses the OpenMP default.
std::vector<InstanceFit> fit_instances_parallel(std::span<const rates::Instance> instances,
                                                std::span<const dist::FamilyTag> families,
                                                const dist::FitOptions& options, int threads = 0);

/// A set of families whose errors are normalised against each other.
struct ComparisonGroup {
    std::string name;
    std::vector<dist::FamilyTag> families;
};

/// {Geometric, Discrete Weibull, Beta-Binomial} and
/// {Exponential, Discrete Weibull, Power law}.
const std::vector<ComparisonGroup>& default_groups();

struct InstanceScore {
    rates::BucketKey key;
    std::string group;
    std::vector<dist::FamilyTag> families;
    std::vector<double> l1_errors;
    std::vector<double> nps;
};

/// Scores every instance on which all of a group's families fitted.
std::vector<InstanceScore> score(std::span<const InstanceFit> fits, std::span<const ComparisonGroup> groups);

/// Row label grouping instances the way the summary tables do: per
/// granularity and side, with the two sides pooled for monthly buckets.
std::string timestep_of(const rates::BucketKey& key);
/// Display order of timestep labels.
const std::vector<std::string>& timestep_order();

struct NpsSummaryRow {
    std::string timestep;
    std::string group;
    dist::FamilyTag family;
    stats::MeanSd nps;
    std::size_t instances = 0;
};
std::vector<NpsSummaryRow> summarise_nps(std::span<const InstanceScore> scores);

struct WelchRow {
    std::string timestep;
    std::string comparison;  // e.g. "dw_vs_bb"
    std::optional<stats::TestResult> result;
    std::string error;
};

/// Welch's test of the first family's NPS against the second's within each
/// group, per timestep.
std::vector<WelchRow> compare_nps(std::span<const InstanceScore> scores, stats::Tail tail,
                                  std::span<const std::pair<dist::FamilyTag, dist::FamilyTag>> pairs);

}  // namespace lobrate::analysis
