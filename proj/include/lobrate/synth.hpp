#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lobrate/dist.hpp"
#include "lobrate/feed.hpp"
#include "lobrate/rates.hpp"

namespace lobrate::synth {

enum class CancelFraction {
    Full,             // Delete the whole order
    UniformFraction,  // Cancel a uniform 1..remaining shares
};

struct SynthSpec {
    std::uint64_t seed = 1;
    rates::Date start_date{std::chrono::year{2017}, std::chrono::month{8}, std::chrono::day{1}};
    /// Trading days; weekends are skipped.
    std::uint16_t days = 40;
    std::uint32_t orders_per_day = 2500;
    /// Tick distribution of new limit orders, indexed by Side.
    std::array<dist::ModelFamily, 2> arrival_model{dist::DiscreteWeibull{0.8, 1.2}, dist::DiscreteWeibull{0.8, 1.2}};
    /// Chance that each cancellable resting order is canceled after an arrival.
    double cancel_probability = 0.02;
    CancelFraction cancel_fraction = CancelFraction::Full;
    /// Chance that an arrival is sent as a Replace of a resting order.
    double replace_probability = 0.0;
    Price tick_size = 1;
    /// Best bid sits one tick below, best ask one tick above.
    Price initial_mid = 1215;
    std::uint32_t lot_size = 100;
    std::uint32_t max_lots = 10;
    /// Size of the resting order seeded at each of the first 15 levels per side.
    std::uint32_t anchor_quantity = 1000;
    std::uint16_t messages_per_frame = 500;
};

/// Throws SpecError on an invalid spec.
void validate(const SynthSpec& spec);

/// Tallies of exactly what the generator emitted, in every granularity.
struct GroundTruth {
    rates::TallyStore tallies;
    std::uint64_t arrivals = 0;
    std::uint64_t cancels = 0;
    std::uint64_t replaces = 0;
};

struct SynthOutput {
    std::vector<std::byte> stream;
    GroundTruth truth;
};

SynthOutput generate(const SynthSpec& spec);

/// {spec, buckets: [{bucket, side, quantity[15], cancel_ratio_sum[10],
/// cancel_count[10], cancel_ratio[10]}], totals}
std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth);

}  // namespace lobrate::synth
