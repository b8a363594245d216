#include <gtest/gtest.h>

#include <set>

#include "json.hpp"
#include "lobrate/error.hpp"
#include "lobrate/synth.hpp"

using namespace lobrate;
using namespace lobrate::synth;

namespace {

SynthSpec small_spec(std::uint64_t seed) {
    SynthSpec s;
    s.seed = seed;
    s.days = 6;
    s.orders_per_day = 800;
    s.cancel_probability = 0.03;
    return s;
}

rates::TallyStore replay(const SynthOutput& out, const SynthSpec& spec) {
    const auto frames = feed::decode_stream(out.stream);
    rates::ExtractConfig cfg;
    cfg.book.tick_size = spec.tick_size;
    return rates::extract(frames, cfg);
}

}  // namespace

TEST(Synth, ReplayEqualsGroundTruth) {
    const auto spec = small_spec(3);
    const auto out = generate(spec);
    EXPECT_EQ(replay(out, spec), out.truth.tallies);
    EXPECT_EQ(out.truth.arrivals, 6u * 800u);
    EXPECT_GT(out.truth.cancels, 0u);
}

TEST(SynthProperty, ClosureAcrossVariedSpecs) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto s = small_spec(seed);
        s.days = static_cast<std::uint16_t>(1 + seed % 5);
        s.cancel_fraction = seed % 2 ? CancelFraction::Full : CancelFraction::UniformFraction;
        s.replace_probability = (seed % 3) * 0.1;
        s.cancel_probability = 0.005 * static_cast<double>(seed % 4);
        s.tick_size = static_cast<Price>(1 + seed % 3);
        s.initial_mid = 5000;
        s.messages_per_frame = static_cast<std::uint16_t>(1 + seed * 37);
        s.arrival_model = {dist::BetaBinomial{0.5 + 0.1 * static_cast<double>(seed), 3.0, 14},
                           dist::PowerLaw{1.0, 0.2 * static_cast<double>(seed)}};
        const auto out = generate(s);
        EXPECT_EQ(replay(out, s), out.truth.tallies) << "seed " << seed;
    }
}

TEST(Synth, Deterministic) {
    EXPECT_EQ(generate(small_spec(9)).stream, generate(small_spec(9)).stream);
    EXPECT_NE(generate(small_spec(9)).stream, generate(small_spec(10)).stream);
}

TEST(Synth, NoCancelsWhenProbabilityIsZero) {
    auto s = small_spec(4);
    s.cancel_probability = 0;
    const auto out = generate(s);
    const auto frames = feed::decode_stream(out.stream);
    book::OrderBook ob;
    std::uint64_t cancels = 0;
    for (const auto& f : frames) {
        if (f.sequence_number == 0) ob.clear();
        for (const auto& m : f.messages) {
            for (const auto& e : ob.apply(m)) cancels += e.kind == book::EventKind::CancelEvent;
        }
    }
    EXPECT_EQ(cancels, 0u);
    EXPECT_EQ(out.truth.cancels, 0u);
}

TEST(Synth, SessionsAreWeekdays) {
    const auto frames = feed::decode_stream(generate(small_spec(5)).stream);
    std::set<std::uint32_t> sessions;
    for (const auto& f : frames) sessions.insert(f.session_id);
    EXPECT_EQ(sessions, (std::set<std::uint32_t>{20170801, 20170802, 20170803, 20170804, 20170807, 20170808}));
}

TEST(Synth, SpecValidation) {
    auto s = small_spec(1);
    s.cancel_probability = 1.5;
    EXPECT_THROW((void)generate(s), Error);
    s = small_spec(1);
    s.days = 0;
    EXPECT_THROW((void)generate(s), Error);
    s = small_spec(1);
    s.arrival_model[0] = dist::DiscreteWeibull{1.5, 1.0};
    try {
        (void)generate(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SpecError);
    }
}

TEST(Synth, GroundTruthJson) {
    const auto s = small_spec(2);
    const auto out = generate(s);
    const auto j = nlohmann::json::parse(ground_truth_json(s, out.truth));
    EXPECT_EQ(j["spec"]["seed"], 2);
    EXPECT_EQ(j["spec"]["arrival_model"]["buy"]["family"], "dw");
    EXPECT_EQ(j["buckets"].size(), out.truth.tallies.buckets.size());
    EXPECT_EQ(j["buckets"][0]["quantity"].size(), 15u);
    EXPECT_EQ(j["buckets"][0]["cancel_ratio"].size(), 10u);
    EXPECT_EQ(j["totals"]["arrivals"], out.truth.arrivals);
}

// Pooled over both sides, 10^5 orders track the generating curve.
TEST(SynthProperty, EmpiricalDensityConverges) {
    const auto curve = dist::tick_curve(dist::DiscreteWeibull{0.8, 1.2});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SynthSpec s;
        s.seed = seed;
        s.cancel_probability = 0;
        const auto out = generate(s);
        rates::ArrivalTally pooled;
        for (const auto& [key, tally] : out.truth.tallies.buckets) {
            if (key.granularity != rates::Granularity::Monthly) continue;
            for (int i = 0; i < kArrivalTicks; ++i) pooled.quantity[i] += tally.arrivals.quantity[i];
        }
        const auto d = rates::arrival_density(pooled);
        double l1 = 0;
        for (int i = 0; i < kArrivalTicks; ++i) l1 += std::abs(d[i] - curve[i]);
        EXPECT_LT(l1, 0.02) << "seed " << seed;
    }
}
