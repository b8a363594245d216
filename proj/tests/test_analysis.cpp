#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lobrate/analysis.hpp"
#include "lobrate/synth.hpp"

using namespace lobrate;
using namespace lobrate::analysis;

namespace {

std::vector<rates::Instance> synth_instances(std::uint16_t days) {
    synth::SynthSpec s;
    s.days = days;
    s.orders_per_day = 600;
    return rates::instances(synth::generate(s).truth.tallies);
}

void expect_same(const std::vector<InstanceFit>& a, const std::vector<InstanceFit>& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].key, b[i].key);
        ASSERT_EQ(a[i].fits.size(), b[i].fits.size());
        for (std::size_t f = 0; f < a[i].fits.size(); ++f) {
            const auto& x = a[i].fits[f];
            const auto& y = b[i].fits[f];
            EXPECT_EQ(x.family, y.family);
            ASSERT_EQ(x.result.has_value(), y.result.has_value());
            EXPECT_EQ(x.curve, y.curve);
            EXPECT_EQ(x.l1_error, y.l1_error);
            if (x.result) EXPECT_EQ(dist::parameters(x.result->model), dist::parameters(y.result->model));
        }
    }
}

}  // namespace

TEST(Analysis, ParallelMatchesSerialExactly) {
    const auto inst = synth_instances(5);
    const auto serial = fit_instances_serial(inst, dist::kAllFamilies, {});
    for (int threads : {1, 2, 4, 7}) expect_same(serial, fit_instances_parallel(inst, dist::kAllFamilies, {}, threads));
}

TEST(Analysis, FailedFamilyDoesNotStopTheBatch) {
    rates::Instance one;
    one.tally.quantity[0] = 100;
    const std::vector<rates::Instance> inst{one};
    const auto fits = fit_instances_serial(inst, dist::kAllFamilies, {});
    ASSERT_EQ(fits[0].fits.size(), 5u);
    EXPECT_TRUE(fits[0].find(dist::FamilyTag::Geometric)->result.has_value());
    EXPECT_FALSE(fits[0].find(dist::FamilyTag::DiscreteWeibull)->result.has_value());
    EXPECT_FALSE(fits[0].find(dist::FamilyTag::DiscreteWeibull)->error.empty());
    // Groups with a failed member are left out of the scores.
    EXPECT_TRUE(score(fits, default_groups()).empty());
}

TEST(Analysis, ExactCurveScoresOne) {
    const auto curve = dist::tick_curve(dist::DiscreteWeibull{0.6, 1.4});
    rates::Instance inst;
    for (int i = 0; i < 15; ++i) inst.tally.quantity[i] = static_cast<std::uint64_t>(std::llround(curve[i] * 1e12));
    const auto fits = fit_instances_serial(std::vector{inst}, dist::kAllFamilies, {});
    for (const auto& s : score(fits, default_groups())) {
        for (std::size_t k = 0; k < s.families.size(); ++k) {
            if (s.families[k] == dist::FamilyTag::DiscreteWeibull) EXPECT_EQ(s.nps[k], 1.0);
        }
    }
}

TEST(Analysis, TimestepLabels) {
    rates::BucketKey k;
    k.granularity = rates::Granularity::Weekly;
    k.side = Side::Sell;
    EXPECT_EQ(timestep_of(k), "Weekly Limit Sell");
    k.granularity = rates::Granularity::Monthly;
    EXPECT_EQ(timestep_of(k), "Monthly Limit");
    k.granularity = rates::Granularity::HourlyWeekly;
    k.side = Side::Buy;
    EXPECT_EQ(timestep_of(k), "Hourly Limit Buy");
}

TEST(Analysis, SummaryAndWelchShape) {
    const auto inst = synth_instances(10);
    const auto fits = fit_instances_parallel(inst, dist::kAllFamilies, {});
    const auto scores = score(fits, default_groups());
    for (const auto& s : scores) EXPECT_EQ(*std::min_element(s.nps.begin(), s.nps.end()), 1.0);

    const auto summary = summarise_nps(scores);
    // 7 timesteps x 2 groups x 3 families.
    EXPECT_EQ(summary.size(), 42u);
    std::size_t daily_buy = 0;
    for (const auto& r : summary) {
        if (r.timestep == "Daily Limit Buy" && r.group == "discrete" && r.family == dist::FamilyTag::Geometric) {
            daily_buy = r.instances;
        }
    }
    EXPECT_EQ(daily_buy, 10u);

    const std::vector<std::pair<dist::FamilyTag, dist::FamilyTag>> pairs{
        {dist::FamilyTag::DiscreteWeibull, dist::FamilyTag::BetaBinomial},
        {dist::FamilyTag::DiscreteWeibull, dist::FamilyTag::PowerLaw}};
    const auto welch = compare_nps(scores, stats::Tail::Two, pairs);
    EXPECT_EQ(welch.size(), 14u);
    for (const auto& w : welch) {
        EXPECT_TRUE(w.comparison == "dw_vs_bb" || w.comparison == "dw_vs_pow");
        if (w.result) {
            EXPECT_GE(w.result->p_value, 0.0);
            EXPECT_LE(w.result->p_value, 1.0);
        }
    }
}
