#include "lobrate/analysis.hpp"

#include <algorithm>
#include <map>

#include "lobrate/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lobrate::analysis {

const FamilyFit* InstanceFit::find(dist::FamilyTag family) const noexcept {
    for (const auto& f : fits) {
        if (f.family == family) return &f;
    }
    return nullptr;
}

InstanceFit fit_instance(const rates::Instance& instance, std::span<const dist::FamilyTag> families,
                         const dist::FitOptions& options) {
    InstanceFit out;
    out.key = instance.key;
    out.density = rates::arrival_density(instance.tally);
    out.fits.reserve(families.size());
    for (auto family : families) {
        FamilyFit ff;
        ff.family = family;
        try {
            ff.result = dist::fit(out.density, family, options);
            ff.curve = dist::tick_curve(ff.result->model);
            ff.l1_error = stats::l1_error(out.density, ff.curve);
        } catch (const Error& e) {
            ff.result.reset();
            ff.error = e.what();
        }
        out.fits.push_back(std::move(ff));
    }
    return out;
}

std::vector<InstanceFit> fit_instances_serial(std::span<const rates::Instance> instances,
                                              std::span<const dist::FamilyTag> families,
                                              const dist::FitOptions& options) {
    std::vector<InstanceFit> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) out.push_back(fit_instance(inst, families, options));
    return out;
}

std::vector<InstanceFit> fit_instances_parallel(std::span<const rates::Instance> instances,
                                                std::span<const dist::FamilyTag> families,
                                                const dist::FitOptions& options, int threads) {
    std::vector<InstanceFit> out(instances.size());
    const auto n = static_cast<std::ptrdiff_t>(instances.size());
#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#else
    (void)threads;
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = fit_instance(instances[static_cast<std::size_t>(i)], families, options);
    }
    return out;
}

const std::vector<ComparisonGroup>& default_groups() {
    using dist::FamilyTag;
    static const std::vector<ComparisonGroup> groups{
        {"discrete", {FamilyTag::Geometric, FamilyTag::DiscreteWeibull, FamilyTag::BetaBinomial}},
        {"theoretical", {FamilyTag::Exponential, FamilyTag::DiscreteWeibull, FamilyTag::PowerLaw}},
    };
    return groups;
}

std::vector<InstanceScore> score(std::span<const InstanceFit> fits, std::span<const ComparisonGroup> groups) {
    std::vector<InstanceScore> out;
    for (const auto& group : groups) {
        for (const auto& inst : fits) {
            InstanceScore s;
            s.key = inst.key;
            s.group = group.name;
            s.families = group.families;
            bool complete = true;
            for (auto family : group.families) {
                const auto* f = inst.find(family);
                if (f == nullptr || !f->result) {
                    complete = false;
                    break;
                }
                s.l1_errors.push_back(f->l1_error);
            }
            if (!complete) continue;
            s.nps = stats::nps(s.l1_errors);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::string timestep_of(const rates::BucketKey& key) {
    const std::string side = key.side == Side::Buy ? " Limit Buy" : " Limit Sell";
    switch (key.granularity) {
        case rates::Granularity::Daily: return "Daily" + side;
        case rates::Granularity::Weekly: return "Weekly" + side;
        case rates::Granularity::Monthly: return "Monthly Limit";
        case rates::Granularity::HourlyWeekly: return "Hourly" + side;
    }
    return "Unknown";
}

const std::vector<std::string>& timestep_order() {
    static const std::vector<std::string> order{
        "Daily Limit Buy", "Daily Limit Sell", "Weekly Limit Buy",  "Weekly Limit Sell",
        "Monthly Limit",   "Hourly Limit Buy", "Hourly Limit Sell",
    };
    return order;
}

namespace {

std::size_t timestep_rank(const std::string& t) {
    const auto& order = timestep_order();
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), t) - order.begin());
}

/// NPS samples keyed by (timestep rank, group) then family, in score order.
using Samples = std::map<std::pair<std::size_t, std::string>, std::map<dist::FamilyTag, std::vector<double>>>;

Samples collect(std::span<const InstanceScore> scores) {
    Samples samples;
    for (const auto& s : scores) {
        auto& per_family = samples[{timestep_rank(timestep_of(s.key)), s.group}];
        for (std::size_t i = 0; i < s.families.size(); ++i) per_family[s.families[i]].push_back(s.nps[i]);
    }
    return samples;
}

}  // namespace

std::vector<NpsSummaryRow> summarise_nps(std::span<const InstanceScore> scores) {
    std::vector<NpsSummaryRow> rows;
    const auto samples = collect(scores);
    for (const auto& group : default_groups()) {
        for (const auto& [where, per_family] : samples) {
            if (where.second != group.name) continue;
            for (auto family : group.families) {
                auto it = per_family.find(family);
                if (it == per_family.end()) continue;
                rows.push_back({timestep_order()[where.first], group.name, family, stats::mean_sd(it->second),
                                it->second.size()});
            }
        }
    }
    return rows;
}

std::vector<WelchRow> compare_nps(std::span<const InstanceScore> scores, stats::Tail tail,
                                  std::span<const std::pair<dist::FamilyTag, dist::FamilyTag>> pairs) {
    std::vector<WelchRow> rows;
    const auto samples = collect(scores);
    for (const auto& [a, b] : pairs) {
        for (const auto& [where, per_family] : samples) {
            auto ia = per_family.find(a);
            auto ib = per_family.find(b);
            if (ia == per_family.end() || ib == per_family.end()) continue;
            WelchRow row;
            row.timestep = timestep_order()[where.first];
            row.comparison = std::string(dist::short_name(a)) + "_vs_" + std::string(dist::short_name(b));
            try {
                row.result = stats::welch_t_test(ia->second, ib->second, tail);
            } catch (const Error& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace lobrate::analysis
