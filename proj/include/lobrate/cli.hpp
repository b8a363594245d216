#pragma once

// The `lobrate` command line: synth, rates, fit and cancel-test. Each stage
// reads and writes only the files it names, so stages can be rerun and
// inspected independently.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lobrate/book.hpp"
#include "lobrate/dist.hpp"
#include "lobrate/rates.hpp"
#include "lobrate/stats.hpp"
#include "lobrate/synth.hpp"

namespace lobrate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInternal = 2;

struct RatesConfig {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out_dir;
    rates::ExtractConfig extract;
};

struct FitConfig {
    std::filesystem::path rates_csv;
    std::filesystem::path out_dir;
    std::vector<rates::Granularity> granularities;  // empty keeps every instance
    std::vector<dist::FamilyTag> families{dist::kAllFamilies.begin(), dist::kAllFamilies.end()};
    dist::FitOptions fit;
    stats::Tail tail = stats::Tail::Two;
    int threads = 0;
};

struct CancelTestConfig {
    std::filesystem::path cancels_csv;
    std::filesystem::path out_dir;
    std::vector<rates::Granularity> granularities{rates::Granularity::Weekly, rates::Granularity::Monthly};
};

/// Writes stream.lobf and ground_truth.json.
void cmd_synth(const synth::SynthSpec& spec, const std::filesystem::path& out_dir);
/// Writes rates.csv, cancels.csv and diagnostics.json.
void cmd_rates(const RatesConfig& config);
/// Writes fits.json, scores.csv, nps.csv and welch.csv.
void cmd_fit(const FitConfig& config);
/// Writes chi2.csv and chi2_table.csv; skipped buckets are reported on `warn`.
void cmd_cancel_test(const CancelTestConfig& config, std::ostream& warn);

/// Parses arguments and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lobrate::cli
