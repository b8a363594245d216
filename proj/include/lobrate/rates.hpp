#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobrate/book.hpp"
#include "lobrate/feed.hpp"
#include "lobrate/types.hpp"

namespace lobrate::rates {

using Date = std::chrono::year_month_day;

enum class Granularity : std::uint8_t { Daily = 0, Weekly = 1, Monthly = 2, HourlyWeekly = 3 };

std::string_view to_string(Granularity g) noexcept;

/// Trading day encoded as a LOBF session id: yyyymmdd.
Date date_from_session_id(std::uint32_t session_id);
std::uint32_t session_id_from_date(Date date);

struct IsoWeek {
    int year = 0;
    unsigned week = 0;
};
IsoWeek iso_week(Date date);

/// 1..7 for 10-11, 11-12, 12-13, 14-15, 15-16, 16-17, 17-18; nullopt outside
/// the trading windows.
std::optional<std::uint8_t> hour_slot(Timestamp since_midnight_ns) noexcept;

struct BucketKey {
    Granularity granularity = Granularity::Daily;
    /// Daily yyyymmdd, Weekly/HourlyWeekly iso_year*100 + week, Monthly yyyymm.
    std::int32_t period = 0;
    /// Hourly slot 1..7 for HourlyWeekly, 0 otherwise.
    std::uint8_t slot = 0;
    Side side = Side::Buy;

    auto operator<=>(const BucketKey&) const = default;

    /// Bucket label without the side, e.g. "weekly:2017-W31".
    std::string label() const;
};

/// Inverse of BucketKey::label().
BucketKey parse_bucket_label(const std::string& label, Side side);

/// Timestamps are nanoseconds since local midnight of `session_date`.
BucketKey assign_bucket(Timestamp timestamp_ns, Date session_date, Granularity granularity, Side side = Side::Buy);

struct ArrivalTally {
    std::array<std::uint64_t, kArrivalTicks> quantity{};  // index 0 is tick 1
    std::uint64_t total() const noexcept;
    bool operator==(const ArrivalTally&) const = default;
};

struct CancelTally {
    std::array<double, kCancelTicks> ratio_sum{};
    std::array<std::uint64_t, kCancelTicks> count{};
    bool operator==(const CancelTally&) const = default;
};

struct BucketTally {
    ArrivalTally arrivals;
    CancelTally cancels;
    bool operator==(const BucketTally&) const = default;
};

struct Diagnostics {
    std::uint64_t dropped_arrivals = 0;  // tick beyond 15
    std::uint64_t dropped_cancels = 0;   // tick beyond 10
    std::uint64_t outside_hours = 0;
    std::uint64_t excluded_replaces = 0;
    bool operator==(const Diagnostics&) const = default;
};

struct TallyStore {
    std::map<BucketKey, BucketTally> buckets;
    Diagnostics diagnostics;

    /// Entry-wise sum; associative up to floating-point rounding of ratio sums.
    void merge(const TallyStore& other);
    bool operator==(const TallyStore&) const = default;
};

/// Adds one event to `key`'s tallies. Executions are ignored.
void accumulate(TallyStore& store, const book::BookEvent& event, const BucketKey& key);

/// lambda(i) = Q(i) / sum Q. Throws EmptyBucket when nothing arrived.
std::array<double, kArrivalTicks> arrival_density(const ArrivalTally& tally);

/// Mean canceled fraction per tick; nullopt where no cancel arrived.
std::array<std::optional<double>, kCancelTicks> cancellation_ratio(const CancelTally& tally);

struct ExtractConfig {
    std::vector<Granularity> granularities{Granularity::Daily, Granularity::Weekly, Granularity::Monthly,
                                           Granularity::HourlyWeekly};
    book::BookConfig book;
    bool include_replaces = true;
    std::vector<Side> sides{Side::Buy, Side::Sell};
};

/// Buckets events of one trading session into every configured granularity.
class Accumulator {
public:
    explicit Accumulator(ExtractConfig config) : config_(std::move(config)) {}

    void add(const book::BookEvent& event, Date session_date);
    const TallyStore& store() const noexcept { return store_; }
    TallyStore take() { return std::move(store_); }

private:
    ExtractConfig config_;
    TallyStore store_;
};

/// Replays frames through one order book per session and tallies the events.
TallyStore extract(std::span<const feed::LobfFrame> frames, const ExtractConfig& config);

/// One analysis instance: a non-empty arrival bucket.
struct Instance {
    BucketKey key;
    ArrivalTally tally;
};
std::vector<Instance> instances(const TallyStore& store);

// CSV staging ---------------------------------------------------------------

/// bucket_key,side,tick,quantity,density; one row per tick 1..15 of every
/// non-empty arrival bucket.
void write_rates_csv(std::ostream& os, const TallyStore& store);
/// bucket_key,side,tick,count,mean_ratio (mean_ratio "NA" when count is 0).
void write_cancels_csv(std::ostream& os, const TallyStore& store);

std::vector<Instance> read_rates_csv(std::istream& is);

struct CancelRow {
    BucketKey key;
    std::array<std::uint64_t, kCancelTicks> count{};
    std::array<std::optional<double>, kCancelTicks> mean_ratio{};
};
std::vector<CancelRow> read_cancels_csv(std::istream& is);

}  // namespace lobrate::rates
