#include "lobrate/rates.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lobrate/csv.hpp"
#include "lobrate/error.hpp"

namespace lobrate::rates {

namespace {

constexpr Timestamp kNsPerHour = 3600ULL * 1'000'000'000ULL;

std::string two(unsigned v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02u", v);
    return buf;
}

}  // namespace

std::string_view to_string(Granularity g) noexcept {
    switch (g) {
        case Granularity::Daily: return "daily";
        case Granularity::Weekly: return "weekly";
        case Granularity::Monthly: return "monthly";
        case Granularity::HourlyWeekly: return "hourly";
    }
    return "unknown";
}

Date date_from_session_id(std::uint32_t session_id) {
    using namespace std::chrono;
    const Date d{year{static_cast<int>(session_id / 10000)}, month{(session_id / 100) % 100},
                 day{session_id % 100}};
    if (!d.ok()) throw Error(Errc::FormatError, "session id " + std::to_string(session_id) + " is not a yyyymmdd date");
    return d;
}

std::uint32_t session_id_from_date(Date date) {
    return static_cast<std::uint32_t>(static_cast<int>(date.year())) * 10000 +
           static_cast<unsigned>(date.month()) * 100 + static_cast<unsigned>(date.day());
}

IsoWeek iso_week(Date date) {
    using namespace std::chrono;
    const sys_days d{date};
    // The ISO week belongs to the year holding its Thursday.
    const auto iso_dow = weekday{d}.iso_encoding();  // Mon=1..Sun=7
    const sys_days thursday = d + days{4 - static_cast<int>(iso_dow)};
    const year_month_day thu{thursday};
    const sys_days jan1{thu.year() / January / 1};
    const auto week = static_cast<unsigned>((thursday - jan1).count() / 7 + 1);
    return {static_cast<int>(thu.year()), week};
}

std::optional<std::uint8_t> hour_slot(Timestamp since_midnight_ns) noexcept {
    const auto hour = since_midnight_ns / kNsPerHour;
    if (hour >= 10 && hour < 13) return static_cast<std::uint8_t>(hour - 9);
    if (hour >= 14 && hour < 18) return static_cast<std::uint8_t>(hour - 10);
    return std::nullopt;
}

std::string BucketKey::label() const {
    switch (granularity) {
        case Granularity::Daily:
            return "daily:" + std::to_string(period / 10000) + "-" + two(static_cast<unsigned>(period / 100 % 100)) +
                   "-" + two(static_cast<unsigned>(period % 100));
        case Granularity::Weekly:
            return "weekly:" + std::to_string(period / 100) + "-W" + two(static_cast<unsigned>(period % 100));
        case Granularity::Monthly:
            return "monthly:" + std::to_string(period / 100) + "-" + two(static_cast<unsigned>(period % 100));
        case Granularity::HourlyWeekly:
            return "hourly:" + std::to_string(period / 100) + "-W" + two(static_cast<unsigned>(period % 100)) + "-S" +
                   std::to_string(slot);
    }
    return "unknown";
}

BucketKey parse_bucket_label(const std::string& label, Side side) {
    auto fail = [&]() -> BucketKey { throw Error(Errc::FormatError, "bad bucket label '" + label + "'"); };
    const auto colon = label.find(':');
    if (colon == std::string::npos) return fail();
    const auto kind = label.substr(0, colon);
    const auto rest = label.substr(colon + 1);

    BucketKey key;
    key.side = side;
    int a = 0;
    unsigned b = 0;
    unsigned c = 0;
    char tail = 0;
    if (kind == "daily") {
        if (std::sscanf(rest.c_str(), "%d-%u-%u%c", &a, &b, &c, &tail) != 3) return fail();
        key.granularity = Granularity::Daily;
        key.period = a * 10000 + static_cast<int>(b * 100 + c);
    } else if (kind == "weekly") {
        if (std::sscanf(rest.c_str(), "%d-W%u%c", &a, &b, &tail) != 2) return fail();
        key.granularity = Granularity::Weekly;
        key.period = a * 100 + static_cast<int>(b);
    } else if (kind == "monthly") {
        if (std::sscanf(rest.c_str(), "%d-%u%c", &a, &b, &tail) != 2) return fail();
        key.granularity = Granularity::Monthly;
        key.period = a * 100 + static_cast<int>(b);
    } else if (kind == "hourly") {
        if (std::sscanf(rest.c_str(), "%d-W%u-S%u%c", &a, &b, &c, &tail) != 3 || c < 1 || c > 7) return fail();
        key.granularity = Granularity::HourlyWeekly;
        key.period = a * 100 + static_cast<int>(b);
        key.slot = static_cast<std::uint8_t>(c);
    } else {
        return fail();
    }
    return key;
}

BucketKey assign_bucket(Timestamp timestamp_ns, Date session_date, Granularity granularity, Side side) {
    const auto slot = hour_slot(timestamp_ns);
    if (!slot) {
        throw Error(Errc::OutsideTradingHours,
                    "timestamp " + std::to_string(timestamp_ns) + " ns is outside 10:00-13:00 and 14:00-18:00");
    }
    BucketKey key;
    key.granularity = granularity;
    key.side = side;
    switch (granularity) {
        case Granularity::Daily:
            key.period = static_cast<std::int32_t>(session_id_from_date(session_date));
            break;
        case Granularity::Weekly: {
            const auto w = iso_week(session_date);
            key.period = w.year * 100 + static_cast<std::int32_t>(w.week);
            break;
        }
        case Granularity::Monthly:
            key.period = static_cast<int>(session_date.year()) * 100 +
                         static_cast<std::int32_t>(static_cast<unsigned>(session_date.month()));
            break;
        case Granularity::HourlyWeekly: {
            const auto w = iso_week(session_date);
            key.period = w.year * 100 + static_cast<std::int32_t>(w.week);
            key.slot = *slot;
            break;
        }
    }
    return key;
}

std::uint64_t ArrivalTally::total() const noexcept {
    return std::accumulate(quantity.begin(), quantity.end(), std::uint64_t{0});
}

void TallyStore::merge(const TallyStore& other) {
    for (const auto& [key, tally] : other.buckets) {
        auto& mine = buckets[key];
        for (int i = 0; i < kArrivalTicks; ++i) mine.arrivals.quantity[i] += tally.arrivals.quantity[i];
        for (int i = 0; i < kCancelTicks; ++i) {
            mine.cancels.ratio_sum[i] += tally.cancels.ratio_sum[i];
            mine.cancels.count[i] += tally.cancels.count[i];
        }
    }
    diagnostics.dropped_arrivals += other.diagnostics.dropped_arrivals;
    diagnostics.dropped_cancels += other.diagnostics.dropped_cancels;
    diagnostics.outside_hours += other.diagnostics.outside_hours;
    diagnostics.excluded_replaces += other.diagnostics.excluded_replaces;
}

void accumulate(TallyStore& store, const book::BookEvent& event, const BucketKey& key) {
    switch (event.kind) {
        case book::EventKind::LimitArrival:
            if (event.tick > kArrivalTicks) {
                ++store.diagnostics.dropped_arrivals;
                return;
            }
            store.buckets[key].arrivals.quantity[event.tick - 1] += event.quantity;
            return;
        case book::EventKind::CancelEvent:
            if (event.tick > kCancelTicks) {
                ++store.diagnostics.dropped_cancels;
                return;
            }
            {
                auto& c = store.buckets[key].cancels;
                c.ratio_sum[event.tick - 1] +=
                    static_cast<double>(event.quantity) / static_cast<double>(event.level_quantity_before);
                ++c.count[event.tick - 1];
            }
            return;
        case book::EventKind::ExecutionEvent:
            return;
    }
}

std::array<double, kArrivalTicks> arrival_density(const ArrivalTally& tally) {
    const auto total = tally.total();
    if (total == 0) throw Error(Errc::EmptyBucket, "no quantity arrived in the first 15 ticks");
    std::array<double, kArrivalTicks> out{};
    const auto denom = static_cast<double>(total);
    for (int i = 0; i < kArrivalTicks; ++i) out[i] = static_cast<double>(tally.quantity[i]) / denom;
    return out;
}

std::array<std::optional<double>, kCancelTicks> cancellation_ratio(const CancelTally& tally) {
    std::array<std::optional<double>, kCancelTicks> out{};
    for (int i = 0; i < kCancelTicks; ++i) {
        if (tally.count[i] > 0) out[i] = tally.ratio_sum[i] / static_cast<double>(tally.count[i]);
    }
    return out;
}

void Accumulator::add(const book::BookEvent& event, Date session_date) {
    if (event.kind == book::EventKind::ExecutionEvent) return;
    if (std::find(config_.sides.begin(), config_.sides.end(), event.side) == config_.sides.end()) return;
    if (event.from_replace && !config_.include_replaces) {
        ++store_.diagnostics.excluded_replaces;
        return;
    }
    if (!hour_slot(event.timestamp_ns)) {
        ++store_.diagnostics.outside_hours;
        return;
    }
    for (auto g : config_.granularities) {
        accumulate(store_, event, assign_bucket(event.timestamp_ns, session_date, g, event.side));
    }
}

TallyStore extract(std::span<const feed::LobfFrame> frames, const ExtractConfig& config) {
    std::map<std::uint32_t, book::OrderBook> books;
    Accumulator acc(config);
    std::vector<book::BookEvent> events;
    for (const auto& frame : frames) {
        const auto date = date_from_session_id(frame.session_id);
        auto& ob = books.try_emplace(frame.session_id, config.book).first->second;
        for (const auto& msg : frame.messages) {
            events.clear();
            ob.apply(msg, events);
            for (const auto& ev : events) acc.add(ev, date);
        }
    }
    return acc.take();
}

std::vector<Instance> instances(const TallyStore& store) {
    std::vector<Instance> out;
    for (const auto& [key, tally] : store.buckets) {
        if (tally.arrivals.total() > 0) out.push_back({key, tally.arrivals});
    }
    return out;
}

void write_rates_csv(std::ostream& os, const TallyStore& store) {
    os << "bucket_key,side,tick,quantity,density\n";
    for (const auto& inst : instances(store)) {
        const auto density = arrival_density(inst.tally);
        const auto label = inst.key.label();
        for (int i = 0; i < kArrivalTicks; ++i) {
            os << label << ',' << lobrate::to_string(inst.key.side) << ',' << (i + 1) << ','
               << inst.tally.quantity[i] << ',' << csv::format_double(density[i]) << '\n';
        }
    }
}

void write_cancels_csv(std::ostream& os, const TallyStore& store) {
    os << "bucket_key,side,tick,count,mean_ratio\n";
    for (const auto& [key, tally] : store.buckets) {
        const auto& c = tally.cancels;
        if (std::all_of(c.count.begin(), c.count.end(), [](auto n) { return n == 0; })) continue;
        const auto ratios = cancellation_ratio(c);
        const auto label = key.label();
        for (int i = 0; i < kCancelTicks; ++i) {
            os << label << ',' << lobrate::to_string(key.side) << ',' << (i + 1) << ',' << c.count[i] << ','
               << (ratios[i] ? csv::format_double(*ratios[i]) : std::string("NA")) << '\n';
        }
    }
}

namespace {

Side parse_side(const std::string& s) {
    if (s == "buy") return Side::Buy;
    if (s == "sell") return Side::Sell;
    throw Error(Errc::FormatError, "bad side '" + s + "'");
}

int parse_tick(const std::string& s, int max_tick) {
    const auto t = csv::parse_uint(s);
    if (t < 1 || t > static_cast<std::uint64_t>(max_tick)) {
        throw Error(Errc::FormatError, "tick " + s + " outside 1.." + std::to_string(max_tick));
    }
    return static_cast<int>(t);
}

}  // namespace

std::vector<Instance> read_rates_csv(std::istream& is) {
    const auto rows = csv::read(is, {"bucket_key", "side", "tick", "quantity", "density"});
    std::map<BucketKey, ArrivalTally> tallies;
    for (const auto& r : rows) {
        const auto key = parse_bucket_label(r[0], parse_side(r[1]));
        const auto tick = parse_tick(r[2], kArrivalTicks);
        tallies[key].quantity[tick - 1] += csv::parse_uint(r[3]);
    }
    std::vector<Instance> out;
    for (const auto& [key, tally] : tallies) {
        if (tally.total() > 0) out.push_back({key, tally});
    }
    return out;
}

std::vector<CancelRow> read_cancels_csv(std::istream& is) {
    const auto rows = csv::read(is, {"bucket_key", "side", "tick", "count", "mean_ratio"});
    std::map<BucketKey, CancelRow> by_key;
    for (const auto& r : rows) {
        const auto key = parse_bucket_label(r[0], parse_side(r[1]));
        const auto tick = parse_tick(r[2], kCancelTicks);
        auto& row = by_key[key];
        row.key = key;
        row.count[tick - 1] = csv::parse_uint(r[3]);
        if (r[4] != "NA") row.mean_ratio[tick - 1] = csv::parse_double(r[4]);
    }
    std::vector<CancelRow> out;
    out.reserve(by_key.size());
    for (auto& [key, row] : by_key) out.push_back(std::move(row));
    return out;
}

}  // namespace lobrate::rates
