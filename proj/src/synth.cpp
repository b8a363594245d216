#include "lobrate/synth.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "json.hpp"

#include "lobrate/error.hpp"

namespace lobrate::synth {

namespace {

constexpr Timestamp kNsPerHour = 3600ULL * 1'000'000'000ULL;
constexpr Timestamp kSeedTime = 9 * kNsPerHour;

// Maps an offset into the 7 trading hours onto the 10-13 and 14-18 windows.
Timestamp trading_time(Timestamp offset) {
    return offset < 3 * kNsPerHour ? 10 * kNsPerHour + offset : 11 * kNsPerHour + offset;
}

struct Resting {
    OrderId id;
    Side side;
    Price price;
    std::uint64_t remaining;
    std::uint16_t tick;
};

/// The generator's own view of one day's book. Anchors pin the best prices,
/// so the tick of a price never changes during the day.
class DayBook {
public:
    DayBook(const SynthSpec& spec) : spec_(spec) {
        best_[0] = spec.initial_mid - spec.tick_size;
        best_[1] = spec.initial_mid + spec.tick_size;
    }

    Price price_at(Side side, int tick) const {
        const auto offset = static_cast<Price>(tick - 1) * spec_.tick_size;
        return side == Side::Buy ? best_[0] - offset : best_[1] + offset;
    }

    std::uint64_t level(Side side, Price price) const {
        const auto& m = levels_[static_cast<int>(side)];
        auto it = m.find(price);
        return it == m.end() ? 0 : it->second;
    }

    void add(Side side, Price price, std::uint64_t qty) { levels_[static_cast<int>(side)][price] += qty; }
    void remove(Side side, Price price, std::uint64_t qty) {
        auto& m = levels_[static_cast<int>(side)];
        auto it = m.find(price);
        it->second -= qty;
        if (it->second == 0) m.erase(it);
    }

private:
    const SynthSpec& spec_;
    std::array<Price, 2> best_{};
    std::array<std::map<Price, std::uint64_t>, 2> levels_;
};

/// Orders that may be canceled or replaced (non-anchor, within 10 ticks),
/// kept per side with O(1) uniform selection and removal.
class CancelPool {
public:
    void insert(const Resting& r) {
        auto& v = pool_[static_cast<int>(r.side)];
        v.push_back(r);
    }
    std::size_t size() const noexcept { return pool_[0].size() + pool_[1].size(); }
    std::size_t size(Side s) const noexcept { return pool_[static_cast<int>(s)].size(); }

    /// Index over the concatenation buy-pool ++ sell-pool.
    Resting& at(std::size_t i) { return i < pool_[0].size() ? pool_[0][i] : pool_[1][i - pool_[0].size()]; }
    Resting& at(Side s, std::size_t i) { return pool_[static_cast<int>(s)][i]; }

    void erase(std::size_t i) {
        if (i < pool_[0].size()) {
            swap_remove(pool_[0], i);
        } else {
            swap_remove(pool_[1], i - pool_[0].size());
        }
    }
    void erase(Side s, std::size_t i) { swap_remove(pool_[static_cast<int>(s)], i); }

private:
    static void swap_remove(std::vector<Resting>& v, std::size_t i) {
        v[i] = v.back();
        v.pop_back();
    }
    std::array<std::vector<Resting>, 2> pool_;
};

class FrameWriter {
public:
    FrameWriter(std::vector<std::byte>& out, std::uint32_t session, std::uint16_t per_frame)
        : out_(out), per_frame_(per_frame) {
        frame_.session_id = session;
    }
    void push(feed::MarketMessage msg) {
        frame_.messages.push_back(std::move(msg));
        if (frame_.messages.size() == per_frame_) flush();
    }
    void flush() {
        if (frame_.messages.empty()) return;
        feed::encode_frame(frame_, out_);
        frame_.sequence_number += frame_.messages.size();
        frame_.messages.clear();
    }

private:
    std::vector<std::byte>& out_;
    std::uint16_t per_frame_;
    feed::LobfFrame frame_;
};

}  // namespace

void validate(const SynthSpec& spec) {
    auto fail = [](const std::string& what) { throw Error(Errc::SpecError, what); };
    if (spec.days < 1) fail("days must be >= 1");
    if (!spec.start_date.ok()) fail("start date is not a calendar date");
    if (!(spec.cancel_probability >= 0.0 && spec.cancel_probability <= 1.0)) fail("cancel_probability outside [0, 1]");
    if (!(spec.replace_probability >= 0.0 && spec.replace_probability <= 1.0)) {
        fail("replace_probability outside [0, 1]");
    }
    if (spec.tick_size == 0) fail("tick_size must be > 0");
    if (spec.initial_mid <= static_cast<Price>(kArrivalTicks) * spec.tick_size) {
        fail("initial_mid too small for 15 bid levels");
    }
    if (spec.lot_size == 0 || spec.max_lots == 0) fail("lot_size and max_lots must be > 0");
    if (static_cast<std::uint64_t>(spec.lot_size) * spec.max_lots > 0xFFFFFFFFULL) fail("lot_size * max_lots overflows a 32-bit quantity");
    if (spec.anchor_quantity == 0) fail("anchor_quantity must be > 0");
    if (spec.messages_per_frame == 0) fail("messages_per_frame must be > 0");
    for (const auto& m : spec.arrival_model) {
        try {
            dist::validate(m);
            (void)dist::tick_curve(m);
        } catch (const Error& e) {
            fail(std::string("arrival model: ") + e.what());
        }
    }
}

SynthOutput generate(const SynthSpec& spec) {
    validate(spec);
    using namespace std::chrono;

    SynthOutput out;
    std::mt19937_64 rng(spec.seed);
    rates::Accumulator truth_acc(rates::ExtractConfig{});

    std::array<std::discrete_distribution<int>, 2> tick_dist;
    for (int s = 0; s < 2; ++s) {
        const auto curve = dist::tick_curve(spec.arrival_model[s]);
        tick_dist[s] = std::discrete_distribution<int>(curve.begin(), curve.end());
    }
    std::uniform_int_distribution<Timestamp> offset_dist(0, 7 * kNsPerHour - 1);
    std::uniform_int_distribution<std::uint32_t> lots_dist(1, spec.max_lots);
    std::bernoulli_distribution side_dist(0.5);
    std::bernoulli_distribution replace_dist(spec.replace_probability);

    sys_days day{spec.start_date};
    OrderId next_id = 1;
    for (int d = 0; d < spec.days; ++d) {
        while (weekday{day}.iso_encoding() > 5) day += days{1};
        const rates::Date date{day};
        day += days{1};

        const auto session = rates::session_id_from_date(date);
        FrameWriter writer(out.stream, session, spec.messages_per_frame);
        DayBook mirror(spec);
        CancelPool pool;

        std::vector<Timestamp> times(spec.orders_per_day);
        for (auto& t : times) t = trading_time(offset_dist(rng));
        std::sort(times.begin(), times.end());

        auto log = [&](book::EventKind kind, Side side, Timestamp ts, std::uint16_t tick, std::uint64_t qty,
                       std::uint64_t before, bool from_replace) {
            book::BookEvent ev;
            ev.kind = kind;
            ev.side = side;
            ev.timestamp_ns = ts;
            ev.tick = tick;
            ev.quantity = qty;
            ev.level_quantity_before = before;
            ev.from_replace = from_replace;
            truth_acc.add(ev, date);
        };

        // Seed ladder, before the trading window opens.
        Timestamp seed_ts = kSeedTime;
        for (auto side : {Side::Buy, Side::Sell}) {
            for (int t = 1; t <= kArrivalTicks; ++t) {
                const auto price = mirror.price_at(side, t);
                writer.push(feed::AddOrder{seed_ts, next_id++, side, price, spec.anchor_quantity});
                log(book::EventKind::LimitArrival, side, seed_ts++, static_cast<std::uint16_t>(t),
                    spec.anchor_quantity, 0, false);
                mirror.add(side, price, spec.anchor_quantity);
            }
        }

        for (const auto ts : times) {
            const Side side = side_dist(rng) ? Side::Sell : Side::Buy;
            const int s = static_cast<int>(side);
            const auto tick = static_cast<std::uint16_t>(tick_dist[s](rng) + 1);
            const std::uint64_t qty = static_cast<std::uint64_t>(spec.lot_size) * lots_dist(rng);
            const auto price = mirror.price_at(side, tick);
            const auto id = next_id++;

            const bool replace = pool.size(side) > 0 && replace_dist(rng);
            if (replace) {
                std::uniform_int_distribution<std::size_t> pick(0, pool.size(side) - 1);
                const auto idx = pick(rng);
                const auto old = pool.at(side, idx);
                pool.erase(side, idx);
                log(book::EventKind::CancelEvent, side, ts, old.tick, old.remaining, mirror.level(side, old.price),
                    true);
                mirror.remove(side, old.price, old.remaining);
                writer.push(feed::ReplaceOrder{ts, old.id, id, price, static_cast<std::uint32_t>(qty)});
                ++out.truth.replaces;
            } else {
                writer.push(feed::AddOrder{ts, id, side, price, static_cast<std::uint32_t>(qty)});
            }
            log(book::EventKind::LimitArrival, side, ts, tick, qty, 0, replace);
            mirror.add(side, price, qty);
            ++out.truth.arrivals;
            if (tick <= kCancelTicks) pool.insert(Resting{id, side, price, qty, tick});

            if (spec.cancel_probability <= 0.0 || pool.size() == 0) continue;
            std::binomial_distribution<std::size_t> n_cancel(pool.size(), spec.cancel_probability);
            const auto k = n_cancel(rng);
            for (std::size_t c = 0; c < k && pool.size() > 0; ++c) {
                std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                const auto idx = pick(rng);
                auto& victim = pool.at(idx);
                std::uint64_t amount = victim.remaining;
                if (spec.cancel_fraction == CancelFraction::UniformFraction) {
                    amount = std::uniform_int_distribution<std::uint64_t>(1, victim.remaining)(rng);
                    writer.push(feed::CancelOrder{ts, victim.id, static_cast<std::uint32_t>(amount)});
                } else {
                    writer.push(feed::DeleteOrder{ts, victim.id});
                }
                log(book::EventKind::CancelEvent, victim.side, ts, victim.tick, amount,
                    mirror.level(victim.side, victim.price), false);
                mirror.remove(victim.side, victim.price, amount);
                ++out.truth.cancels;
                victim.remaining -= amount;
                if (victim.remaining == 0) pool.erase(idx);
            }
        }
        writer.flush();
    }
    out.truth.tallies = truth_acc.take();
    return out;
}

std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth) {
    using nlohmann::ordered_json;
    ordered_json j;
    auto& s = j["spec"];
    s["seed"] = spec.seed;
    s["start_date"] = rates::session_id_from_date(spec.start_date);
    s["days"] = spec.days;
    s["orders_per_day"] = spec.orders_per_day;
    for (int side = 0; side < 2; ++side) {
        ordered_json m;
        m["family"] = dist::short_name(dist::tag_of(spec.arrival_model[side]));
        for (const auto& [name, value] : dist::parameters(spec.arrival_model[side])) m["params"][name] = value;
        s["arrival_model"][std::string(to_string(static_cast<Side>(side)))] = m;
    }
    s["cancel_probability"] = spec.cancel_probability;
    s["cancel_fraction"] = spec.cancel_fraction == CancelFraction::Full ? "full" : "uniform";
    s["replace_probability"] = spec.replace_probability;
    s["tick_size"] = spec.tick_size;
    s["initial_mid"] = spec.initial_mid;
    s["lot_size"] = spec.lot_size;
    s["max_lots"] = spec.max_lots;
    s["anchor_quantity"] = spec.anchor_quantity;

    j["buckets"] = ordered_json::array();
    for (const auto& [key, tally] : truth.tallies.buckets) {
        ordered_json b;
        b["bucket"] = key.label();
        b["side"] = to_string(key.side);
        b["quantity"] = tally.arrivals.quantity;
        b["cancel_ratio_sum"] = tally.cancels.ratio_sum;
        b["cancel_count"] = tally.cancels.count;
        const auto ratios = rates::cancellation_ratio(tally.cancels);
        auto& r = b["cancel_ratio"];
        r = ordered_json::array();
        for (const auto& v : ratios) r.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
        j["buckets"].push_back(std::move(b));
    }
    j["totals"] = {{"arrivals", truth.arrivals}, {"cancels", truth.cancels}, {"replaces", truth.replaces}};
    return j.dump(2) + "\n";
}

}  // namespace lobrate::synth
