#include "lobrate/book.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "lobrate/error.hpp"

namespace lobrate::book {

namespace {

std::uint16_t clamp_tick(std::int64_t tick) {
    if (tick < 1) return 1;
    if (tick > std::numeric_limits<std::uint16_t>::max()) return std::numeric_limits<std::uint16_t>::max();
    return static_cast<std::uint16_t>(tick);
}

// Floor division for a possibly negative numerator.
std::int64_t floor_div(std::int64_t num, std::int64_t den) {
    auto q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::LimitArrival: return "arrival";
        case EventKind::CancelEvent: return "cancel";
        case EventKind::ExecutionEvent: return "execution";
    }
    return "unknown";
}

BestPrices OrderBook::best_prices() const noexcept {
    BestPrices out;
    if (!bids_.empty()) out.bid = bids_.begin()->first;
    if (!asks_.empty()) out.ask = asks_.begin()->first;
    return out;
}

std::uint16_t OrderBook::tick_distance(Side side, Price price, TickReference reference) const {
    const auto best = best_prices();
    const bool buy = side == Side::Buy;
    const bool same = reference == TickReference::SameSide;
    const auto& ref = (buy == same) ? best.bid : best.ask;
    if (!ref) {
        throw Error(Errc::MissingReference, std::string("no best ") + ((buy == same) ? "bid" : "ask") +
                                                " to measure a " + std::string(lobrate::to_string(side)) +
                                                " tick from");
    }
    const auto tick_size = static_cast<std::int64_t>(config_.tick_size);
    const auto p = static_cast<std::int64_t>(price);
    const auto r = static_cast<std::int64_t>(*ref);
    const std::int64_t away = buy ? (r - p) : (p - r);
    return clamp_tick(same ? floor_div(away, tick_size) + 1 : floor_div(away, tick_size));
}

std::uint16_t OrderBook::event_tick(Side side, Price price) const {
    const auto best = best_prices();
    const bool same = config_.reference == TickReference::SameSide;
    const auto& ref = ((side == Side::Buy) == same) ? best.bid : best.ask;
    if (!ref) return 1;
    return tick_distance(side, price, config_.reference);
}

OrderBook::Level& OrderBook::level_ref(Side side, Price price) {
    return side == Side::Buy ? bids_[price] : asks_[price];
}

std::uint64_t OrderBook::level_total(Side side, Price price) const {
    if (side == Side::Buy) {
        auto it = bids_.find(price);
        return it == bids_.end() ? 0 : it->second.total;
    }
    auto it = asks_.find(price);
    return it == asks_.end() ? 0 : it->second.total;
}

void OrderBook::add_to_level(Side side, Price price, std::uint64_t qty) {
    auto& lvl = level_ref(side, price);
    lvl.total += qty;
    ++lvl.count;
}

void OrderBook::remove_from_level(Side side, Price price, std::uint64_t qty, bool order_gone) {
    auto erase_if_empty = [&](auto& ladder) {
        auto it = ladder.find(price);
        it->second.total -= qty;
        if (order_gone) --it->second.count;
        if (it->second.count == 0) ladder.erase(it);
    };
    if (side == Side::Buy) {
        erase_if_empty(bids_);
    } else {
        erase_if_empty(asks_);
    }
}

void OrderBook::apply(const feed::MarketMessage& msg, std::vector<BookEvent>& events) {
    const auto ts = feed::timestamp_of(msg);

    auto find_order = [&](OrderId id) -> RestingOrder& {
        auto it = orders_.find(id);
        if (it == orders_.end()) throw Error(Errc::UnknownOrderId, "order " + std::to_string(id));
        return it->second;
    };

    // Shared by Cancel, Delete and the first half of Replace.
    auto cancel = [&](OrderId id, RestingOrder& order, std::uint64_t qty, bool from_replace) {
        BookEvent ev;
        ev.kind = EventKind::CancelEvent;
        ev.side = order.side;
        ev.timestamp_ns = ts;
        ev.tick = event_tick(order.side, order.price);
        ev.quantity = qty;
        ev.level_quantity_before = level_total(order.side, order.price);
        ev.from_replace = from_replace;
        order.remaining -= qty;
        const bool gone = order.remaining == 0;
        remove_from_level(order.side, order.price, qty, gone);
        if (gone) orders_.erase(id);
        events.push_back(ev);
    };

    auto arrive = [&](OrderId id, Side side, Price price, std::uint64_t qty, bool from_replace) {
        BookEvent ev;
        ev.kind = EventKind::LimitArrival;
        ev.side = side;
        ev.timestamp_ns = ts;
        ev.tick = event_tick(side, price);
        ev.quantity = qty;
        ev.from_replace = from_replace;
        add_to_level(side, price, qty);
        orders_.emplace(id, RestingOrder{side, price, qty});
        events.push_back(ev);
    };

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, feed::AddOrder>) {
                if (orders_.contains(m.order_id)) {
                    throw Error(Errc::DuplicateOrderId, "order " + std::to_string(m.order_id));
                }
                arrive(m.order_id, m.side, m.price, m.quantity, false);
            } else if constexpr (std::is_same_v<T, feed::CancelOrder>) {
                auto& order = find_order(m.order_id);
                if (m.quantity > order.remaining) {
                    throw Error(Errc::OverCancel, "cancel of " + std::to_string(m.quantity) + " exceeds remaining " +
                                                      std::to_string(order.remaining));
                }
                cancel(m.order_id, order, m.quantity, false);
            } else if constexpr (std::is_same_v<T, feed::DeleteOrder>) {
                auto& order = find_order(m.order_id);
                cancel(m.order_id, order, order.remaining, false);
            } else if constexpr (std::is_same_v<T, feed::ExecuteOrder>) {
                auto& order = find_order(m.order_id);
                if (m.quantity > order.remaining) {
                    throw Error(Errc::OverCancel, "execution of " + std::to_string(m.quantity) +
                                                      " exceeds remaining " + std::to_string(order.remaining));
                }
                BookEvent ev;
                ev.kind = EventKind::ExecutionEvent;
                ev.side = order.side;
                ev.timestamp_ns = ts;
                ev.tick = event_tick(order.side, order.price);
                ev.quantity = m.quantity;
                order.remaining -= m.quantity;
                const bool gone = order.remaining == 0;
                remove_from_level(order.side, order.price, m.quantity, gone);
                if (gone) orders_.erase(m.order_id);
                events.push_back(ev);
            } else if constexpr (std::is_same_v<T, feed::ReplaceOrder>) {
                auto& order = find_order(m.order_id);
                if (m.new_order_id != m.order_id && orders_.contains(m.new_order_id)) {
                    throw Error(Errc::DuplicateOrderId, "replacement id " + std::to_string(m.new_order_id));
                }
                const auto side = order.side;
                cancel(m.order_id, order, order.remaining, true);
                arrive(m.new_order_id, side, m.new_price, m.new_quantity, true);
            }
        },
        msg);
}

std::vector<BookEvent> OrderBook::apply(const feed::MarketMessage& msg) {
    std::vector<BookEvent> events;
    apply(msg, events);
    return events;
}

std::vector<PriceLevel> OrderBook::levels(Side side) const {
    std::vector<PriceLevel> out;
    auto collect = [&](const auto& ladder) {
        out.reserve(ladder.size());
        for (const auto& [price, lvl] : ladder) out.push_back({price, lvl.total, lvl.count});
    };
    if (side == Side::Buy) {
        collect(bids_);
    } else {
        collect(asks_);
    }
    return out;
}

std::optional<PriceLevel> OrderBook::level(Side side, Price price) const {
    auto lookup = [&](const auto& ladder) -> std::optional<PriceLevel> {
        auto it = ladder.find(price);
        if (it == ladder.end()) return std::nullopt;
        return PriceLevel{price, it->second.total, it->second.count};
    };
    return side == Side::Buy ? lookup(bids_) : lookup(asks_);
}

void OrderBook::clear() {
    bids_.clear();
    asks_.clear();
    orders_.clear();
}

void write_events_csv(std::ostream& os, const std::vector<BookEvent>& events) {
    os << "kind,side,timestamp_ns,tick,quantity,level_quantity_before\n";
    for (const auto& e : events) {
        os << to_string(e.kind) << ',' << lobrate::to_string(e.side) << ',' << e.timestamp_ns << ',' << e.tick
           << ',' << e.quantity << ',' << e.level_quantity_before << '\n';
    }
}

}  // namespace lobrate::book
