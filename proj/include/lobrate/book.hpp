#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "lobrate/feed.hpp"
#include "lobrate/types.hpp"

namespace lobrate::book {

/// Which best price a tick distance is measured from.
///
/// SameSide: a buy at the best bid is tick 1, one unit below it tick 2.
/// OppositeSide: a buy one unit below the best ask is tick 1.
enum class TickReference { SameSide, OppositeSide };

struct PriceLevel {
    Price price = 0;
    std::uint64_t total_quantity = 0;
    std::uint32_t order_count = 0;
};

enum class EventKind { LimitArrival, CancelEvent, ExecutionEvent };

struct BookEvent {
    EventKind kind = EventKind::LimitArrival;
    Side side = Side::Buy;
    Timestamp timestamp_ns = 0;
    std::uint16_t tick = 1;
    std::uint64_t quantity = 0;
    /// Level total just before a cancel; zero for other kinds.
    std::uint64_t level_quantity_before = 0;
    /// Set on the cancel/arrival pair produced by a Replace message.
    bool from_replace = false;

    bool operator==(const BookEvent&) const = default;
};

struct BookConfig {
    TickReference reference = TickReference::SameSide;
    Price tick_size = 1;
};

struct RestingOrder {
    Side side = Side::Buy;
    Price price = 0;
    std::uint64_t remaining = 0;
};

struct BestPrices {
    std::optional<Price> bid;
    std::optional<Price> ask;
    bool operator==(const BestPrices&) const = default;
};

class OrderBook {
public:
    OrderBook() = default;
    explicit OrderBook(BookConfig config) : config_(config) {}

    const BookConfig& config() const noexcept { return config_; }

    /// Applies one message and appends the resulting events to `events`.
    /// The book is left untouched when an error is thrown.
    void apply(const feed::MarketMessage& msg, std::vector<BookEvent>& events);
    std::vector<BookEvent> apply(const feed::MarketMessage& msg);

    BestPrices best_prices() const noexcept;

    /// Throws MissingReference when the reference side is empty.
    std::uint16_t tick_distance(Side side, Price price, TickReference reference) const;
    std::uint16_t tick_distance(Side side, Price price) const { return tick_distance(side, price, config_.reference); }

    /// Bids best-first (descending), asks best-first (ascending).
    std::vector<PriceLevel> levels(Side side) const;
    std::optional<PriceLevel> level(Side side, Price price) const;
    const std::unordered_map<OrderId, RestingOrder>& orders() const noexcept { return orders_; }

    bool empty() const noexcept { return orders_.empty(); }
    void clear();

private:
    struct Level {
        std::uint64_t total = 0;
        std::uint32_t count = 0;
    };
    using BidLadder = std::map<Price, Level, std::greater<>>;
    using AskLadder = std::map<Price, Level, std::less<>>;

    std::uint16_t event_tick(Side side, Price price) const;
    Level& level_ref(Side side, Price price);
    void add_to_level(Side side, Price price, std::uint64_t qty);
    void remove_from_level(Side side, Price price, std::uint64_t qty, bool order_gone);
    std::uint64_t level_total(Side side, Price price) const;

    BookConfig config_;
    BidLadder bids_;
    AskLadder asks_;
    std::unordered_map<OrderId, RestingOrder> orders_;
};

/// Writes events as CSV: kind,side,timestamp_ns,tick,quantity,level_quantity_before
void write_events_csv(std::ostream& os, const std::vector<BookEvent>& events);

std::string_view to_string(EventKind kind) noexcept;

}  // namespace lobrate::book
