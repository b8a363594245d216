#pragma once

// LOBF: a compact ITCH-style binary market-data format.
//
// Frame  = magic(4) "LOBF" | session_id(4) | sequence_number(8) | message_count(2) | messages
// Message = length(1) | kind(1) | body, where length counts the kind byte plus body.
// All integers are big-endian.
//
//   kind  body
//   'A'   ts(8) id(8) side(1) price(4) qty(4)          length 26
//   'X'   ts(8) id(8) qty(4)                           length 21
//   'D'   ts(8) id(8)                                  length 17
//   'E'   ts(8) id(8) qty(4)                           length 21
//   'U'   ts(8) old_id(8) new_id(8) price(4) qty(4)    length 33

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lobrate/types.hpp"

namespace lobrate::feed {

inline constexpr std::uint32_t kMagic = 0x4C4F4246;  // "LOBF"
inline constexpr std::size_t kFrameHeaderSize = 18;

enum class MessageKind : std::uint8_t {
    Add = 0x41,
    Cancel = 0x58,
    Delete = 0x44,
    Execute = 0x45,
    Replace = 0x55,
};

struct AddOrder {
    Timestamp timestamp_ns = 0;
    OrderId order_id = 0;
    Side side = Side::Buy;
    Price price = 0;
    std::uint32_t quantity = 0;
    bool operator==(const AddOrder&) const = default;
};

/// Partial cancel; quantity is the amount removed.
struct CancelOrder {
    Timestamp timestamp_ns = 0;
    OrderId order_id = 0;
    std::uint32_t quantity = 0;
    bool operator==(const CancelOrder&) const = default;
};

struct DeleteOrder {
    Timestamp timestamp_ns = 0;
    OrderId order_id = 0;
    bool operator==(const DeleteOrder&) const = default;
};

/// quantity is the executed amount, not the residual.
struct ExecuteOrder {
    Timestamp timestamp_ns = 0;
    OrderId order_id = 0;
    std::uint32_t quantity = 0;
    bool operator==(const ExecuteOrder&) const = default;
};

struct ReplaceOrder {
    Timestamp timestamp_ns = 0;
    OrderId order_id = 0;
    OrderId new_order_id = 0;
    Price new_price = 0;
    std::uint32_t new_quantity = 0;
    bool operator==(const ReplaceOrder&) const = default;
};

using MarketMessage = std::variant<AddOrder, CancelOrder, DeleteOrder, ExecuteOrder, ReplaceOrder>;

MessageKind kind_of(const MarketMessage& msg) noexcept;
Timestamp timestamp_of(const MarketMessage& msg) noexcept;
OrderId order_id_of(const MarketMessage& msg) noexcept;

/// Value of the length prefix for a kind (kind byte + body).
std::uint8_t record_length(MessageKind kind) noexcept;

struct LobfFrame {
    std::uint32_t session_id = 0;
    std::uint64_t sequence_number = 0;
    std::vector<MarketMessage> messages;
    bool operator==(const LobfFrame&) const = default;
};

/// Decodes one length-prefixed message. `bytes` must span exactly one record
/// (length byte included).
MarketMessage decode_message(std::span<const std::byte> bytes);

void encode_message(const MarketMessage& msg, std::vector<std::byte>& out);
std::vector<std::byte> encode_message(const MarketMessage& msg);

struct DecodedFrame {
    LobfFrame frame;
    std::size_t consumed = 0;
};

/// Decodes the frame at the start of `bytes`; trailing bytes are left alone
/// and reported through `consumed`.
DecodedFrame decode_frame_prefix(std::span<const std::byte> bytes);

/// Decodes a buffer holding exactly one frame.
LobfFrame decode_frame(std::span<const std::byte> bytes);

void encode_frame(const LobfFrame& frame, std::vector<std::byte>& out);
std::vector<std::byte> encode_frame(const LobfFrame& frame);

/// Decodes a whole LOBF file, checking sequence contiguity per session and
/// non-decreasing timestamps within a session.
std::vector<LobfFrame> decode_stream(std::span<const std::byte> bytes);

std::vector<std::byte> read_file(const std::string& path);

}  // namespace lobrate::feed
