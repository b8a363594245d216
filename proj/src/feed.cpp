#include "lobrate/feed.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "lobrate/error.hpp"

namespace lobrate::feed {

namespace {

class Reader {
public:
    explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    template <typename T>
    T read(Errc on_short) {
        if (remaining() < sizeof(T)) {
            throw Error(on_short, "need " + std::to_string(sizeof(T)) + " bytes at offset " +
                                      std::to_string(pos_) + ", have " + std::to_string(remaining()));
        }
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            value = static_cast<T>((value << 8) | static_cast<T>(std::to_integer<std::uint8_t>(bytes_[pos_ + i])));
        }
        pos_ += sizeof(T);
        return value;
    }

private:
    std::span<const std::byte> bytes_;
    std::size_t pos_ = 0;
};

template <typename T>
void put(std::vector<std::byte>& out, T value) {
    for (int shift = static_cast<int>(sizeof(T) - 1) * 8; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::byte>((value >> shift) & 0xFF));
    }
}

void require_quantity(std::uint32_t qty, const char* kind) {
    if (qty == 0) throw Error(Errc::ZeroQuantity, std::string(kind) + " with zero quantity");
}

void require_price(Price price, const char* kind) {
    if (price == 0) throw Error(Errc::ZeroPrice, std::string(kind) + " with zero price");
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

MessageKind kind_of(const MarketMessage& msg) noexcept {
    return std::visit(overloaded{
                          [](const AddOrder&) { return MessageKind::Add; },
                          [](const CancelOrder&) { return MessageKind::Cancel; },
                          [](const DeleteOrder&) { return MessageKind::Delete; },
                          [](const ExecuteOrder&) { return MessageKind::Execute; },
                          [](const ReplaceOrder&) { return MessageKind::Replace; },
                      },
                      msg);
}

Timestamp timestamp_of(const MarketMessage& msg) noexcept {
    return std::visit([](const auto& m) { return m.timestamp_ns; }, msg);
}

OrderId order_id_of(const MarketMessage& msg) noexcept {
    return std::visit([](const auto& m) { return m.order_id; }, msg);
}

std::uint8_t record_length(MessageKind kind) noexcept {
    switch (kind) {
        case MessageKind::Add: return 26;
        case MessageKind::Cancel: return 21;
        case MessageKind::Delete: return 17;
        case MessageKind::Execute: return 21;
        case MessageKind::Replace: return 33;
    }
    return 0;
}

MarketMessage decode_message(std::span<const std::byte> bytes) {
    Reader in(bytes);
    const auto length = in.read<std::uint8_t>(Errc::LengthMismatch);
    if (in.remaining() != length) {
        throw Error(Errc::LengthMismatch, "length prefix " + std::to_string(length) + " but record holds " +
                                              std::to_string(in.remaining()) + " bytes");
    }
    const auto code = in.read<std::uint8_t>(Errc::LengthMismatch);
    MessageKind kind{};
    switch (code) {
        case 0x41: kind = MessageKind::Add; break;
        case 0x58: kind = MessageKind::Cancel; break;
        case 0x44: kind = MessageKind::Delete; break;
        case 0x45: kind = MessageKind::Execute; break;
        case 0x55: kind = MessageKind::Replace; break;
        default: throw Error(Errc::UnknownMessageKind, "kind byte " + std::to_string(code));
    }
    if (length != record_length(kind)) {
        throw Error(Errc::LengthMismatch, "kind " + std::to_string(code) + " expects length " +
                                              std::to_string(record_length(kind)) + ", got " +
                                              std::to_string(length));
    }

    constexpr auto e = Errc::LengthMismatch;
    switch (kind) {
        case MessageKind::Add: {
            AddOrder m;
            m.timestamp_ns = in.read<std::uint64_t>(e);
            m.order_id = in.read<std::uint64_t>(e);
            const auto side = in.read<std::uint8_t>(e);
            if (side > 1) throw Error(Errc::FormatError, "side byte " + std::to_string(side));
            m.side = static_cast<Side>(side);
            m.price = in.read<std::uint32_t>(e);
            m.quantity = in.read<std::uint32_t>(e);
            require_price(m.price, "add");
            require_quantity(m.quantity, "add");
            return m;
        }
        case MessageKind::Cancel: {
            CancelOrder m;
            m.timestamp_ns = in.read<std::uint64_t>(e);
            m.order_id = in.read<std::uint64_t>(e);
            m.quantity = in.read<std::uint32_t>(e);
            require_quantity(m.quantity, "cancel");
            return m;
        }
        case MessageKind::Delete: {
            DeleteOrder m;
            m.timestamp_ns = in.read<std::uint64_t>(e);
            m.order_id = in.read<std::uint64_t>(e);
            return m;
        }
        case MessageKind::Execute: {
            ExecuteOrder m;
            m.timestamp_ns = in.read<std::uint64_t>(e);
            m.order_id = in.read<std::uint64_t>(e);
            m.quantity = in.read<std::uint32_t>(e);
            require_quantity(m.quantity, "execute");
            return m;
        }
        case MessageKind::Replace: {
            ReplaceOrder m;
            m.timestamp_ns = in.read<std::uint64_t>(e);
            m.order_id = in.read<std::uint64_t>(e);
            m.new_order_id = in.read<std::uint64_t>(e);
            m.new_price = in.read<std::uint32_t>(e);
            m.new_quantity = in.read<std::uint32_t>(e);
            require_price(m.new_price, "replace");
            require_quantity(m.new_quantity, "replace");
            return m;
        }
    }
    throw Error(Errc::UnknownMessageKind, "unreachable");
}

void encode_message(const MarketMessage& msg, std::vector<std::byte>& out) {
    const auto kind = kind_of(msg);
    put<std::uint8_t>(out, record_length(kind));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
    std::visit(overloaded{
                   [&](const AddOrder& m) {
                       put(out, m.timestamp_ns);
                       put(out, m.order_id);
                       put(out, static_cast<std::uint8_t>(m.side));
                       put(out, m.price);
                       put(out, m.quantity);
                   },
                   [&](const CancelOrder& m) {
                       put(out, m.timestamp_ns);
                       put(out, m.order_id);
                       put(out, m.quantity);
                   },
                   [&](const DeleteOrder& m) {
                       put(out, m.timestamp_ns);
                       put(out, m.order_id);
                   },
                   [&](const ExecuteOrder& m) {
                       put(out, m.timestamp_ns);
                       put(out, m.order_id);
                       put(out, m.quantity);
                   },
                   [&](const ReplaceOrder& m) {
                       put(out, m.timestamp_ns);
                       put(out, m.order_id);
                       put(out, m.new_order_id);
                       put(out, m.new_price);
                       put(out, m.new_quantity);
                   },
               },
               msg);
}

std::vector<std::byte> encode_message(const MarketMessage& msg) {
    std::vector<std::byte> out;
    out.reserve(34);
    encode_message(msg, out);
    return out;
}

DecodedFrame decode_frame_prefix(std::span<const std::byte> bytes) {
    if (bytes.size() < kFrameHeaderSize) {
        throw Error(Errc::TruncatedFrame, "frame header needs " + std::to_string(kFrameHeaderSize) +
                                              " bytes, have " + std::to_string(bytes.size()));
    }
    Reader in(bytes);
    constexpr auto t = Errc::TruncatedFrame;
    if (in.read<std::uint32_t>(t) != kMagic) throw Error(Errc::BadMagic, "frame does not start with LOBF");

    DecodedFrame out;
    out.frame.session_id = in.read<std::uint32_t>(t);
    out.frame.sequence_number = in.read<std::uint64_t>(t);
    const auto count = in.read<std::uint16_t>(t);
    out.frame.messages.reserve(count);

    std::size_t pos = in.position();
    for (std::uint16_t i = 0; i < count; ++i) {
        if (pos >= bytes.size()) {
            throw Error(Errc::TruncatedFrame, "frame declares " + std::to_string(count) + " messages, found " +
                                                  std::to_string(i));
        }
        const auto length = std::to_integer<std::size_t>(bytes[pos]);
        if (bytes.size() - pos < 1 + length) {
            throw Error(Errc::TruncatedFrame, "message " + std::to_string(i) + " overruns the buffer");
        }
        out.frame.messages.push_back(decode_message(bytes.subspan(pos, 1 + length)));
        pos += 1 + length;
    }
    out.consumed = pos;
    return out;
}

LobfFrame decode_frame(std::span<const std::byte> bytes) {
    auto decoded = decode_frame_prefix(bytes);
    if (decoded.consumed != bytes.size()) {
        throw Error(Errc::LengthMismatch, std::to_string(bytes.size() - decoded.consumed) +
                                              " trailing bytes after frame");
    }
    return std::move(decoded.frame);
}

void encode_frame(const LobfFrame& frame, std::vector<std::byte>& out) {
    if (frame.messages.size() > 0xFFFF) {
        throw Error(Errc::FormatError, "frame holds more than 65535 messages");
    }
    put(out, kMagic);
    put(out, frame.session_id);
    put(out, frame.sequence_number);
    put(out, static_cast<std::uint16_t>(frame.messages.size()));
    for (const auto& m : frame.messages) encode_message(m, out);
}

std::vector<std::byte> encode_frame(const LobfFrame& frame) {
    std::vector<std::byte> out;
    encode_frame(frame, out);
    return out;
}

std::vector<LobfFrame> decode_stream(std::span<const std::byte> bytes) {
    struct SessionState {
        std::uint64_t next_sequence = 0;
        Timestamp last_timestamp = 0;
    };
    std::map<std::uint32_t, SessionState> sessions;
    std::vector<LobfFrame> frames;

    std::size_t pos = 0;
    while (pos < bytes.size()) {
        auto decoded = decode_frame_prefix(bytes.subspan(pos));
        auto& frame = decoded.frame;
        auto [it, fresh] = sessions.try_emplace(frame.session_id);
        auto& state = it->second;
        if (!fresh && frame.sequence_number != state.next_sequence) {
            throw Error(Errc::SequenceGap, "session " + std::to_string(frame.session_id) + " expected sequence " +
                                               std::to_string(state.next_sequence) + ", got " +
                                               std::to_string(frame.sequence_number));
        }
        for (const auto& m : frame.messages) {
            const auto ts = timestamp_of(m);
            if (ts < state.last_timestamp) {
                throw Error(Errc::TimestampRegression,
                            "session " + std::to_string(frame.session_id) + " timestamp went backwards");
            }
            state.last_timestamp = ts;
        }
        state.next_sequence = frame.sequence_number + frame.messages.size();
        frames.push_back(std::move(frame));
        pos += decoded.consumed;
    }
    return frames;
}

std::vector<std::byte> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::byte> bytes(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) bytes[i] = static_cast<std::byte>(raw[i]);
    return bytes;
}

}  // namespace lobrate::feed
