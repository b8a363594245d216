#include <gtest/gtest.h>

#include <random>

#include "lobrate/error.hpp"
#include "lobrate/feed.hpp"
#include "test_util.hpp"

using namespace lobrate;
using namespace lobrate::feed;

namespace {

std::vector<std::byte> bytes(std::initializer_list<int> values) {
    std::vector<std::byte> out;
    for (int v : values) out.push_back(static_cast<std::byte>(v));
    return out;
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return Errc::IoError;
}

}  // namespace

TEST(FeedMessage, AddLayoutIsBigEndian) {
    // Add(ts=1000, id=7, Buy, price=1214, qty=100)
    const auto raw = bytes({26, 0x41,                                     // length, kind
                            0, 0, 0, 0, 0, 0, 0x03, 0xE8,                 // ts
                            0, 0, 0, 0, 0, 0, 0, 7,                       // id
                            0,                                            // side
                            0, 0, 0x04, 0xBE,                             // price 1214
                            0, 0, 0, 100});                               // qty
    const auto msg = decode_message(raw);
    ASSERT_TRUE(std::holds_alternative<AddOrder>(msg));
    EXPECT_EQ(std::get<AddOrder>(msg), (AddOrder{1000, 7, Side::Buy, 1214, 100}));
    EXPECT_EQ(encode_message(msg), raw);
}

TEST(FeedMessage, EncodedSizes) {
    EXPECT_EQ(encode_message(AddOrder{0, 1, Side::Sell, 1217, 50}).size(), 27u);
    EXPECT_EQ(encode_message(CancelOrder{0, 1, 5}).size(), 22u);
    EXPECT_EQ(encode_message(DeleteOrder{0, 1}).size(), 18u);
    EXPECT_EQ(encode_message(ExecuteOrder{0, 1, 5}).size(), 22u);
    EXPECT_EQ(encode_message(ReplaceOrder{0, 1, 2, 1215, 10}).size(), 34u);
}

TEST(FeedMessage, ReplaceCarriesBothIds) {
    const auto raw = encode_message(ReplaceOrder{5, 0x1111, 0x2222, 1215, 10});
    // length, kind, ts(8), old id(8), new id(8)
    EXPECT_EQ(std::to_integer<int>(raw[1]), 0x55);
    EXPECT_EQ(std::to_integer<int>(raw[2 + 8 + 6]), 0x11);
    EXPECT_EQ(std::to_integer<int>(raw[2 + 8 + 7]), 0x11);
    EXPECT_EQ(std::to_integer<int>(raw[2 + 16 + 6]), 0x22);
    EXPECT_EQ(std::to_integer<int>(raw[2 + 16 + 7]), 0x22);
}

TEST(FeedMessage, ZeroQuantityRejected) {
    auto raw = encode_message(AddOrder{0, 1, Side::Buy, 1214, 1});
    raw.back() = std::byte{0};
    EXPECT_EQ(code_of([&] { decode_message(raw); }), Errc::ZeroQuantity);

    auto cancel = encode_message(CancelOrder{0, 1, 1});
    cancel.back() = std::byte{0};
    EXPECT_EQ(code_of([&] { decode_message(cancel); }), Errc::ZeroQuantity);
}

TEST(FeedMessage, UnknownKindRejected) {
    auto raw = encode_message(DeleteOrder{0, 1});
    raw[1] = std::byte{0xFF};
    EXPECT_EQ(code_of([&] { decode_message(raw); }), Errc::UnknownMessageKind);
}

TEST(FeedMessage, LengthMismatchRejected) {
    auto raw = encode_message(DeleteOrder{0, 1});
    raw[0] = std::byte{21};  // claims Cancel length for a Delete body
    EXPECT_EQ(code_of([&] { decode_message(raw); }), Errc::LengthMismatch);
    raw = encode_message(DeleteOrder{0, 1});
    raw.pop_back();
    EXPECT_EQ(code_of([&] { decode_message(raw); }), Errc::LengthMismatch);
}

TEST(FeedFrame, EmptyFrame) {
    LobfFrame f;
    f.session_id = 1;
    f.sequence_number = 0;
    const auto raw = encode_frame(f);
    EXPECT_EQ(raw.size(), kFrameHeaderSize);
    const auto back = decode_frame(raw);
    EXPECT_EQ(back.session_id, 1u);
    EXPECT_TRUE(back.messages.empty());
}

TEST(FeedFrame, ShortHeaderIsTruncated) {
    std::vector<std::byte> raw(13);
    EXPECT_EQ(code_of([&] { decode_frame(raw); }), Errc::TruncatedFrame);
    raw.resize(kFrameHeaderSize - 1);
    EXPECT_EQ(code_of([&] { decode_frame(raw); }), Errc::TruncatedFrame);
}

TEST(FeedFrame, BadMagic) {
    auto raw = encode_frame(LobfFrame{});
    raw[0] = std::byte{'X'};
    EXPECT_EQ(code_of([&] { decode_frame(raw); }), Errc::BadMagic);
}

TEST(FeedFrame, DeclaredCountBeyondPayloadIsTruncated) {
    LobfFrame f;
    f.messages.push_back(DeleteOrder{1, 2});
    f.messages.push_back(DeleteOrder{1, 3});
    auto raw = encode_frame(f);
    raw.resize(raw.size() - 5);
    EXPECT_EQ(code_of([&] { decode_frame(raw); }), Errc::TruncatedFrame);
}

TEST(FeedFrame, PayloadLengthEqualsSumOfRecords) {
    LobfFrame f;
    f.session_id = 20170801;
    f.sequence_number = 42;
    f.messages = {AddOrder{1, 1, Side::Buy, 1214, 100}, CancelOrder{2, 1, 10}, ExecuteOrder{3, 1, 5},
                  ReplaceOrder{4, 1, 2, 1213, 50}, DeleteOrder{5, 2}};
    const auto raw = encode_frame(f);
    std::size_t records = 0;
    for (const auto& m : f.messages) records += 1 + record_length(kind_of(m));
    EXPECT_EQ(raw.size() - kFrameHeaderSize, records);
    EXPECT_EQ(decode_frame(raw), f);
}

TEST(FeedStream, SequenceGapDetected) {
    std::vector<std::byte> raw;
    LobfFrame a;
    a.session_id = 7;
    a.sequence_number = 0;
    a.messages = {DeleteOrder{1, 1}, DeleteOrder{2, 2}};
    encode_frame(a, raw);
    LobfFrame b = a;
    b.sequence_number = 3;  // expected 2
    encode_frame(b, raw);
    EXPECT_EQ(code_of([&] { decode_stream(raw); }), Errc::SequenceGap);
}

TEST(FeedStream, TimestampRegressionDetected) {
    LobfFrame a;
    a.messages = {DeleteOrder{5, 1}, DeleteOrder{4, 2}};
    const auto raw = encode_frame(a);
    EXPECT_EQ(code_of([&] { decode_stream(raw); }), Errc::TimestampRegression);
}

TEST(FeedProperty, RandomMessagesRoundTrip) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10'000; ++i) {
        const auto msg = testutil::random_message(rng);
        EXPECT_EQ(decode_message(encode_message(msg)), msg);
    }
}

TEST(FeedProperty, RandomFramesRoundTripByteExact) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
        LobfFrame f;
        f.session_id = static_cast<std::uint32_t>(rng());
        f.sequence_number = rng();
        const auto n = rng() % 40;
        for (std::uint64_t j = 0; j < n; ++j) f.messages.push_back(testutil::random_message(rng));
        const auto raw = encode_frame(f);
        EXPECT_EQ(encode_frame(decode_frame(raw)), raw);
    }
}

TEST(FeedProperty, FuzzedBytesRaiseTypedErrorsOnly) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20'000; ++i) {
        auto raw = testutil::random_bytes(rng, i % 2 == 0);
        try {
            (void)decode_frame(raw);
        } catch (const Error&) {
        }
    }
    SUCCEED();
}
