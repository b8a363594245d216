#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lobrate {

enum class Errc {
    // feed
    TruncatedFrame,
    BadMagic,
    UnknownMessageKind,
    LengthMismatch,
    ZeroQuantity,
    ZeroPrice,
    SequenceGap,
    TimestampRegression,
    // book
    UnknownOrderId,
    OverCancel,
    DuplicateOrderId,
    MissingReference,
    // rates
    OutsideTradingHours,
    EmptyBucket,
    // dist / stats
    DomainError,
    DegenerateData,
    NonConvergence,
    InsufficientData,
    ZeroVariance,
    AllZero,
    // synth / cli
    SpecError,
    MissingTicks,
    IoError,
    FormatError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace lobrate
