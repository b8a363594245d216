#include "lobrate/error.hpp"

namespace lobrate {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::TruncatedFrame: return "TruncatedFrame";
        case Errc::BadMagic: return "BadMagic";
        case Errc::UnknownMessageKind: return "UnknownMessageKind";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::ZeroQuantity: return "ZeroQuantity";
        case Errc::ZeroPrice: return "ZeroPrice";
        case Errc::SequenceGap: return "SequenceGap";
        case Errc::TimestampRegression: return "TimestampRegression";
        case Errc::UnknownOrderId: return "UnknownOrderId";
        case Errc::OverCancel: return "OverCancel";
        case Errc::DuplicateOrderId: return "DuplicateOrderId";
        case Errc::MissingReference: return "MissingReference";
        case Errc::OutsideTradingHours: return "OutsideTradingHours";
        case Errc::EmptyBucket: return "EmptyBucket";
        case Errc::DomainError: return "DomainError";
        case Errc::DegenerateData: return "DegenerateData";
        case Errc::NonConvergence: return "NonConvergence";
        case Errc::InsufficientData: return "InsufficientData";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::AllZero: return "AllZero";
        case Errc::SpecError: return "SpecError";
        case Errc::MissingTicks: return "MissingTicks";
        case Errc::IoError: return "IoError";
        case Errc::FormatError: return "FormatError";
    }
    return "Unknown";
}

}  // namespace lobrate
