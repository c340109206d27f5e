#include "aiot/error.hpp"

namespace aiot {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MaxvalUnsupported: return "MaxvalUnsupported";
    case ErrorCode::TruncatedPixels: return "TruncatedPixels";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::DegenerateModel: return "DegenerateModel";
    case ErrorCode::BadLevelCount: return "BadLevelCount";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::CorruptCodeword: return "CorruptCodeword";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroCompressedSize: return "ZeroCompressedSize";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedSection: return "TruncatedSection";
    case ErrorCode::InvalidVariantTag: return "InvalidVariantTag";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnsupportedPlatform: return "UnsupportedPlatform";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace aiot
