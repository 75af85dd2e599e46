#include "dogid/error.hpp"

namespace dogid {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedPixelData: return "TruncatedPixelData";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::EmptyAfterClamp: return "EmptyAfterClamp";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericCoordinate: return "NonNumericCoordinate";
    case ErrorCode::DuplicateImageId: return "DuplicateImageId";
    case ErrorCode::DegenerateEyes: return "DegenerateEyes";
    case ErrorCode::NotAligned: return "NotAligned";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::ZeroCentroid: return "ZeroCentroid";
    case ErrorCode::NegativeScore: return "NegativeScore";
    case ErrorCode::ScoreAboveOne: return "ScoreAboveOne";
    case ErrorCode::DuplicateProbeId: return "DuplicateProbeId";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::ProbeSetMismatch: return "ProbeSetMismatch";
    case ErrorCode::UnknownIdentity: return "UnknownIdentity";
    case ErrorCode::NoCandidateMatches: return "NoCandidateMatches";
    case ErrorCode::DuplicateIdentity: return "DuplicateIdentity";
    case ErrorCode::InvalidGender: return "InvalidGender";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::EmptyClassRow: return "EmptyClassRow";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::AlreadyAugmented: return "AlreadyAugmented";
    case ErrorCode::RowFailures: return "RowFailures";
    case ErrorCode::AugmentedInTestFold: return "AugmentedInTestFold";
  }
  return "Unknown";
}

}  // namespace dogid
