#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dogid {

// Numeric values are part of the C ABI (see dogid.h) and must not be reordered.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  Io = 2,
  // raster
  MalformedHeader = 10,
  TruncatedPixelData = 11,
  UnsupportedMaxval = 12,
  EmptyAfterClamp = 13,
  // landmarks
  MissingColumn = 20,
  NonNumericCoordinate = 21,
  DuplicateImageId = 22,
  DegenerateEyes = 23,
  NotAligned = 24,
  NonPositiveLength = 25,
  // matcher
  ZeroVariance = 30,
  EmptyTrainingSet = 31,
  ZeroCentroid = 32,
  NegativeScore = 33,
  ScoreAboveOne = 34,
  DuplicateProbeId = 35,
  EmptySubset = 36,
  NonNumericValue = 37,
  // fusion
  LabelMismatch = 40,
  ProbeSetMismatch = 41,
  // softbio
  UnknownIdentity = 50,
  NoCandidateMatches = 51,
  DuplicateIdentity = 52,
  InvalidGender = 53,
  EmptyField = 54,
  // eval
  UnknownLabel = 60,
  EmptyEvaluation = 61,
  EmptyClassRow = 62,
  // pipeline
  InvalidConfig = 70,
  AlreadyAugmented = 71,
  RowFailures = 72,
  AugmentedInTestFold = 73,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dogid
