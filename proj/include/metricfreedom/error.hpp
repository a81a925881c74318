#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace mf {

enum class ErrorCode {
  MalformedLine,
  ScoreOutOfRange,
  DuplicateKey,
  EmptyRunSet,
  TraceDimMismatch,
  KindMismatch,
  ZeroVector,
  DimMismatch,
  NTooSmall,
  DegenerateScores,
  DegenerateBehavior,
  MissingTrace,
  MixedDatasets,
  NoMixedQuestions,
  NoUsableQuestions,
  BootstrapCollapse,
  GridUnderfull,
  CeilingBaseline,
  ConstantSeries,
  TooFewPoints,
  KeyMismatch,
  WeightSum,
  AntiConcordant,
  CalibrationFailed,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Ingestion errors also carry
/// the 1-based line number of the offending JSON Lines record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<long> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<long> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<long> line_;
};

/// True for the codes that mean "this sample carries no rank information";
/// resampling loops skip these instead of aborting.
bool is_degenerate(ErrorCode code) noexcept;

}  // namespace mf
