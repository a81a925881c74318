#include "metricfreedom/error.hpp"

namespace mf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedLine: return "MALFORMED_LINE";
    case ErrorCode::ScoreOutOfRange: return "SCORE_OUT_OF_RANGE";
    case ErrorCode::DuplicateKey: return "DUPLICATE_KEY";
    case ErrorCode::EmptyRunSet: return "EMPTY_RUN_SET";
    case ErrorCode::TraceDimMismatch: return "TRACE_DIM_MISMATCH";
    case ErrorCode::KindMismatch: return "KIND_MISMATCH";
    case ErrorCode::ZeroVector: return "ZERO_VECTOR";
    case ErrorCode::DimMismatch: return "DIM_MISMATCH";
    case ErrorCode::NTooSmall: return "N_TOO_SMALL";
    case ErrorCode::DegenerateScores: return "DEGENERATE_SCORES";
    case ErrorCode::DegenerateBehavior: return "DEGENERATE_BEHAVIOR";
    case ErrorCode::MissingTrace: return "MISSING_TRACE";
    case ErrorCode::MixedDatasets: return "MIXED_DATASETS";
    case ErrorCode::NoMixedQuestions: return "NO_MIXED_QUESTIONS";
    case ErrorCode::NoUsableQuestions: return "NO_USABLE_QUESTIONS";
    case ErrorCode::BootstrapCollapse: return "BOOTSTRAP_COLLAPSE";
    case ErrorCode::GridUnderfull: return "GRID_UNDERFULL";
    case ErrorCode::CeilingBaseline: return "CEILING_BASELINE";
    case ErrorCode::ConstantSeries: return "CONSTANT_SERIES";
    case ErrorCode::TooFewPoints: return "TOO_FEW_POINTS";
    case ErrorCode::KeyMismatch: return "KEY_MISMATCH";
    case ErrorCode::WeightSum: return "WEIGHT_SUM";
    case ErrorCode::AntiConcordant: return "ANTI_CONCORDANT";
    case ErrorCode::CalibrationFailed: return "CALIBRATION_FAILED";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<long> line)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), line_(line) {}

bool is_degenerate(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NTooSmall:
    case ErrorCode::DegenerateScores:
    case ErrorCode::DegenerateBehavior:
    case ErrorCode::MissingTrace:
    case ErrorCode::NoMixedQuestions:
    case ErrorCode::NoUsableQuestions:
      return true;
    default:
      return false;
  }
}

}  // namespace mf
