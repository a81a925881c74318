#include "metricfreedom/distance.hpp"

#include <variant>

namespace mf {

namespace {

template <typename Payload>
const Payload& payload_as(const RunRecord& run, DistanceKind kind) {
  if (const auto* p = std::get_if<Payload>(&run.output)) return *p;
  throw Error(ErrorCode::KindMismatch, std::string("distance '") + to_string(kind) + "' cannot read a '" +
                                           to_string(kind_of(run.output)) + "' output (question " + run.question_id +
                                           ", run " + std::to_string(run.run_index) + ")");
}

const Eigen::VectorXd& trace_of(const RunRecord& run) {
  if (!run.trace_vector) {
    throw Error(ErrorCode::MissingTrace,
                "run " + std::to_string(run.run_index) + " of question " + run.question_id + " has no trace vector");
  }
  return *run.trace_vector;
}

double scalar_position(const RunRecord& run) {
  const auto& v = payload_as<VectorPayload>(run, DistanceKind::AbsScore).values;
  if (v.size() != 1) {
    throw Error(ErrorCode::KindMismatch, "distance 'abs' needs one-element vector outputs, got size " +
                                             std::to_string(v.size()));
  }
  return v(0);
}

}  // namespace

DistanceKind parse_distance_kind(std::string_view name) {
  if (name == "jaccard") return DistanceKind::JaccardSet;
  if (name == "indicator") return DistanceKind::Indicator;
  if (name == "token-jaccard") return DistanceKind::TokenJaccard;
  if (name == "cosine") return DistanceKind::Cosine;
  if (name == "abs") return DistanceKind::AbsScore;
  throw Error(ErrorCode::InvalidArgument, "unknown distance '" + std::string(name) + "'");
}

const char* to_string(DistanceKind kind) noexcept {
  switch (kind) {
    case DistanceKind::JaccardSet: return "jaccard";
    case DistanceKind::Indicator: return "indicator";
    case DistanceKind::TokenJaccard: return "token-jaccard";
    case DistanceKind::Cosine: return "cosine";
    case DistanceKind::AbsScore: return "abs";
  }
  return "?";
}

double jaccard_distance(const SetPayload& a, const SetPayload& b) { return sorted_jaccard_distance(a.items, b.items); }

double indicator_distance(const CategoryPayload& a, const CategoryPayload& b) {
  return a.label == b.label ? 0.0 : 1.0;
}

double token_jaccard(const TokensPayload& a, const TokensPayload& b) {
  auto dedup = [](std::vector<std::string> tokens) {
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
  };
  return sorted_jaccard_distance(dedup(a.tokens), dedup(b.tokens));
}

DistanceMatrix build_distance_matrix(std::span<const RunRecord> runs, const DistanceSpec& spec) {
  const auto n = static_cast<Eigen::Index>(runs.size());
  const auto kernel = [&](Eigen::Index i, Eigen::Index j) -> double {
    const RunRecord& a = runs[static_cast<std::size_t>(i)];
    const RunRecord& b = runs[static_cast<std::size_t>(j)];
    switch (spec.kind) {
      case DistanceKind::JaccardSet:
        return jaccard_distance(payload_as<SetPayload>(a, spec.kind), payload_as<SetPayload>(b, spec.kind));
      case DistanceKind::Indicator:
        return indicator_distance(payload_as<CategoryPayload>(a, spec.kind),
                                  payload_as<CategoryPayload>(b, spec.kind));
      case DistanceKind::TokenJaccard:
        return token_jaccard(payload_as<TokensPayload>(a, spec.kind), payload_as<TokensPayload>(b, spec.kind));
      case DistanceKind::Cosine:
        return cosine_distance(trace_of(a), trace_of(b));
      case DistanceKind::AbsScore:
        return score_distance(scalar_position(a), scalar_position(b));
    }
    return 0.0;
  };
  return build_distance_matrix<double>(n, kernel, spec.alpha);
}

DistanceMatrix score_distance_matrix(std::span<const RunRecord> runs) {
  return build_distance_matrix<double>(static_cast<Eigen::Index>(runs.size()), [&](Eigen::Index i, Eigen::Index j) {
    return score_distance(runs[static_cast<std::size_t>(i)].score, runs[static_cast<std::size_t>(j)].score);
  });
}

}  // namespace mf
