#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mf {

/// Unordered collection of distinct strings, stored sorted.
struct SetPayload {
  std::vector<std::string> items;
};

struct CategoryPayload {
  std::string label;
};

/// Ordered token sequence; duplicates allowed, may be empty.
struct TokensPayload {
  std::vector<std::string> tokens;
};

struct VectorPayload {
  Eigen::VectorXd values;
};

using OutputPayload = std::variant<SetPayload, CategoryPayload, TokensPayload, VectorPayload>;

enum class PayloadKind { Set, Category, Tokens, ScalarVec };

PayloadKind kind_of(const OutputPayload& payload) noexcept;
const char* to_string(PayloadKind kind) noexcept;

/// Builds a SET payload. Throws InvalidArgument on duplicate elements.
SetPayload make_set(std::vector<std::string> items);

struct RunRecord {
  std::string dataset_id;
  std::string question_id;
  std::int64_t run_index = 0;
  OutputPayload output;
  double score = 0.0;
  std::optional<Eigen::VectorXd> trace_vector;
  std::optional<std::string> approach_hint;  // opaque diversity-planner seed
};

struct Provenance {
  std::string source;
  std::chrono::system_clock::time_point ingested_at;
};

struct RunSet {
  std::vector<RunRecord> records;
  Provenance provenance;
  std::size_t unknown_fields = 0;  // ignored keys, summed over all lines
};

struct QuestionGroup {
  std::string dataset_id;
  std::string question_id;
  std::vector<RunRecord> runs;
};

/// Absolute tolerance below which a question's score spread counts as "all equal".
inline constexpr double kMixedScoreTolerance = 1e-9;

/// Parses JSON Lines, one record per non-blank line, preserving order.
/// Throws MalformedLine / ScoreOutOfRange (with line number) or DuplicateKey.
RunSet parse_run_records(std::istream& in, std::string source = "<stream>");

/// Reads and parses a file. Throws Io when it cannot be opened.
RunSet read_run_records(const std::filesystem::path& path);

/// Serializes records in the same schema parse_run_records accepts.
void write_run_records(std::ostream& out, std::span<const RunRecord> records);

/// Rejects empty sets and trace vectors of differing dimension inside a question.
void validate(const RunSet& set);

/// One group per (dataset_id, question_id), groups sorted by key and runs by run_index.
std::vector<QuestionGroup> group_by_question(const RunSet& set);

/// Keeps the groups whose score range exceeds the tolerance, in order.
std::vector<QuestionGroup> filter_mixed_questions(std::span<const QuestionGroup> groups,
                                                  double score_tolerance = kMixedScoreTolerance);

bool is_mixed(const QuestionGroup& group, double score_tolerance = kMixedScoreTolerance);

}  // namespace mf
