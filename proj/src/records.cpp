#include "metricfreedom/records.hpp"

#include "metricfreedom/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace mf {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownFields = {"dataset_id", "question_id", "run_index", "output",
                                            "score",      "trace_vector", "approach_hint"};

[[noreturn]] void malformed(long line_no, const std::string& what) {
  throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + what, line_no);
}

const json& require(const json& obj, const char* key, long line_no) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) malformed(line_no, std::string("missing field '") + key + "'");
  return *it;
}

std::vector<std::string> string_array(const json& value, long line_no, const char* what) {
  if (!value.is_array()) malformed(line_no, std::string(what) + " value must be an array of strings");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) malformed(line_no, std::string(what) + " value must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Eigen::VectorXd number_array(const json& value, long line_no, const char* what) {
  if (!value.is_array() || value.empty()) malformed(line_no, std::string(what) + " must be a non-empty array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(value.size()));
  Eigen::Index i = 0;
  for (const auto& item : value) {
    if (!item.is_number()) malformed(line_no, std::string(what) + " must be a non-empty array of numbers");
    out(i++) = item.get<double>();
  }
  return out;
}

OutputPayload parse_output(const json& output, long line_no, std::size_t& unknown) {
  if (!output.is_object()) malformed(line_no, "'output' must be an object");
  const json& kind = require(output, "kind", line_no);
  const json& value = require(output, "value", line_no);
  if (!kind.is_string()) malformed(line_no, "'output.kind' must be a string");
  for (const auto& item : output.items()) {
    if (item.key() != "kind" && item.key() != "value") ++unknown;
  }

  const auto k = kind.get<std::string>();
  if (k == "set") {
    auto items = string_array(value, line_no, "set");
    std::sort(items.begin(), items.end());
    if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
      malformed(line_no, "set output contains duplicate elements");
    }
    return SetPayload{std::move(items)};
  }
  if (k == "category") {
    if (!value.is_string()) malformed(line_no, "category value must be a string");
    return CategoryPayload{value.get<std::string>()};
  }
  if (k == "tokens") return TokensPayload{string_array(value, line_no, "tokens")};
  if (k == "vector") return VectorPayload{number_array(value, line_no, "vector value")};
  malformed(line_no, "unknown output kind '" + k + "'");
}

RunRecord parse_line(const std::string& line, long line_no, std::size_t& unknown) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    malformed(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) malformed(line_no, "record must be a JSON object");

  RunRecord rec;
  const json& dataset = require(obj, "dataset_id", line_no);
  const json& question = require(obj, "question_id", line_no);
  const json& run_index = require(obj, "run_index", line_no);
  const json& score = require(obj, "score", line_no);
  if (!dataset.is_string()) malformed(line_no, "'dataset_id' must be a string");
  if (!question.is_string()) malformed(line_no, "'question_id' must be a string");
  if (!run_index.is_number_integer() || run_index.get<std::int64_t>() < 0) {
    malformed(line_no, "'run_index' must be a non-negative integer");
  }
  if (!score.is_number()) malformed(line_no, "'score' must be a number");

  rec.dataset_id = dataset.get<std::string>();
  rec.question_id = question.get<std::string>();
  rec.run_index = run_index.get<std::int64_t>();
  rec.output = parse_output(require(obj, "output", line_no), line_no, unknown);
  rec.score = score.get<double>();
  if (!(rec.score >= 0.0 && rec.score <= 1.0)) {
    throw Error(ErrorCode::ScoreOutOfRange,
                "line " + std::to_string(line_no) + ": score " + score.dump() + " outside [0,1]", line_no);
  }

  if (const auto it = obj.find("trace_vector"); it != obj.end() && !it->is_null()) {
    rec.trace_vector = number_array(*it, line_no, "'trace_vector'");
  }
  if (const auto it = obj.find("approach_hint"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) malformed(line_no, "'approach_hint' must be a string");
    rec.approach_hint = it->get<std::string>();
  }
  for (const auto& item : obj.items()) {
    if (!kKnownFields.contains(item.key())) ++unknown;
  }
  return rec;
}

json payload_to_json(const OutputPayload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SetPayload>) {
          return {{"kind", "set"}, {"value", p.items}};
        } else if constexpr (std::is_same_v<T, CategoryPayload>) {
          return {{"kind", "category"}, {"value", p.label}};
        } else if constexpr (std::is_same_v<T, TokensPayload>) {
          return {{"kind", "tokens"}, {"value", p.tokens}};
        } else {
          return {{"kind", "vector"},
                  {"value", std::vector<double>(p.values.data(), p.values.data() + p.values.size())}};
        }
      },
      payload);
}

}  // namespace

PayloadKind kind_of(const OutputPayload& payload) noexcept {
  return static_cast<PayloadKind>(payload.index());
}

const char* to_string(PayloadKind kind) noexcept {
  switch (kind) {
    case PayloadKind::Set: return "set";
    case PayloadKind::Category: return "category";
    case PayloadKind::Tokens: return "tokens";
    case PayloadKind::ScalarVec: return "vector";
  }
  return "?";
}

SetPayload make_set(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
    throw Error(ErrorCode::InvalidArgument, "set payload contains duplicate elements");
  }
  return SetPayload{std::move(items)};
}

RunSet parse_run_records(std::istream& in, std::string source) {
  RunSet set;
  set.provenance = {std::move(source), std::chrono::system_clock::now()};

  std::set<std::tuple<std::string, std::string, std::int64_t>> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    RunRecord rec = parse_line(line, line_no, set.unknown_fields);
    if (!seen.emplace(rec.dataset_id, rec.question_id, rec.run_index).second) {
      throw Error(ErrorCode::DuplicateKey,
                  "line " + std::to_string(line_no) + ": duplicate (dataset_id, question_id, run_index) = (" +
                      rec.dataset_id + ", " + rec.question_id + ", " + std::to_string(rec.run_index) + ")",
                  line_no);
    }
    set.records.push_back(std::move(rec));
  }
  return set;
}

RunSet read_run_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_run_records(in, path.string());
}

void write_run_records(std::ostream& out, std::span<const RunRecord> records) {
  for (const auto& r : records) {
    json obj = {{"dataset_id", r.dataset_id},
                {"question_id", r.question_id},
                {"run_index", r.run_index},
                {"output", payload_to_json(r.output)},
                {"score", r.score}};
    if (r.trace_vector) {
      obj["trace_vector"] =
          std::vector<double>(r.trace_vector->data(), r.trace_vector->data() + r.trace_vector->size());
    }
    if (r.approach_hint) obj["approach_hint"] = *r.approach_hint;
    out << obj.dump() << '\n';
  }
}

void validate(const RunSet& set) {
  if (set.records.empty()) throw Error(ErrorCode::EmptyRunSet, "run set is empty: " + set.provenance.source);

  std::map<std::pair<std::string, std::string>, Eigen::Index> dims;
  for (const auto& r : set.records) {
    if (!r.trace_vector) continue;
    const auto [it, inserted] = dims.try_emplace({r.dataset_id, r.question_id}, r.trace_vector->size());
    if (!inserted && it->second != r.trace_vector->size()) {
      throw Error(ErrorCode::TraceDimMismatch,
                  "trace vectors of question (" + r.dataset_id + ", " + r.question_id + ") have dimensions " +
                      std::to_string(it->second) + " and " + std::to_string(r.trace_vector->size()));
    }
  }
}

std::vector<QuestionGroup> group_by_question(const RunSet& set) {
  std::map<std::pair<std::string, std::string>, std::vector<RunRecord>> buckets;
  for (const auto& r : set.records) buckets[{r.dataset_id, r.question_id}].push_back(r);

  std::vector<QuestionGroup> groups;
  groups.reserve(buckets.size());
  for (auto& [key, runs] : buckets) {
    std::stable_sort(runs.begin(), runs.end(),
                     [](const RunRecord& a, const RunRecord& b) { return a.run_index < b.run_index; });
    groups.push_back({key.first, key.second, std::move(runs)});
  }
  return groups;
}

bool is_mixed(const QuestionGroup& group, double score_tolerance) {
  if (group.runs.empty()) return false;
  const auto [lo, hi] = std::minmax_element(group.runs.begin(), group.runs.end(),
                                            [](const RunRecord& a, const RunRecord& b) { return a.score < b.score; });
  return hi->score - lo->score > score_tolerance;
}

std::vector<QuestionGroup> filter_mixed_questions(std::span<const QuestionGroup> groups, double score_tolerance) {
  if (score_tolerance < 0.0) throw Error(ErrorCode::InvalidArgument, "score tolerance must be >= 0");
  std::vector<QuestionGroup> out;
  for (const auto& g : groups) {
    if (is_mixed(g, score_tolerance)) out.push_back(g);
  }
  return out;
}

}  // namespace mf
