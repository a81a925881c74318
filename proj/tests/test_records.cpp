#include "helpers.hpp"

#include "metricfreedom/records.hpp"

#include <doctest.h>

#include <sstream>

using namespace mf;

namespace {

RunSet parse(const std::string& text) {
  std::istringstream in(text);
  return parse_run_records(in);
}

ErrorCode code_of(const std::string& text, std::optional<long>* line = nullptr) {
  try {
    parse(text);
  } catch (const Error& e) {
    if (line) *line = e.line();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("parses every output kind") {
  const auto set = parse(
      R"({"dataset_id":"d","question_id":"q","run_index":0,"output":{"kind":"set","value":["b","a"]},"score":0.5})"
      "\n\n"
      R"({"dataset_id":"d","question_id":"q","run_index":1,"output":{"kind":"category","value":"IV"},"score":1})"
      "\r\n"
      R"({"dataset_id":"d","question_id":"q","run_index":2,"output":{"kind":"tokens","value":["x","x","y"]},"score":0})"
      "\n"
      R"({"dataset_id":"d","question_id":"q","run_index":3,"output":{"kind":"vector","value":[1,2]},"score":0.25,"trace_vector":[0,1]})");
  REQUIRE(set.records.size() == 4);
  CHECK(std::get<SetPayload>(set.records[0].output).items == std::vector<std::string>{"a", "b"});
  CHECK(std::get<CategoryPayload>(set.records[1].output).label == "IV");
  CHECK(std::get<TokensPayload>(set.records[2].output).tokens.size() == 3);
  CHECK(std::get<VectorPayload>(set.records[3].output).values.size() == 2);
  CHECK(set.records[3].trace_vector->size() == 2);
  CHECK(set.unknown_fields == 0);
}

TEST_CASE("unknown fields are counted, not fatal") {
  const auto set = parse(
      R"({"dataset_id":"d","question_id":"q","run_index":0,"output":{"kind":"category","value":"a","note":1},"score":0.5,"extra":true})");
  CHECK(set.unknown_fields == 2);
}

TEST_CASE("malformed input reports the line") {
  std::optional<long> line;
  CHECK(code_of("\n{not json}\n", &line) == ErrorCode::MalformedLine);
  CHECK(line == 2);
  CHECK(code_of(R"({"dataset_id":"d","question_id":"q","run_index":0,"score":0.5})") == ErrorCode::MalformedLine);
  CHECK(code_of(R"({"dataset_id":"d","question_id":"q","run_index":0,"output":{"kind":"set","value":["a","a"]},"score":0.5})") ==
        ErrorCode::MalformedLine);
  CHECK(code_of(R"({"dataset_id":"d","question_id":"q","run_index":0,"output":{"kind":"blob","value":1},"score":0.5})") ==
        ErrorCode::MalformedLine);
}

TEST_CASE("score outside [0,1] is rejected with its line") {
  std::optional<long> line;
  const std::string ok = R"({"dataset_id":"d","question_id":"q","run_index":0,"output":{"kind":"category","value":"a"},"score":0.5})";
  const std::string bad = R"({"dataset_id":"d","question_id":"q","run_index":1,"output":{"kind":"category","value":"a"},"score":1.5})";
  CHECK(code_of(ok + "\n" + bad, &line) == ErrorCode::ScoreOutOfRange);
  CHECK(line == 2);
}

TEST_CASE("duplicate run key") {
  const std::string row = R"({"dataset_id":"d","question_id":"q","run_index":0,"output":{"kind":"category","value":"a"},"score":0.5})";
  CHECK(code_of(row + "\n" + row) == ErrorCode::DuplicateKey);
}

TEST_CASE("validate rejects empty sets and ragged traces") {
  RunSet empty;
  CHECK_THROWS_AS(validate(empty), Error);

  RunSet set;
  set.records.push_back(testing::category_run("q", 0, "a", 0.0));
  set.records.push_back(testing::category_run("q", 1, "a", 1.0));
  set.records[0].trace_vector = Eigen::Vector2d(1, 0);
  set.records[1].trace_vector = Eigen::Vector3d(1, 0, 0);
  try {
    validate(set);
    FAIL("expected TRACE_DIM_MISMATCH");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TraceDimMismatch);
  }
}

TEST_CASE("grouping orders questions by key and runs by index") {
  RunSet set;
  set.records.push_back(testing::category_run("q2", 1, "a", 0.0));
  set.records.push_back(testing::category_run("q1", 2, "a", 0.0));
  set.records.push_back(testing::category_run("q1", 0, "b", 1.0));
  set.records.push_back(testing::category_run("q2", 0, "a", 0.0));
  const auto groups = group_by_question(set);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].question_id == "q1");
  CHECK(groups[0].runs[0].run_index == 0);
  CHECK(groups[1].runs[1].run_index == 1);
  CHECK(is_mixed(groups[0]));
  CHECK_FALSE(is_mixed(groups[1]));
  CHECK(filter_mixed_questions(groups).size() == 1);
}

TEST_CASE("mixed filter uses the score tolerance") {
  QuestionGroup g;
  g.runs.push_back(testing::category_run("q", 0, "a", 0.5));
  g.runs.push_back(testing::category_run("q", 1, "a", 0.5 + 1e-10));
  CHECK_FALSE(is_mixed(g));
  g.runs.push_back(testing::category_run("q", 2, "a", 0.5 + 1e-8));
  CHECK(is_mixed(g));
}

TEST_CASE("write and parse round trip") {
  std::vector<RunRecord> runs;
  runs.push_back(testing::category_run("q", 0, "a", 0.1));
  runs.push_back(testing::position_run("q", 1, 0.3, 0.7));
  runs[1].trace_vector = Eigen::Vector2d(0.25, -1.5);
  RunRecord tokens = testing::category_run("q", 2, "", 1.0);
  tokens.output = TokensPayload{{"x", "y", "x"}};
  runs.push_back(tokens);
  RunRecord s = testing::category_run("q", 3, "", 0.0);
  s.output = make_set({"b", "a"});
  runs.push_back(s);

  std::ostringstream out;
  write_run_records(out, runs);
  const auto back = parse(out.str());
  REQUIRE(back.records.size() == runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    CHECK(back.records[i].score == runs[i].score);
    CHECK(kind_of(back.records[i].output) == kind_of(runs[i].output));
  }
  CHECK(std::get<VectorPayload>(back.records[1].output).values(0) == 0.3);
  CHECK((*back.records[1].trace_vector - Eigen::Vector2d(0.25, -1.5)).norm() == 0.0);
  CHECK(std::get<SetPayload>(back.records[3].output).items == std::vector<std::string>{"a", "b"});
}

TEST_CASE("missing file is an IO error") {
  try {
    read_run_records("/nonexistent/runs.jsonl");
    FAIL("expected IO error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}
