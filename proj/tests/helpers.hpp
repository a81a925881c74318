#pragma once

#include "metricfreedom/distance.hpp"
#include "metricfreedom/records.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace testing {

inline mf::RunRecord category_run(std::string question, std::int64_t index, std::string label, double score,
                                  std::string dataset = "d") {
  mf::RunRecord r;
  r.dataset_id = std::move(dataset);
  r.question_id = std::move(question);
  r.run_index = index;
  r.output = mf::CategoryPayload{std::move(label)};
  r.score = score;
  return r;
}

inline mf::RunRecord position_run(std::string question, std::int64_t index, double x, double score,
                                  std::string dataset = "d") {
  mf::RunRecord r;
  r.dataset_id = std::move(dataset);
  r.question_id = std::move(question);
  r.run_index = index;
  r.output = mf::VectorPayload{Eigen::VectorXd::Constant(1, x)};
  r.score = score;
  return r;
}

/// |a_i - a_j| matrix.
inline mf::DistanceMatrix abs_matrix(const std::vector<double>& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  return mf::build_distance_matrix<double>(n, [&](Eigen::Index i, Eigen::Index j) { return std::abs(a[i] - a[j]); });
}

}  // namespace testing
