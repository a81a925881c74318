#include "metricfreedom/lift.hpp"

#include "metricfreedom/freedom.hpp"
#include "metricfreedom/io.hpp"
#include "metricfreedom/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace mf {

namespace {

using nlohmann::json;

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> xs) {
  return {xs.data(), static_cast<Eigen::Index>(xs.size())};
}

LiftKey key_from(const json& entry) {
  try {
    return {entry.at("task").get<std::string>(), entry.at("dataset").get<std::string>(),
            entry.at("metric").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("lift entry needs task/dataset/metric strings: ") + e.what());
  }
}

double number_at(const json& entry, const char* field) {
  const auto it = entry.find(field);
  if (it == entry.end() || !it->is_number()) {
    throw Error(ErrorCode::InvalidArgument, std::string("lift entry needs numeric '") + field + "'");
  }
  return it->get<double>();
}

template <typename Entry>
std::map<LiftKey, const Entry*> index_by_key(std::span<const Entry> entries, const char* what) {
  std::map<LiftKey, const Entry*> out;
  for (const auto& e : entries) {
    if (!out.emplace(e.key, &e).second) {
      throw Error(ErrorCode::InvalidArgument, std::string("duplicate ") + what + " entry " + to_string(e.key));
    }
  }
  return out;
}

}  // namespace

double headroom_normalized_lift(double baseline, double skilled) {
  if (baseline >= 1.0 - 1e-12) {
    throw Error(ErrorCode::CeilingBaseline, "baseline " + io::format_double(baseline) + " leaves no headroom");
  }
  if (!(baseline >= 0.0)) throw Error(ErrorCode::InvalidArgument, "baseline must lie in [0, 1)");
  if (!(skilled >= 0.0 && skilled <= 1.0)) throw Error(ErrorCode::InvalidArgument, "skilled score must lie in [0, 1]");
  return (skilled - baseline) / (1.0 - baseline);
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  return pearson_r(as_vector(xs), as_vector(ys));
}

double permutation_p(std::span<const double> xs, std::span<const double> ys, int n_perm, std::uint64_t seed) {
  if (n_perm < 999) throw Error(ErrorCode::InvalidArgument, "n_perm must be >= 999");
  const double observed = pearson_r(xs, ys);
  const double threshold = std::abs(observed) - 1e-12;
  const auto x = as_vector(xs);
  Eigen::VectorXd shuffled = as_vector(ys);
  long extreme = 0;
  for (int t = 0; t < n_perm; ++t) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(t));
    shuffled = as_vector(ys);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (std::abs(stats::pearson(x, shuffled)) >= threshold) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(n_perm + 1);
}

LinearFit least_squares_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "least squares needs two or more paired points");
  }
  const auto x = as_vector(xs);
  const auto y = as_vector(ys);
  const Eigen::ArrayXd cx = x.array() - x.mean();
  const double sxx = cx.square().sum();
  if (sxx == 0.0) throw Error(ErrorCode::ConstantSeries, "least squares with a constant x series");
  LinearFit fit;
  fit.slope = (cx * (y.array() - y.mean())).sum() / sxx;
  fit.intercept = y.mean() - fit.slope * x.mean();
  return fit;
}

std::string to_string(const LiftKey& key) { return "(" + key.task + ", " + key.dataset + ", " + key.metric + ")"; }

std::vector<LiftRow> build_lift_table(std::span<const KeyedFreedom> freedom, std::span<const KeyedScore> baseline,
                                      std::span<const KeyedScore> skilled) {
  const auto f_index = index_by_key(freedom, "freedom");
  const auto b_index = index_by_key(baseline, "baseline");
  const auto s_index = index_by_key(skilled, "skilled");

  std::set<LiftKey> unmatched;
  for (const auto& [k, _] : f_index) {
    if (!b_index.contains(k) || !s_index.contains(k)) unmatched.insert(k);
  }
  for (const auto& [k, _] : b_index) {
    if (!f_index.contains(k) || !s_index.contains(k)) unmatched.insert(k);
  }
  for (const auto& [k, _] : s_index) {
    if (!f_index.contains(k) || !b_index.contains(k)) unmatched.insert(k);
  }
  if (!unmatched.empty()) {
    std::string names;
    for (const auto& k : unmatched) names += (names.empty() ? "" : ", ") + to_string(k);
    throw Error(ErrorCode::KeyMismatch, "unmatched lift keys: " + names);
  }

  std::vector<LiftRow> rows;
  rows.reserve(freedom.size());
  for (const auto& f : freedom) {
    const double base = b_index.at(f.key)->score;
    const double skill = s_index.at(f.key)->score;
    LiftRow row{f.key.task, f.key.dataset, f.key.metric, f.F, f.sigma_F, base, skill - base, 0.0};
    row.lift_norm = headroom_normalized_lift(base, skill);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const LiftRow& a, const LiftRow& b) { return a.F < b.F; });
  return rows;
}

LiftInputs parse_lift_inputs(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("lift table is not valid JSON: ") + e.what());
  }
  for (const char* section : {"freedom", "baseline", "skilled"}) {
    if (!doc.is_object() || !doc.contains(section) || !doc[section].is_array()) {
      throw Error(ErrorCode::InvalidArgument, std::string("lift table needs an array '") + section + "'");
    }
  }

  LiftInputs in;
  for (const auto& e : doc["freedom"]) {
    in.freedom.push_back({key_from(e), number_at(e, "F"), e.contains("sigma_F") ? number_at(e, "sigma_F") : 0.0});
  }
  std::map<LiftKey, double> base_scores;
  for (const auto& e : doc["baseline"]) {
    in.baseline.push_back({key_from(e), number_at(e, "score")});
    base_scores[in.baseline.back().key] = in.baseline.back().score;
  }
  for (const auto& e : doc["skilled"]) {
    KeyedScore s{key_from(e), 0.0};
    if (e.contains("score")) {
      s.score = number_at(e, "score");
    } else {
      const auto it = base_scores.find(s.key);
      if (it == base_scores.end()) {
        throw Error(ErrorCode::KeyMismatch, "skilled lift for " + to_string(s.key) + " has no baseline");
      }
      s.score = it->second + number_at(e, "lift");
    }
    in.skilled.push_back(std::move(s));
  }
  return in;
}

void write_lift_csv(std::ostream& out, std::span<const LiftRow> rows) {
  out << "task,dataset,metric,F,sigma_F,baseline,lift,lift_norm\n";
  for (const auto& r : rows) {
    out << io::csv_field(r.task) << ',' << io::csv_field(r.dataset) << ',' << io::csv_field(r.metric) << ','
        << io::format_double(r.F) << ',' << io::format_double(r.sigma_F) << ',' << io::format_double(r.baseline)
        << ',' << io::format_double(r.lift) << ',' << io::format_double(r.lift_norm) << '\n';
  }
}

std::string lift_table_json(std::span<const LiftRow> rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"task", r.task},
                   {"dataset", r.dataset},
                   {"metric", r.metric},
                   {"F", r.F},
                   {"sigma_F", r.sigma_F},
                   {"baseline", r.baseline},
                   {"lift", r.lift},
                   {"lift_norm", r.lift_norm}});
  }
  return arr.dump(2);
}

ProductFreedom product_freedom_check(std::span<const Eigen::VectorXd> per_metric_scores,
                                     std::span<const double> weights, const DistanceMatrix& behavior) {
  if (per_metric_scores.empty() || per_metric_scores.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one weight per metric and at least one metric");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::WeightSum, "weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::WeightSum, "weights sum to " + io::format_double(total) + ", expected 1");
  }

  ProductFreedom out;
  Eigen::VectorXd combined = Eigen::VectorXd::Zero(behavior.n());
  for (std::size_t k = 0; k < per_metric_scores.size(); ++k) {
    const auto& s = per_metric_scores[k];
    if (s.size() != behavior.n()) {
      throw Error(ErrorCode::DimMismatch, "score list " + std::to_string(k) + " has " + std::to_string(s.size()) +
                                              " entries for " + std::to_string(behavior.n()) + " runs");
    }
    out.F_individual.push_back(metric_freedom(behavior, score_distance_matrix(s)).F);
    combined += weights[k] * s;
  }
  out.F_combined = metric_freedom(behavior, score_distance_matrix(combined)).F;
  out.bound_satisfied =
      out.F_combined <= *std::min_element(out.F_individual.begin(), out.F_individual.end()) + 0.05;
  return out;
}

}  // namespace mf
