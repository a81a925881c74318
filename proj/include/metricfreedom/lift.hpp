#pragma once

#include "metricfreedom/distance.hpp"
#include "metricfreedom/error.hpp"
#include "metricfreedom/stats.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mf {

/// (skilled - baseline) / (1 - baseline). Throws CeilingBaseline when the
/// baseline leaves no headroom.
double headroom_normalized_lift(double baseline, double skilled);

/// Sample Pearson correlation with input checks: DimMismatch, TooFewPoints
/// (fewer than 3 pairs) and ConstantSeries.
template <typename DerivedA, typename DerivedB>
double pearson_r(const Eigen::MatrixBase<DerivedA>& xs, const Eigen::MatrixBase<DerivedB>& ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::DimMismatch, "pearson_r needs equal-length series");
  if (xs.size() < 3) throw Error(ErrorCode::TooFewPoints, "pearson_r needs at least 3 points");
  if ((xs.array() == xs(0)).all() || (ys.array() == ys(0)).all()) {
    throw Error(ErrorCode::ConstantSeries, "pearson_r of a constant series");
  }
  return stats::pearson(xs, ys);
}

double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Two-sided permutation p-value (1 + #{|r_perm| >= |r_obs|}) / (n_perm + 1).
double permutation_p(std::span<const double> xs, std::span<const double> ys, int n_perm, std::uint64_t seed);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least-squares line y = slope * x + intercept.
LinearFit least_squares_line(std::span<const double> xs, std::span<const double> ys);

struct LiftKey {
  std::string task;
  std::string dataset;
  std::string metric;
  auto operator<=>(const LiftKey&) const = default;
};

std::string to_string(const LiftKey& key);

struct KeyedFreedom {
  LiftKey key;
  double F = 0.0;
  double sigma_F = 0.0;
};

struct KeyedScore {
  LiftKey key;
  double score = 0.0;
};

struct LiftRow {
  std::string task;
  std::string dataset;
  std::string metric;
  double F = 0.0;
  double sigma_F = 0.0;
  double baseline = 0.0;
  double lift = 0.0;
  double lift_norm = 0.0;
};

/// Joins the three keyed inputs, recomputes lift and lift_norm, sorts by F
/// (stable). Throws KeyMismatch naming every key not present in all three.
std::vector<LiftRow> build_lift_table(std::span<const KeyedFreedom> freedom, std::span<const KeyedScore> baseline,
                                      std::span<const KeyedScore> skilled);

struct LiftInputs {
  std::vector<KeyedFreedom> freedom;
  std::vector<KeyedScore> baseline;
  std::vector<KeyedScore> skilled;
};

/// Parses {"freedom": [...], "baseline": [...], "skilled": [...]}. Each entry
/// carries task/dataset/metric; freedom entries add F and sigma_F, baseline
/// entries a score, skilled entries either a score or a lift over the baseline.
LiftInputs parse_lift_inputs(std::string_view json_text);

void write_lift_csv(std::ostream& out, std::span<const LiftRow> rows);
std::string lift_table_json(std::span<const LiftRow> rows);

struct ProductFreedom {
  double F_combined = 0.0;
  std::vector<double> F_individual;
  bool bound_satisfied = false;  // F_combined <= min_k F_k + 0.05
};

/// Freedom of the weighted score sum_k w_k s_k against one behavioral matrix,
/// alongside the freedom of every component score.
ProductFreedom product_freedom_check(std::span<const Eigen::VectorXd> per_metric_scores,
                                     std::span<const double> weights, const DistanceMatrix& behavior);

}  // namespace mf
