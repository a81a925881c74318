#pragma once

// Closed-form evaluators for the lift bounds, the rank/maximal correlation gap
// and the refinement phase boundary. All are plain real arithmetic.

#include "metricfreedom/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mf::theory {

/// Spearman correlation of a bivariate Gaussian with Pearson correlation r:
/// (6/pi) asin(r/2).
template <typename Scalar>
Scalar kruskal_spearman(Scalar r) {
  return Scalar(6) / std::numbers::pi_v<Scalar> * std::asin(r / Scalar(2));
}

/// Gap between maximal and rank correlation under a Gaussian copula,
/// |r| - (6/pi) asin(|r|/2). Zero at r in {-1, 0, 1}.
template <typename Scalar>
Scalar gaussian_gap(Scalar r) {
  const Scalar a = std::abs(r);
  return std::max(Scalar(0), a - kruskal_spearman(a));
}

/// Envelope 0.047 rho_m + 4/sqrt(n) on the finite-sample gap.
template <typename Scalar>
Scalar delta_n_envelope(Scalar rho_m, long n) {
  return Scalar(0.047) * rho_m + Scalar(4) / std::sqrt(static_cast<Scalar>(n));
}

struct BoundInputs {
  double L0 = 1.0;
  double alpha = 1.0;
  double F = 0.0;
  double delta_n = 0.0;
  double W1 = 0.0;
};

enum class BoundForm {
  Theorem,        // L0 (1 - F + delta) W1, needs F <= 1
  AppendixStage4  // L0 (3 - 2F + 2 delta) W1, capped at 3 L0 W1
};

inline void check(const BoundInputs& b) {
  if (!(b.L0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "L0 must be > 0");
  if (!(b.alpha > 0.0 && b.alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  if (!(b.F >= 0.0 && b.F <= 2.0)) throw Error(ErrorCode::InvalidArgument, "F must lie in [0, 2]");
  if (!(b.delta_n >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta_n must be >= 0");
  if (!(b.W1 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "W1 must be >= 0");
}

inline double lift_upper_bound(const BoundInputs& b, BoundForm form) {
  check(b);
  if (form == BoundForm::Theorem) {
    if (b.F > 1.0) {
      throw Error(ErrorCode::AntiConcordant,
                  "F > 1: the concordance bound does not apply; use the trivial bound L0 * W1");
    }
    return b.L0 * (1.0 - b.F + b.delta_n) * b.W1;
  }
  return std::min(b.L0 * (3.0 - 2.0 * b.F + 2.0 * b.delta_n) * b.W1, 3.0 * b.L0 * b.W1);
}

/// Empirical 1-D Wasserstein-1 distance, the exact integral of |CDF_a - CDF_b|
/// over the merged breakpoints.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar wasserstein_1d(const Eigen::DenseBase<DerivedA>& samples_a,
                                         const Eigen::DenseBase<DerivedB>& samples_b) {
  using Scalar = typename DerivedA::Scalar;
  if (samples_a.size() == 0 || samples_b.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, "wasserstein_1d needs non-empty samples");
  }
  std::vector<Scalar> a(static_cast<std::size_t>(samples_a.size()));
  std::vector<Scalar> b(static_cast<std::size_t>(samples_b.size()));
  for (Eigen::Index i = 0; i < samples_a.size(); ++i) a[static_cast<std::size_t>(i)] = samples_a(i);
  for (Eigen::Index i = 0; i < samples_b.size(); ++i) b[static_cast<std::size_t>(i)] = samples_b(i);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const Scalar na = static_cast<Scalar>(a.size());
  const Scalar nb = static_cast<Scalar>(b.size());
  std::size_t ia = 0, ib = 0;
  Scalar total = 0;
  Scalar x = std::min(a.front(), b.front());
  while (ia < a.size() || ib < b.size()) {
    // consume every sample sitting at the current breakpoint
    while (ia < a.size() && a[ia] == x) ++ia;
    while (ib < b.size() && b[ib] == x) ++ib;
    if (ia == a.size() && ib == b.size()) break;
    Scalar next;
    if (ia == a.size()) {
      next = b[ib];
    } else if (ib == b.size()) {
      next = a[ia];
    } else {
      next = std::min(a[ia], b[ib]);
    }
    const Scalar cdf_gap = std::abs(static_cast<Scalar>(ia) / na - static_cast<Scalar>(ib) / nb);
    total += cdf_gap * (next - x);
    x = next;
  }
  return total;
}

struct PhaseParams {
  double p_min = 0.1;
  double gamma = 0.5;
  double rho = 0.2;
  double D_max = 0.5;
  double C = 1.0;  // Hölder constant L0
};

inline void check(const PhaseParams& p) {
  if (!(p.p_min > 0.0 && p.p_min <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p_min must lie in (0, 1]");
  if (!(p.gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be > 0");
  if (!(p.rho > 0.0 && p.rho <= 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1]");
  if (!(p.D_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "D_max must be > 0");
  if (!(p.C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be > 0");
}

/// Flat-landscape condition lambda_max * rho * D_max < p_min * gamma (strict).
inline bool convergence_condition(const PhaseParams& p, double lambda_max) {
  check(p);
  return lambda_max * p.rho * p.D_max < p.p_min * p.gamma;
}

/// Phase boundary F* = 1 - p_min gamma / (C rho D_max). Negative values mean no
/// oscillating regime exists.
inline double critical_freedom(const PhaseParams& p) {
  check(p);
  return 1.0 - p.p_min * p.gamma / (p.C * p.rho * p.D_max);
}

/// Gap envelope (1 - S0) exp(-c t / (1 - S0)) for monotone refinement.
inline double convergence_rate_envelope(double S0, double c, long t) {
  if (!(S0 >= 0.0 && S0 < 1.0)) throw Error(ErrorCode::InvalidArgument, "S0 must lie in [0, 1)");
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "c must be > 0");
  if (t < 0) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
  return (1.0 - S0) * std::exp(-c * static_cast<double>(t) / (1.0 - S0));
}

/// Raw bounded-differences tail 2 exp(-n t^2 / 8); may exceed 1.
inline double mcdiarmid_envelope(long n, double t) {
  return 2.0 * std::exp(-static_cast<double>(n) * t * t / 8.0);
}

/// Probability bound min(1, 2 exp(-n t^2 / 8)).
inline double mcdiarmid_tail(long n, double t) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
  return std::min(1.0, mcdiarmid_envelope(n, t));
}

}  // namespace mf::theory
