#pragma once

#include "metricfreedom/error.hpp"
#include "metricfreedom/records.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mf {

enum class DistanceKind { JaccardSet, Indicator, TokenJaccard, Cosine, AbsScore };

/// Kernel plus Hölder exponent. Entries are lifted to d^alpha after the kernel runs.
struct DistanceSpec {
  DistanceKind kind = DistanceKind::Indicator;
  double alpha = 1.0;
};

/// Accepts "jaccard", "indicator", "token-jaccard", "cosine", "abs".
DistanceKind parse_distance_kind(std::string_view name);
const char* to_string(DistanceKind kind) noexcept;

/// 1 - |a ∩ b| / |a ∪ b| on two sorted, duplicate-free ranges; 0 when both are empty.
template <typename SortedRange>
double sorted_jaccard_distance(const SortedRange& a, const SortedRange& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t united = a.size() + b.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(united);
}

double jaccard_distance(const SetPayload& a, const SetPayload& b);
double indicator_distance(const CategoryPayload& a, const CategoryPayload& b);

/// Jaccard distance between the de-duplicated token sets (case-sensitive).
double token_jaccard(const TokensPayload& a, const TokensPayload& b);

/// 1 - cos(u, v), kept raw in [0, 2].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_distance(const Eigen::MatrixBase<DerivedA>& u,
                                          const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimMismatch,
                "cosine distance between vectors of size " + std::to_string(u.size()) + " and " +
                    std::to_string(v.size()));
  }
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) throw Error(ErrorCode::ZeroVector, "cosine distance of a zero vector");
  const Scalar cosine = std::clamp(u.dot(v) / (nu * nv), Scalar(-1), Scalar(1));
  return Scalar(1) - cosine;
}

template <typename Scalar>
Scalar score_distance(Scalar a, Scalar b) {
  return std::abs(a - b);
}

/// Dense symmetric matrix with zero diagonal and non-negative finite entries.
template <typename Scalar>
class BasicDistanceMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicDistanceMatrix(Matrix entries) : entries_(std::move(entries)) {
    const Eigen::Index n = entries_.rows();
    if (entries_.cols() != n) throw Error(ErrorCode::DimMismatch, "distance matrix must be square");
    if (n < 2) throw Error(ErrorCode::NTooSmall, "distance matrix needs n >= 2");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (entries_(i, i) != Scalar(0)) throw Error(ErrorCode::InvalidArgument, "distance matrix diagonal must be 0");
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Scalar v = entries_(i, j);
        if (v != entries_(j, i)) throw Error(ErrorCode::InvalidArgument, "distance matrix must be symmetric");
        if (!std::isfinite(v) || v < Scalar(0)) {
          throw Error(ErrorCode::InvalidArgument, "distance entries must be finite and non-negative");
        }
      }
    }
  }

  Eigen::Index n() const noexcept { return entries_.rows(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  const Matrix& entries() const noexcept { return entries_; }

  /// Entries strictly above the diagonal, row by row: (0,1), (0,2), ..., (n-2,n-1).
  Vector upper_triangle() const {
    const Eigen::Index n = this->n();
    Vector out(n * (n - 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) out(k++) = entries_(i, j);
    }
    return out;
  }

  /// Principal submatrix on the given (possibly repeated) indices.
  BasicDistanceMatrix select(std::span<const Eigen::Index> idx) const {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = a == b ? Scalar(0) : entries_(idx[a], idx[b]);
    }
    return BasicDistanceMatrix(std::move(sub));
  }

 private:
  Matrix entries_;
};

using DistanceMatrix = BasicDistanceMatrix<double>;

/// Pairwise kernel(i, j) over n items, each entry lifted to the power alpha.
/// Every entry is computed independently, so the result does not depend on
/// evaluation order.
template <typename Scalar, typename Kernel>
BasicDistanceMatrix<Scalar> build_distance_matrix(Eigen::Index n, Kernel&& kernel, Scalar alpha = Scalar(1)) {
  if (n < 2) throw Error(ErrorCode::NTooSmall, "need at least 2 items for a distance matrix, got " + std::to_string(n));
  if (!(alpha > Scalar(0) && alpha <= Scalar(1))) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  typename BasicDistanceMatrix<Scalar>::Matrix m = BasicDistanceMatrix<Scalar>::Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Scalar d;
      try {
        d = kernel(i, j);
      } catch (const Error& e) {
        throw Error(e.code(), "pair (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
      }
      if (alpha != Scalar(1)) d = std::pow(d, alpha);
      m(i, j) = d;
      m(j, i) = d;
    }
  }
  return BasicDistanceMatrix<Scalar>(std::move(m));
}

/// Behavioral distances between runs. COSINE reads trace vectors; ABS_SCORE reads
/// one-element vector outputs; the other kinds read the matching payload kind.
DistanceMatrix build_distance_matrix(std::span<const RunRecord> runs, const DistanceSpec& spec);

/// |s_i - s_j| over the runs' scores.
DistanceMatrix score_distance_matrix(std::span<const RunRecord> runs);

template <typename Derived>
BasicDistanceMatrix<typename Derived::Scalar> score_distance_matrix(const Eigen::MatrixBase<Derived>& scores) {
  using Scalar = typename Derived::Scalar;
  return build_distance_matrix<Scalar>(
      scores.size(), [&](Eigen::Index i, Eigen::Index j) { return score_distance(scores(i), scores(j)); });
}

}  // namespace mf
