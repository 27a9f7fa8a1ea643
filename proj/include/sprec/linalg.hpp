#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sprec/rng.hpp"

namespace sprec {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;

// A column subset. Functions taking a Subset treat it as a set; the ones that
// return one always return it sorted.
using Subset = std::vector<Index>;

// Upper bound on m * n accepted by gen_matrix (8 bytes per entry).
inline constexpr Index kDefaultEntryCap = 50'000'000;

// Columns whose norm after orthogonalization falls below this fraction of
// their original norm are treated as lying in the current span.
inline constexpr double kRankDropTolerance = 1e-10;

// Smallest a' P^perp a accepted by the incremental gain.
inline constexpr double kDegenerateGainDenominator = 1e-12;

// Dense m x n measurement matrix, stored column-major so each a_j is
// contiguous.
class MeasMatrix {
 public:
  explicit MeasMatrix(Eigen::MatrixXd entries);

  Index rows() const { return a_.rows(); }
  Index cols() const { return a_.cols(); }

  std::span<const double> col(Index j) const {
    return {a_.data() + j * a_.rows(), static_cast<std::size_t>(a_.rows())};
  }
  const Eigen::MatrixXd& entries() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

// i.i.d. N(0, 1/m) entries, drawn column by column from `rng`.
MeasMatrix gen_matrix(Index m, Index n, Stream& rng,
                      Index entry_cap = kDefaultEntryCap);

double dot(std::span<const double> a, std::span<const double> b);

// Incrementally built orthonormal basis for span{a_j : j in J} together with
// the residual P_J^perp y and the captured energy ||P_J y||^2.
//
// Orthogonalization is modified Gram-Schmidt with one reorthogonalization
// pass. Pushing the same column sequence always produces bit-identical state,
// which lets exhaustive search share prefixes without changing results.
class ProjectionWorkspace {
 public:
  ProjectionWorkspace(const MeasMatrix& a, std::span<const double> y);

  // Appends column j. Columns numerically inside the current span are
  // recorded in the subset but do not extend the basis.
  void push(Index j);
  // Undoes the most recent push.
  void pop();
  void clear();

  // Energy the workspace would hold after push(j), without modifying it.
  double energy_with(Index j) const;

  // |a_j' P^perp y|^2 / (a_j' P^perp a_j). Throws DegenerateColumn when the
  // denominator is <= kDegenerateGainDenominator.
  double gain_of(Index j) const;

  double energy() const { return energy_; }
  double y_norm2() const { return y_norm2_; }
  Index rank() const { return rank_; }
  const Subset& subset() const { return subset_; }
  std::span<const double> residual() const;

  // Q with orthonormal columns spanning the pushed columns (m x rank).
  Eigen::MatrixXd basis() const;

  // v <- P^perp v.
  void project_out(std::span<double> v) const;

 private:
  struct Frame {
    bool extended;
    double energy_before;
  };

  // Writes the unit direction a_j contributes into `dir`; false if a_j is
  // numerically inside the span.
  bool direction(Index j, std::span<double> dir) const;
  std::span<const double> q(Index l) const;

  const MeasMatrix* a_;
  Index m_;
  double y_norm2_;
  double energy_ = 0.0;
  Index rank_ = 0;
  Subset subset_;
  std::vector<Frame> frames_;
  std::vector<double> q_;          // rank_ columns of length m_
  std::vector<double> residuals_;  // residual history, one per basis column + 1
  mutable std::vector<double> scratch_;
};

// ||P_J y||^2 via orthonormalization of the selected columns, J sorted first.
double projection_energy(const MeasMatrix& a, std::span<const Index> subset,
                         std::span<const double> y);

// |a_i' P_K^perp y|^2 / (a_i' P_K^perp a_i).
double residual_correlation_gain(const MeasMatrix& a,
                                 std::span<const Index> base, Index i,
                                 std::span<const double> y);

// Sorts, and rejects duplicates or out-of-range indices.
Subset normalize_subset(std::span<const Index> subset, Index n);

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace sprec
