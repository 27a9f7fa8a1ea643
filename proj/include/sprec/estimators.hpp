#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sprec/linalg.hpp"
#include "sprec/model.hpp"

namespace sprec {

enum class EstimatorKind { ml, mc };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);  // "ML" / "MC"

struct SupportEstimate {
  EstimatorKind kind;
  Index n;
  Subset support;                 // sorted, |support| = k
  double ml_energy = 0.0;         // ML: winning ||P_J y||^2
  std::vector<double> mc_scores;  // MC: selected |a_j' y|, in support order
  bool tie = false;
};

inline constexpr std::uint64_t kDefaultSubsetGuard = 20'000'000;

// Relative score tolerance under which two ML subsets count as tied.
inline constexpr double kMlTieTolerance = 1e-12;

// How the exhaustive ML search evaluates subsets.
//  independent:    every k-subset gets a fresh orthonormalization.
//  shared_prefix:  depth-first over the lexicographic tree, reusing the
//                  basis of the common (k-1)-prefix. Bit-identical energies.
enum class MlSearch { independent, shared_prefix };

// C(n, k), saturating at UINT64_MAX.
std::uint64_t subset_count(Index n, Index k);

// argmax over k-subsets J of ||P_J y||^2. Among subsets within
// kMlTieTolerance (relative) of the maximum, the lexicographically smallest
// wins and `tie` is set. Throws GuardExceeded when C(n, k) > guard.
SupportEstimate ml_estimate(const MeasMatrix& a, std::span<const double> y,
                            Index k, std::uint64_t guard = kDefaultSubsetGuard,
                            MlSearch search = MlSearch::independent);
SupportEstimate ml_estimate(const ProblemInstance& inst,
                            std::uint64_t guard = kDefaultSubsetGuard,
                            MlSearch search = MlSearch::independent);

// The k largest |a_j' y|, ordered by (|a_j' y| descending, j ascending).
SupportEstimate mc_estimate(const MeasMatrix& a, std::span<const double> y,
                            Index k);
SupportEstimate mc_estimate(const ProblemInstance& inst);

// One-sided certificate that exhaustive ML fails: true when some i in the
// true support and j outside it have gain(K, j) > gain(K, i) with
// K = truth \ {i}, beyond a 1e-12 * ||y||^2 margin.
bool ml_failure_certificate(const MeasMatrix& a, std::span<const double> y,
                            std::span<const Index> truth);
bool ml_failure_certificate(const ProblemInstance& inst);

bool is_exact_recovery(const SupportEstimate& estimate,
                       const SparseSignal& truth);

}  // namespace sprec
