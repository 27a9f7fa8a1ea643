#include "sprec/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::ml ? "ML" : "MC";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "ML" || name == "ml") return EstimatorKind::ml;
  if (name == "MC" || name == "mc") return EstimatorKind::mc;
  throw ValidationError("unknown estimator '" + std::string(name) +
                        "' (expected ML or MC)");
}

std::uint64_t subset_count(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (Index i = 1; i <= k; ++i) {
    c = c * unsigned(n - k + i) / unsigned(i);
    if (c > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return std::uint64_t(c);
}

namespace {

// Keeps every subset that may still end up within tolerance of the running
// maximum. Candidates arrive in lexicographic order, so the first survivor is
// the lexicographically smallest maximizer.
class TieTracker {
 public:
  void offer(double energy, const Subset& subset) {
    if (energy > best_) {
      best_ = energy;
      const double cut = threshold();
      std::erase_if(cands_, [cut](const auto& c) { return c.first < cut; });
    }
    if (energy >= threshold()) cands_.emplace_back(energy, subset);
  }

  SupportEstimate result(Index n) const {
    const double cut = threshold();
    SupportEstimate est{EstimatorKind::ml, n, {}, best_, {}, false};
    int count = 0;
    for (const auto& [e, s] : cands_) {
      if (e < cut) continue;
      if (count++ == 0) est.support = s;
    }
    est.tie = count > 1;
    return est;
  }

 private:
  double threshold() const { return best_ - kMlTieTolerance * best_; }

  double best_ = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Subset>> cands_;
};

// Advances `c` (sorted k-combination of 0..n-1) to its lexicographic
// successor; false after the last one.
bool next_combination(Subset& c, Index n) {
  const Index k = Index(c.size());
  Index i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (Index j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

void search_independent(const MeasMatrix& a, std::span<const double> y,
                        Index k, TieTracker& tracker) {
  const Index n = a.cols();
  Subset c(k);
  std::iota(c.begin(), c.end(), Index{0});
  ProjectionWorkspace ws(a, y);
  do {
    ws.clear();
    for (Index i = 0; i + 1 < k; ++i) ws.push(c[i]);
    tracker.offer(ws.energy_with(c.back()), c);
  } while (next_combination(c, n));
}

void search_prefix(ProjectionWorkspace& ws, Index n, Index k, Index start,
                   Subset& current, TieTracker& tracker) {
  const Index depth = Index(current.size());
  if (depth == k - 1) {
    current.push_back(0);
    for (Index j = start; j < n; ++j) {
      current.back() = j;
      tracker.offer(ws.energy_with(j), current);
    }
    current.pop_back();
    return;
  }
  for (Index j = start; j <= n - (k - depth); ++j) {
    current.push_back(j);
    ws.push(j);
    search_prefix(ws, n, k, j + 1, current, tracker);
    ws.pop();
    current.pop_back();
  }
}

}  // namespace

SupportEstimate ml_estimate(const MeasMatrix& a, std::span<const double> y,
                            Index k, std::uint64_t guard, MlSearch search) {
  const Index n = a.cols();
  if (k < 1 || k > n)
    throw ValidationError("ml_estimate: need 1 <= k <= n");
  const std::uint64_t count = subset_count(n, k);
  if (count > guard)
    throw GuardExceeded("ml_estimate: C(" + std::to_string(n) + "," +
                        std::to_string(k) + ") = " + std::to_string(count) +
                        " subsets exceeds guard " + std::to_string(guard));
  TieTracker tracker;
  if (search == MlSearch::independent) {
    search_independent(a, y, k, tracker);
  } else {
    ProjectionWorkspace ws(a, y);
    Subset current;
    current.reserve(k);
    search_prefix(ws, n, k, 0, current, tracker);
  }
  return tracker.result(n);
}

SupportEstimate ml_estimate(const ProblemInstance& inst, std::uint64_t guard,
                            MlSearch search) {
  return ml_estimate(inst.a, as_span(inst.y), inst.k(), guard, search);
}

SupportEstimate mc_estimate(const MeasMatrix& a, std::span<const double> y,
                            Index k) {
  const Index n = a.cols();
  if (k < 1 || k > n) throw ValidationError("mc_estimate: need 1 <= k <= n");
  if (Index(y.size()) != a.rows())
    throw ValidationError("mc_estimate: y length does not match A");
  std::vector<double> corr(n);
  for (Index j = 0; j < n; ++j) corr[j] = std::abs(dot(a.col(j), y));

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  auto before = [&](Index lhs, Index rhs) {
    return corr[lhs] > corr[rhs] || (corr[lhs] == corr[rhs] && lhs < rhs);
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), before);

  SupportEstimate est{EstimatorKind::mc, n, {}, 0.0, {}, false};
  est.support.assign(order.begin(), order.begin() + k);
  std::sort(est.support.begin(), est.support.end());
  for (Index j : est.support) est.mc_scores.push_back(corr[j]);
  if (k < n) {
    const double kth = corr[order[k - 1]];
    est.tie = std::any_of(order.begin() + k, order.end(),
                          [&](Index j) { return corr[j] == kth; });
  }
  return est;
}

SupportEstimate mc_estimate(const ProblemInstance& inst) {
  return mc_estimate(inst.a, as_span(inst.y), inst.k());
}

bool ml_failure_certificate(const MeasMatrix& a, std::span<const double> y,
                            std::span<const Index> truth) {
  const Index n = a.cols();
  const Subset t = normalize_subset(truth, n);
  if (t.empty()) throw ValidationError("certificate: empty true support");
  const double margin = 1e-12 * dot(y, y);
  ProjectionWorkspace ws(a, y);
  for (Index i : t) {
    ws.clear();
    for (Index j : t)
      if (j != i) ws.push(j);
    const double gain_true = ws.gain_of(i);
    for (Index j = 0; j < n; ++j) {
      if (std::binary_search(t.begin(), t.end(), j)) continue;
      if (ws.gain_of(j) - gain_true > margin) return true;
    }
  }
  return false;
}

bool ml_failure_certificate(const ProblemInstance& inst) {
  return ml_failure_certificate(inst.a, as_span(inst.y),
                                inst.signal.support());
}

bool is_exact_recovery(const SupportEstimate& estimate,
                       const SparseSignal& truth) {
  if (estimate.n != truth.n() || Index(estimate.support.size()) != truth.k())
    throw ValidationError("is_exact_recovery: dimension mismatch (n=" +
                          std::to_string(estimate.n) + " vs " +
                          std::to_string(truth.n()) + ", k=" +
                          std::to_string(estimate.support.size()) + " vs " +
                          std::to_string(truth.k()) + ")");
  Subset s = estimate.support;
  std::sort(s.begin(), s.end());
  return s == truth.support();
}

}  // namespace sprec
