#pragma once

#include <cstdint>
#include <vector>

#include "sprec/linalg.hpp"
#include "sprec/rng.hpp"

namespace sprec {

enum class SignRule { random, all_positive };

// k-sparse x in R^n, stored as its sorted support and the matching values.
class SparseSignal {
 public:
  SparseSignal(Index n, Subset support, std::vector<double> values);

  Index n() const { return n_; }
  Index k() const { return Index(support_.size()); }
  const Subset& support() const { return support_; }
  const std::vector<double>& values() const { return values_; }
  double norm2() const;
  Vector dense() const;

 private:
  Index n_;
  Subset support_;
  std::vector<double> values_;
};

// Support uniform over k-subsets of {0..n-1}. Total energy E = m * snr; one
// component, placed uniformly at random on the support, carries mar * E / k
// and the other k - 1 share the remainder equally.
SparseSignal make_signal(Index n, Index k, Index m, double snr, double mar,
                         SignRule sign_rule, Stream& rng);

// min_j |x_j|^2 / (||x||^2 / k)
double mar_of(const SparseSignal& signal);
// ||x||^2 / m
double snr_of(const SparseSignal& signal, Index m);

struct SeedRecord {
  std::uint64_t master_seed = 0;
  std::uint64_t trial = 0;
};

enum class NoiseMode { gaussian, zero };

struct ProblemInstance {
  MeasMatrix a;
  SparseSignal signal;
  Vector noise;
  Vector y;
  double nominal_snr;
  double nominal_mar;
  SeedRecord seed;

  Index m() const { return a.rows(); }
  Index n() const { return a.cols(); }
  Index k() const { return signal.k(); }
};

// Draws A, then d, from `rng` and forms y = A x + d. NoiseMode::zero is a
// test hook that forces d = 0.
ProblemInstance synthesize(const SparseSignal& signal, Index m, Stream& rng,
                           SeedRecord seed = {},
                           NoiseMode noise = NoiseMode::gaussian,
                           Index entry_cap = kDefaultEntryCap);

// Signal then instance from one stream; records the requested snr and mar.
ProblemInstance make_instance(Index n, Index k, Index m, double snr,
                              double mar, SignRule sign_rule, Stream& rng,
                              SeedRecord seed = {},
                              NoiseMode noise = NoiseMode::gaussian);

}  // namespace sprec
