#include "sprec/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

SparseSignal::SparseSignal(Index n, Subset support, std::vector<double> values)
    : n_(n), support_(std::move(support)), values_(std::move(values)) {
  if (support_.empty()) throw ValidationError("signal support must be nonempty");
  if (support_.size() != values_.size())
    throw ValidationError("signal support and values differ in length");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] < 0 || support_[i] >= n_)
      throw ValidationError("signal support index out of range");
    if (i > 0 && support_[i] <= support_[i - 1])
      throw ValidationError("signal support must be strictly increasing");
    if (values_[i] == 0.0 || !std::isfinite(values_[i]))
      throw ValidationError("signal values must be finite and nonzero");
  }
}

double SparseSignal::norm2() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

Vector SparseSignal::dense() const {
  Vector x = Vector::Zero(n_);
  for (std::size_t i = 0; i < support_.size(); ++i) x[support_[i]] = values_[i];
  return x;
}

SparseSignal make_signal(Index n, Index k, Index m, double snr, double mar,
                         SignRule sign_rule, Stream& rng) {
  if (k < 1 || k > n)
    throw ValidationError("make_signal: need 1 <= k <= n, got k=" +
                          std::to_string(k) + " n=" + std::to_string(n));
  if (m < 1) throw ValidationError("make_signal: need m >= 1");
  if (!(snr > 0.0) || !std::isfinite(snr))
    throw ValidationError("make_signal: snr must be positive");
  if (!(mar > 0.0 && mar <= 1.0))
    throw ValidationError("make_signal: mar must lie in (0, 1], got " +
                          std::to_string(mar));
  if (k == 1 && mar != 1.0)
    throw ValidationError("make_signal: k = 1 forces mar = 1");

  Subset all(n);
  std::iota(all.begin(), all.end(), Index{0});
  Subset support;
  support.reserve(k);
  std::sample(all.begin(), all.end(), std::back_inserter(support), k, rng);

  const double energy = double(m) * snr;
  std::vector<double> sq(k, energy / double(k));
  if (k > 1) {
    const double small = mar * energy / double(k);
    const double large = (energy - small) / double(k - 1);
    std::fill(sq.begin(), sq.end(), large);
    const auto pos = std::uniform_int_distribution<Index>(0, k - 1)(rng);
    sq[pos] = small;
  }

  std::vector<double> values(k);
  std::bernoulli_distribution coin(0.5);
  for (Index i = 0; i < k; ++i) {
    const double sign =
        sign_rule == SignRule::random && coin(rng) ? -1.0 : 1.0;
    values[i] = sign * std::sqrt(sq[i]);
  }
  return SparseSignal(n, std::move(support), std::move(values));
}

double mar_of(const SparseSignal& signal) {
  double lo = INFINITY;
  for (double v : signal.values()) lo = std::min(lo, v * v);
  return lo / (signal.norm2() / double(signal.k()));
}

double snr_of(const SparseSignal& signal, Index m) {
  if (m < 1) throw ValidationError("snr_of: need m >= 1");
  return signal.norm2() / double(m);
}

ProblemInstance synthesize(const SparseSignal& signal, Index m, Stream& rng,
                           SeedRecord seed, NoiseMode noise, Index entry_cap) {
  if (m < 1) throw ValidationError("synthesize: need m >= 1");
  MeasMatrix a = gen_matrix(m, signal.n(), rng, entry_cap);
  Vector d = Vector::Zero(m);
  if (noise == NoiseMode::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < m; ++i) d[i] = normal(rng);
  }
  Vector y = d;
  for (std::size_t s = 0; s < signal.support().size(); ++s) {
    auto col = a.col(signal.support()[s]);
    const double xv = signal.values()[s];
    for (Index i = 0; i < m; ++i) y[i] += xv * col[i];
  }
  return ProblemInstance{std::move(a),          signal,
                         std::move(d),          std::move(y),
                         snr_of(signal, m),     mar_of(signal),
                         seed};
}

ProblemInstance make_instance(Index n, Index k, Index m, double snr,
                              double mar, SignRule sign_rule, Stream& rng,
                              SeedRecord seed, NoiseMode noise) {
  SparseSignal signal = make_signal(n, k, m, snr, mar, sign_rule, rng);
  ProblemInstance inst = synthesize(signal, m, rng, seed, noise);
  inst.nominal_snr = snr;
  inst.nominal_mar = mar;
  return inst;
}

}  // namespace sprec
