#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sprec/rng.hpp"

namespace sprec {

// Monte Carlo checks of the order-statistics facts the threshold proofs rely
// on: maxima of chi-squared variables, and the Beta(1, s-1) law of random
// projections together with its maximum.

enum class LemmaId { max_gauss_sq, chisq_max_min, beta_projection, beta_max };

std::string_view to_string(LemmaId id);
LemmaId parse_lemma(std::string_view name);  // "max-gauss-sq", ...

struct LemmaVerdict {
  LemmaId id;
  std::vector<std::pair<std::string, std::uint64_t>> sample_sizes;
  std::vector<std::pair<std::string, double>> statistics;
  bool pass = false;
  std::string details;

  double statistic(std::string_view name) const;
};

// Registered seeds and default parameters. Every verifier passes with these.
namespace lemma_defaults {
inline constexpr std::uint64_t kMaxGaussSqSeed = 0x4d47535131ULL;
inline constexpr std::uint64_t kChisqMaxMinSeed = 0x43534d4d31ULL;
inline constexpr std::uint64_t kBetaProjectionSeed = 0x4250524f31ULL;
inline constexpr std::uint64_t kBetaMaxSeed = 0x424d415831ULL;

inline constexpr std::int64_t kMaxGaussSqN = 1'000'000;
inline constexpr std::int64_t kMaxGaussSqTrials = 200;
inline constexpr std::int64_t kChisqR = 10'000;
inline constexpr std::int64_t kChisqN = 100;
inline constexpr std::int64_t kChisqTrials = 100;
inline constexpr std::int64_t kBetaProjectionS = 10;
inline constexpr std::int64_t kBetaProjectionSamples = 10'000;
inline constexpr std::int64_t kBetaMaxN = 10'000;
inline constexpr std::int64_t kBetaMaxS = 2'000;
inline constexpr std::int64_t kBetaMaxTrials = 200;
}  // namespace lemma_defaults

// Pass windows.
inline constexpr double kMaxGaussSqWindowLo = 1.0, kMaxGaussSqWindowHi = 2.5;
inline constexpr double kChisqMaxLo = 0.9, kChisqMaxHi = 1.15;
inline constexpr double kChisqMinLo = 0.85, kChisqMinHi = 1.05;
inline constexpr double kBetaProjectionAlpha = 0.01;
inline constexpr double kBetaMaxWindowLo = 1.0, kBetaMaxWindowHi = 3.0;

// --- samplers ---

// mean over trials of max_{i<n} Z_i^2 / ln n.
double sample_max_gauss_sq_ratio(std::int64_t n, std::int64_t trials,
                                 Stream& rng);

struct ChisqExtremes {
  double max;
  double min;
};
// Max and min of n i.i.d. chi-squared(r) draws.
ChisqExtremes sample_chisq_extremes(std::int64_t r, std::int64_t n,
                                    Stream& rng);

struct ProjectionSample {
  std::vector<double> w;       // |u'x|^2 / ||x||^2
  std::vector<double> x_norm2; // ||x||^2
};
// x has independent N(0, (1 + i)^2) coordinates times a random log-normal
// scale; u is uniform on the unit sphere in R^s.
ProjectionSample sample_projection_energies(std::int64_t s,
                                            std::int64_t samples, Stream& rng);

// "Beta(1, s-1)" below counts chi-squared degrees of freedom: the law of
// u / (u + v) with u ~ chi2(1), v ~ chi2(s-1), which is the standard
// Beta(1/2, (s-1)/2). Its CDF is the regularized incomplete beta function.
double beta_projection_cdf(std::int64_t s, double w);

// Beta(1, s-1) draws as u / (u + v), u ~ chi2(1), v ~ chi2(s-1).
double sample_beta_chisq(std::int64_t s, Stream& rng);
// Beta(1, s-1) draws by inverting beta_projection_cdf.
double sample_beta_inverse(std::int64_t s, Stream& rng);

// mean over trials of s * max_{j<n} w_j / ln n with w_j from
// sample_beta_chisq.
double sample_beta_max_ratio(std::int64_t n, std::int64_t s,
                             std::int64_t trials, Stream& rng);

// --- verifiers ---

// Statistic at n and n / 100; passes when the larger n is strictly closer to
// 2 and lies inside the window. Requires n >= 200, trials >= 50.
LemmaVerdict verify_max_gauss_sq(std::int64_t n, std::int64_t trials,
                                 Stream& rng);

// Requires r >= 1000, n >= 10, ln(n)/r <= 0.01.
LemmaVerdict verify_chisq_max_min(std::int64_t r, std::int64_t n,
                                  std::int64_t trials, Stream& rng);

// KS test of w against beta_projection_cdf at level 0.01. Requires
// s >= 3, samples >= 1000.
LemmaVerdict verify_beta_projection(std::int64_t s, std::int64_t samples,
                                    Stream& rng);

// Statistic at (n, s) and (n/10, s/10); passes when the larger configuration
// is strictly closer to 2 and inside the window. Requires ln(n)/s <= 0.05,
// trials >= 50, s >= 30.
LemmaVerdict verify_beta_max(std::int64_t n, std::int64_t s,
                             std::int64_t trials, Stream& rng);

// Runs a verifier with its registered seed and default parameters.
LemmaVerdict run_default_verifier(LemmaId id);

std::string format_verdict(const LemmaVerdict& v);

}  // namespace sprec
