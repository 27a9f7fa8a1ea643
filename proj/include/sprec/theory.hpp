#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sprec/linalg.hpp"

namespace sprec {

// Measurement-count thresholds m(n, k, snr, mar). Logarithms are natural
// except in capacity_bound_m, which is stated in bits. Slack constants are
// set to zero, so these are asymptotic boundaries, not finite-n guarantees.

// Below this every estimator (ML included) fails asymptotically:
// 2 / (mar * snr) * k * ln(n - k) + k - 1.
double ml_necessary_m(Index n, Index k, double snr, double mar);

// Above this maximum correlation succeeds asymptotically:
// 8 (1 + snr) / (mar * snr) * k * ln(n - k).
double mc_sufficient_m(Index n, Index k, double snr, double mar);

// snr -> infinity limit of mc_sufficient_m: 8 / mar * k * ln(n - k).
double mc_highsnr_m(Index n, Index k, double mar);

// Lasso scaling 2 k ln(n - k) + k + 1.
double lasso_m(Index n, Index k);

// Smallest m with (2/m) log2 C(n,k) <= log2(1+snr) - a log2(1 + snr/a),
// a = k/n.
double capacity_bound_m(Index n, Index k, double snr);

double log2_binomial(Index n, Index k);

enum class CurveKind { ml_necessary, mc_sufficient, mc_highsnr, lasso, capacity };

std::string_view to_string(CurveKind kind);
std::optional<CurveKind> parse_curve_kind(std::string_view name);
bool curve_uses_snr(CurveKind kind);
bool curve_uses_mar(CurveKind kind);

double threshold_m(CurveKind kind, Index n, Index k, double snr, double mar);

// True when (n, k) is inside the formula's domain.
bool curve_defined(CurveKind kind, Index n, Index k);

struct CurvePoint {
  Index k;
  double m;
};

struct ThresholdCurve {
  CurveKind kind;
  Index n;
  double snr;
  double mar;
  std::vector<CurvePoint> points;  // sorted by k
};

// Evaluates the curve at each k inside its domain; other k are omitted.
ThresholdCurve evaluate_curve(CurveKind kind, Index n, double snr, double mar,
                              std::span<const Index> ks);

}  // namespace sprec
