#include "sprec/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

namespace {

double log_gap(Index n, Index k, const char* what) {
  if (k < 1 || n - k < 2)
    throw DomainError(std::string(what) + ": need k >= 1 and n - k >= 2, got n=" +
                      std::to_string(n) + " k=" + std::to_string(k));
  return std::log(double(n - k));
}

void check_snr(double snr, const char* what) {
  if (!(snr > 0.0) || !std::isfinite(snr))
    throw ValidationError(std::string(what) + ": snr must be positive");
}

void check_mar(double mar, const char* what) {
  if (!(mar > 0.0 && mar <= 1.0))
    throw ValidationError(std::string(what) + ": mar must lie in (0, 1]");
}

}  // namespace

double ml_necessary_m(Index n, Index k, double snr, double mar) {
  check_snr(snr, "ml_necessary_m");
  check_mar(mar, "ml_necessary_m");
  const double l = log_gap(n, k, "ml_necessary_m");
  return 2.0 / (mar * snr) * double(k) * l + double(k) - 1.0;
}

double mc_sufficient_m(Index n, Index k, double snr, double mar) {
  check_snr(snr, "mc_sufficient_m");
  check_mar(mar, "mc_sufficient_m");
  const double l = log_gap(n, k, "mc_sufficient_m");
  return 8.0 * (1.0 + snr) / (mar * snr) * double(k) * l;
}

double mc_highsnr_m(Index n, Index k, double mar) {
  check_mar(mar, "mc_highsnr_m");
  const double l = log_gap(n, k, "mc_highsnr_m");
  return 8.0 / mar * double(k) * l;
}

double lasso_m(Index n, Index k) {
  const double l = log_gap(n, k, "lasso_m");
  return 2.0 * double(k) * l + double(k) + 1.0;
}

double log2_binomial(Index n, Index k) {
  return (std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
          std::lgamma(double(n - k) + 1.0)) /
         std::log(2.0);
}

double capacity_bound_m(Index n, Index k, double snr) {
  if (k < 1 || k >= n)
    throw DomainError("capacity_bound_m: need 1 <= k < n, got n=" +
                      std::to_string(n) + " k=" + std::to_string(k));
  check_snr(snr, "capacity_bound_m");
  const double alpha = double(k) / double(n);
  const double denom =
      std::log2(1.0 + snr) - alpha * std::log2(1.0 + snr / alpha);
  if (!(denom > 0.0))
    throw DomainError("capacity_bound_m: nonpositive rate gap");
  return 2.0 * log2_binomial(n, k) / denom;
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::ml_necessary: return "ml-necessary";
    case CurveKind::mc_sufficient: return "mc-sufficient";
    case CurveKind::mc_highsnr: return "mc-highsnr";
    case CurveKind::lasso: return "lasso";
    case CurveKind::capacity: return "capacity";
  }
  return "?";
}

std::optional<CurveKind> parse_curve_kind(std::string_view name) {
  for (auto k : {CurveKind::ml_necessary, CurveKind::mc_sufficient,
                 CurveKind::mc_highsnr, CurveKind::lasso, CurveKind::capacity})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

bool curve_uses_snr(CurveKind kind) {
  return kind == CurveKind::ml_necessary || kind == CurveKind::mc_sufficient ||
         kind == CurveKind::capacity;
}

bool curve_uses_mar(CurveKind kind) {
  return kind == CurveKind::ml_necessary || kind == CurveKind::mc_sufficient ||
         kind == CurveKind::mc_highsnr;
}

double threshold_m(CurveKind kind, Index n, Index k, double snr, double mar) {
  switch (kind) {
    case CurveKind::ml_necessary: return ml_necessary_m(n, k, snr, mar);
    case CurveKind::mc_sufficient: return mc_sufficient_m(n, k, snr, mar);
    case CurveKind::mc_highsnr: return mc_highsnr_m(n, k, mar);
    case CurveKind::lasso: return lasso_m(n, k);
    case CurveKind::capacity: return capacity_bound_m(n, k, snr);
  }
  return NAN;
}

bool curve_defined(CurveKind kind, Index n, Index k) {
  if (kind == CurveKind::capacity) return k >= 1 && k < n;
  return k >= 1 && n - k >= 2;
}

ThresholdCurve evaluate_curve(CurveKind kind, Index n, double snr, double mar,
                              std::span<const Index> ks) {
  ThresholdCurve curve{kind, n, snr, mar, {}};
  std::vector<Index> sorted(ks.begin(), ks.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (Index k : sorted) {
    if (!curve_defined(kind, n, k)) continue;
    const double m = threshold_m(kind, n, k, snr, mar);
    if (std::isfinite(m) && m > 0.0) curve.points.push_back({k, m});
  }
  return curve;
}

}  // namespace sprec
