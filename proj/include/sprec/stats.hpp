#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sprec::stats {

// Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic;  // sup |F_n - F|
  double p_value;
  double effective_n;
};

// One-sample KS against a continuous CDF. p-value from the asymptotic
// distribution with Stephens' small-sample correction.
KsResult ks_one_sample(std::vector<double> samples,
                       const std::function<double(double)>& cdf);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// D such that the KS test rejects at level alpha for effective size n.
double ks_critical_value(double alpha, double effective_n);

double mean(std::span<const double> x);
double pearson_correlation(std::span<const double> x,
                           std::span<const double> y);

}  // namespace sprec::stats
