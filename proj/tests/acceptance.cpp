// Acceptance suite: one PASS/FAIL line per criterion, exit 3 if any fails.
//
//   acceptance            run everything
//   acceptance 4 5 9      run selected criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>

#include "sprec/cli.hpp"
#include "sprec/error.hpp"
#include "sprec/estimators.hpp"
#include "sprec/harness.hpp"
#include "sprec/lemmas.hpp"
#include "sprec/theory.hpp"
#include "test_util.hpp"

using namespace sprec;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// --- 1 ---
Outcome projection_identity() {
  Stream rng(derive_seed(0xacc1, {}));
  std::uniform_int_distribution<int> pick(0, 1 << 30);
  const int cases = 10000;
  double worst = 0.0, worst_oracle = 0.0;
  int redrawn = 0;
  const auto t0 = Clock::now();
  for (int c = 0; c < cases;) {
    const Index m = 1 + pick(rng) % 50;
    const Index n = 2 + pick(rng) % 59;
    const Index kmax = std::min<Index>(m - 1, n - 1);
    const Index ksize = kmax == 0 ? 0 : pick(rng) % (kmax + 1);
    const auto a = gen_matrix(m, n, rng);
    Subset all = testutil::random_subset(n, ksize + 1, rng);
    const Index i = all.back();
    all.pop_back();
    Vector y = testutil::gaussian_vector(m, rng);
    if (pick(rng) % 2 == 0)  // mostly inside the span
      for (Index j : all) y += 3.0 * a.entries().col(j);
    double gain;
    try {
      gain = residual_correlation_gain(a, all, i, as_span(y));
    } catch (const DegenerateColumn&) {
      ++redrawn;
      continue;
    }
    Subset with = all;
    with.push_back(i);
    const double diff = projection_energy(a, with, as_span(y)) -
                        projection_energy(a, all, as_span(y));
    worst = std::max(worst, std::abs(gain - diff));
    std::sort(with.begin(), with.end());
    std::sort(all.begin(), all.end());
    const double oracle = testutil::ls_energy(a.entries(), with, y) -
                          testutil::ls_energy(a.entries(), all, y);
    worst_oracle = std::max(worst_oracle, std::abs(gain - oracle));
    ++c;
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 10.0,
          fmt("max |gain - energy difference| = %.2e over %d cases (SVD oracle %.2e), "
              "%d numerically degenerate draws redrawn, %.2f s (limit 10 s)",
              worst, cases, worst_oracle, redrawn, t)};
}

// --- 2 ---
Outcome ml_brute_force() {
  Stream rng(derive_seed(0xacc2, {}));
  const int cases = 2000;
  int mismatches = 0, mismatches_prefix = 0, ties = 0;
  const auto t0 = Clock::now();
  for (int c = 0; c < cases; ++c) {
    const Index n = 2 + rng() % 9;
    const Index k = 1 + rng() % std::min<Index>(3, n - 1);
    const Index m = 1 + rng() % 12;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double snr = std::exp(7.0 * u(rng) - 2.0);
    const double mar = k == 1 ? 1.0 : 0.1 + 0.9 * u(rng);
    const auto inst = make_instance(n, k, m, snr, mar, SignRule::random, rng);
    const auto truth = testutil::brute_force_ml(inst.a.entries(), inst.y, k);
    const auto est = ml_estimate(inst, kDefaultSubsetGuard, MlSearch::independent);
    const auto fast = ml_estimate(inst, kDefaultSubsetGuard, MlSearch::shared_prefix);
    mismatches += est.support != truth;
    mismatches_prefix += fast.support != truth;
    ties += est.tie;
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && mismatches_prefix == 0 && t < 60.0,
          fmt("%d/%d mismatches (independent search), %d (shared-prefix search), "
              "%d instances with ties, %.2f s (limit 60 s)",
              mismatches, cases, mismatches_prefix, ties, t)};
}

// --- 3 ---
Outcome certificate_soundness() {
  Stream rng(derive_seed(0xacc3, {}));
  const int cases = 10000;
  int fired = 0, violations = 0, exact = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 3 + rng() % 10;
    const Index k = 1 + rng() % std::min<Index>(4, n - 2);
    const Index m = k + rng() % 14;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double snr = std::exp(7.0 * u(rng) - 2.0);
    const double mar = k == 1 ? 1.0 : 0.1 + 0.9 * u(rng);
    const auto inst = make_instance(n, k, m, snr, mar, SignRule::random, rng);
    const bool ok = is_exact_recovery(ml_estimate(inst), inst.signal);
    const bool cert = ml_failure_certificate(inst);
    fired += cert;
    exact += ok;
    violations += cert && ok;
  }
  return {violations == 0,
          fmt("%d violations over %d instances (certificate fired %d times, "
              "ML exact %d times)",
              violations, cases, fired, exact)};
}

// --- 4 ---
Outcome curve_values() {
  const double a = ml_necessary_m(20, 5, 10, 1);
  const double b = mc_sufficient_m(100, 10, 10, 1);
  const double c = lasso_m(100, 10);
  const double d = capacity_bound_m(20, 4, 10);
  const bool pass = std::abs(a - 6.708) <= 0.001 && std::abs(b - 396.0) <= 0.5 &&
                    std::abs(c - 101.0) <= 0.1 && std::abs(d - 10.53) <= 0.05;
  return {pass, fmt("ml_necessary(20,5,10,1) = %.6f, mc_sufficient(100,10,10,1) = %.4f, "
                    "lasso(100,10) = %.4f, capacity(20,4,10) = %.4f",
                    a, b, c, d)};
}

// --- 5 ---
Outcome ratio_identities() {
  Stream rng(derive_seed(0xacc5, {}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_high = 0.0, worst_lead = 0.0;
  for (int p = 0; p < 100; ++p) {
    const Index n = 4 + rng() % 5000;
    const Index k = 1 + rng() % (n - 3);
    const double mar = 0.01 + 0.99 * u(rng);
    const double snr = std::exp(12.0 * u(rng) - 6.0);
    const double L = double(k) * std::log(double(n - k));
    const double high = mc_highsnr_m(n, k, mar) / (2.0 * L);
    worst_high = std::max(worst_high, std::abs(high / (4.0 / mar) - 1.0));
    const double mc_lead = mc_sufficient_m(n, k, snr, mar) / L;
    const double ml_lead = (ml_necessary_m(n, k, snr, mar) - double(k - 1)) / L;
    worst_lead = std::max(worst_lead, std::abs(mc_lead / ml_lead / (4.0 * (1.0 + snr)) - 1.0));
  }
  return {worst_high <= 1e-12 && worst_lead <= 1e-12,
          fmt("max relative error: highsnr/(2k ln(n-k)) vs 4/mar %.2e, "
              "leading-constant ratio vs 4(1+snr) %.2e (100 points each)",
              worst_high, worst_lead)};
}

// Success rates keyed by (snr, mar, k) then m.
using Table = std::map<std::tuple<double, double, Index>, std::map<Index, CellResult>>;

Table tabulate(const std::vector<CellResult>& rows) {
  Table t;
  for (const auto& r : rows) t[{r.cell.snr, r.cell.mar, r.cell.k}][r.cell.m] = r;
  return t;
}

std::vector<CellResult> sweep_to(const SweepConfig& config, const std::string& name) {
  const auto rows = run_sweep(config, {.workers = workers()});
  std::ofstream os(name);
  write_results_header(os);
  for (const auto& r : rows) write_result_row(os, r, false);
  return rows;
}

double binomial_se(double p, std::uint64_t n) {
  return std::sqrt(p * (1.0 - p) / double(n));
}

// --- 6 ---
Outcome fig1_reproduction() {
  const auto config = repro_config(1, false, std::nullopt);
  const auto t0 = Clock::now();
  const auto rows = sweep_to(config, "acceptance_fig1.csv");
  const double t = seconds_since(t0);
  int cells_not_ok = 0;
  for (const auto& r : rows) cells_not_ok += r.status != CellStatus::ok;

  int drops = 0, comparisons = 0, above_half = 0, checked_low = 0, weak_top = 0;
  double worst_drop_z = 0.0, max_low = 0.0, min_top = 1.0;
  for (const auto& [key, by_m] : tabulate(rows)) {
    const auto [snr, mar, k] = key;
    const CellResult* prev = nullptr;
    for (const auto& [m, r] : by_m) {
      if (prev) {
        ++comparisons;
        const double se = std::hypot(binomial_se(prev->success_rate, prev->trials),
                                     binomial_se(r.success_rate, r.trials));
        const double drop = prev->success_rate - r.success_rate;
        if (drop > 0 && se > 0) worst_drop_z = std::max(worst_drop_z, drop / se);
        if (drop > 2.0 * se) ++drops;
      }
      prev = &r;
      const double bound = ml_necessary_m(config.n, k, snr, effective_mar(r.cell));
      if (k >= 2 && double(m) <= bound / 2.0) {
        ++checked_low;
        max_low = std::max(max_low, r.success_rate);
        above_half += !(r.success_rate < 0.5);
      }
    }
    if (snr == 100.0) {
      const auto& top = by_m.rbegin()->second;
      min_top = std::min(min_top, top.success_rate);
      weak_top += !(top.success_rate > 0.9);
    }
  }
  return {cells_not_ok == 0 && drops == 0 && above_half == 0 && checked_low > 0 &&
              weak_top == 0,
          fmt("%zu cells (%d not ok); (a) %d/%d adjacent drops beyond 2 SE (largest %.2f SE); "
              "(b) %d/%d cells below ml_necessary/2 at rate >= 0.5 (max %.3f); "
              "(c) %d k values at snr=100 with rate <= 0.9 at m=40 (min %.3f); %.0f s",
              rows.size(), cells_not_ok, drops, comparisons, worst_drop_z, above_half,
              checked_low, max_low, weak_top, min_top, t)};
}

// --- 7 ---
Outcome fig3_reproduction() {
  const auto config = repro_config(3, false, std::nullopt);
  const auto t0 = Clock::now();
  const auto rows = sweep_to(config, "acceptance_fig3.csv");
  const double t = seconds_since(t0);
  int checked = 0, below = 0, not_ok = 0;
  double min_rate = 1.0;
  for (const auto& r : rows) {
    not_ok += r.status != CellStatus::ok;
    if (r.cell.k < 5) continue;
    if (double(r.cell.m) < mc_sufficient_m(r.cell.n, r.cell.k, r.cell.snr, effective_mar(r.cell)))
      continue;
    ++checked;
    min_rate = std::min(min_rate, r.success_rate);
    below += !(r.success_rate >= 0.95);
  }
  return {below == 0 && not_ok == 0 && checked > 0,
          fmt("%zu cells (%d not ok); %d/%d cells with m >= mc_sufficient, k >= 5 below 0.95 "
              "(min %.3f); %.0f s",
              rows.size(), not_ok, below, checked, min_rate, t)};
}

// --- 8 ---
Outcome lemma_verifiers() {
  std::string detail;
  bool pass = true;
  for (auto id : {LemmaId::beta_projection, LemmaId::chisq_max_min, LemmaId::max_gauss_sq,
                  LemmaId::beta_max}) {
    const auto v = run_default_verifier(id);
    const auto again = run_default_verifier(id);
    const bool same = v.statistics == again.statistics && v.pass == again.pass;
    pass = pass && v.pass && same;
    std::string stats;
    for (const auto& [name, x] : v.statistics) {
      if (name == "corr_standard_error") continue;
      stats += fmt(" %s=%.5g", name.c_str(), x);
    }
    detail += fmt("\n    %-16s %s%s%s", std::string(to_string(id)).c_str(),
                  v.pass ? "pass" : "FAIL", same ? ", rerun identical;" : ", RERUN DIFFERS;",
                  stats.c_str());
  }
  return {pass, "registered seeds" + detail};
}

// --- 9 ---
Outcome sweep_reproducibility() {
  const auto dir = fs::temp_directory_path() / "sprec_acceptance_sweep";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({
  "n": 14,
  "k_values": [1, 2, 3],
  "m_values": [2, 5, 8, 11, 14],
  "scenarios": [[10, 1], [10, 0.5], [100, 1]],
  "estimators": ["ML", "MC"],
  "trials": 200,
  "seed": 9
})";
  std::vector<std::string> outputs;
  for (const char* w : {"1", "1", "8", "8"}) {
    const auto out = dir / ("results_" + std::to_string(outputs.size()) + ".csv");
    const std::string cfg = (dir / "config.json").string(), path = out.string();
    const char* argv[] = {"sprec", "--config", cfg.c_str(), "--out", path.c_str(),
                          "--workers", w, "sweep"};
    std::ostringstream so, se;
    if (run_cli(8, argv, so, se) != kExitOk)
      return {false, "sweep failed: " + se.str()};
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    outputs.push_back(ss.str());
  }
  fs::remove_all(dir);
  const bool same = std::all_of(outputs.begin(), outputs.end(),
                                [&](const std::string& s) { return s == outputs[0]; });
  std::size_t lines = std::count(outputs[0].begin(), outputs[0].end(), '\n');
  return {same && lines == 1 + 90,
          fmt("4 runs (workers 1, 1, 8, 8): %s, %zu bytes, %zu lines",
              same ? "byte-identical" : "DIFFER", outputs[0].size(), lines)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"projection identity", projection_identity},
      {"ML brute-force equivalence", ml_brute_force},
      {"certificate soundness", certificate_soundness},
      {"curve values", curve_values},
      {"ratio identities", ratio_identities},
      {"ML phase transition, n = 20", fig1_reproduction},
      {"MC phase transition, n = 100", fig3_reproduction},
      {"lemma verifiers", lemma_verifiers},
      {"sweep reproducibility", sweep_reproducibility},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0, run = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = int(c) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    ++run;
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[c].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", run - failed, run);
  return failed ? kExitVerifierFailed : 0;
}
