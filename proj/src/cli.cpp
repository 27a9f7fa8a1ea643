#include "sprec/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "sprec/error.hpp"
#include "sprec/estimators.hpp"
#include "sprec/harness.hpp"
#include "sprec/lemmas.hpp"
#include "sprec/model.hpp"
#include "sprec/plot.hpp"
#include "sprec/theory.hpp"

namespace sprec {

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  auto to_index = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return Index(v);
    } catch (const std::exception&) {
      throw ValidationError("bad integer list '" + text + "'");
    }
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (auto p = item.find(".."); p != std::string::npos) {
      const Index lo = to_index(item.substr(0, p));
      const Index hi = to_index(item.substr(p + 2));
      if (hi < lo) throw ValidationError("empty range '" + item + "'");
      for (Index v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(to_index(item));
    }
  }
  if (out.empty()) throw ValidationError("empty integer list '" + text + "'");
  return out;
}

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> guard;
  std::string out;
  std::string config;
};

unsigned resolve_workers(const Globals& g) {
  if (g.workers) return std::max(1u, *g.workers);
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ValidationError(std::string(kWorkersEnv) + " must be an integer");
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string join(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Runs the sweep, streams rows into `csv_path`, writes the manifest beside it.
int execute_sweep(const SweepConfig& config, const std::filesystem::path& csv_path,
                  unsigned workers, bool timing, std::ostream& err) {
  if (csv_path.has_parent_path())
    std::filesystem::create_directories(csv_path.parent_path());
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  write_results_header(csv);
  SweepOptions opts;
  opts.workers = workers;
  opts.progress = &err;
  bool any_failed = false;
  opts.on_result = [&](const CellResult& r) {
    write_result_row(csv, r, timing);
    csv.flush();
    any_failed |= r.status == CellStatus::failed;
  };
  const auto t0 = std::chrono::steady_clock::now();
  run_sweep(config, opts);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream manifest(manifest_path_for(csv_path));
  manifest << std::setw(2) << make_manifest(config, csv_path, workers, wall) << "\n";
  err << "[sweep] wrote " << csv_path.string() << " in " << wall << " s\n";
  return any_failed ? kExitRuntime : kExitOk;
}

std::vector<CurveKind> parse_curve_list(const std::string& text) {
  std::vector<CurveKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item == "none") continue;
    auto kind = parse_curve_kind(item);
    if (!kind) throw ValidationError("unknown curve kind '" + item + "'");
    out.push_back(*kind);
  }
  return out;
}

void print_estimate(std::ostream& out, const char* label, const SupportEstimate& e,
                    const SparseSignal& truth) {
  out << label << " support: {" << join(e.support) << "}"
      << (is_exact_recovery(e, truth) ? "  (exact)" : "  (wrong)")
      << (e.tie ? "  [tie]" : "") << "\n";
  if (e.kind == EstimatorKind::ml) {
    out << "  energy ||P_J y||^2 = " << format_number(e.ml_energy) << "\n";
  } else {
    out << "  |a_j' y| =";
    for (double s : e.mc_scores) out << " " << format_number(s);
    out << "\n";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Sparsity pattern recovery workbench"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers,
                 std::string("Worker threads (default: $") + kWorkersEnv +
                     " or hardware concurrency)");
  app.add_option("--guard", g.guard, "ML subset-count guard");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--config", g.config, "Sweep config (JSON)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep from --config");
  bool timing = false;
  sweep->add_flag("--timing", timing, "Record per-cell wall time in elapsed_s");

  // curve
  auto* curve = app.add_subcommand("curve", "Evaluate a threshold curve to CSV");
  std::string kind_name, k_list;
  Index curve_n = 0;
  double curve_snr = 1.0, curve_mar = 1.0;
  curve->add_option("--kind", kind_name,
                    "ml-necessary | mc-sufficient | mc-highsnr | lasso | capacity")
      ->required();
  curve->add_option("--n", curve_n, "Signal dimension")->required();
  curve->add_option("--k", k_list, "k values, e.g. 1..5 or 2,4,8")->required();
  curve->add_option("--snr", curve_snr, "SNR");
  curve->add_option("--mar", curve_mar, "MAR");

  // trial
  auto* trial = app.add_subcommand("trial", "Run and print one instance");
  Index t_n = 20, t_k = 3, t_m = 15;
  double t_snr = 10.0, t_mar = 1.0;
  std::uint64_t t_index = 0;
  bool t_noiseless = false;
  trial->add_option("--n", t_n);
  trial->add_option("--k", t_k);
  trial->add_option("--m", t_m);
  trial->add_option("--snr", t_snr);
  trial->add_option("--mar", t_mar);
  trial->add_option("--trial", t_index, "Trial index");
  trial->add_flag("--noiseless", t_noiseless, "Force d = 0");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a lemma verifier");
  std::string lemma_name;
  std::optional<std::int64_t> v_n, v_r, v_s, v_trials, v_samples;
  verify->add_option("name", lemma_name,
                     "max-gauss-sq | chisq-max-min | beta-projection | beta-max")
      ->required();
  verify->add_option("--n", v_n);
  verify->add_option("--r", v_r);
  verify->add_option("--s", v_s);
  verify->add_option("--trials", v_trials);
  verify->add_option("--samples", v_samples);

  // plot
  auto* plot = app.add_subcommand("plot", "Render results CSV as heatmaps");
  std::string results_path, curve_list = "auto";
  plot->add_option("--results", results_path, "Results CSV")->required();
  plot->add_option("--curves", curve_list,
                   "Comma-separated curve kinds, 'auto' or 'none'");

  // repro
  auto* repro = app.add_subcommand("repro", "Canned figure reproductions");
  std::string figure;
  std::optional<std::uint64_t> r_trials;
  bool r_full = false;
  repro->add_option("figure", figure, "fig1 | fig2 | fig3")->required();
  repro->add_option("--trials", r_trials, "Trials per cell");
  repro->add_flag("--full", r_full, "Use the original, full-size grids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*sweep) {
      if (g.config.empty()) throw ValidationError("sweep: --config is required");
      SweepConfig config = load_sweep_config(g.config);
      if (g.seed) config.seed = *g.seed;
      if (g.guard) config.ml_guard = *g.guard;
      if (!g.out.empty()) config.output = g.out;
      if (config.output.empty())
        throw ValidationError("sweep: no output path (set \"output\" or --out)");
      validate_config(config);
      return execute_sweep(config, config.output, resolve_workers(g), timing, err);
    }

    if (*curve) {
      const auto kind = parse_curve_kind(kind_name);
      if (!kind) throw ValidationError("unknown curve kind '" + kind_name + "'");
      const auto ks = parse_index_list(k_list);
      if (*kind == CurveKind::mc_sufficient || *kind == CurveKind::mc_highsnr)
        for (Index k : ks)
          if (2 * k > curve_n) {
            err << "notice: k/n > 1/2 at k=" << k
                << "; the maximum-correlation guarantee assumes k/n <= 1/2\n";
            break;
          }
      const ThresholdCurve c = evaluate_curve(*kind, curve_n, curve_snr, curve_mar, ks);
      for (Index k : ks)
        if (!curve_defined(*kind, curve_n, k))
          err << "notice: k=" << k << " is outside the formula's domain; skipped\n";
      std::ofstream file;
      if (!g.out.empty()) {
        file.open(g.out);
        if (!file) throw std::runtime_error("cannot write " + g.out);
      }
      std::ostream& os = g.out.empty() ? out : file;
      os << "kind,n,k,snr,mar,m_threshold\n";
      for (const auto& p : c.points)
        os << to_string(c.kind) << ',' << c.n << ',' << p.k << ','
           << (curve_uses_snr(c.kind) ? format_number(c.snr) : "") << ','
           << (curve_uses_mar(c.kind) ? format_number(c.mar) : "") << ','
           << format_number(p.m) << "\n";
      return kExitOk;
    }

    if (*trial) {
      const std::uint64_t seed = g.seed.value_or(1);
      CellConfig cell{t_n, t_k, t_m, t_snr, t_mar, EstimatorKind::ml, 1,
                    g.guard.value_or(kDefaultSubsetGuard), SignRule::random};
      Stream rng = trial_stream(cell, seed, t_index);
      const ProblemInstance inst = make_instance(
          t_n, t_k, t_m, t_snr, effective_mar(cell), SignRule::random, rng,
          {seed, t_index}, t_noiseless ? NoiseMode::zero : NoiseMode::gaussian);
      out << "instance: n=" << t_n << " k=" << t_k << " m=" << t_m
          << " snr=" << format_number(t_snr) << " mar=" << format_number(t_mar)
          << " seed=" << seed << " trial=" << t_index << "\n";
      out << "true support: {" << join(inst.signal.support()) << "}  values:";
      for (double v : inst.signal.values()) out << " " << format_number(v);
      out << "\n||y||^2 = " << format_number(inst.y.squaredNorm()) << "\n";
      print_estimate(out, "MC", mc_estimate(inst), inst.signal);
      try {
        print_estimate(out, "ML", ml_estimate(inst, cell.ml_guard, MlSearch::shared_prefix),
                       inst.signal);
      } catch (const GuardExceeded& e) {
        out << "ML skipped: " << e.what() << "\n";
      }
      try {
        out << "ML failure certificate: "
            << (ml_failure_certificate(inst) ? "FIRES (ML provably wrong)"
                                             : "does not fire")
            << "\n";
      } catch (const DegenerateColumn& e) {
        out << "ML failure certificate: undefined (" << e.what() << ")\n";
      }
      return kExitOk;
    }

    if (*verify) {
      const LemmaId id = parse_lemma(lemma_name);
      LemmaVerdict v;
      const bool custom = g.seed || v_n || v_r || v_s || v_trials || v_samples;
      if (!custom) {
        v = run_default_verifier(id);
      } else {
        using namespace lemma_defaults;
        switch (id) {
          case LemmaId::max_gauss_sq: {
            Stream rng(g.seed.value_or(kMaxGaussSqSeed));
            v = verify_max_gauss_sq(v_n.value_or(kMaxGaussSqN),
                                    v_trials.value_or(kMaxGaussSqTrials), rng);
            break;
          }
          case LemmaId::chisq_max_min: {
            Stream rng(g.seed.value_or(kChisqMaxMinSeed));
            v = verify_chisq_max_min(v_r.value_or(kChisqR), v_n.value_or(kChisqN),
                                     v_trials.value_or(kChisqTrials), rng);
            break;
          }
          case LemmaId::beta_projection: {
            Stream rng(g.seed.value_or(kBetaProjectionSeed));
            v = verify_beta_projection(v_s.value_or(kBetaProjectionS),
                                       v_samples.value_or(kBetaProjectionSamples), rng);
            break;
          }
          case LemmaId::beta_max: {
            Stream rng(g.seed.value_or(kBetaMaxSeed));
            v = verify_beta_max(v_n.value_or(kBetaMaxN), v_s.value_or(kBetaMaxS),
                                v_trials.value_or(kBetaMaxTrials), rng);
            break;
          }
        }
      }
      out << format_verdict(v);
      return v.pass ? kExitOk : kExitVerifierFailed;
    }

    if (*plot) {
      std::ifstream in(results_path);
      if (!in) throw ValidationError("plot: cannot open " + results_path);
      const auto results = read_results_csv(in);
      std::vector<CurveKind> curves;
      if (curve_list == "auto") {
        bool ml = false, mc = false;
        for (const auto& r : results)
          (r.cell.estimator == EstimatorKind::ml ? ml : mc) = true;
        if (ml) curves.push_back(CurveKind::ml_necessary);
        if (mc) curves.push_back(CurveKind::mc_sufficient);
      } else {
        curves = parse_curve_list(curve_list);
      }
      const std::filesystem::path dir = g.out.empty() ? "plots" : g.out;
      write_plot(overlay_curves(results, curves), dir);
      err << "[plot] wrote " << (dir / "index.html").string() << "\n";
      return kExitOk;
    }

    if (*repro) {
      int fig = 0;
      if (figure == "fig1") fig = 1;
      else if (figure == "fig2") fig = 2;
      else if (figure == "fig3") fig = 3;
      else throw ValidationError("repro: expected fig1, fig2 or fig3");
      SweepConfig config = repro_config(fig, r_full, r_trials);
      if (g.seed) config.seed = *g.seed;
      if (g.guard) config.ml_guard = *g.guard;
      const std::filesystem::path dir = g.out.empty() ? "repro_" + figure : g.out;
      std::filesystem::create_directories(dir);
      const auto csv_path = dir / config.output;
      config.output = csv_path.string();
      const int rc = execute_sweep(config, csv_path, resolve_workers(g), false, err);
      std::ifstream in(csv_path);
      const auto results = read_results_csv(in);
      const std::vector<CurveKind> curves{fig == 3 ? CurveKind::mc_sufficient
                                                   : CurveKind::ml_necessary};
      write_plot(overlay_curves(results, curves), dir / "plots");
      err << "[repro] plots in " << (dir / "plots").string() << "\n";
      return rc;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace sprec
