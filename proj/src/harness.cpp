#include "sprec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "sprec/error.hpp"

namespace sprec {

namespace {

using Clock = std::chrono::steady_clock;

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

// Pre-execution guard check; empty when the cell is runnable.
std::string guard_violation(const CellConfig& cell) {
  if (cell.m > kDefaultEntryCap / cell.n)
    return "matrix guard: m*n exceeds " + std::to_string(kDefaultEntryCap);
  if (cell.estimator == EstimatorKind::ml) {
    const auto count = subset_count(cell.n, cell.k);
    if (count > cell.ml_guard)
      return "ml subset guard: C(" + std::to_string(cell.n) + " " +
             std::to_string(cell.k) + ")=" + std::to_string(count) + " > " +
             std::to_string(cell.ml_guard);
  }
  return {};
}

CellResult blank_result(const CellConfig& cell, std::uint64_t seed) {
  CellResult r;
  r.cell = cell;
  r.seed = seed;
  r.success_rate = std::numeric_limits<double>::quiet_NaN();
  return r;
}

void finalize(CellResult& r) {
  if (r.status == CellStatus::ok)
    r.success_rate = r.trials ? double(r.successes) / double(r.trials) : 0.0;
}

}  // namespace

std::vector<std::string> validate_config(const SweepConfig& c) {
  if (c.n < 1) throw ValidationError("config: n must be >= 1");
  if (c.k_values.empty()) throw ValidationError("config: k_values is empty");
  if (c.m_values.empty()) throw ValidationError("config: m_values is empty");
  if (c.scenarios.empty()) throw ValidationError("config: scenarios is empty");
  if (c.estimators.empty()) throw ValidationError("config: estimators is empty");
  if (c.trials < 1) throw ValidationError("config: trials must be >= 1");
  for (Index k : c.k_values)
    if (k < 1 || k > c.n)
      throw ValidationError("config: k = " + std::to_string(k) +
                            " outside [1, n]");
  for (Index m : c.m_values)
    if (m < 1) throw ValidationError("config: m values must be >= 1");
  for (const auto& s : c.scenarios) {
    if (!(s.snr > 0.0) || !std::isfinite(s.snr))
      throw ValidationError("config: snr must be positive");
    if (!(s.mar > 0.0 && s.mar <= 1.0))
      throw ValidationError("config: mar must lie in (0, 1]");
  }

  std::vector<std::string> notes;
  const Index m_min = *std::min_element(c.m_values.begin(), c.m_values.end());
  for (Index k : c.k_values) {
    if (k >= m_min)
      notes.push_back("k = " + std::to_string(k) +
                      " is not below the smallest m (" + std::to_string(m_min) +
                      "); those cells sit at chance level");
    if (c.n - k < 2)
      notes.push_back("k = " + std::to_string(k) +
                      " has n - k < 2; threshold curves are undefined there");
    if (k == 1 && std::any_of(c.scenarios.begin(), c.scenarios.end(),
                              [](const Scenario& s) { return s.mar != 1.0; }))
      notes.push_back("k = 1 signals always have mar = 1; the scenario mar is "
                      "ignored for those cells");
  }
  return notes;
}

std::vector<CellConfig> expand_cells(const SweepConfig& c) {
  std::vector<CellConfig> cells;
  for (const auto& s : c.scenarios)
    for (auto est : c.estimators)
      for (Index k : c.k_values)
        for (Index m : c.m_values)
          cells.push_back({c.n, k, m, s.snr, s.mar, est, c.trials, c.ml_guard,
                           c.sign_rule});
  return cells;
}

Stream trial_stream(const CellConfig& cell, std::uint64_t master_seed,
                    std::uint64_t trial) {
  return make_stream(master_seed,
                     {std::uint64_t(cell.n), std::uint64_t(cell.k),
                      std::uint64_t(cell.m), std::bit_cast<std::uint64_t>(cell.snr),
                      std::bit_cast<std::uint64_t>(cell.mar),
                      std::uint64_t(cell.estimator), trial});
}

bool run_trial(const CellConfig& cell, std::uint64_t master_seed,
               std::uint64_t trial) {
  Stream rng = trial_stream(cell, master_seed, trial);
  const ProblemInstance inst =
      make_instance(cell.n, cell.k, cell.m, cell.snr, effective_mar(cell),
                    cell.sign_rule, rng, {master_seed, trial});
  const SupportEstimate est =
      cell.estimator == EstimatorKind::ml
          ? ml_estimate(inst, cell.ml_guard, MlSearch::shared_prefix)
          : mc_estimate(inst);
  return is_exact_recovery(est, inst.signal);
}

CellResult run_cell(const CellConfig& cell, std::uint64_t master_seed) {
  CellResult r = blank_result(cell, master_seed);
  if (auto why = guard_violation(cell); !why.empty()) {
    r.status = CellStatus::skipped;
    r.reason = sanitize(why);
    return r;
  }
  const auto t0 = Clock::now();
  try {
    for (std::uint64_t t = 0; t < cell.trials; ++t)
      r.successes += run_trial(cell, master_seed, t) ? 1 : 0;
    r.trials = cell.trials;
  } catch (const GuardExceeded& e) {
    r = blank_result(cell, master_seed);
    r.status = CellStatus::skipped;
    r.reason = sanitize(e.what());
  } catch (const std::exception& e) {
    r = blank_result(cell, master_seed);
    r.status = CellStatus::failed;
    r.reason = sanitize(e.what());
  }
  r.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
  finalize(r);
  return r;
}

double estimate_work(const SweepConfig& config) {
  double total = 0.0;
  for (const auto& cell : expand_cells(config)) {
    double per_trial = double(cell.m) * double(cell.n);
    if (cell.estimator == EstimatorKind::ml)
      per_trial += double(std::min<std::uint64_t>(subset_count(cell.n, cell.k),
                                                  cell.ml_guard)) *
                   double(cell.m) * double(cell.k);
    total += per_trial * double(cell.trials);
  }
  return total;
}

std::vector<CellResult> run_sweep(const SweepConfig& config,
                                  const SweepOptions& options) {
  const auto notes = validate_config(config);
  if (options.progress) {
    for (const auto& n : notes) *options.progress << "[sweep] notice: " << n << "\n";
  }
  const auto cells = expand_cells(config);
  if (options.progress)
    *options.progress << "[sweep] " << cells.size() << " cells, estimated work "
                      << estimate_work(config) << " flops\n";

  struct Chunk {
    std::size_t cell;
    std::uint64_t begin, end;
    std::uint64_t successes = 0;
    double seconds = 0.0;
    CellStatus status = CellStatus::ok;
    std::string reason;
  };

  std::vector<CellResult> results;
  results.reserve(cells.size());
  std::vector<Chunk> chunks;
  std::vector<std::size_t> pending(cells.size(), 0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    results.push_back(blank_result(cells[c], config.seed));
    if (auto why = guard_violation(cells[c]); !why.empty()) {
      results[c].status = CellStatus::skipped;
      results[c].reason = sanitize(why);
      continue;
    }
    const std::uint64_t step = std::max<std::uint64_t>(1, options.chunk_trials);
    for (std::uint64_t b = 0; b < cells[c].trials; b += step) {
      chunks.push_back({c, b, std::min(cells[c].trials, b + step), 0, 0.0,
                        CellStatus::ok, {}});
      ++pending[c];
    }
  }

  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= chunks.size()) return;
      Chunk& ch = chunks[i];
      const CellConfig& cell = cells[ch.cell];
      const auto t0 = Clock::now();
      try {
        for (std::uint64_t t = ch.begin; t < ch.end; ++t)
          ch.successes += run_trial(cell, config.seed, t) ? 1 : 0;
      } catch (const GuardExceeded& e) {
        ch.status = CellStatus::skipped;
        ch.reason = sanitize(e.what());
      } catch (const std::exception& e) {
        ch.status = CellStatus::failed;
        ch.reason = sanitize(e.what());
      }
      ch.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      {
        std::lock_guard lock(mu);
        --pending[ch.cell];
      }
      cv.notify_one();
    }
  };

  const unsigned n_workers = std::max(1u, options.workers);
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);

  // Reduce chunks per cell in chunk order and emit a completed prefix.
  std::vector<std::vector<std::size_t>> cell_chunks(cells.size());
  for (std::size_t i = 0; i < chunks.size(); ++i)
    cell_chunks[chunks[i].cell].push_back(i);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return pending[c] == 0; });
    }
    CellResult& r = results[c];
    if (r.status == CellStatus::ok) {
      for (std::size_t i : cell_chunks[c]) {
        const Chunk& ch = chunks[i];
        r.elapsed_s += ch.seconds;
        if (ch.status != CellStatus::ok && r.status == CellStatus::ok) {
          r.status = ch.status;
          r.reason = ch.reason;
        }
        r.successes += ch.successes;
        r.trials += ch.end - ch.begin;
      }
      if (r.status != CellStatus::ok) {
        r.successes = 0;
        r.trials = 0;
      }
    }
    finalize(r);
    if (options.on_result) options.on_result(r);
    if (options.progress)
      *options.progress << "[sweep] cell " << (c + 1) << "/" << cells.size()
                        << " n=" << r.cell.n << " k=" << r.cell.k
                        << " m=" << r.cell.m << " snr=" << r.cell.snr
                        << " mar=" << r.cell.mar << " "
                        << to_string(r.cell.estimator) << ": "
                        << (r.status == CellStatus::ok
                                ? format_number(r.success_rate)
                                : r.reason)
                        << "\n";
  }
  return results;
}

// --- persistence ---

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_results_header(std::ostream& os) { os << kResultsHeader << "\n"; }

void write_result_row(std::ostream& os, const CellResult& r, bool with_timing) {
  std::string status = "ok";
  if (r.status == CellStatus::skipped) status = "skipped:" + r.reason;
  if (r.status == CellStatus::failed) status = "failed:" + r.reason;
  std::string elapsed;
  if (with_timing && r.has_elapsed) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", r.elapsed_s);
    elapsed = buf;
  }
  os << r.cell.n << ',' << r.cell.k << ',' << r.cell.m << ','
     << format_number(r.cell.snr) << ',' << format_number(r.cell.mar) << ','
     << to_string(r.cell.estimator) << ',' << r.trials << ',' << r.successes
     << ',' << (r.status == CellStatus::ok ? format_number(r.success_rate) : "")
     << ',' << elapsed << ',' << r.seed << ',' << status << "\n";
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_field(const std::string& s, std::size_t line, const char* name) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError("results line " + std::to_string(line) +
                          ": bad value '" + s + "' for " + name);
  return v;
}

}  // namespace

std::vector<CellResult> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kResultsHeader)
    throw ValidationError("results: missing or unexpected header (expected '" +
                          std::string(kResultsHeader) + "')");
  std::vector<CellResult> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12)
      throw ValidationError("results line " + std::to_string(lineno) +
                            ": expected 12 fields, got " +
                            std::to_string(f.size()));
    CellResult r;
    r.cell.n = parse_field<Index>(f[0], lineno, "n");
    r.cell.k = parse_field<Index>(f[1], lineno, "k");
    r.cell.m = parse_field<Index>(f[2], lineno, "m");
    r.cell.snr = parse_field<double>(f[3], lineno, "snr");
    r.cell.mar = parse_field<double>(f[4], lineno, "mar");
    r.cell.estimator = parse_estimator(f[5]);
    r.trials = parse_field<std::uint64_t>(f[6], lineno, "trials");
    r.cell.trials = r.trials;
    r.successes = parse_field<std::uint64_t>(f[7], lineno, "successes");
    r.success_rate = f[8].empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : parse_field<double>(f[8], lineno, "success_rate");
    r.has_elapsed = !f[9].empty();
    r.elapsed_s = r.has_elapsed ? parse_field<double>(f[9], lineno, "elapsed_s") : 0.0;
    r.seed = parse_field<std::uint64_t>(f[10], lineno, "seed");
    const std::string& st = f[11];
    if (st == "ok") {
      r.status = CellStatus::ok;
    } else if (st.rfind("skipped:", 0) == 0) {
      r.status = CellStatus::skipped;
      r.reason = st.substr(8);
    } else if (st.rfind("failed:", 0) == 0) {
      r.status = CellStatus::failed;
      r.reason = st.substr(7);
    } else {
      throw ValidationError("results line " + std::to_string(lineno) +
                            ": unknown status '" + st + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string version_string() {
#ifdef SPREC_VERSION
  return SPREC_VERSION;
#else
  return "unknown";
#endif
}

nlohmann::json make_manifest(const SweepConfig& config,
                             const std::filesystem::path& results_path,
                             unsigned workers, double wall_seconds) {
  return {{"tool", "sprec"},
          {"version", version_string()},
          {"build", std::string(__DATE__) + " " + __TIME__},
          {"master_seed", config.seed},
          {"results", results_path.filename().string()},
          {"cells", expand_cells(config).size()},
          {"workers", workers},
          {"wall_seconds", wall_seconds},
          {"config", to_json(config)}};
}

std::filesystem::path manifest_path_for(const std::filesystem::path& results) {
  auto p = results;
  p.replace_extension(".manifest.json");
  return p;
}

SweepConfig repro_config(int figure, bool full,
                         std::optional<std::uint64_t> trials) {
  auto range = [](Index lo, Index hi, Index step) {
    std::vector<Index> v;
    for (Index x = lo; x <= hi; x += step) v.push_back(x);
    return v;
  };
  SweepConfig c;
  switch (figure) {
    case 1:
      c.n = 20;
      c.k_values = range(1, 5, 1);
      c.m_values = full ? range(1, 40, 1) : range(2, 40, 2);
      c.scenarios = {{10, 1}, {10, 0.5}, {100, 1}};
      c.estimators = {EstimatorKind::ml};
      c.trials = 500;
      c.output = "fig1.csv";
      break;
    case 2:
      c.n = 40;
      c.k_values = range(1, 5, 1);
      c.m_values = full ? range(1, 40, 1) : range(4, 40, 4);
      c.scenarios = {{10, 1}, {10, 0.5}};
      c.estimators = {EstimatorKind::ml};
      c.trials = full ? 1000 : 100;
      c.output = "fig2.csv";
      break;
    case 3:
      c.n = 100;
      if (full) {
        c.k_values = range(1, 20, 1);
        c.m_values = range(25, 1000, 25);
        for (double mar : {1.0, 0.5, 0.2})
          for (double snr : {1.0, 10.0, 100.0}) c.scenarios.push_back({snr, mar});
      } else {
        c.k_values = {2, 5, 10, 15, 20};
        c.m_values = range(50, 1000, 50);
        c.scenarios = {{10, 1}, {10, 0.5}};
      }
      c.estimators = {EstimatorKind::mc};
      c.trials = 1000;
      c.output = "fig3.csv";
      break;
    default:
      throw ValidationError("repro: figure must be 1, 2 or 3");
  }
  if (trials) c.trials = *trials;
  c.seed = 20080501ULL + std::uint64_t(figure);
  return c;
}

}  // namespace sprec
