#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sprec/estimators.hpp"
#include "sprec/model.hpp"

namespace sprec {

struct Scenario {
  double snr;
  double mar;
};

struct SweepConfig {
  Index n = 0;
  std::vector<Index> k_values;
  std::vector<Index> m_values;
  std::vector<Scenario> scenarios;
  std::vector<EstimatorKind> estimators;
  std::uint64_t trials = 0;
  std::uint64_t seed = 1;
  std::uint64_t ml_guard = kDefaultSubsetGuard;
  std::string output;
  SignRule sign_rule = SignRule::random;
};

// One (n, k, m, snr, mar, estimator) grid point.
struct CellConfig {
  Index n, k, m;
  double snr, mar;
  EstimatorKind estimator;
  std::uint64_t trials;
  std::uint64_t ml_guard = kDefaultSubsetGuard;
  SignRule sign_rule = SignRule::random;
};

// A single nonzero always has mar = 1, whatever the scenario asks for.
inline double effective_mar(const CellConfig& cell) {
  return cell.k == 1 ? 1.0 : cell.mar;
}

enum class CellStatus { ok, skipped, failed };

struct CellResult {
  CellConfig cell;
  std::uint64_t trials = 0;     // trials actually run
  std::uint64_t successes = 0;
  double success_rate = 0.0;    // successes / trials; NaN unless ok
  double elapsed_s = 0.0;       // summed trial wall time
  bool has_elapsed = true;
  std::uint64_t seed = 0;
  CellStatus status = CellStatus::ok;
  std::string reason;
};

// Throws ValidationError for unusable configs; returns notices for
// suspicious-but-allowed ones (k >= m, n - k < 2, ...).
std::vector<std::string> validate_config(const SweepConfig& config);

// Config order: scenario, estimator, k, m (m fastest).
std::vector<CellConfig> expand_cells(const SweepConfig& config);

// Per-trial stream key. Depends only on the master seed and the cell
// coordinates, so results do not depend on scheduling.
Stream trial_stream(const CellConfig& cell, std::uint64_t master_seed,
                    std::uint64_t trial);

// Synthesizes one instance and reports whether the estimator recovered the
// support exactly.
bool run_trial(const CellConfig& cell, std::uint64_t master_seed,
               std::uint64_t trial);

// Guard violations become a skipped record, not an exception.
CellResult run_cell(const CellConfig& cell, std::uint64_t master_seed);

// Rough flop count for the whole sweep.
double estimate_work(const SweepConfig& config);

struct SweepOptions {
  unsigned workers = 1;
  std::uint64_t chunk_trials = 50;
  std::ostream* progress = nullptr;
  // Called in config order as soon as each cell and all cells before it are
  // done.
  std::function<void(const CellResult&)> on_result;
};

std::vector<CellResult> run_sweep(const SweepConfig& config,
                                  const SweepOptions& options = {});

// --- persistence ---

inline constexpr const char* kResultsHeader =
    "n,k,m,snr,mar,estimator,trials,successes,success_rate,elapsed_s,seed,"
    "status";

std::string format_number(double v);
void write_results_header(std::ostream& os);
// `with_timing == false` leaves elapsed_s empty so the file is a pure
// function of config and seed.
void write_result_row(std::ostream& os, const CellResult& r, bool with_timing);
std::vector<CellResult> read_results_csv(std::istream& is);

// Sweep config: a JSON object whose keys mirror SweepConfig. Unknown keys
// and type errors throw ValidationError with a "line L, column C" location.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::filesystem::path& path);
nlohmann::json to_json(const SweepConfig& config);

nlohmann::json make_manifest(const SweepConfig& config,
                             const std::filesystem::path& results_path,
                             unsigned workers, double wall_seconds);
std::filesystem::path manifest_path_for(const std::filesystem::path& results);

std::string version_string();

// Canned, downscaled figure configs; `full` switches to the original grids.
SweepConfig repro_config(int figure, bool full,
                         std::optional<std::uint64_t> trials);

}  // namespace sprec
