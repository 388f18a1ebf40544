#pragma once

// Phase-transition grids: a log-spaced lambda axis crossed with one model axis
// (sigma, d or L), several seeded data sets per axis value, one verdict per
// (axis value, seed, lambda) cell.
//
// Output directory layout:
//   grid.json        resolved grid (lambdas expanded)
//   results.csv      one row per cell, sorted by cell index
//   timings.csv      runtime per cell (kept apart so results.csv is reproducible)
//   progress.jsonl   completed cells, appended as they finish (resume marker)
//   cells/a<i>_s<j>/labels.txt, cells/a<i>_s<j>/l<k>_C.csv   with keep_coefficients

#include "ssc/cluster.hpp"
#include "ssc/simulate.hpp"
#include "ssc/solver.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ssc::experiment {

enum class Axis { sigma, d, L };
enum class Verdict { trivial, gray, white };

const char* to_string(Axis axis);
const char* to_string(Verdict verdict);
Axis parse_axis(const std::string& s);
Verdict parse_verdict(const std::string& s);

/// count log-spaced values from sqrt(n) 1e-2 to sqrt(n) 1e3.
std::vector<double> default_lambdas(int n, int count = 25);

struct ExperimentGrid {
  /// Fixed model parameters; the axis value overrides sigma, d or L.
  sim::ModelSpec base;
  /// Empty means default_lambdas(base.n).
  std::vector<double> lambdas;
  Axis axis = Axis::sigma;
  std::vector<double> axis_values;
  int seeds = 1;
  std::uint64_t master_seed = 0;
  /// lambda is overwritten per cell.
  solver::SolveConfig solve;
  double gray_threshold = 0.1;
  bool cluster = true;

  /// Throws InvalidSpec.
  void validate() const;
  std::vector<double> resolved_lambdas() const;
  std::size_t num_cells() const;
  /// Model for axis index a.
  sim::ModelSpec cell_model(std::size_t a) const;
  RngSpec dataset_rng(std::size_t a, int seed) const;
  RngSpec cluster_rng(std::size_t a, int seed, std::size_t k) const;
};

/// Canonical JSON; parse accepts the same keys plus a "model" object in the
/// shorthand form (d and L instead of dims).
std::string to_json(const ExperimentGrid& grid);
ExperimentGrid parse_grid(const std::string& text);

struct GridCellResult {
  std::size_t index = 0;
  std::size_t axis_index = 0;
  int seed = 0;
  std::size_t lambda_index = 0;
  double axis_value = 0.0;
  double lambda = 0.0;
  Verdict verdict = Verdict::trivial;
  double rel_violation = 0.0;
  bool above_gray_threshold = false;
  /// NaN when clustering is disabled.
  double accuracy = 0.0;
  std::size_t trivial_columns = 0;
  int iterations = 0;
  bool converged = false;
  double runtime_ms = 0.0;
};

/// trivial if any column is trivial, white iff rel_violation = 0, gray otherwise.
Verdict classify(std::size_t trivial_columns, double rel_violation);

/// Recomputes the verdict of a cell from its coefficient matrix.
Verdict recompute_verdict(const CoefficientMatrix& c, const std::vector<int>& labels, double support_rel);

struct RunOptions {
  std::string out_dir;
  int workers = 1;
  bool keep_coefficients = false;
  bool resume = false;
  /// Called after every finished cell (from worker threads, serialized).
  std::function<void(const GridCellResult&)> on_cell;
};

struct RunResult {
  std::vector<GridCellResult> cells;
  bool interrupted = false;
  std::size_t resumed_cells = 0;
};

/// Runs the grid. Rows are ordered by cell index whatever the worker count.
/// With resume, data sets whose cells are all in progress.jsonl are skipped
/// (partly finished ones are redone, lambdas being warm-started in order); the stored
/// grid.json must match. After request_stop() the workers finish their current
/// cell, the completed rows are flushed and interrupted is set.
RunResult run_grid(const ExperimentGrid& grid, const RunOptions& opts);

/// Worker count after applying the SSC_THREADS cap (at least 1).
int effective_workers(int requested);

void request_stop();
void clear_stop();

std::string results_csv(const ExperimentGrid& grid, const std::vector<GridCellResult>& cells);

/// Reads results.csv rows back (used by resume checks and tests).
std::vector<GridCellResult> parse_results_csv(const std::string& text);

}  // namespace ssc::experiment
