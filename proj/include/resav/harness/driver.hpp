#pragma once

// Experiment drivers behind the run, converge and compare subcommands.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "resav/harness/config.hpp"
#include "resav/harness/problems.hpp"

namespace resav::harness {

struct RunResult {
  std::vector<StepReport> rows;  ///< initial state first
  std::vector<Field> final_fields;
  double t = 0.0;
  long steps = 0;
  std::vector<std::string> snapshots;
};

struct RunHooks {
  bool keep_rows = true;
  bool write_files = false;
  /// Called after every step with the current history.
  std::function<void(const StepReport&, const History&)> on_step;
};

/// Number of uniform steps reaching T (rounded up when T is not a multiple).
long step_count(double t_end, double dt);

RunResult run_simulation(const RunConfig& cfg, const RunHooks& hooks = {});

/// Writes <output_dir>/energy.csv and snapshots; prints a summary.
int cmd_run(const RunConfig& cfg, std::ostream& out);

struct ConvergenceRow {
  double dt = 0.0;
  double error = 0.0;
  std::optional<double> rate;
};

/// rate_i = log(e_{i-1}/e_i) / log(dt_{i-1}/dt_i)
std::vector<std::optional<double>> observed_rates(const std::vector<double>& dts,
                                                  const std::vector<double>& errors);
/// L2 distance between two component lists on a common grid.
double l2_error(const std::vector<Field>& a, const std::vector<Field>& b);

std::vector<ConvergenceRow> converge(const RunConfig& cfg, std::vector<double> dts,
                                     const std::string& reference, int threads = 1);
int cmd_converge(const RunConfig& cfg, std::ostream& out);

void write_compare_csv(const std::vector<RunConfig>& cfgs, const std::vector<RunResult>& runs,
                       std::ostream& out);
int cmd_compare(const std::vector<RunConfig>& cfgs, std::ostream& out);

/// RESAV_THREADS, default 1.
int thread_budget();

}  // namespace resav::harness
