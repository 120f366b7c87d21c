#include "resav/harness/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>

#include "resav/harness/io.hpp"

namespace resav::harness {

namespace fs = std::filesystem;

long step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (t_end <= 0.0) return 0;
  const double q = t_end / dt;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return static_cast<long>(r);
  return static_cast<long>(std::ceil(q));
}

int thread_budget() {
  const char* env = std::getenv("RESAV_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("RESAV_THREADS", "expected a positive integer");
  return static_cast<int>(v);
}

RunResult run_simulation(const RunConfig& cfg_in, const RunHooks& hooks) {
  RunConfig cfg = cfg_in;
  validate(cfg);
  Problem prob = build_problem(cfg);
  const long n = step_count(cfg.t_end, cfg.dt);
  Stepper stepper(prob.kit, prob.initial, cfg.dt);

  RunResult res;
  std::vector<double> pending = cfg.snapshot_times;
  std::sort(pending.begin(), pending.end(), std::greater<>());
  const fs::path dir(cfg.output_dir);
  auto snap = [&](long s, double t, const std::string& name) {
    const auto paths =
        write_snapshots(level_fields(stepper.history().newest()), t, (dir / "snapshots" / name).string());
    res.snapshots.insert(res.snapshots.end(), paths.begin(), paths.end());
    (void)s;
  };
  auto due = [&](long s, double t) {
    while (!pending.empty() && pending.back() <= static_cast<double>(s) * cfg.dt + 1e-12) {
      pending.pop_back();
      if (hooks.write_files) snap(s, t, "snap_" + std::to_string(s) + ".txt");
    }
  };

  const StepReport first = stepper.describe();
  if (hooks.keep_rows) res.rows.push_back(first);
  due(0, first.t);
  for (long s = 1; s <= n; ++s) {
    const StepReport rep = stepper.step();
    if (hooks.keep_rows) res.rows.push_back(rep);
    if (hooks.on_step) hooks.on_step(rep, stepper.history());
    due(s, rep.t);
  }
  res.t = stepper.t();
  res.steps = n;
  res.final_fields = level_fields(stepper.history().newest());
  if (hooks.write_files) snap(n, res.t, "final.txt");
  return res;
}

namespace {

std::vector<std::pair<std::string, std::string>> csv_meta(const RunConfig& cfg) {
  std::string n;
  for (std::size_t i = 0; i < cfg.n.size(); ++i) n += (i ? "x" : "") + std::to_string(cfg.n[i]);
  return {{"model", cfg.model},
          {"scheme", cfg.scheme},
          {"relaxed", cfg.relaxed ? "on" : "off"},
          {"n", n},
          {"dt", format_real(cfg.dt)},
          {"init", cfg.init},
          {"seed", std::to_string(cfg.seed)}};
}

}  // namespace

int cmd_run(const RunConfig& cfg_in, std::ostream& out) {
  RunConfig cfg = cfg_in;
  validate(cfg);
  RunHooks hooks;
  hooks.write_files = true;
  const RunResult res = run_simulation(cfg, hooks);
  fs::create_directories(cfg.output_dir);
  const auto csv_path = (fs::path(cfg.output_dir) / "energy.csv").string();
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path);
  write_csv_header(csv, csv_meta(cfg));
  for (const auto& r : res.rows) write_csv_row(csv, r);
  if (!csv) throw IoError("write failed for " + csv_path);

  double min_theta = 1.0;
  for (std::size_t i = 1; i < res.rows.size(); ++i) min_theta = std::min(min_theta, res.rows[i].theta0);
  const StepReport& last = res.rows.back();
  out << "scheme " << cfg.scheme << (cfg.relaxed ? "" : " (unrelaxed)") << ", steps " << res.steps
      << ", t " << format_real(res.t) << '\n'
      << "E_original " << format_real(last.e_original) << ", E_modified "
      << format_real(last.e_modified) << '\n';
  if (res.steps > 0) out << "min theta0 " << format_real(min_theta) << '\n';
  out << "wrote " << csv_path << " and " << res.snapshots.size() << " snapshot file(s)\n";
  return 0;
}

double l2_error(const std::vector<Field>& a, const std::vector<Field>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("l2_error: component count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = l2_norm(a[i] - b[i]);
    s += e * e;
  }
  return std::sqrt(s);
}

std::vector<std::optional<double>> observed_rates(const std::vector<double>& dts,
                                                  const std::vector<double>& errors) {
  std::vector<std::optional<double>> out(dts.size());
  for (std::size_t i = 1; i < dts.size(); ++i) {
    if (errors[i] > 0.0 && errors[i - 1] > 0.0 && dts[i] != dts[i - 1])
      out[i] = std::log(errors[i - 1] / errors[i]) / std::log(dts[i - 1] / dts[i]);
  }
  return out;
}

std::vector<ConvergenceRow> converge(const RunConfig& cfg_in, std::vector<double> dts,
                                     const std::string& reference, int threads) {
  RunConfig cfg = cfg_in;
  validate(cfg);
  if (dts.empty()) throw ConfigError("dts", "at least one time step is required");
  std::sort(dts.begin(), dts.end(), std::greater<>());
  if (reference == "exact" && !cfg.forced())
    throw ConfigError("reference", "exact reference needs init=manufactured");
  if (reference != "exact" && reference != "fine") throw ConfigError("reference", "expected exact or fine");

  RunHooks quiet;
  quiet.keep_rows = false;
  auto run_at = [&](double dt, double t_end) {
    RunConfig c = cfg;
    c.dt = dt;
    c.t_end = t_end;
    c.snapshot_times.clear();
    return run_simulation(c, quiet);
  };

  std::vector<RunResult> runs(dts.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t b = 0; b < dts.size(); b += width) {
    std::vector<std::future<RunResult>> batch;
    for (std::size_t i = b; i < std::min(dts.size(), b + width); ++i)
      batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, run_at,
                                 dts[i], cfg.t_end));
    for (std::size_t i = 0; i < batch.size(); ++i) runs[b + i] = batch[i].get();
  }

  std::vector<Field> fine;
  double t_fine = 0.0;
  if (reference == "fine") {
    const double dt_min = dts.back();
    t_fine = static_cast<double>(step_count(cfg.t_end, dt_min)) * dt_min;
    const RunResult ref = run_at(dt_min / 8.0, t_fine);
    fine = ref.final_fields;
    t_fine = ref.t;
  }
  const Problem prob = build_problem(cfg);

  std::vector<ConvergenceRow> rows;
  std::vector<double> errors;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    double err = 0.0;
    if (reference == "exact") {
      err = l2_error(runs[i].final_fields, prob.exact(runs[i].t));
    } else {
      if (std::abs(runs[i].t - t_fine) > 1e-9 * std::max(1.0, t_fine))
        throw ConfigError("dts", "time steps do not reach a common final time");
      err = l2_error(runs[i].final_fields, fine);
    }
    errors.push_back(err);
    rows.push_back({dts[i], err, std::nullopt});
  }
  const auto rates = observed_rates(dts, errors);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rate = rates[i];
  return rows;
}

int cmd_converge(const RunConfig& cfg_in, std::ostream& out) {
  RunConfig cfg = cfg_in;
  validate(cfg);
  std::vector<double> dts = cfg.dts;
  if (dts.empty()) dts = {cfg.dt, cfg.dt / 2, cfg.dt / 4, cfg.dt / 8};
  const auto rows = converge(cfg, dts, cfg.reference, thread_budget());
  fs::create_directories(cfg.output_dir);
  const auto path = (fs::path(cfg.output_dir) / "converge.csv").string();
  std::ofstream csv(path);
  if (!csv) throw IoError("cannot write " + path);
  csv << "# resav-converge v1 scheme=" << cfg.scheme << " relaxed=" << (cfg.relaxed ? "on" : "off")
      << " reference=" << cfg.reference << " label=" << cfg.display_label() << "\ndt,error,rate\n";
  out << "dt            error                  rate\n";
  for (const auto& r : rows) {
    csv << format_real(r.dt) << ',' << format_real(r.error) << ',' << (r.rate ? format_real(*r.rate) : "")
        << '\n';
    char line[128];
    std::snprintf(line, sizeof line, "%-13.6g %-22.15e %s\n", r.dt, r.error,
                  r.rate ? std::to_string(*r.rate).c_str() : "");
    out << line;
  }
  out << "wrote " << path << '\n';
  return 0;
}

void write_compare_csv(const std::vector<RunConfig>& cfgs, const std::vector<RunResult>& runs,
                       std::ostream& out) {
  if (cfgs.size() == 1) {
    write_csv_header(out, csv_meta(cfgs.front()));
    for (const auto& r : runs.front().rows) write_csv_row(out, r);
    return;
  }
  out << "# resav-compare v1 schemes=";
  for (std::size_t i = 0; i < cfgs.size(); ++i) out << (i ? ";" : "") << cfgs[i].display_label();
  out << '\n';
  const auto& cols = csv_columns();
  out << "step,t";
  for (const auto& c : cfgs)
    for (std::size_t j = 2; j < cols.size(); ++j) out << ',' << c.display_label() << ':' << cols[j];
  out << '\n';
  const std::size_t rows = runs.front().rows.size();
  for (std::size_t i = 0; i < rows; ++i) {
    out << runs.front().rows[i].step << ',' << format_real(runs.front().rows[i].t);
    for (const auto& run : runs)
      for (double v : csv_values(run.rows.at(i))) out << ',' << format_real(v);
    out << '\n';
  }
}

int cmd_compare(const std::vector<RunConfig>& cfgs_in, std::ostream& out) {
  if (cfgs_in.empty()) throw ConfigError("config", "compare needs at least one configuration");
  std::vector<RunConfig> cfgs = cfgs_in;
  for (auto& c : cfgs) validate(c);
  const RunConfig& a = cfgs.front();
  for (const auto& c : cfgs) {
    if (c.model != a.model || c.n != a.n || c.l != a.l || c.dt != a.dt || c.t_end != a.t_end)
      throw ConfigError("config", "compared runs must share model, grid, dt and T");
  }
  std::vector<RunResult> runs;
  for (const auto& c : cfgs) runs.push_back(run_simulation(c));
  fs::create_directories(a.output_dir);
  const auto path = (fs::path(a.output_dir) / "compare.csv").string();
  std::ofstream csv(path);
  if (!csv) throw IoError("cannot write " + path);
  write_compare_csv(cfgs, runs, csv);
  out << "compared " << cfgs.size() << " run(s), wrote " << path << '\n';
  return 0;
}

}  // namespace resav::harness
