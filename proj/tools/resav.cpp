// resav command line: run, converge, compare.

#include <CLI11.hpp>

#include <iostream>

#include "resav/errors.hpp"
#include "resav/harness/driver.hpp"

namespace {

using resav::harness::RunConfig;

RunConfig assemble(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg = path.empty() ? RunConfig{} : resav::harness::load_config(path);
  for (const auto& s : sets) resav::harness::apply_override(cfg, s);
  resav::harness::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxed exponential SAV solvers"};
  app.require_subcommand(1);

  std::string run_cfg, conv_cfg;
  std::vector<std::string> run_sets, conv_sets, cmp_sets, cmp_cfgs;

  auto* run = app.add_subcommand("run", "integrate one configuration");
  run->add_option("--config", run_cfg, "key=value configuration file");
  run->add_option("--set", run_sets, "override, key=value")->take_all();

  auto* conv = app.add_subcommand("converge", "time-step convergence sweep");
  conv->add_option("--config", conv_cfg, "key=value configuration file");
  conv->add_option("--set", conv_sets, "override, key=value")->take_all();

  auto* cmp = app.add_subcommand("compare", "run several configurations side by side");
  cmp->add_option("--config", cmp_cfgs, "configuration file, repeatable")->take_all();
  cmp->add_option("--set", cmp_sets, "override applied to every configuration")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return resav::harness::cmd_run(assemble(run_cfg, run_sets), std::cout);
    if (*conv) return resav::harness::cmd_converge(assemble(conv_cfg, conv_sets), std::cout);
    std::vector<RunConfig> cfgs;
    for (const auto& p : cmp_cfgs) cfgs.push_back(assemble(p, cmp_sets));
    return resav::harness::cmd_compare(cfgs, std::cout);
  } catch (const resav::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const resav::DimensionMismatch& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const resav::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 3;
  } catch (const resav::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
