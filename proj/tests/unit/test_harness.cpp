#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "resav/errors.hpp"
#include "resav/harness/driver.hpp"
#include "resav/harness/io.hpp"
#include "support.hpp"

using namespace resav;
using namespace resav::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("resav_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config takes model defaults") {
  const RunConfig c = parse_config("model=ac\ndt=0.01\nT=0.1\n");
  CHECK(c.scheme == "resav2-bdf2");
  CHECK(c.n == std::vector<int>{64, 64});
  CHECK(c.l == std::vector<double>{2.0, 2.0});
  CHECK(c.init == "random");
  CHECK(c.param("sigma0") == doctest::Approx(1e-4));
  CHECK(c.scheme_order() == 2);
  CHECK(c.scheme_family() == "resav2");
  const RunConfig again = parse_config(to_text(c));
  CHECK(to_text(again) == to_text(c));
  CHECK(parse_config("model=pfvm\ndt=1e-4\nT=0\n").scheme == "rmesav1-cn");
  CHECK(parse_config("model=ns\ndt=1e-3\nT=0\n").scheme == "ns-scheme2-bdf2");
}

TEST_CASE("config errors name the offending key") {
  CHECK(config_error_key("model=ac\ndt=-1\nT=1\n") == "dt");
  CHECK(config_error_key("model=pfvm\nscheme=resav1-bdf2\ndt=0.01\nT=1\n") == "scheme");
  CHECK(config_error_key("model=ac\ndt=0.01\nT=1\nbogus=3\n") == "bogus");
  CHECK(config_error_key("model=ac\ndt=0.01\nT=1\nn=7\n") == "n");
  CHECK(config_error_key("model=ac\ndt=0.01\nT=1\nsigma0=0\n") == "sigma0");
  CHECK(config_error_key("model=ns\nscheme=resav2-bdf2\ndt=0.01\nT=1\n") == "scheme");
  CHECK(config_error_key("model=ac\ndt=1/100\nT=1\n").empty());
}

TEST_CASE("snapshot round trip") {
  const fs::path dir = scratch("snap");
  Grid g({8, 8}, {2.0, 2.0});
  const Field f = testing::random_noise(g, 41);
  const std::string path = (dir / "a" / "f.txt").string();
  write_snapshot(f, 1.5, path);
  std::ifstream in(path);
  std::string magic, header;
  std::getline(in, magic);
  std::getline(in, header);
  CHECK(magic == kSnapshotMagic);
  CHECK(header == "2 8 8 2 2 1.5");
  const Snapshot s = read_snapshot(path);
  CHECK(s.t == 1.5);
  const Field back = to_field(s);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
}

TEST_CASE("truncated snapshot error names the line") {
  const fs::path dir = scratch("trunc");
  const std::string path = (dir / "t.txt").string();
  std::ofstream(path) << kSnapshotMagic << "\n2 4 4 1 1 0\n0.5\n0.25\n";
  try {
    read_snapshot(path);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(path + ":5") != std::string::npos);
  }
  CHECK_THROWS_AS(read_snapshot((dir / "missing.txt").string()), IoError);
}

TEST_CASE("observed rates") {
  const std::vector<double> dts = {0.1, 0.05, 0.025};
  const std::vector<double> errs = {3e-2, 7.5e-3, 1.875e-3};
  const auto r = observed_rates(dts, errs);
  CHECK(!r[0].has_value());
  CHECK(*r[1] == doctest::Approx(2.0));
  CHECK(*r[2] == doctest::Approx(2.0));
  CHECK(observed_rates({0.1}, {1.0}).size() == 1);
  CHECK(!observed_rates({0.1}, {1.0})[0].has_value());
}

TEST_CASE("step counts") {
  CHECK(step_count(1.0, 0.1) == 10);
  CHECK(step_count(0.0, 0.1) == 0);
  CHECK(step_count(1.05, 0.1) == 11);
  CHECK_THROWS_AS(step_count(1.0, 0.0), ConfigError);
}

TEST_CASE("T=0 gives only the initial row") {
  const RunConfig c = parse_config("model=ch\nn=16\ndt=0.01\nT=0\n");
  const RunResult r = run_simulation(c);
  CHECK(r.rows.size() == 1);
  CHECK(r.steps == 0);
}

TEST_CASE("converge with a single dt leaves the rate empty") {
  const RunConfig c = parse_config("model=ac\nn=16\ninit=manufactured\ndt=0.01\nT=0.05\n");
  const auto rows = converge(c, {0.01}, "exact");
  REQUIRE(rows.size() == 1);
  CHECK(!rows[0].rate.has_value());
  CHECK(rows[0].error > 0.0);
}

TEST_CASE("compare") {
  std::ostringstream out;
  CHECK_THROWS_AS(cmd_compare({}, out), ConfigError);

  const RunConfig a = parse_config("model=ac\nn=16\ndt=0.01\nT=0.05\nseed=3\n");
  const RunResult ra = run_simulation(a);
  std::ostringstream one;
  write_compare_csv({a}, {ra}, one);
  std::istringstream lines(one.str());
  std::string l1, l2;
  std::getline(lines, l1);
  std::getline(lines, l2);
  CHECK(l1.rfind("# " + std::string(kCsvVersion), 0) == 0);
  CHECK(l2.rfind("step,t,E_original", 0) == 0);

  RunConfig b = a;
  b.relaxed = false;
  std::ostringstream two;
  write_compare_csv({a, b}, {ra, run_simulation(b)}, two);
  CHECK(two.str().rfind("# resav-compare v1", 0) == 0);

  RunConfig bad = a;
  bad.dt = 0.02;
  const fs::path dir = scratch("cmp");
  RunConfig aa = a;
  aa.output_dir = dir.string();
  bad.output_dir = dir.string();
  CHECK_THROWS_AS(cmd_compare({aa, bad}, out), ConfigError);
}

TEST_CASE("identical configs give identical traces") {
  const RunConfig c = parse_config("model=pfc\nn=16\ndt=0.1\nT=1\nseed=9\nscheme=resav2-bdf3\n");
  const RunResult a = run_simulation(c);
  const RunResult b = run_simulation(c);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(csv_values(a.rows[i]) == csv_values(b.rows[i]));
}

TEST_CASE("xi rates: first order for the second kind, second order for R-ESAV-1/BDF2") {
  auto xi_error = [](const std::string& scheme, double dt) {
    const RunConfig c = parse_config("model=ac\ninit=manufactured\nn=16\nT=0.5\nrelaxed=false\nscheme=" + scheme +
                                     "\ndt=" + std::to_string(dt) + "\n");
    double worst = 0.0;
    for (const auto& r : run_simulation(c).rows) worst = std::max(worst, std::abs(r.xi - 1.0));
    return worst;
  };
  for (const auto& [scheme, rate] : {std::pair<std::string, double>{"resav2-bdf2", 1.0}, {"resav2-bdf3", 1.0},
                                     {"resav1-bdf2", 2.0}}) {
    CAPTURE(scheme);
    const double e1 = xi_error(scheme, 1.0 / 100), e2 = xi_error(scheme, 1.0 / 200);
    CHECK(std::log2(e1 / e2) == doctest::Approx(rate).epsilon(0.15));
  }
}
