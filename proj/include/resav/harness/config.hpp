#pragma once

// Flat key=value run configuration.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace resav::harness {

struct RunConfig {
  std::string model = "ac";  ///< ac | ch | pfc | pfvm | ns
  std::string scheme;  ///< empty picks the model default
  bool relaxed = true;
  int dim = 2;
  std::vector<int> n;
  std::vector<double> l;
  std::vector<double> origin;
  double dt = 0.0;
  double t_end = 0.0;
  double gamma = 1.0;
  double scale_c = 0.0;
  bool dealias = false;
  bool strict = true;
  std::vector<double> snapshot_times;
  std::string output_dir = "resav_out";
  std::uint64_t seed = 0;
  std::string init;
  int components = 1;
  std::vector<std::vector<double>> coupling;
  std::string ns_energy = "auto";
  std::string label;
  std::vector<double> dts;          ///< converge sweep
  std::string reference = "exact";  ///< exact | fine
  std::map<std::string, double> params;

  double param(const std::string& key) const;
  std::string scheme_family() const;  ///< scheme id without the -bdfk suffix
  int scheme_order() const;
  bool forced() const { return init == "manufactured"; }
  std::string display_label() const;
};

/// Parses key=value lines ('#' starts a comment) and validates.
RunConfig parse_config(const std::string& text);
/// Reads a file without validating, so overrides can follow.
RunConfig load_config(const std::string& path);
/// Applies one "key=value" override to unvalidated settings.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_override(RunConfig& cfg, const std::string& assignment);
/// Fills model-dependent defaults and checks consistency. Idempotent.
void validate(RunConfig& cfg);

/// key=value rendering, parseable by parse_config.
std::string to_text(const RunConfig& cfg);

const std::vector<std::string>& known_keys();

}  // namespace resav::harness
