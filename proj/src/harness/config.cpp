#include "resav/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "resav/errors.hpp"

namespace resav::harness {

namespace {

const std::vector<std::string> kParamKeys = {"sigma0", "mobility", "epsilon",     "zeta",
                                             "sigma1", "sigma2",   "nu",          "phi_bar",
                                             "amplitude", "shear_sigma", "shear_eps", "alpha"};

const std::set<std::string> kModels = {"ac", "ch", "pfc", "pfvm", "ns"};
const std::set<std::string> kInits = {"manufactured", "star",         "random", "circles",
                                      "crystal",      "four_spheres", "shear",  "constant"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError(key, "expected a real number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected on/off, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  return out;
}

/// "1/50" or "0.02"
double to_dt(const std::string& key, const std::string& v) {
  const auto slash = v.find('/');
  if (slash == std::string::npos) return to_double(key, v);
  const double den = to_double(key, trim(v.substr(slash + 1)));
  if (den == 0.0) throw ConfigError(key, "zero denominator");
  return to_double(key, trim(v.substr(0, slash))) / den;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

void set_default(RunConfig& cfg, const std::string& key, double value) {
  cfg.params.emplace(key, value);
}

bool is_one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = {"model",  "scheme",   "relaxed", "dim",         "n",
                                  "l",      "origin",   "dt",      "T",           "gamma",
                                  "scale_c", "dealias", "strict",  "snapshot_times", "output_dir",
                                  "seed",   "init",     "components", "coupling", "ns_energy",
                                  "label",  "dts",      "reference"};
    k.insert(k.end(), kParamKeys.begin(), kParamKeys.end());
    return k;
  }();
  return keys;
}

double RunConfig::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError(key, "parameter not set");
  return it->second;
}

std::string RunConfig::scheme_family() const {
  const auto pos = scheme.rfind("-bdf");
  return pos == std::string::npos ? scheme : scheme.substr(0, pos);
}

int RunConfig::scheme_order() const {
  const auto pos = scheme.rfind("-bdf");
  if (pos == std::string::npos) return 1;
  return static_cast<int>(to_long("scheme", scheme.substr(pos + 4)));
}

std::string RunConfig::display_label() const {
  if (!label.empty()) return label;
  return relaxed ? scheme : scheme + "-norelax";
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (std::find(kParamKeys.begin(), kParamKeys.end(), key) != kParamKeys.end()) {
    cfg.params[key] = key == "epsilon" || key == "alpha" ? to_dt(key, v) : to_double(key, v);
  } else if (key == "model") {
    cfg.model = v;
  } else if (key == "scheme") {
    cfg.scheme = v;
  } else if (key == "relaxed") {
    cfg.relaxed = to_bool(key, v);
  } else if (key == "dim") {
    cfg.dim = static_cast<int>(to_long(key, v));
  } else if (key == "n") {
    cfg.n.clear();
    for (const auto& s : split(v, ',')) cfg.n.push_back(static_cast<int>(to_long(key, s)));
  } else if (key == "l") {
    cfg.l.clear();
    for (const auto& s : split(v, ',')) cfg.l.push_back(to_dt(key, s));
  } else if (key == "origin") {
    cfg.origin.clear();
    for (const auto& s : split(v, ',')) cfg.origin.push_back(to_dt(key, s));
  } else if (key == "dt") {
    cfg.dt = to_dt(key, v);
  } else if (key == "T") {
    cfg.t_end = to_double(key, v);
  } else if (key == "gamma") {
    cfg.gamma = to_double(key, v);
  } else if (key == "scale_c") {
    cfg.scale_c = to_double(key, v);
  } else if (key == "dealias") {
    cfg.dealias = to_bool(key, v);
  } else if (key == "strict") {
    cfg.strict = to_bool(key, v);
  } else if (key == "snapshot_times") {
    cfg.snapshot_times = to_doubles(key, v);
  } else if (key == "output_dir") {
    cfg.output_dir = v;
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(to_long(key, v));
  } else if (key == "init") {
    cfg.init = v;
  } else if (key == "components") {
    cfg.components = static_cast<int>(to_long(key, v));
  } else if (key == "coupling") {
    cfg.coupling.clear();
    for (const auto& row : split(v, ';')) cfg.coupling.push_back(to_doubles(key, row));
  } else if (key == "ns_energy") {
    cfg.ns_energy = v;
  } else if (key == "label") {
    cfg.label = v;
  } else if (key == "dts") {
    cfg.dts.clear();
    for (const auto& s : split(v, ',')) cfg.dts.push_back(to_dt(key, s));
  } else if (key == "reference") {
    cfg.reference = v;
  } else {
    throw ConfigError(key, "unknown key");
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(trim(assignment), "expected key=value");
  apply_setting(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

namespace {

RunConfig parse_raw(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    apply_override(cfg, line);
  }
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = parse_raw(text);
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_raw(buf.str());
}

void validate(RunConfig& cfg) {
  if (!kModels.count(cfg.model)) throw ConfigError("model", "unknown model '" + cfg.model + "'");
  if (cfg.scheme.empty())
    cfg.scheme = cfg.model == "pfvm" ? "rmesav1-cn" : cfg.model == "ns" ? "ns-scheme2-bdf2" : "resav2-bdf2";
  const std::string fam = cfg.scheme_family();
  const int k = cfg.scheme_order();
  const bool known = (fam == "resav1" && k >= 1 && k <= 2 && cfg.scheme != "resav1") ||
                     ((fam == "resav2" || fam == "ns-scheme1" || fam == "ns-scheme2") && k >= 1 &&
                      k <= 4 && cfg.scheme.find("-bdf") != std::string::npos) ||
                     cfg.scheme == "resav1-cn" || cfg.scheme == "rmesav1-cn";
  if (!known) throw ConfigError("scheme", "unknown scheme '" + cfg.scheme + "'");

  const bool ns_scheme = fam.rfind("ns-", 0) == 0;
  if ((cfg.model == "ns") != ns_scheme)
    throw ConfigError("scheme", "scheme '" + cfg.scheme + "' is incompatible with model '" + cfg.model + "'");
  if ((cfg.model == "pfvm") != (cfg.scheme == "rmesav1-cn"))
    throw ConfigError("scheme", "scheme '" + cfg.scheme + "' is incompatible with model '" + cfg.model + "'");
  if (cfg.components < 1) throw ConfigError("components", "must be at least 1");
  if (cfg.components > 1 && cfg.scheme != "resav1-cn")
    throw ConfigError("components", "multiple components require resav1-cn");

  if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("T", "must be nonnegative");
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw ConfigError("gamma", "must lie in [0,1]");
  if (cfg.scale_c < 0.0) throw ConfigError("scale_c", "must be positive (0 selects the default)");
  if (cfg.reference != "exact" && cfg.reference != "fine")
    throw ConfigError("reference", "expected exact or fine");
  if (!is_one_of(cfg.ns_energy, {"auto", "kinetic", "enstrophy"}))
    throw ConfigError("ns_energy", "expected auto, kinetic or enstrophy");

  if (cfg.init.empty()) {
    if (cfg.model == "ns") cfg.init = "shear";
    else if (cfg.model == "pfvm") cfg.init = "four_spheres";
    else cfg.init = "random";
  }
  if (!kInits.count(cfg.init)) throw ConfigError("init", "unknown initial condition '" + cfg.init + "'");
  const bool init_ok =
      (cfg.init == "manufactured" && cfg.model != "pfvm") ||
      (cfg.init == "star" && is_one_of(cfg.model, {"ac", "ch"})) ||
      (cfg.init == "random" && cfg.model != "ns") ||
      (cfg.init == "circles" && is_one_of(cfg.model, {"ac", "ch"})) ||
      (cfg.init == "crystal" && cfg.model == "pfc") ||
      (cfg.init == "four_spheres" && cfg.model == "pfvm") ||
      (cfg.init == "shear" && cfg.model == "ns") || (cfg.init == "constant" && cfg.model != "ns");
  if (!init_ok) throw ConfigError("init", "'" + cfg.init + "' does not apply to model " + cfg.model);

  if (cfg.model == "pfvm" || cfg.init == "four_spheres") cfg.dim = 3;
  if (cfg.init == "manufactured" || cfg.init == "star" || cfg.init == "shear" ||
      cfg.init == "circles" || cfg.init == "crystal") {
    if (cfg.dim != 2) throw ConfigError("dim", "initial condition '" + cfg.init + "' is two-dimensional");
  }
  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("dim", "must be 1, 2 or 3");
  if (cfg.model == "ns" && cfg.dim < 2) throw ConfigError("dim", "flows need at least two dimensions");

  if (cfg.n.empty()) cfg.n = {cfg.model == "pfvm" ? 32 : 64};
  if (cfg.n.size() == 1) cfg.n.assign(cfg.dim, cfg.n.front());
  if (static_cast<int>(cfg.n.size()) != cfg.dim) throw ConfigError("n", "needs one or dim entries");
  for (int v : cfg.n)
    if (v < 4 || v % 2 != 0) throw ConfigError("n", "extents must be even and at least 4");

  double l_default = 2.0;
  double o_default = 0.0;
  if (cfg.model == "pfvm") {
    l_default = 2.0 * std::numbers::pi;
    o_default = -std::numbers::pi;
  } else if (cfg.init == "star") {
    l_default = 1.0;
  } else if (cfg.model == "ns" && cfg.init == "manufactured") {
    o_default = -1.0;
  } else if (cfg.model == "pfc") {
    l_default = 128.0;
  }
  if (cfg.l.empty()) cfg.l = {l_default};
  if (cfg.l.size() == 1) cfg.l.assign(cfg.dim, cfg.l.front());
  if (static_cast<int>(cfg.l.size()) != cfg.dim) throw ConfigError("l", "needs one or dim entries");
  for (double v : cfg.l)
    if (!(v > 0.0)) throw ConfigError("l", "lengths must be positive");
  if (cfg.origin.empty()) cfg.origin = {o_default};
  if (cfg.origin.size() == 1) cfg.origin.assign(cfg.dim, cfg.origin.front());
  if (static_cast<int>(cfg.origin.size()) != cfg.dim) throw ConfigError("origin", "needs one or dim entries");

  if (cfg.model == "ac") {
    set_default(cfg, "sigma0", 1e-4);
  } else if (cfg.model == "ch") {
    set_default(cfg, "sigma0", 0.04);
    set_default(cfg, "mobility", 0.005);
    set_default(cfg, "epsilon", 1.0);
  } else if (cfg.model == "pfc") {
    set_default(cfg, "zeta", 1.0);
    set_default(cfg, "epsilon", 0.25);
    set_default(cfg, "mobility", 1.0);
    set_default(cfg, "phi_bar", cfg.init == "crystal" ? 0.285 : 0.0);
    set_default(cfg, "amplitude", cfg.init == "random" ? 0.1 : 0.446);
  } else if (cfg.model == "pfvm") {
    set_default(cfg, "epsilon", 6.0 * std::numbers::pi / cfg.n.front());
    set_default(cfg, "sigma1", 0.01);
    set_default(cfg, "sigma2", 0.01);
    set_default(cfg, "mobility", 1.0);
  } else if (cfg.model == "ns") {
    set_default(cfg, "nu", 0.1);
    set_default(cfg, "shear_sigma", 30.0);
    set_default(cfg, "shear_eps", 0.05);
  }
  set_default(cfg, "phi_bar", 0.0);
  set_default(cfg, "amplitude", 1.0);
  for (const auto& [key, value] : cfg.params) {
    if (is_one_of(key, {"phi_bar", "amplitude", "shear_eps", "zeta"})) continue;
    if (!(value > 0.0)) throw ConfigError(key, "must be positive");
  }
  if (cfg.params.count("sigma0")) set_default(cfg, "alpha", cfg.params.at("sigma0"));

  if (cfg.scheme == "resav1-cn") {
    if (cfg.coupling.empty()) {
      cfg.coupling.assign(cfg.components, std::vector<double>(cfg.components, 0.0));
      for (int i = 0; i < cfg.components; ++i) cfg.coupling[i][i] = 1.0;
    }
    if (static_cast<int>(cfg.coupling.size()) != cfg.components)
      throw ConfigError("coupling", "needs components x components entries");
  } else if (!cfg.coupling.empty()) {
    throw ConfigError("coupling", "only used by resav1-cn");
  }
  for (double t : cfg.snapshot_times)
    if (t < 0.0) throw ConfigError("snapshot_times", "times must be nonnegative");
  for (double d : cfg.dts)
    if (!(d > 0.0)) throw ConfigError("dts", "time steps must be positive");
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "model=" << cfg.model << "\nscheme=" << cfg.scheme
      << "\nrelaxed=" << (cfg.relaxed ? "on" : "off") << "\ndim=" << cfg.dim << "\nn=";
  for (std::size_t i = 0; i < cfg.n.size(); ++i) out << (i ? "," : "") << cfg.n[i];
  out << "\nl=" << join(cfg.l) << "\norigin=" << join(cfg.origin) << "\ndt=" << cfg.dt
      << "\nT=" << cfg.t_end << "\ngamma=" << cfg.gamma << "\nscale_c=" << cfg.scale_c
      << "\ndealias=" << (cfg.dealias ? "on" : "off") << "\nstrict=" << (cfg.strict ? "on" : "off")
      << "\noutput_dir=" << cfg.output_dir << "\nseed=" << cfg.seed << "\ninit=" << cfg.init
      << "\ncomponents=" << cfg.components << "\nns_energy=" << cfg.ns_energy
      << "\nreference=" << cfg.reference << '\n';
  if (!cfg.snapshot_times.empty()) out << "snapshot_times=" << join(cfg.snapshot_times) << '\n';
  if (!cfg.dts.empty()) out << "dts=" << join(cfg.dts) << '\n';
  if (!cfg.label.empty()) out << "label=" << cfg.label << '\n';
  if (!cfg.coupling.empty()) {
    out << "coupling=";
    for (std::size_t i = 0; i < cfg.coupling.size(); ++i) out << (i ? ";" : "") << join(cfg.coupling[i]);
    out << '\n';
  }
  for (const auto& [key, value] : cfg.params) out << key << '=' << value << '\n';
  return out.str();
}

}  // namespace resav::harness
