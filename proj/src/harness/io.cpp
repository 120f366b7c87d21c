#include "resav/harness/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "resav/errors.hpp"

namespace resav::harness {

namespace {

double parse_real(const std::string& s, const std::string& path, long line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end)
    throw IoError(path + ":" + std::to_string(line) + ": malformed value '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "step",  "t",      "E_original",  "E_modified", "log_r",         "log_r2",
      "xi",    "theta0", "gamma",       "dissipation", "mass",         "divergence_max"};
  return cols;
}

void write_csv_header(std::ostream& out,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
  out << "# " << kCsvVersion;
  for (const auto& [k, v] : meta) out << ' ' << k << '=' << v;
  out << '\n';
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

std::vector<double> csv_values(const StepReport& r) {
  return {r.e_original, r.e_modified, r.log_r, r.log_r2, r.xi,
          r.theta0,     r.gamma,      r.dissipation, r.mass, r.divergence};
}

void write_csv_row(std::ostream& out, const StepReport& rep) {
  out << rep.step << ',' << format_real(rep.t);
  for (double v : csv_values(rep)) out << ',' << format_real(v);
  out << '\n';
}

void write_snapshot(const Field& field, double t, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const Grid& g = field.grid();
  out << kSnapshotMagic << '\n' << g.dim();
  for (int n : g.extents()) out << ' ' << n;
  for (double l : g.lengths()) out << ' ' << format_real(l);
  out << ' ' << format_real(t) << '\n';
  for (double v : field.values()) out << format_real(v) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::string> write_snapshots(const std::vector<Field>& fields, double t,
                                         const std::string& path) {
  if (fields.size() == 1) {
    write_snapshot(fields.front(), t, path);
    return {path};
  }
  const std::filesystem::path p(path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto name = p.parent_path() / (p.stem().string() + "_c" + std::to_string(i) + p.extension().string());
    write_snapshot(fields[i], t, name.string());
    out.push_back(name.string());
  }
  return out;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotMagic)
    throw IoError(path + ":1: expected '" + std::string(kSnapshotMagic) + "'");
  if (!std::getline(in, line)) throw IoError(path + ":2: missing shape line");
  std::istringstream head(line);
  std::vector<std::string> tok;
  for (std::string s; head >> s;) tok.push_back(s);
  if (tok.empty()) throw IoError(path + ":2: empty shape line");
  const int d = static_cast<int>(parse_real(tok[0], path, 2));
  if (d < 1 || d > 3 || static_cast<int>(tok.size()) != 2 * d + 2)
    throw IoError(path + ":2: malformed shape line");
  Snapshot snap;
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) {
    snap.extents.push_back(static_cast<int>(parse_real(tok[1 + i], path, 2)));
    count *= static_cast<std::size_t>(snap.extents.back());
  }
  for (int i = 0; i < d; ++i) snap.lengths.push_back(parse_real(tok[1 + d + i], path, 2));
  snap.t = parse_real(tok[1 + 2 * d], path, 2);
  snap.values.reserve(count);
  long lineno = 2;
  while (snap.values.size() < count) {
    ++lineno;
    if (!std::getline(in, line))
      throw IoError(path + ":" + std::to_string(lineno) + ": truncated, expected " +
                    std::to_string(count) + " values");
    snap.values.push_back(parse_real(line, path, lineno));
  }
  return snap;
}

Field to_field(const Snapshot& snap, std::vector<double> origin) {
  Grid grid(snap.extents, snap.lengths, std::move(origin));
  return Field(grid, std::span<const double>(snap.values));
}

}  // namespace resav::harness
