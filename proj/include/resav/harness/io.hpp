#pragma once

// Energy-trace CSV and field snapshot files.

#include <iosfwd>
#include <string>
#include <vector>

#include "resav/integrators.hpp"
#include "resav/spectral.hpp"

namespace resav::harness {

inline constexpr const char* kCsvVersion = "resav-energy v1";
inline constexpr const char* kSnapshotMagic = "resav-field v1";

const std::vector<std::string>& csv_columns();

void write_csv_header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& meta);
void write_csv_row(std::ostream& out, const StepReport& rep);
/// Value columns of one row, without the leading step and t.
std::vector<double> csv_values(const StepReport& rep);
std::string format_real(double v);

struct Snapshot {
  std::vector<int> extents;
  std::vector<double> lengths;
  double t = 0.0;
  std::vector<double> values;
};

void write_snapshot(const Field& field, double t, const std::string& path);
/// One file per component, named <stem>_c<i><ext>; a single component
/// is written to path unchanged. Returns the paths written.
std::vector<std::string> write_snapshots(const std::vector<Field>& fields, double t,
                                         const std::string& path);
Snapshot read_snapshot(const std::string& path);
/// Rebuilds a field on a grid with the snapshot's shape.
Field to_field(const Snapshot& snap, std::vector<double> origin = {});

}  // namespace resav::harness
