#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace waggle {

// One row of a dance observation table: three repeated angle estimates, the
// derived directions, dance counts and durations, the sun azimuth used for
// the derivation, and the plotting columns. Angles are degrees, distances
// kilometers, durations seconds.
struct DanceObservation {
  std::array<double, 3> angles{};
  std::array<double, 3> directions{};
  double avg_direction = 0.0;
  std::uint32_t n_dances = 0;
  double total_duration = 0.0;
  double avg_duration = 0.0;
  std::string time_of_day;  // "hh:mm"
  double azimuth = 0.0;
  double distance_km = 0.0;
  std::optional<std::string> rad_field;  // stored verbatim, never computed on
  double cos_dir = 0.0;
  double sin_dir = 0.0;
  double x_km = 0.0;
  double y_km = 0.0;
  bool pollen = false;

  bool operator==(const DanceObservation&) const = default;
};

// Duration -> distance anchors, strictly increasing in duration.
struct CalibrationTable {
  std::vector<std::pair<double, double>> anchors;  // (seconds, km)
};

struct FormatConfig {
  // '\0' auto-detects comma vs tab from the header line.
  char delimiter = '\0';
  // Overrides mapping canonical column key -> header name in the file.
  // Canonical keys: ang1 ang2 ang3 dir1 dir2 dir3 avg_dir n_dances
  // total_dur avg_dur time azimuth dist_km rad cos sin x_km y_km pollen.
  std::map<std::string, std::string> column_names;
  // When the file has no distance column, distances are derived from the
  // average duration through this table.
  std::optional<CalibrationTable> calibration;
};

struct RowError {
  std::size_t row;  // 1-based data row index
  std::string column;
  std::string message;
};

struct ParseResult {
  std::vector<DanceObservation> observations;
  // 1-based data-row index in the source file for each observation; rows
  // dropped by row errors leave gaps.
  std::vector<std::size_t> source_rows;
  std::vector<RowError> row_errors;
};

// Parses a delimited observation table. Rows keep file order; rad and pollen
// columns are optional. Malformed cells produce row errors (the row is
// dropped); a missing mandatory column throws ParseError.
ParseResult parse_observations(const std::string& table_text,
                               const FormatConfig& config = {});

// (angle + azimuth) mod 360, normalized into [0, 360).
double derive_direction(double angle_deg, double azimuth_deg);

// North (0 degrees) maps to +y; east to +x.
struct XY {
  double x;
  double y;
};
XY derive_xy(double distance_km, double direction_deg);

// Tolerances are half a unit in the last printed decimal of the reference
// table, widened where rounding compounds.
struct Tolerances {
  double direction = 0.05;
  double avg_direction = 0.05;
  double cos_sin = 0.01;
  double xy = 0.01;
  double avg_duration = 0.01;
  double unit_circle = 0.03;  // |cos^2 + sin^2 - 1|
};

struct Discrepancy {
  std::string field;
  double stated;
  double recomputed;
  double tolerance;
};

// Re-derives every derived column and reports one Discrepancy per violated
// invariant. An inconsistent row is data, not an error: the list is the
// result.
std::vector<Discrepancy> validate_observation(const DanceObservation& obs,
                                              const Tolerances& tol = {});

// Piecewise-linear interpolation, clamped to the boundary anchors outside
// the covered range.
double calibrate_distance(double avg_duration_s, const CalibrationTable& table);

// Canonical CSV and JSON-lines forms; parse(serialize(x)) == x field for
// field.
std::string observations_to_csv(const std::vector<DanceObservation>& obs);
std::string observations_to_jsonl(const std::vector<DanceObservation>& obs);
std::vector<DanceObservation> observations_from_jsonl(const std::string& text);
std::string discrepancies_to_json(
    const std::vector<std::vector<Discrepancy>>& per_row);

}  // namespace waggle
