#include "waggle/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "waggle/errors.hpp"
#include "waggle/io_util.hpp"

namespace waggle {

namespace {

constexpr const char* kMandatoryColumns[] = {
    "ang1", "ang2", "ang3", "dir1",    "dir2",    "dir3", "avg_dir",
    "n_dances", "total_dur", "avg_dur", "time", "azimuth", "cos",
    "sin",  "x_km", "y_km"};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) {
    cells.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == delim) {
    cells.emplace_back();
  }
  return cells;
}

double parse_number(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) {
    throw DomainError("empty cell");
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    throw DomainError("not a number: '" + t + "'");
  }
  if (!std::isfinite(v)) {
    throw DomainError("non-finite value: '" + t + "'");
  }
  return v;
}

double parse_nonneg(const std::string& cell) {
  const double v = parse_number(cell);
  if (v < 0) {
    throw DomainError("negative value: '" + trim(cell) + "'");
  }
  return v;
}

// Durations come either as plain seconds ("2.91") or as mm:ss with
// fractional seconds ("00:02.91"). A sign is rejected outright; "-00:20"
// would otherwise slip through as minus zero minutes.
double parse_duration(const std::string& cell) {
  const std::string t = trim(cell);
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    throw DomainError("signed duration: '" + t + "'");
  }
  const std::size_t colon = t.find(':');
  if (colon == std::string::npos) {
    return parse_nonneg(t);
  }
  const double minutes = parse_nonneg(t.substr(0, colon));
  const double seconds = parse_nonneg(t.substr(colon + 1));
  return minutes * 60.0 + seconds;
}

std::uint32_t parse_count(const std::string& cell) {
  const double v = parse_number(cell);
  if (v < 0 || v != std::floor(v)) {
    throw DomainError("not a nonnegative integer: '" + trim(cell) + "'");
  }
  return static_cast<std::uint32_t>(v);
}

bool parse_pollen(const std::string& cell) {
  const std::string t = lower(trim(cell));
  return !(t.empty() || t == "0" || t == "false" || t == "no" ||
           t == "none" || t == "-");
}

double circular_distance(double a, double b) {
  double d = std::fabs(std::fmod(a - b, 360.0));
  return std::min(d, 360.0 - d);
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double derive_direction(double angle_deg, double azimuth_deg) {
  if (!std::isfinite(angle_deg) || !std::isfinite(azimuth_deg)) {
    throw DomainError("derive_direction: non-finite input");
  }
  double d = std::fmod(angle_deg + azimuth_deg, 360.0);
  if (d < 0) d += 360.0;
  return d;
}

XY derive_xy(double distance_km, double direction_deg) {
  if (!std::isfinite(distance_km) || !std::isfinite(direction_deg)) {
    throw DomainError("derive_xy: non-finite input");
  }
  if (distance_km < 0) {
    throw DomainError("derive_xy: negative distance");
  }
  const double rad = direction_deg * kDegToRad;
  return {distance_km * std::sin(rad), distance_km * std::cos(rad)};
}

ParseResult parse_observations(const std::string& table_text,
                               const FormatConfig& config) {
  std::vector<std::string> lines;
  {
    std::istringstream in(table_text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!trim(line).empty()) lines.push_back(line);
    }
  }
  if (lines.empty()) {
    throw ParseError("empty input: header row required");
  }

  char delim = config.delimiter;
  if (delim == '\0') {
    const auto commas = std::count(lines[0].begin(), lines[0].end(), ',');
    const auto tabs = std::count(lines[0].begin(), lines[0].end(), '\t');
    if (commas == 0 && tabs == 0) {
      throw ParseError("cannot detect delimiter in header row");
    }
    delim = tabs > commas ? '\t' : ',';
  }

  const std::vector<std::string> header = split(lines[0], delim);
  std::map<std::string, std::size_t> header_index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    header_index[lower(header[i])] = i;
  }
  auto find_column = [&](const std::string& canonical) -> std::ptrdiff_t {
    std::string name = canonical;
    if (auto it = config.column_names.find(canonical);
        it != config.column_names.end()) {
      name = it->second;
    }
    auto it = header_index.find(lower(name));
    return it == header_index.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
  };

  std::map<std::string, std::ptrdiff_t> cols;
  for (const char* c : kMandatoryColumns) {
    cols[c] = find_column(c);
    if (cols[c] < 0) {
      throw ParseError(std::string("missing mandatory column: ") + c);
    }
  }
  const std::ptrdiff_t dist_col = find_column("dist_km");
  if (dist_col < 0 && !config.calibration) {
    throw ParseError(
        "missing mandatory column: dist_km (no calibration table supplied)");
  }
  const std::ptrdiff_t rad_col = find_column("rad");
  const std::ptrdiff_t pollen_col = find_column("pollen");

  ParseResult result;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;  // 1-based data row index
    const std::vector<std::string> cells = split(lines[li], delim);
    if (cells.size() < header.size()) {
      result.row_errors.push_back(
          {row, "", "expected " + std::to_string(header.size()) +
                        " cells, found " + std::to_string(cells.size())});
      continue;
    }
    auto cell = [&](std::ptrdiff_t c) -> const std::string& {
      return cells[static_cast<std::size_t>(c)];
    };
    DanceObservation obs;
    std::string bad_column;
    try {
      bad_column = "ang1";
      obs.angles[0] = parse_number(cell(cols["ang1"]));
      bad_column = "ang2";
      obs.angles[1] = parse_number(cell(cols["ang2"]));
      bad_column = "ang3";
      obs.angles[2] = parse_number(cell(cols["ang3"]));
      bad_column = "dir1";
      obs.directions[0] = parse_number(cell(cols["dir1"]));
      bad_column = "dir2";
      obs.directions[1] = parse_number(cell(cols["dir2"]));
      bad_column = "dir3";
      obs.directions[2] = parse_number(cell(cols["dir3"]));
      bad_column = "avg_dir";
      obs.avg_direction = parse_number(cell(cols["avg_dir"]));
      bad_column = "n_dances";
      obs.n_dances = parse_count(cell(cols["n_dances"]));
      bad_column = "total_dur";
      obs.total_duration = parse_duration(cell(cols["total_dur"]));
      bad_column = "avg_dur";
      obs.avg_duration = parse_duration(cell(cols["avg_dur"]));
      bad_column = "time";
      obs.time_of_day = trim(cell(cols["time"]));
      bad_column = "azimuth";
      obs.azimuth = parse_number(cell(cols["azimuth"]));
      bad_column = "dist_km";
      if (dist_col >= 0) {
        obs.distance_km = parse_nonneg(cell(dist_col));
      } else {
        obs.distance_km =
            calibrate_distance(obs.avg_duration, *config.calibration);
      }
      bad_column = "cos";
      obs.cos_dir = parse_number(cell(cols["cos"]));
      bad_column = "sin";
      obs.sin_dir = parse_number(cell(cols["sin"]));
      bad_column = "x_km";
      obs.x_km = parse_number(cell(cols["x_km"]));
      bad_column = "y_km";
      obs.y_km = parse_number(cell(cols["y_km"]));
    } catch (const DomainError& e) {
      result.row_errors.push_back({row, bad_column, e.what()});
      continue;
    }
    if (rad_col >= 0 && !cell(rad_col).empty()) {
      obs.rad_field = cell(rad_col);
    }
    if (pollen_col >= 0) {
      obs.pollen = parse_pollen(cell(pollen_col));
    }
    result.observations.push_back(std::move(obs));
    result.source_rows.push_back(row);
  }
  return result;
}

std::vector<Discrepancy> validate_observation(const DanceObservation& obs,
                                              const Tolerances& tol) {
  std::vector<Discrepancy> out;
  auto flag = [&](const std::string& field, double stated, double recomputed,
                  double tolerance) {
    out.push_back({field, stated, recomputed, tolerance});
  };

  for (std::size_t k = 0; k < 3; ++k) {
    const double expected = derive_direction(obs.angles[k], obs.azimuth);
    if (circular_distance(obs.directions[k], expected) > tol.direction) {
      flag("directions[" + std::to_string(k) + "]", obs.directions[k],
           expected, tol.direction);
    }
  }

  // Arithmetic mean of the three directions, falling back to the circular
  // mean when the raw values span more than 90 degrees (the arithmetic mean
  // of values straddling the 0/360 seam points the wrong way).
  const auto [dir_min, dir_max] =
      std::minmax_element(obs.directions.begin(), obs.directions.end());
  const double spread = *dir_max - *dir_min;
  double expected_avg;
  if (spread > 90.0) {
    double s = 0, c = 0;
    for (double d : obs.directions) {
      s += std::sin(d * kDegToRad);
      c += std::cos(d * kDegToRad);
    }
    expected_avg = std::atan2(s, c) / kDegToRad;
    if (expected_avg < 0) expected_avg += 360.0;
  } else {
    expected_avg =
        (obs.directions[0] + obs.directions[1] + obs.directions[2]) / 3.0;
  }
  if (circular_distance(obs.avg_direction, expected_avg) > tol.avg_direction) {
    flag("avg_direction", obs.avg_direction, expected_avg, tol.avg_direction);
  }

  const double expected_cos = std::cos(obs.avg_direction * kDegToRad);
  const double expected_sin = std::sin(obs.avg_direction * kDegToRad);
  if (std::fabs(obs.cos_dir - expected_cos) > tol.cos_sin) {
    flag("cos_dir", obs.cos_dir, expected_cos, tol.cos_sin);
  }
  if (std::fabs(obs.sin_dir - expected_sin) > tol.cos_sin) {
    flag("sin_dir", obs.sin_dir, expected_sin, tol.cos_sin);
  }
  const double norm = obs.cos_dir * obs.cos_dir + obs.sin_dir * obs.sin_dir;
  if (std::fabs(norm - 1.0) > tol.unit_circle) {
    flag("cos_sin_norm", norm, 1.0, tol.unit_circle);
  }

  if (obs.distance_km >= 0 && std::isfinite(obs.distance_km)) {
    const XY xy = derive_xy(obs.distance_km, obs.avg_direction);
    if (std::fabs(obs.x_km - xy.x) > tol.xy) {
      flag("x_km", obs.x_km, xy.x, tol.xy);
    }
    if (std::fabs(obs.y_km - xy.y) > tol.xy) {
      flag("y_km", obs.y_km, xy.y, tol.xy);
    }
  } else {
    flag("distance_km", obs.distance_km, 0.0, 0.0);
  }

  if (obs.n_dances == 0) {
    flag("avg_duration", obs.avg_duration,
         std::numeric_limits<double>::quiet_NaN(), tol.avg_duration);
  } else {
    const double expected_dur =
        obs.total_duration / static_cast<double>(obs.n_dances);
    if (std::fabs(obs.avg_duration - expected_dur) > tol.avg_duration) {
      flag("avg_duration", obs.avg_duration, expected_dur, tol.avg_duration);
    }
  }
  return out;
}

double calibrate_distance(double avg_duration_s,
                          const CalibrationTable& table) {
  const auto& anchors = table.anchors;
  if (anchors.size() < 2) {
    throw ConfigError("calibration table needs at least 2 anchors");
  }
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].second < 0) {
      throw ConfigError("calibration distances must be >= 0");
    }
    if (i > 0 && anchors[i].first <= anchors[i - 1].first) {
      throw ConfigError("calibration durations must be strictly increasing");
    }
  }
  if (!std::isfinite(avg_duration_s)) {
    throw DomainError("calibrate_distance: non-finite duration");
  }
  if (avg_duration_s <= anchors.front().first) {
    return anchors.front().second;
  }
  if (avg_duration_s >= anchors.back().first) {
    return anchors.back().second;
  }
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    if (avg_duration_s <= anchors[i].first) {
      const auto& [t0, d0] = anchors[i - 1];
      const auto& [t1, d1] = anchors[i];
      const double w = (avg_duration_s - t0) / (t1 - t0);
      return d0 + w * (d1 - d0);
    }
  }
  return anchors.back().second;
}

namespace {

const char* kCsvHeader =
    "ang1,ang2,ang3,dir1,dir2,dir3,avg_dir,n_dances,total_dur,avg_dur,"
    "time,azimuth,dist_km,rad,cos,sin,x_km,y_km,pollen\n";

nlohmann::json observation_to_json(const DanceObservation& o) {
  nlohmann::json j;
  j["angles"] = o.angles;
  j["directions"] = o.directions;
  j["avg_direction"] = o.avg_direction;
  j["n_dances"] = o.n_dances;
  j["total_duration"] = o.total_duration;
  j["avg_duration"] = o.avg_duration;
  j["time_of_day"] = o.time_of_day;
  j["azimuth"] = o.azimuth;
  j["distance_km"] = o.distance_km;
  j["rad"] = o.rad_field ? nlohmann::json(*o.rad_field) : nlohmann::json(nullptr);
  j["cos_dir"] = o.cos_dir;
  j["sin_dir"] = o.sin_dir;
  j["x_km"] = o.x_km;
  j["y_km"] = o.y_km;
  j["pollen"] = o.pollen;
  return j;
}

DanceObservation observation_from_json(const nlohmann::json& j) {
  DanceObservation o;
  o.angles = j.at("angles").get<std::array<double, 3>>();
  o.directions = j.at("directions").get<std::array<double, 3>>();
  o.avg_direction = j.at("avg_direction").get<double>();
  o.n_dances = j.at("n_dances").get<std::uint32_t>();
  o.total_duration = j.at("total_duration").get<double>();
  o.avg_duration = j.at("avg_duration").get<double>();
  o.time_of_day = j.at("time_of_day").get<std::string>();
  o.azimuth = j.at("azimuth").get<double>();
  o.distance_km = j.at("distance_km").get<double>();
  if (!j.at("rad").is_null()) {
    o.rad_field = j["rad"].get<std::string>();
  }
  o.cos_dir = j.at("cos_dir").get<double>();
  o.sin_dir = j.at("sin_dir").get<double>();
  o.x_km = j.at("x_km").get<double>();
  o.y_km = j.at("y_km").get<double>();
  o.pollen = j.at("pollen").get<bool>();
  return o;
}

}  // namespace

std::string observations_to_csv(const std::vector<DanceObservation>& obs) {
  std::ostringstream out;
  out << kCsvHeader;
  for (const auto& o : obs) {
    out << fmt_double(o.angles[0]) << ',' << fmt_double(o.angles[1]) << ','
        << fmt_double(o.angles[2]) << ',' << fmt_double(o.directions[0]) << ','
        << fmt_double(o.directions[1]) << ',' << fmt_double(o.directions[2])
        << ',' << fmt_double(o.avg_direction) << ',' << o.n_dances << ','
        << fmt_double(o.total_duration) << ',' << fmt_double(o.avg_duration)
        << ',' << o.time_of_day << ',' << fmt_double(o.azimuth) << ','
        << fmt_double(o.distance_km) << ',' << (o.rad_field ? *o.rad_field : "")
        << ',' << fmt_double(o.cos_dir) << ',' << fmt_double(o.sin_dir) << ','
        << fmt_double(o.x_km) << ',' << fmt_double(o.y_km) << ','
        << (o.pollen ? "Pollen" : "") << '\n';
  }
  return out.str();
}

std::string observations_to_jsonl(const std::vector<DanceObservation>& obs) {
  std::ostringstream out;
  for (const auto& o : obs) {
    out << observation_to_json(o).dump() << '\n';
  }
  return out.str();
}

std::vector<DanceObservation> observations_from_jsonl(const std::string& text) {
  std::vector<DanceObservation> obs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    obs.push_back(observation_from_json(nlohmann::json::parse(line)));
  }
  return obs;
}

std::string discrepancies_to_json(
    const std::vector<std::vector<Discrepancy>>& per_row) {
  nlohmann::json rows = nlohmann::json::array();
  std::size_t total = 0;
  for (std::size_t r = 0; r < per_row.size(); ++r) {
    if (per_row[r].empty()) continue;
    nlohmann::json items = nlohmann::json::array();
    for (const auto& d : per_row[r]) {
      nlohmann::json item;
      item["field"] = d.field;
      item["stated"] = d.stated;
      item["recomputed"] = std::isfinite(d.recomputed)
                               ? nlohmann::json(d.recomputed)
                               : nlohmann::json(nullptr);
      item["tolerance"] = d.tolerance;
      items.push_back(item);
      ++total;
    }
    nlohmann::json row;
    row["row"] = r + 1;
    row["discrepancies"] = items;
    rows.push_back(row);
  }
  nlohmann::json j;
  j["rows"] = rows;
  j["total"] = total;
  return j.dump(2);
}

}  // namespace waggle
