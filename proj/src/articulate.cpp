#include "waggle/articulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "waggle/errors.hpp"
#include "waggle/io_util.hpp"

namespace waggle {

void check_scheme(const QuantizationScheme& scheme) {
  if (scheme.direction_bins < 1) {
    throw ConfigError("scheme: direction_bins must be >= 1");
  }
  for (std::size_t i = 0; i < scheme.distance_edges.size(); ++i) {
    if (!std::isfinite(scheme.distance_edges[i])) {
      throw ConfigError("scheme: distance edges must be finite");
    }
    if (i > 0 && scheme.distance_edges[i] <= scheme.distance_edges[i - 1]) {
      throw ConfigError("scheme: distance edges must be strictly increasing");
    }
  }
  if (scheme.worker_bins < 1) {
    throw ConfigError("scheme: worker_bins must be >= 1");
  }
}

std::vector<double> log_spaced_edges(double lo_km, double hi_km,
                                     std::size_t count) {
  if (!(lo_km > 0) || !(hi_km > lo_km) || count < 2) {
    throw ConfigError("log_spaced_edges: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> edges(count);
  const double ratio = hi_km / lo_km;
  for (std::size_t i = 0; i < count; ++i) {
    edges[i] = lo_km * std::pow(ratio, static_cast<double>(i) /
                                           static_cast<double>(count - 1));
  }
  return edges;
}

std::uint32_t bin_direction(double direction_deg, std::uint32_t n_bins) {
  if (n_bins < 1) {
    throw ConfigError("bin_direction: zero bins");
  }
  if (!std::isfinite(direction_deg)) {
    throw DomainError("bin_direction: non-finite direction");
  }
  const double width = 360.0 / static_cast<double>(n_bins);
  // Shift by half a bin so bin 0 is centered on 0 degrees.
  double t = std::fmod(direction_deg + width / 2.0, 360.0);
  if (t < 0) t += 360.0;
  auto idx = static_cast<std::uint32_t>(t / width);
  return idx % n_bins;
}

std::uint32_t bin_distance(double distance_km,
                           const std::vector<double>& edges) {
  if (!std::isfinite(distance_km)) {
    throw DomainError("bin_distance: non-finite distance");
  }
  // Number of edges <= d is the bin index: underflow bin 0, interior bins
  // half-open [e_i, e_{i+1}), overflow bin E.
  const auto it = std::upper_bound(edges.begin(), edges.end(), distance_km);
  return static_cast<std::uint32_t>(it - edges.begin());
}

namespace {

std::string word_label(const QuantizationScheme& scheme, std::uint32_t dir_bin,
                       std::uint32_t dist_bin, bool pollen) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "dir%02u|dist%02u", dir_bin, dist_bin);
  std::string label(buf);
  if (scheme.include_pollen) {
    label += pollen ? "|P" : "|-";
  }
  return label;
}

}  // namespace

SymbolCorpus articulate(const std::vector<DanceObservation>& observations,
                        const QuantizationScheme& scheme) {
  check_scheme(scheme);
  if (scheme.worker_bins > 1) {
    // Table-schema observations carry no recruit counts, so a worker channel
    // cannot be articulated from them.
    throw ConfigError(
        "articulate: scheme requires a worker-count column the data lacks");
  }
  const auto dist_bins = static_cast<std::uint32_t>(scheme.distance_bin_count());
  const std::uint32_t pollen_card = scheme.include_pollen ? 2 : 1;

  SymbolCorpus corpus;
  corpus.scheme_fingerprint = scheme_fingerprint(scheme);
  corpus.tokens.reserve(observations.size());
  for (std::size_t row = 0; row < observations.size(); ++row) {
    const DanceObservation& obs = observations[row];
    if (!std::isfinite(obs.avg_direction)) {
      throw DomainError("articulate: row " + std::to_string(row + 1) +
                        ": avg_direction is not finite");
    }
    if (!std::isfinite(obs.distance_km)) {
      throw DomainError("articulate: row " + std::to_string(row + 1) +
                        ": distance_km is not finite");
    }
    const std::uint32_t dir_bin =
        bin_direction(obs.avg_direction, scheme.direction_bins);
    const std::uint32_t dist_bin =
        bin_distance(obs.distance_km, scheme.distance_edges);
    const std::uint32_t pollen_bit =
        scheme.include_pollen && obs.pollen ? 1 : 0;
    const std::uint32_t token =
        (dir_bin * dist_bins + dist_bin) * pollen_card + pollen_bit;
    corpus.tokens.push_back(token);
    corpus.vocabulary.emplace(
        token, word_label(scheme, dir_bin, dist_bin, obs.pollen));
  }
  return corpus;
}

std::uint64_t representable_words(const QuantizationScheme& scheme) {
  check_scheme(scheme);
  std::uint64_t words = scheme.direction_bins;
  words *= scheme.distance_bin_count();
  words *= scheme.include_pollen ? 2 : 1;
  words *= scheme.worker_bins;
  return words;
}

double info_budget(const QuantizationScheme& scheme) {
  return std::log2(static_cast<double>(representable_words(scheme)));
}

std::string scheme_fingerprint(const QuantizationScheme& scheme) {
  std::string canon = "dir=" + std::to_string(scheme.direction_bins) + ";edges=";
  for (double e : scheme.distance_edges) {
    canon += fmt_double(e);
    canon += ',';
  }
  canon += ";pollen=";
  canon += scheme.include_pollen ? '1' : '0';
  canon += ";workers=" + std::to_string(scheme.worker_bins);
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string scheme_to_json(const QuantizationScheme& scheme) {
  nlohmann::json j;
  j["direction_bins"] = scheme.direction_bins;
  j["distance_edges"] = scheme.distance_edges;
  j["include_pollen"] = scheme.include_pollen;
  j["worker_bins"] = scheme.worker_bins;
  return j.dump(2);
}

QuantizationScheme scheme_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  QuantizationScheme scheme;
  scheme.direction_bins = j.at("direction_bins").get<std::uint32_t>();
  scheme.distance_edges = j.at("distance_edges").get<std::vector<double>>();
  if (j.contains("include_pollen")) {
    scheme.include_pollen = j["include_pollen"].get<bool>();
  }
  if (j.contains("worker_bins")) {
    scheme.worker_bins = j["worker_bins"].get<std::uint32_t>();
  }
  check_scheme(scheme);
  return scheme;
}

}  // namespace waggle
