#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "waggle/corpus.hpp"
#include "waggle/ingest.hpp"

namespace waggle {

// Bin definitions mapping continuous dance parameters to discrete word
// components. Direction uses equal-width circular bins with bin 0 centered
// on 0 degrees; distance uses explicit edges with an underflow and an
// overflow bin, so a list of E edges yields E + 1 bins (none for E = 0).
struct QuantizationScheme {
  std::uint32_t direction_bins = 1;
  std::vector<double> distance_edges;  // strictly increasing, km
  bool include_pollen = false;
  std::uint32_t worker_bins = 1;  // reserved; >1 needs recruit-count data

  std::size_t distance_bin_count() const { return distance_edges.size() + 1; }
};

// Throws ConfigError when the scheme is malformed.
void check_scheme(const QuantizationScheme& scheme);

// Log-spaced edges covering [lo_km, hi_km] with `count` edges.
std::vector<double> log_spaced_edges(double lo_km, double hi_km,
                                     std::size_t count);

// Index in [0, n_bins); bin 0 covers [-180/n, +180/n) degrees mod 360.
std::uint32_t bin_direction(double direction_deg, std::uint32_t n_bins);

// Index 0 below the first edge, edges.size() above the last, interior bins
// half-open [e_i, e_{i+1}).
std::uint32_t bin_distance(double distance_km,
                           const std::vector<double>& edges);

// One token per observation, in input order. A word is the mixed-radix
// encoding of (direction bin, distance bin, pollen bit when enabled); the
// vocabulary holds only observed words, labeled like "dir12|dist03|P".
SymbolCorpus articulate(const std::vector<DanceObservation>& observations,
                        const QuantizationScheme& scheme);

// Channel capacity of a scheme: log2 of the number of distinct representable
// words (product of the component cardinalities).
double info_budget(const QuantizationScheme& scheme);
std::uint64_t representable_words(const QuantizationScheme& scheme);

// Deterministic fingerprint used to tie a corpus back to its scheme.
std::string scheme_fingerprint(const QuantizationScheme& scheme);

std::string scheme_to_json(const QuantizationScheme& scheme);
QuantizationScheme scheme_from_json(const std::string& json_text);

}  // namespace waggle
