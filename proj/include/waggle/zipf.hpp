#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "waggle/corpus.hpp"

namespace waggle {

struct RankFrequencyEntry {
  std::uint32_t rank;     // 1-based, no gaps
  std::uint32_t word;     // word identifier
  std::uint64_t count;
  double frequency;       // count / total
};

// Vocabulary sorted by descending count; ties broken by ascending word id so
// tables are reproducible across runs.
struct RankFrequencyTable {
  std::vector<RankFrequencyEntry> entries;
  std::uint64_t total_count = 0;

  std::size_t size() const { return entries.size(); }
};

RankFrequencyTable rank_frequency(const SymbolCorpus& corpus);

// Builds a table directly from per-word counts (word id = position).
RankFrequencyTable rank_frequency_from_counts(
    const std::vector<std::uint64_t>& counts);

enum class FitMethod { LogLogOls, DiscreteMle };

struct FitRange {
  std::uint32_t min_rank = 1;
  std::uint32_t max_rank = 0;  // 0 = through the last rank
};

struct PowerLawFit {
  double exponent_a;      // P_i ~ 1 / i^a
  double intercept;       // log-space intercept (natural log), OLS only
  double stderr_a;
  std::uint32_t fit_min_rank;
  std::uint32_t fit_max_rank;
  double r_squared;       // log-log space, OLS only
  FitMethod method;
  bool zero_counts_skipped = false;
};

// loglog-ols: least squares through (log i, log P_i); exponent = -slope.
// discrete-mle: a maximizing the truncated zeta likelihood over the range,
// located by golden-section search to 1e-6.
PowerLawFit fit_power_law(const RankFrequencyTable& table, FitRange range,
                          FitMethod method);

struct RegimeSplit {
  std::uint32_t breakpoint_rank;  // low regime covers ranks <= breakpoint
  PowerLawFit low;
  PowerLawFit high;
  double split_rss;
  double single_rss;
  PowerLawFit single;
};

// Two-regime detection: the breakpoint minimizing the summed log-log OLS
// residuals of the two fits, searched over a log-spaced candidate grid in
// [3, V-3]. The single-fit RSS is returned so callers can judge whether the
// second regime is justified.
RegimeSplit detect_regimes(const RankFrequencyTable& table);

// rank,count,frequency CSV and a two-column (log10 rank, log10 frequency)
// file for external plotting.
std::string rank_frequency_to_csv(const RankFrequencyTable& table);
std::string rank_frequency_to_loglog(const RankFrequencyTable& table);
std::string fit_to_json(const PowerLawFit& fit);
std::string regimes_to_json(const RegimeSplit& split);

}  // namespace waggle
