#include "waggle/zipf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "waggle/errors.hpp"
#include "waggle/io_util.hpp"

namespace waggle {

namespace {

RankFrequencyTable build_table(std::vector<std::pair<std::uint32_t, std::uint64_t>> word_counts) {
  // descending count, ties by ascending word id
  std::sort(word_counts.begin(), word_counts.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  RankFrequencyTable table;
  for (const auto& [word, count] : word_counts) {
    table.total_count += count;
  }
  table.entries.reserve(word_counts.size());
  std::uint32_t rank = 1;
  for (const auto& [word, count] : word_counts) {
    table.entries.push_back({rank++, word, count,
                             static_cast<double>(count) /
                                 static_cast<double>(table.total_count)});
  }
  return table;
}

struct RangePoints {
  std::vector<double> log_rank;
  std::vector<double> log_freq;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint32_t> ranks;
  bool skipped_zero = false;
};

RangePoints collect_range(const RankFrequencyTable& table, std::uint32_t lo,
                          std::uint32_t hi) {
  RangePoints pts;
  for (const auto& e : table.entries) {
    if (e.rank < lo || e.rank > hi) continue;
    if (e.count == 0) {
      pts.skipped_zero = true;
      continue;
    }
    pts.log_rank.push_back(std::log(static_cast<double>(e.rank)));
    pts.log_freq.push_back(std::log(e.frequency));
    pts.counts.push_back(e.count);
    pts.ranks.push_back(e.rank);
  }
  return pts;
}

struct OlsLine {
  double slope, intercept, stderr_slope, r_squared, rss;
};

OlsLine ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  OlsLine line;
  line.slope = sxx > 0 ? sxy / sxx : 0.0;
  line.intercept = my - line.slope * mx;
  line.rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    line.rss += r * r;
  }
  line.r_squared = syy > 0 ? 1.0 - line.rss / syy : 1.0;
  line.stderr_slope =
      (n > 2 && sxx > 0) ? std::sqrt(line.rss / (n - 2) / sxx) : 0.0;
  return line;
}

// Truncated zeta log-likelihood over the ranks in the fit window:
//   l(a) = -a * sum n_i log i - N * log Z(a),  Z(a) = sum_i i^-a.
// Concave in a (exponential family), so golden-section search is safe.
double zeta_loglik(double a, const std::vector<double>& log_ranks,
                   double weighted_logrank_sum, double total) {
  double z = 0;
  for (double lr : log_ranks) {
    z += std::exp(-a * lr);
  }
  return -a * weighted_logrank_sum - total * std::log(z);
}

PowerLawFit fit_mle(const RangePoints& pts) {
  double total = 0, weighted = 0;
  for (std::size_t i = 0; i < pts.counts.size(); ++i) {
    total += static_cast<double>(pts.counts[i]);
    weighted += static_cast<double>(pts.counts[i]) * pts.log_rank[i];
  }
  // Tables are sorted by descending count, so the optimum is >= 0; the wide
  // bracket keeps near-degenerate single-heavy tables representable.
  double lo = -10.0, hi = 64.0;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = zeta_loglik(x1, pts.log_rank, weighted, total);
  double f2 = zeta_loglik(x2, pts.log_rank, weighted, total);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = zeta_loglik(x2, pts.log_rank, weighted, total);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = zeta_loglik(x1, pts.log_rank, weighted, total);
    }
  }
  const double a = (lo + hi) / 2.0;

  // Normalization, Fisher information and a log-log R^2 against the fitted
  // line, for reporting.
  double z = 0, e_lr = 0, e_lr2 = 0;
  for (double lr : pts.log_rank) {
    const double w = std::exp(-a * lr);
    z += w;
    e_lr += w * lr;
    e_lr2 += w * lr * lr;
  }
  e_lr /= z;
  e_lr2 /= z;
  const double var = std::max(0.0, e_lr2 - e_lr * e_lr);

  PowerLawFit fit;
  fit.method = FitMethod::DiscreteMle;
  fit.exponent_a = a;
  fit.intercept = -std::log(z);
  fit.stderr_a = var > 0 ? 1.0 / std::sqrt(total * var) : 0.0;
  double rss = 0, syy = 0, my = 0;
  for (double lf : pts.log_freq) my += lf;
  my /= static_cast<double>(pts.log_freq.size());
  for (std::size_t i = 0; i < pts.log_freq.size(); ++i) {
    const double pred = fit.intercept - a * pts.log_rank[i];
    rss += (pts.log_freq[i] - pred) * (pts.log_freq[i] - pred);
    syy += (pts.log_freq[i] - my) * (pts.log_freq[i] - my);
  }
  fit.r_squared = syy > 0 ? 1.0 - rss / syy : 1.0;
  return fit;
}

}  // namespace

RankFrequencyTable rank_frequency(const SymbolCorpus& corpus) {
  if (corpus.empty()) {
    throw DomainError("rank_frequency: empty corpus");
  }
  std::unordered_map<std::uint32_t, std::uint64_t> counts;
  for (std::uint32_t t : corpus.tokens) {
    ++counts[t];
  }
  std::vector<std::pair<std::uint32_t, std::uint64_t>> wc(counts.begin(),
                                                          counts.end());
  return build_table(std::move(wc));
}

RankFrequencyTable rank_frequency_from_counts(
    const std::vector<std::uint64_t>& counts) {
  std::vector<std::pair<std::uint32_t, std::uint64_t>> wc;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) {
      wc.emplace_back(static_cast<std::uint32_t>(i), counts[i]);
    }
  }
  if (wc.empty()) {
    throw DomainError("rank_frequency_from_counts: all counts are zero");
  }
  return build_table(std::move(wc));
}

PowerLawFit fit_power_law(const RankFrequencyTable& table, FitRange range,
                          FitMethod method) {
  const std::uint32_t last =
      table.entries.empty() ? 0 : table.entries.back().rank;
  std::uint32_t lo = std::max<std::uint32_t>(range.min_rank, 1);
  std::uint32_t hi = range.max_rank == 0 ? last : std::min(range.max_rank, last);
  RangePoints pts = collect_range(table, lo, hi);
  if (pts.log_rank.size() < 3) {
    throw FitError("fit_power_law: need at least 3 ranks with nonzero counts in range");
  }

  PowerLawFit fit;
  if (method == FitMethod::LogLogOls) {
    OlsLine line = ols(pts.log_rank, pts.log_freq);
    fit.method = FitMethod::LogLogOls;
    fit.exponent_a = 0.0 - line.slope;  // keeps a flat slope at +0.0
    fit.intercept = line.intercept;
    fit.stderr_a = line.stderr_slope;
    fit.r_squared = line.r_squared;
  } else {
    fit = fit_mle(pts);
  }
  fit.fit_min_rank = pts.ranks.front();
  fit.fit_max_rank = pts.ranks.back();
  fit.zero_counts_skipped = pts.skipped_zero;
  return fit;
}

RegimeSplit detect_regimes(const RankFrequencyTable& table) {
  const std::size_t v = table.size();
  if (v < 10) {
    throw FitError("detect_regimes: need at least 10 distinct ranks");
  }
  const std::uint32_t first = table.entries.front().rank;
  const std::uint32_t last = table.entries.back().rank;

  // Log-spaced candidate breakpoints in [3, V-3].
  std::vector<std::uint32_t> candidates;
  const double blo = 3.0;
  const double bhi = static_cast<double>(v - 3);
  const int grid = 96;
  for (int k = 0; k <= grid; ++k) {
    const double t = static_cast<double>(k) / grid;
    const auto b = static_cast<std::uint32_t>(
        std::lround(blo * std::pow(bhi / blo, t)));
    if (candidates.empty() || candidates.back() != b) {
      candidates.push_back(b);
    }
  }

  auto fit_ols = [&](std::uint32_t lo, std::uint32_t hi) {
    return fit_power_law(table, FitRange{lo, hi}, FitMethod::LogLogOls);
  };
  auto rss_of = [&](std::uint32_t lo, std::uint32_t hi) {
    RangePoints pts = collect_range(table, lo, hi);
    return ols(pts.log_rank, pts.log_freq).rss;
  };

  RegimeSplit best;
  double best_rss = std::numeric_limits<double>::infinity();
  std::uint32_t best_b = candidates.front();
  for (std::uint32_t b : candidates) {
    const double rss = rss_of(first, b) + rss_of(b + 1, last);
    if (rss < best_rss) {
      best_rss = rss;
      best_b = b;
    }
  }
  best.breakpoint_rank = best_b;
  best.low = fit_ols(first, best_b);
  best.high = fit_ols(best_b + 1, last);
  best.split_rss = best_rss;
  best.single = fit_ols(first, last);
  best.single_rss = rss_of(first, last);
  return best;
}

std::string rank_frequency_to_csv(const RankFrequencyTable& table) {
  std::ostringstream out;
  out << "rank,word,count,frequency\n";
  for (const auto& e : table.entries) {
    out << e.rank << ',' << e.word << ',' << e.count << ','
        << fmt_double(e.frequency) << '\n';
  }
  return out.str();
}

std::string rank_frequency_to_loglog(const RankFrequencyTable& table) {
  std::ostringstream out;
  out << "# log10_rank log10_frequency\n";
  for (const auto& e : table.entries) {
    out << fmt_double(std::log10(static_cast<double>(e.rank))) << ' '
        << fmt_double(std::log10(e.frequency)) << '\n';
  }
  return out.str();
}

namespace {
nlohmann::json fit_json(const PowerLawFit& fit) {
  nlohmann::json j;
  j["exponent_a"] = fit.exponent_a;
  j["intercept"] = fit.intercept;
  j["stderr_a"] = fit.stderr_a;
  j["fit_min_rank"] = fit.fit_min_rank;
  j["fit_max_rank"] = fit.fit_max_rank;
  j["r_squared"] = fit.r_squared;
  j["method"] = fit.method == FitMethod::LogLogOls ? "loglog-ols" : "discrete-mle";
  j["zero_counts_skipped"] = fit.zero_counts_skipped;
  return j;
}
}  // namespace

std::string fit_to_json(const PowerLawFit& fit) { return fit_json(fit).dump(2); }

std::string regimes_to_json(const RegimeSplit& split) {
  nlohmann::json j;
  j["breakpoint_rank"] = split.breakpoint_rank;
  j["low"] = fit_json(split.low);
  j["high"] = fit_json(split.high);
  j["split_rss"] = split.split_rss;
  j["single_rss"] = split.single_rss;
  j["single"] = fit_json(split.single);
  j["rss_improvement"] =
      split.single_rss > 0 ? 1.0 - split.split_rss / split.single_rss : 0.0;
  return j.dump(2);
}

}  // namespace waggle
