#include "waggle/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "waggle/errors.hpp"
#include "waggle/io_util.hpp"
#include "waggle/zipf.hpp"

namespace waggle {

double shannon_entropy(const std::vector<double>& distribution) {
  if (distribution.empty()) {
    throw DomainError("shannon_entropy: empty distribution");
  }
  double sum = 0;
  for (double p : distribution) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError("shannon_entropy: probabilities must be >= 0");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw DomainError("shannon_entropy: probabilities must sum to 1");
  }
  double h = 0;
  for (double p : distribution) {
    if (p > 0) {
      h -= p * std::log2(p);
    }
  }
  return h;
}

namespace {

// Entropy of empirical counts: log2(W) - (1/W) sum c log2 c. A single
// distinct value is exactly zero bits; rounding never drives the result
// negative.
double entropy_of_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                         std::uint64_t windows) {
  if (counts.size() <= 1) {
    return 0.0;
  }
  double acc = 0;
  for (const auto& [key, c] : counts) {
    acc += static_cast<double>(c) * std::log2(static_cast<double>(c));
  }
  const double w = static_cast<double>(windows);
  return std::max(0.0, std::log2(w) - acc / w);
}

// Overlapping windows over the cyclic sequence: every order uses exactly N
// windows, so the (n-1)-gram distribution is an exact marginal of the n-gram
// distribution and the block/conditional monotonicity identities hold for
// every corpus, not just asymptotically.
double block_entropy(const SymbolCorpus& corpus, std::size_t n) {
  if (n == 0) return 0.0;
  const std::size_t len = corpus.tokens.size();
  std::vector<std::uint32_t> wrapped(corpus.tokens);
  wrapped.insert(wrapped.end(), corpus.tokens.begin(),
                 corpus.tokens.begin() + static_cast<std::ptrdiff_t>(n - 1));
  std::unordered_map<std::string, std::uint64_t> counts;
  counts.reserve(len);
  std::string key(n * sizeof(std::uint32_t), '\0');
  for (std::size_t i = 0; i < len; ++i) {
    std::memcpy(key.data(), wrapped.data() + i, n * sizeof(std::uint32_t));
    ++counts[key];
  }
  return entropy_of_counts(counts, len);
}

}  // namespace

NgramEntropy ngram_entropy(const SymbolCorpus& corpus, std::size_t n) {
  if (n == 0) {
    throw DomainError("ngram_entropy: order must be >= 1");
  }
  if (corpus.tokens.size() < n) {
    throw DomainError("ngram_entropy: corpus shorter than n");
  }
  NgramEntropy e;
  e.block = block_entropy(corpus, n);
  e.conditional = e.block - block_entropy(corpus, n - 1);
  return e;
}

EntropyReport entropy_report(const SymbolCorpus& corpus, std::size_t max_n) {
  if (corpus.empty()) {
    throw DomainError("entropy_report: empty corpus");
  }
  EntropyReport report;
  report.token_count = corpus.tokens.size();
  std::vector<std::uint32_t> distinct(corpus.tokens.begin(), corpus.tokens.end());
  std::sort(distinct.begin(), distinct.end());
  report.vocabulary_size = static_cast<std::size_t>(
      std::unique(distinct.begin(), distinct.end()) - distinct.begin());
  const std::size_t top = std::min(max_n, corpus.tokens.size());
  double prev = 0.0;
  for (std::size_t n = 1; n <= top; ++n) {
    const double block = block_entropy(corpus, n);
    report.ngram_entropies[n] = block;
    report.conditional_entropies[n] = block - prev;
    prev = block;
  }
  report.unigram_entropy = report.ngram_entropies.at(1);
  return report;
}

namespace {

std::optional<double> zipf_exponent_of(const SymbolCorpus& corpus) {
  RankFrequencyTable table = rank_frequency(corpus);
  if (table.size() < 3) {
    return std::nullopt;
  }
  return fit_power_law(table, FitRange{}, FitMethod::LogLogOls).exponent_a;
}

struct MeanStd {
  double mean;
  double stddev;  // sample standard deviation
};

MeanStd mean_std(const std::vector<double>& xs) {
  double m = 0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double s2 = 0;
  for (double x : xs) s2 += (x - m) * (x - m);
  s2 = xs.size() > 1 ? s2 / static_cast<double>(xs.size() - 1) : 0.0;
  return {m, std::sqrt(s2)};
}

double z_score(double value, const MeanStd& ms) {
  return (value - ms.mean) / std::max(ms.stddev, 1e-12);
}

}  // namespace

DiscriminationReport compare_to_random(
    const SymbolCorpus& subject, const std::vector<SymbolCorpus>& baselines) {
  if (baselines.size() < 10) {
    throw ConfigError("compare_to_random: need at least 10 baseline corpora");
  }
  if (subject.empty()) {
    throw DomainError("compare_to_random: empty subject corpus");
  }
  const double subject_tokens = static_cast<double>(subject.tokens.size());
  for (const auto& b : baselines) {
    const double t = static_cast<double>(b.tokens.size());
    if (t < subject_tokens / 2.0 || t > subject_tokens * 2.0) {
      throw ConfigError(
          "compare_to_random: baseline token count outside x2 of subject");
    }
  }

  DiscriminationReport report;
  report.subject_tokens = subject.tokens.size();
  RankFrequencyTable subject_table = rank_frequency(subject);
  report.subject_types = subject_table.size();
  report.subject_entropy = entropy_report(subject, 1).unigram_entropy;
  report.subject_zipf_exponent = zipf_exponent_of(subject);

  std::vector<double> entropies;
  std::vector<double> exponents;
  bool all_zipf = report.subject_zipf_exponent.has_value();
  for (const auto& b : baselines) {
    BaselineStat stat;
    stat.entropy = entropy_report(b, 1).unigram_entropy;
    stat.zipf_exponent = zipf_exponent_of(b);
    entropies.push_back(stat.entropy);
    if (stat.zipf_exponent) {
      exponents.push_back(*stat.zipf_exponent);
    } else {
      all_zipf = false;
    }
    report.baselines.push_back(stat);
  }

  const MeanStd ent = mean_std(entropies);
  report.baseline_entropy_mean = ent.mean;
  report.baseline_entropy_stddev = ent.stddev;
  report.entropy_z = z_score(report.subject_entropy, ent);

  if (all_zipf && exponents.size() >= 2) {
    const MeanStd zf = mean_std(exponents);
    report.baseline_zipf_mean = zf.mean;
    report.baseline_zipf_stddev = zf.stddev;
    report.zipf_z = z_score(*report.subject_zipf_exponent, zf);
  }
  return report;
}

std::string entropy_report_to_json(const EntropyReport& report) {
  nlohmann::json j;
  j["unigram_entropy"] = report.unigram_entropy;
  nlohmann::json blocks = nlohmann::json::object();
  nlohmann::json conds = nlohmann::json::object();
  for (const auto& [n, h] : report.ngram_entropies) {
    blocks[std::to_string(n)] = h;
  }
  for (const auto& [n, h] : report.conditional_entropies) {
    conds[std::to_string(n)] = h;
  }
  j["ngram_entropies"] = blocks;
  j["conditional_entropies"] = conds;
  j["vocabulary_size"] = report.vocabulary_size;
  j["token_count"] = report.token_count;
  return j.dump(2);
}

namespace {
nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

std::string discrimination_to_json(const DiscriminationReport& report) {
  nlohmann::json j;
  j["subject_entropy"] = report.subject_entropy;
  j["subject_zipf_exponent"] = opt_json(report.subject_zipf_exponent);
  j["baseline_entropy_mean"] = report.baseline_entropy_mean;
  j["baseline_entropy_stddev"] = report.baseline_entropy_stddev;
  j["entropy_z"] = report.entropy_z;
  j["baseline_zipf_mean"] = opt_json(report.baseline_zipf_mean);
  j["baseline_zipf_stddev"] = opt_json(report.baseline_zipf_stddev);
  j["zipf_z"] = opt_json(report.zipf_z);
  j["subject_tokens"] = report.subject_tokens;
  j["subject_types"] = report.subject_types;
  j["baseline_count"] = report.baselines.size();
  return j.dump(2);
}

std::string discrimination_to_csv(const DiscriminationReport& report) {
  std::ostringstream out;
  out << "baseline,entropy,zipf_exponent\n";
  for (std::size_t i = 0; i < report.baselines.size(); ++i) {
    out << i << ',' << fmt_double(report.baselines[i].entropy) << ',';
    if (report.baselines[i].zipf_exponent) {
      out << fmt_double(*report.baselines[i].zipf_exponent);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace waggle
