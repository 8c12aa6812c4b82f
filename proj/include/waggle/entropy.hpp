#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "waggle/corpus.hpp"

namespace waggle {

// Plug-in (maximum likelihood) Shannon entropy in bits; 0 * log 0 = 0.
// Probabilities must be nonnegative and sum to 1 within 1e-9.
double shannon_entropy(const std::vector<double>& distribution);

struct NgramEntropy {
  double block;        // H of the empirical n-gram distribution, bits
  double conditional;  // block(n) - block(n-1), with block(0) = 0
};

// Overlapping windows over the cyclic token sequence, no segmentation.
// Throws DomainError when the corpus is shorter than n.
NgramEntropy ngram_entropy(const SymbolCorpus& corpus, std::size_t n);

struct EntropyReport {
  double unigram_entropy;
  std::map<std::size_t, double> ngram_entropies;        // n -> block
  std::map<std::size_t, double> conditional_entropies;  // n -> conditional
  std::size_t vocabulary_size;
  std::size_t token_count;
};

EntropyReport entropy_report(const SymbolCorpus& corpus, std::size_t max_n);

// Real-vs-random discrimination: subject statistics against the mean and
// standard deviation of a baseline ensemble, as z-scores. The Zipf part is
// skipped (nullopt) when the subject or a baseline has fewer than 3 ranks.
struct BaselineStat {
  double entropy;
  std::optional<double> zipf_exponent;
};

struct DiscriminationReport {
  double subject_entropy;
  std::optional<double> subject_zipf_exponent;
  double baseline_entropy_mean;
  double baseline_entropy_stddev;
  double entropy_z;
  std::optional<double> baseline_zipf_mean;
  std::optional<double> baseline_zipf_stddev;
  std::optional<double> zipf_z;
  std::vector<BaselineStat> baselines;
  std::size_t subject_tokens;
  std::size_t subject_types;
};

// Requires >= 10 baselines, each with token count within a factor of two of
// the subject's.
DiscriminationReport compare_to_random(
    const SymbolCorpus& subject, const std::vector<SymbolCorpus>& baselines);

std::string entropy_report_to_json(const EntropyReport& report);
std::string discrimination_to_json(const DiscriminationReport& report);
std::string discrimination_to_csv(const DiscriminationReport& report);

}  // namespace waggle
