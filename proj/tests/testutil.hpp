#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "waggle/corpus.hpp"
#include "waggle/rng.hpp"

namespace testutil {

// Multinomial sampler over explicit probabilities via CDF inversion; the
// uniform comes from waggle::uniform01 so tests are seed-stable.
inline std::vector<std::uint64_t> sample_counts(const std::vector<double>& probs,
                                                std::uint64_t draws,
                                                std::uint64_t seed) {
  std::vector<double> cdf(probs.size());
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::uint64_t d = 0; d < draws; ++d) {
    const double u = waggle::uniform01(rng) * acc;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx =
        it == cdf.end() ? probs.size() - 1
                        : static_cast<std::size_t>(it - cdf.begin());
    ++counts[idx];
  }
  return counts;
}

// P_i proportional to 1 / i^a over words 1..vocabulary.
inline std::vector<double> zipf_probs(double exponent, std::size_t vocabulary) {
  std::vector<double> p(vocabulary);
  double z = 0;
  for (std::size_t i = 0; i < vocabulary; ++i) {
    p[i] = std::pow(static_cast<double>(i + 1), -exponent);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

// i.i.d. corpus over `alphabet` symbols.
inline waggle::SymbolCorpus uniform_corpus(std::uint32_t alphabet,
                                           std::size_t length,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  waggle::SymbolCorpus corpus;
  for (std::uint32_t s = 0; s < alphabet; ++s) {
    corpus.vocabulary[s] = "w" + std::to_string(s);
  }
  corpus.tokens.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    corpus.tokens.push_back(
        static_cast<std::uint32_t>(waggle::uniform_below(rng, alphabet)));
  }
  // Trim vocabulary to the symbols that actually occur.
  waggle::SymbolCorpus out;
  out.tokens = corpus.tokens;
  for (std::uint32_t t : corpus.tokens) {
    out.vocabulary[t] = corpus.vocabulary[t];
  }
  return out;
}

// Chi-square critical value by Wilson-Hilferty; good to a few percent for
// df >= 4, which is all these tests need.
inline double chi2_critical(double df, double p_right_tail) {
  // z for the upper tail; hard-coded for the levels used in tests
  double z;
  if (p_right_tail <= 0.0101) {
    z = 2.326348;  // 1%
  } else if (p_right_tail <= 0.051) {
    z = 1.644854;  // 5%
  } else {
    z = 1.281552;  // 10%
  }
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

}  // namespace testutil
