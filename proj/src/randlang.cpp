#include "waggle/randlang.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "waggle/errors.hpp"
#include "waggle/rng.hpp"

namespace waggle {

void check_spec(const RandomTextSpec& spec) {
  if (spec.alphabet_size < 1) {
    throw ConfigError("random text: alphabet_size must be >= 1");
  }
  if (!(spec.space_probability > 0.0 && spec.space_probability < 1.0)) {
    throw ConfigError("random text: space_probability must lie in (0, 1)");
  }
}

namespace {

std::string letter_label(std::uint32_t letter, std::uint32_t alphabet) {
  if (alphabet <= 26) {
    return std::string(1, static_cast<char>('a' + letter));
  }
  return std::to_string(letter) + '.';
}

}  // namespace

SymbolCorpus generate_random_text(const RandomTextSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  SymbolCorpus corpus;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    auto [it, inserted] =
        ids.emplace(word, static_cast<std::uint32_t>(ids.size()));
    if (inserted) {
      corpus.vocabulary[it->second] = word;
    }
    corpus.tokens.push_back(it->second);
    word.clear();
  };
  for (std::uint64_t c = 0; c < spec.char_count; ++c) {
    if (uniform01(rng) < spec.space_probability) {
      flush();
    } else {
      const auto letter = static_cast<std::uint32_t>(
          uniform_below(rng, spec.alphabet_size));
      word += letter_label(letter, spec.alphabet_size);
    }
  }
  flush();
  return corpus;
}

double expected_exponent(const RandomTextSpec& spec) {
  check_spec(spec);
  if (spec.alphabet_size < 2) {
    throw DomainError(
        "expected_exponent: one-letter alphabets have no power-law regime");
  }
  return 1.0 + std::log(1.0 / (1.0 - spec.space_probability)) /
                   std::log(static_cast<double>(spec.alphabet_size));
}

}  // namespace waggle
