#pragma once

#include <cstdint>
#include <string>

#include "waggle/corpus.hpp"

namespace waggle {

// Intermittent-silence random text: each character is a space with
// probability space_probability, else one of alphabet_size equiprobable
// letters. Words are the maximal letter runs between spaces.
struct RandomTextSpec {
  std::uint32_t alphabet_size = 26;
  double space_probability = 0.18;
  std::uint64_t char_count = 0;
  std::uint64_t seed = 0;
};

void check_spec(const RandomTextSpec& spec);

// Deterministic per seed. Adjacent spaces yield no token; leading and
// trailing spaces are discarded.
SymbolCorpus generate_random_text(const RandomTextSpec& spec);

// Continuum rank-frequency exponent of the intermittent-silence staircase:
// 1 + ln(1/(1-q)) / ln(M). Undefined for a one-letter alphabet.
double expected_exponent(const RandomTextSpec& spec);

}  // namespace waggle
