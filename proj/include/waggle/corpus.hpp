#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace waggle {

// A discrete "linguistic" corpus: an ordered token sequence plus the
// vocabulary mapping each distinct token to a readable word label.
// Invariant: vocabulary keys are exactly the distinct values in tokens.
struct SymbolCorpus {
  std::vector<std::uint32_t> tokens;
  std::map<std::uint32_t, std::string> vocabulary;
  // Hash of the quantization scheme that produced a dance corpus; empty for
  // corpora from other sources (random text, external token streams).
  std::string scheme_fingerprint;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Checks the token/vocabulary invariant; throws DomainError on violation.
void check_corpus(const SymbolCorpus& corpus);

// JSON form: {"tokens":[...], "vocabulary":{"0":"label",...},
//             "scheme_fingerprint":"..."}.
std::string corpus_to_json(const SymbolCorpus& corpus);
SymbolCorpus corpus_from_json(const std::string& json_text);

// Plain token stream: one word label per line, in corpus order. Reading one
// back assigns ids in order of first appearance.
std::string corpus_to_token_stream(const SymbolCorpus& corpus);
SymbolCorpus corpus_from_token_stream(const std::string& text);

}  // namespace waggle
