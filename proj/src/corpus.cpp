#include "waggle/corpus.hpp"

#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "waggle/errors.hpp"

namespace waggle {

void check_corpus(const SymbolCorpus& corpus) {
  std::set<std::uint32_t> distinct(corpus.tokens.begin(), corpus.tokens.end());
  if (distinct.size() != corpus.vocabulary.size()) {
    throw DomainError("corpus vocabulary does not match token set");
  }
  for (std::uint32_t t : distinct) {
    if (!corpus.vocabulary.count(t)) {
      throw DomainError("token " + std::to_string(t) + " missing from vocabulary");
    }
  }
}

std::string corpus_to_json(const SymbolCorpus& corpus) {
  nlohmann::json j;
  j["tokens"] = corpus.tokens;
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& [id, label] : corpus.vocabulary) {
    vocab[std::to_string(id)] = label;
  }
  j["vocabulary"] = vocab;
  j["scheme_fingerprint"] = corpus.scheme_fingerprint;
  return j.dump();
}

SymbolCorpus corpus_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  SymbolCorpus corpus;
  corpus.tokens = j.at("tokens").get<std::vector<std::uint32_t>>();
  for (const auto& [key, value] : j.at("vocabulary").items()) {
    corpus.vocabulary[static_cast<std::uint32_t>(std::stoul(key))] =
        value.get<std::string>();
  }
  if (j.contains("scheme_fingerprint")) {
    corpus.scheme_fingerprint = j["scheme_fingerprint"].get<std::string>();
  }
  check_corpus(corpus);
  return corpus;
}

std::string corpus_to_token_stream(const SymbolCorpus& corpus) {
  std::ostringstream out;
  for (std::uint32_t t : corpus.tokens) {
    out << corpus.vocabulary.at(t) << '\n';
  }
  return out.str();
}

SymbolCorpus corpus_from_token_stream(const std::string& text) {
  SymbolCorpus corpus;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto [it, inserted] =
        ids.emplace(line, static_cast<std::uint32_t>(ids.size()));
    if (inserted) {
      corpus.vocabulary[it->second] = line;
    }
    corpus.tokens.push_back(it->second);
  }
  return corpus;
}

}  // namespace waggle
