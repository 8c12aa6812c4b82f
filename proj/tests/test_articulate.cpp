#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "waggle/articulate.hpp"
#include "waggle/errors.hpp"
#include "waggle/rng.hpp"

using namespace waggle;

namespace {

DanceObservation make_obs(double direction, double distance, bool pollen) {
  DanceObservation obs;
  obs.avg_direction = direction;
  obs.distance_km = distance;
  obs.pollen = pollen;
  obs.n_dances = 1;
  return obs;
}

}  // namespace

TEST_CASE("bin_direction centers bin 0 on north") {
  CHECK(bin_direction(348.07, 32) == 31);
  CHECK(bin_direction(0.0, 32) == 0);
  CHECK(bin_direction(5.6, 32) == 0);    // just inside [-5.625, 5.625)
  CHECK(bin_direction(5.7, 32) == 1);
  CHECK(bin_direction(354.4, 32) == 0);  // bin 0 wraps at 354.375
  CHECK(bin_direction(354.3, 32) == 31);
  for (double x : {0.0, 17.0, 123.4, 359.9}) {
    CHECK(bin_direction(x, 1) == 0);
  }
  CHECK_THROWS_AS(bin_direction(10.0, 0), ConfigError);
  CHECK_THROWS_AS(bin_direction(std::nan(""), 4), DomainError);
}

TEST_CASE("bin_direction is circular") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const double t = uniform01(rng) * 360.0;
    const auto n = static_cast<std::uint32_t>(1 + uniform_below(rng, 64));
    const int k = static_cast<int>(uniform_below(rng, 7)) - 3;
    CHECK(bin_direction(t, n) == bin_direction(t + 360.0 * k, n));
  }
}

TEST_CASE("bin_distance uses half-open interior bins plus overflow") {
  const std::vector<double> edges{0.5, 1.0, 2.0};
  CHECK(bin_distance(0.75, edges) == 1);
  CHECK(bin_distance(0.25, edges) == 0);
  CHECK(bin_distance(1.32, edges) == 2);
  CHECK(bin_distance(0.5, edges) == 1);   // lower edge inclusive
  CHECK(bin_distance(2.0, edges) == 3);   // overflow bin
  CHECK(bin_distance(7.5, edges) == 3);
  CHECK_THROWS_AS(bin_distance(std::nan(""), edges), DomainError);
}

TEST_CASE("articulate the three reference rows") {
  QuantizationScheme scheme;
  scheme.direction_bins = 32;
  scheme.distance_edges = log_spaced_edges(0.1, 10.0, 12);
  scheme.include_pollen = true;

  std::vector<DanceObservation> rows{make_obs(348.07, 0.75, true),
                                     make_obs(354.10, 1.32, true),
                                     make_obs(162.83, 1.26, true)};
  const SymbolCorpus corpus = articulate(rows, scheme);
  check_corpus(corpus);
  REQUIRE(corpus.tokens.size() == 3);
  CHECK(corpus.vocabulary.size() == 3);
  CHECK(corpus.vocabulary.at(corpus.tokens[0]) == "dir31|dist05|P");
  CHECK(corpus.vocabulary.at(corpus.tokens[1]) == "dir31|dist07|P");
  CHECK(corpus.vocabulary.at(corpus.tokens[2]) == "dir14|dist07|P");
  CHECK(!corpus.scheme_fingerprint.empty());
}

TEST_CASE("articulate: repeats share one word") {
  QuantizationScheme scheme;
  scheme.direction_bins = 8;
  scheme.distance_edges = {1.0, 2.0};
  const std::vector<DanceObservation> rows(5, make_obs(90.0, 1.5, false));
  const SymbolCorpus corpus = articulate(rows, scheme);
  CHECK(corpus.tokens.size() == 5);
  CHECK(corpus.vocabulary.size() == 1);
}

TEST_CASE("articulate: empty input gives an empty corpus") {
  QuantizationScheme scheme;
  scheme.distance_edges = {1.0, 2.0};
  const SymbolCorpus corpus = articulate({}, scheme);
  CHECK(corpus.empty());
  CHECK(corpus.vocabulary.empty());
}

TEST_CASE("articulate rejects a worker channel without data") {
  QuantizationScheme scheme;
  scheme.direction_bins = 4;
  scheme.distance_edges = {1.0, 2.0};
  scheme.worker_bins = 6;
  CHECK_THROWS_AS(articulate({make_obs(0, 1, false)}, scheme), ConfigError);
}

TEST_CASE("articulate is deterministic") {
  QuantizationScheme scheme;
  scheme.direction_bins = 16;
  scheme.distance_edges = log_spaced_edges(0.2, 5.0, 6);
  scheme.include_pollen = true;
  std::mt19937_64 rng(3);
  std::vector<DanceObservation> rows;
  for (int i = 0; i < 50; ++i) {
    rows.push_back(make_obs(uniform01(rng) * 360.0, uniform01(rng) * 8.0,
                            uniform01(rng) < 0.5));
  }
  const SymbolCorpus a = articulate(rows, scheme);
  const SymbolCorpus b = articulate(rows, scheme);
  CHECK(a.tokens == b.tokens);
  CHECK(a.vocabulary == b.vocabulary);
  CHECK(a.scheme_fingerprint == b.scheme_fingerprint);
}

TEST_CASE("info budget of the 12-bit reference scheme") {
  QuantizationScheme scheme;
  scheme.direction_bins = 32;
  scheme.distance_edges = log_spaced_edges(0.1, 10.0, 23);  // 24 bins
  scheme.worker_bins = 6;
  REQUIRE(scheme.distance_bin_count() == 24);
  CHECK(info_budget(scheme) == doctest::Approx(12.17).epsilon(0.001));
  CHECK(representable_words(scheme) == 32 * 24 * 6);

  // The rounded 12-bit budget corresponds to 4096 words, within 10% of the
  // 4000-phrase comparison.
  const double words_at_12_bits = std::pow(2.0, std::round(info_budget(scheme)));
  CHECK(words_at_12_bits == 4096.0);
  CHECK(std::fabs(words_at_12_bits - 4000.0) / 4000.0 < 0.10);
}

TEST_CASE("info budget: one bin everywhere is zero bits") {
  QuantizationScheme scheme;
  scheme.direction_bins = 1;
  scheme.distance_edges = {};
  CHECK(info_budget(scheme) == 0.0);
  CHECK(representable_words(scheme) == 1);
}

TEST_CASE("scheme validation") {
  QuantizationScheme bad;
  bad.direction_bins = 0;
  CHECK_THROWS_AS(check_scheme(bad), ConfigError);
  bad.direction_bins = 4;
  bad.distance_edges = {2.0, 1.0};
  CHECK_THROWS_AS(check_scheme(bad), ConfigError);
  bad.distance_edges = {1.0, 1.0};
  CHECK_THROWS_AS(check_scheme(bad), ConfigError);
}

TEST_CASE("scheme JSON round trip") {
  QuantizationScheme scheme;
  scheme.direction_bins = 32;
  scheme.distance_edges = log_spaced_edges(0.1, 10.0, 12);
  scheme.include_pollen = true;
  const QuantizationScheme back = scheme_from_json(scheme_to_json(scheme));
  CHECK(back.direction_bins == scheme.direction_bins);
  CHECK(back.distance_edges == scheme.distance_edges);
  CHECK(back.include_pollen == scheme.include_pollen);
  CHECK(scheme_fingerprint(back) == scheme_fingerprint(scheme));
}

TEST_CASE("vocabulary never exceeds observations or capacity") {
  std::mt19937_64 rng(9);
  QuantizationScheme scheme;
  scheme.direction_bins = 4;
  scheme.distance_edges = {1.0, 2.0};
  std::vector<DanceObservation> rows;
  for (int i = 0; i < 200; ++i) {
    rows.push_back(make_obs(uniform01(rng) * 360.0, uniform01(rng) * 4.0, false));
  }
  const SymbolCorpus corpus = articulate(rows, scheme);
  CHECK(corpus.vocabulary.size() <= rows.size());
  CHECK(corpus.vocabulary.size() <= representable_words(scheme));
}

// Partition refinements (tripled direction bins, a superset of distance
// edges, switching the pollen channel on) can only split words, never merge
// them. Doubling direction bins is not a refinement in this sense: the
// half-shifted edges merge neighborhoods across old boundaries.
TEST_CASE("refining a scheme never shrinks the vocabulary") {
  std::mt19937_64 rng(10);
  std::vector<DanceObservation> rows;
  for (int i = 0; i < 300; ++i) {
    rows.push_back(make_obs(uniform01(rng) * 360.0, uniform01(rng) * 12.0,
                            uniform01(rng) < 0.3));
  }
  QuantizationScheme base;
  base.direction_bins = 8;
  base.distance_edges = {0.5, 1.0, 2.0, 4.0};
  const std::size_t base_vocab = articulate(rows, base).vocabulary.size();

  QuantizationScheme finer_dir = base;
  finer_dir.direction_bins = 24;
  CHECK(articulate(rows, finer_dir).vocabulary.size() >= base_vocab);

  QuantizationScheme finer_dist = base;
  finer_dist.distance_edges = {0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0};
  CHECK(articulate(rows, finer_dist).vocabulary.size() >= base_vocab);

  QuantizationScheme with_pollen = base;
  with_pollen.include_pollen = true;
  CHECK(articulate(rows, with_pollen).vocabulary.size() >= base_vocab);
}
