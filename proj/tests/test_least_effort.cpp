#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "waggle/errors.hpp"
#include "waggle/least_effort.hpp"
#include "waggle/rng.hpp"

using namespace waggle;

namespace {

SignalObjectMatrix identity3() {
  return SignalObjectMatrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
}

SignalObjectMatrix all_ones3() {
  return SignalObjectMatrix(3, 3, std::vector<std::uint8_t>(9, 1));
}

// Signal 1 covers every object, the other signals are silent (the "bank"
// column of the speaker matrix).
SignalObjectMatrix star3() {
  return SignalObjectMatrix(3, 3, {1, 1, 1, 0, 0, 0, 0, 0, 0});
}

SignalObjectMatrix random_matrix(std::size_t n, std::size_t m,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> cells(n * m, 0);
  bool any = false;
  do {
    for (auto& c : cells) {
      c = uniform01(rng) < 0.4 ? 1 : 0;
      any = any || c;
    }
  } while (!any);
  return SignalObjectMatrix(n, m, std::move(cells));
}

}  // namespace

TEST_CASE("matrix validation") {
  CHECK_THROWS_AS(SignalObjectMatrix(2, 2, {0, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(SignalObjectMatrix(2, 2, {1, 0, 2, 0}), DomainError);
  CHECK_THROWS_AS(SignalObjectMatrix(2, 2, {1, 0}), DomainError);
}

TEST_CASE("matrix text round trip") {
  const SignalObjectMatrix a = random_matrix(5, 7, 3);
  const SignalObjectMatrix b = SignalObjectMatrix::from_text(a.to_text());
  CHECK(a.cells() == b.cells());
  CHECK(b.n() == 5);
  CHECK(b.m() == 7);
}

TEST_CASE("matrix probabilities of the reference matrices") {
  const MatrixProbabilities id = matrix_probabilities(identity3());
  for (double p : id.p_signal) CHECK(p == doctest::Approx(1.0 / 3));
  for (double p : id.p_object) CHECK(p == doctest::Approx(1.0 / 3));

  const MatrixProbabilities ones = matrix_probabilities(all_ones3());
  for (double p : ones.p_signal) CHECK(p == doctest::Approx(1.0 / 3));
  CHECK(ones.joint(all_ones3(), 1, 2) == doctest::Approx(1.0 / 9));

  const MatrixProbabilities star = matrix_probabilities(star3());
  CHECK(star.p_signal[0] == doctest::Approx(1.0));
  CHECK(star.p_signal[1] == 0.0);
  CHECK(star.p_signal[2] == 0.0);
}

TEST_CASE("effort summary of the reference matrices") {
  const EffortSummary id = effort_summary(identity3());
  CHECK(id.h_s == doctest::Approx(1.0));
  CHECK(id.h_r_given_s == doctest::Approx(0.0));
  CHECK(id.mutual_info == doctest::Approx(1.0));
  CHECK(id.lexicon == doctest::Approx(1.0));

  const EffortSummary ones = effort_summary(all_ones3());
  CHECK(ones.h_s == doctest::Approx(1.0));
  CHECK(ones.h_r_given_s == doctest::Approx(1.0));
  CHECK(ones.mutual_info == doctest::Approx(0.0));
  CHECK(ones.lexicon == doctest::Approx(1.0));

  const EffortSummary star = effort_summary(star3());
  CHECK(star.h_s == doctest::Approx(0.0));
  CHECK(star.h_r_given_s == doctest::Approx(1.0));
  CHECK(star.lexicon == doctest::Approx(1.0 / 3));
}

TEST_CASE("cost weighs the two efforts") {
  CHECK(cost(identity3(), 0.0) == doctest::Approx(1.0));
  CHECK(cost(identity3(), 1.0) == doctest::Approx(0.0));
  // both normalized efforts are 1 for the all-ones matrix, so the weighted
  // sum is 1 at any lambda
  CHECK(cost(all_ones3(), 0.5) == doctest::Approx(1.0));
  CHECK(cost(all_ones3(), 0.2) == doctest::Approx(1.0));
  CHECK(cost(identity3(), 0.25) == doctest::Approx(0.75));
  CHECK_THROWS_AS(cost(identity3(), 1.5), DomainError);
  CHECK_THROWS_AS(cost(identity3(), -0.1), DomainError);
}

TEST_CASE("summaries are permutation invariant") {
  std::mt19937_64 rng(17);
  const SignalObjectMatrix a = random_matrix(6, 5, 21);
  std::vector<std::size_t> rows(6), cols(5);
  for (std::size_t i = 0; i < 6; ++i) rows[i] = i;
  for (std::size_t j = 0; j < 5; ++j) cols[j] = j;
  std::shuffle(rows.begin(), rows.end(), rng);
  std::shuffle(cols.begin(), cols.end(), rng);
  std::vector<std::uint8_t> permuted(30);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      permuted[i * 5 + j] = a.at(rows[i], cols[j]);
    }
  }
  const SignalObjectMatrix b(6, 5, std::move(permuted));
  const EffortSummary sa = effort_summary(a);
  const EffortSummary sb = effort_summary(b);
  CHECK(sa.h_s == doctest::Approx(sb.h_s).epsilon(1e-12));
  CHECK(sa.h_r_given_s == doctest::Approx(sb.h_r_given_s).epsilon(1e-12));
  CHECK(sa.mutual_info == doctest::Approx(sb.mutual_info).epsilon(1e-12));
  CHECK(sa.lexicon == doctest::Approx(sb.lexicon).epsilon(1e-12));
  CHECK(cost(a, 0.41) == doctest::Approx(cost(b, 0.41)).epsilon(1e-12));
}

TEST_CASE("summaries stay inside their bounds") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SignalObjectMatrix a = random_matrix(7, 9, seed);
    const EffortSummary s = effort_summary(a);
    CHECK(s.h_s >= 0.0);
    CHECK(s.h_s <= 1.0 + 1e-12);
    CHECK(s.h_r_given_s >= 0.0);
    CHECK(s.h_r_given_s <= 1.0 + 1e-12);
    CHECK(s.mutual_info >= -1e-12);
    CHECK(s.mutual_info <= s.h_s + 1e-12);
    CHECK(s.lexicon > 0.0);
    CHECK(s.lexicon <= 1.0);
  }
}

TEST_CASE("minimize reaches the degenerate optima at the lambda ends") {
  OptimizerParams params;
  // the collapse endgame improves at roughly one accepted step per few
  // hundred proposals, so give it more patience than the 2nm default
  params.stagnation_limit = 8 * 8 * 8;
  for (std::uint64_t seed : {1, 2, 3}) {
    const MinimizeResult at0 = minimize(0.0, 8, 8, params, seed);
    CHECK(effort_summary(at0.matrix).h_s <= 0.05);
    const MinimizeResult at1 = minimize(1.0, 8, 8, params, seed);
    CHECK(effort_summary(at1.matrix).h_r_given_s <= 0.05);
  }
}

TEST_CASE("minimize is deterministic per seed") {
  OptimizerParams params;
  const MinimizeResult a = minimize(0.41, 6, 6, params, 99);
  const MinimizeResult b = minimize(0.41, 6, 6, params, 99);
  CHECK(a.matrix.cells() == b.matrix.cells());
  CHECK(a.cost_trace == b.cost_trace);
  CHECK(a.final_cost == b.final_cost);
  CHECK(a.steps == b.steps);
}

TEST_CASE("accepted costs never increase along a trace") {
  OptimizerParams params;
  for (double lambda : {0.1, 0.41, 0.9}) {
    const MinimizeResult run = minimize(lambda, 10, 10, params, 7);
    REQUIRE(!run.cost_trace.empty());
    for (std::size_t i = 1; i < run.cost_trace.size(); ++i) {
      CHECK(run.cost_trace[i] <= run.cost_trace[i - 1]);
    }
    CHECK(run.final_cost == run.cost_trace.back());
  }
}

TEST_CASE("minimize parameter validation") {
  OptimizerParams params;
  CHECK_THROWS_AS(minimize(0.5, 1, 8, params, 1), ConfigError);
  CHECK_THROWS_AS(minimize(1.5, 8, 8, params, 1), DomainError);
  params.max_steps = 0;
  CHECK_THROWS_AS(minimize(0.5, 8, 8, params, 1), ConfigError);
}

TEST_CASE("2x2 optimizer matches the brute-force optimum") {
  // All 15 nonzero binary 2x2 matrices.
  for (double lambda : {0.1, 0.41, 0.9}) {
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < 16; ++mask) {
      const SignalObjectMatrix candidate(
          2, 2,
          {static_cast<std::uint8_t>(mask & 1),
           static_cast<std::uint8_t>((mask >> 1) & 1),
           static_cast<std::uint8_t>((mask >> 2) & 1),
           static_cast<std::uint8_t>((mask >> 3) & 1)});
      best = std::min(best, cost(candidate, lambda));
    }
    OptimizerParams params;
    params.max_steps = 500;
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const MinimizeResult run = minimize(lambda, 2, 2, params, seed);
      if (run.final_cost <= best + 1e-9) ++hits;
    }
    CHECK(hits >= 9);
  }
}

TEST_CASE("sweep validation") {
  OptimizerParams params;
  CHECK_THROWS_AS(sweep({}, 8, 8, 1, params, 1), ConfigError);
  CHECK_THROWS_AS(sweep({0.2, 0.1}, 8, 8, 1, params, 1), ConfigError);
  CHECK_THROWS_AS(sweep({0.5}, 8, 8, 0, params, 1), ConfigError);
  CHECK_THROWS_AS(sweep({0.5, 1.2}, 8, 8, 1, params, 1), ConfigError);
}

TEST_CASE("sweep of the two degenerate ends") {
  OptimizerParams params;
  const LambdaSweepResult result = sweep({0.0, 1.0}, 8, 8, 5, params, 3);
  REQUIRE(result.runs.size() == 10);
  double lex0 = 0;
  int n0 = 0;
  for (const auto& run : result.runs) {
    if (run.lambda == 0.0) {
      lex0 += run.summary.lexicon;
      ++n0;
    }
  }
  lex0 /= n0;
  CHECK(lex0 <= 2.5 / 8.0);  // close to the single-signal optimum 1/n
  CHECK(!result.transition.has_value());
  // grid-order, seed-major records with derived seeds
  CHECK(result.runs[0].lambda == 0.0);
  CHECK(result.runs[0].seed == derive_seed(3, 0, 0));
  CHECK(result.runs[9].lambda == 1.0);
}

TEST_CASE("detect_transition finds a synthetic step") {
  // Hand-built sweep: mutual information steps from 0 to 1 after 0.40.
  LambdaSweepResult synthetic;
  synthetic.n = synthetic.m = 4;
  for (int i = 0; i <= 20; ++i) synthetic.grid.push_back(i * 0.05);
  for (std::size_t g = 0; g < synthetic.grid.size(); ++g) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      LambdaRunRecord run{synthetic.grid[g],
                          s,
                          s,
                          0.0,
                          EffortSummary{0, 0,
                                        synthetic.grid[g] > 0.401 ? 1.0 : 0.0,
                                        synthetic.grid[g] > 0.401 ? 1.0 : 0.1},
                          rank_frequency_from_counts({1}),
                          0,
                          identity3()};
      synthetic.runs.push_back(run);
    }
  }
  const TransitionEstimate t = detect_transition(synthetic);
  CHECK(std::fabs(t.lambda_star - 0.40) <= 0.05 + 1e-9);
  CHECK(t.uncertainty == doctest::Approx(0.05));
  CHECK(!t.low_confidence);
  CHECK(t.info_jump == doctest::Approx(1.0));
  CHECK(t.lexicon_jump == doctest::Approx(0.9));
}

TEST_CASE("detect_transition flags a monotone ramp as low confidence") {
  LambdaSweepResult ramp;
  ramp.n = ramp.m = 4;
  for (int i = 0; i <= 10; ++i) ramp.grid.push_back(i * 0.1);
  for (std::size_t g = 0; g < ramp.grid.size(); ++g) {
    LambdaRunRecord run{ramp.grid[g],
                        0,
                        0,
                        0.0,
                        EffortSummary{0, 0, ramp.grid[g], ramp.grid[g]},
                        rank_frequency_from_counts({1}),
                        0,
                        identity3()};
    ramp.runs.push_back(run);
  }
  const TransitionEstimate t = detect_transition(ramp);
  CHECK(t.low_confidence);
}

TEST_CASE("detect_transition needs five grid points") {
  LambdaSweepResult tiny;
  tiny.grid = {0.0, 0.5, 1.0};
  CHECK_THROWS_AS(detect_transition(tiny), DomainError);
}

TEST_CASE("zipf_at_transition handles degenerate windows") {
  OptimizerParams params;
  const LambdaSweepResult ends = sweep({0.0, 1.0}, 16, 16, 4, params, 11);
  // lambda = 0 collapses to one dominant signal: nothing to fit
  const ZipfWindowResult at0 = zipf_at_transition(ends, -0.01, 0.01);
  CHECK(at0.rejected >= 1);
  // lambda = 1 drifts on the zero-cost plateau: near-uniform signal use
  const ZipfWindowResult at1 = zipf_at_transition(ends, 0.99, 1.0);
  if (!at1.fits.empty()) {
    CHECK(at1.median_exponent < 0.3);
  }
  CHECK_THROWS_AS(zipf_at_transition(ends, 0.4, 0.6), DomainError);
}
