#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "waggle/zipf.hpp"

namespace waggle {

// Binary signal-object matrix: entry (i, j) is 1 iff signal i refers to
// object j. The all-zero matrix is rejected everywhere; unlinked objects
// (empty columns) are legal.
class SignalObjectMatrix {
 public:
  SignalObjectMatrix(std::size_t n_signals, std::size_t m_objects,
                     std::vector<std::uint8_t> cells);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::uint8_t at(std::size_t i, std::size_t j) const {
    return cells_[i * m_ + j];
  }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  // Row and column link counts (mu_i and omega_j) and the total link count.
  const std::vector<std::uint32_t>& row_sums() const { return mu_; }
  const std::vector<std::uint32_t>& col_sums() const { return omega_; }
  std::uint64_t total_links() const { return links_; }

  // Dense 0/1 text grid, one row per line.
  std::string to_text() const;
  static SignalObjectMatrix from_text(const std::string& text);

 private:
  std::size_t n_, m_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint32_t> mu_, omega_;
  std::uint64_t links_ = 0;
};

// Joint and marginal distributions of the link-uniform probability model:
// every link is equally likely, p(s_i, r_j) = a_ij / A with A the total
// link count, so p(s_i) = mu_i / A and p(r_j) = omega_j / A.
struct MatrixProbabilities {
  std::vector<double> p_signal;  // size n
  std::vector<double> p_object;  // size m
  double joint(const SignalObjectMatrix& a, std::size_t i,
               std::size_t j) const {
    return a.at(i, j) ? 1.0 / static_cast<double>(a.total_links()) : 0.0;
  }
};

MatrixProbabilities matrix_probabilities(const SignalObjectMatrix& a);

// Normalized effort quantities. Entropies divide by log2(n) or log2(m) so
// both parties' costs live in [0, 1]; the convention H / log2(1) := 0 keeps
// single-signal and single-object systems at zero entropy.
struct EffortSummary {
  double h_s;           // speaker effort H_n(S)
  double h_r_given_s;   // hearer effort H_m(R|S)
  double mutual_info;   // I_n(S,R) = H_n(S) - H_n(S|R)
  double lexicon;       // L = |{i : mu_i > 0}| / n
};

EffortSummary effort_summary(const SignalObjectMatrix& a);

// Combined cost Omega(lambda) = lambda * H_m(R|S) + (1 - lambda) * H_n(S).
double cost(const SignalObjectMatrix& a, double lambda);

struct OptimizerParams {
  // Per-cell flip probability; <= 0 selects the default 2 / (n * m).
  double flip_probability = 0.0;
  // Stop after this many consecutive steps without strict improvement;
  // 0 selects the default 2 * n * m.
  std::uint64_t stagnation_limit = 0;
  std::uint64_t max_steps = 500000;
  // When set, the initial matrix and every candidate must link each object
  // to at least one signal; a flip that would orphan an object relocates
  // that object's link to a random signal instead. Off, the search is free
  // to drop objects and slides into the trivial one-link optimum (cost 0 at
  // every lambda); sweeps that look for the communicative phase transition
  // switch this on.
  bool require_object_coverage = false;
};

struct MinimizeResult {
  SignalObjectMatrix matrix;
  std::vector<double> cost_trace;  // cost after every accepted step
  double final_cost;
  std::uint64_t steps;
  std::uint64_t seed;
};

// Stochastic hill-climb over binary matrices: start from Bernoulli(0.5)
// cells, flip a Binomial(n*m, nu) set of cells per step, accept whenever the
// candidate cost does not exceed the current one (ties drift across the
// model's neutral plateaus). All-zero candidates are always rejected.
MinimizeResult minimize(double lambda, std::size_t n, std::size_t m,
                        const OptimizerParams& params, std::uint64_t seed);

struct LambdaRunRecord {
  double lambda;
  std::uint64_t seed_index;
  std::uint64_t seed;
  double final_cost;
  EffortSummary summary;
  RankFrequencyTable signal_ranks;  // ranks of p(s_i), zero rows excluded
  std::uint64_t iterations;
  SignalObjectMatrix matrix;
};

struct TransitionEstimate {
  double lambda_star;
  double uncertainty;      // grid spacing around the jump
  double info_jump;        // largest adjacent jump of seed-averaged I_n(S,R)
  double lexicon_jump;     // jump of seed-averaged L across the same pair
  double lexicon_jump_lambda;  // midpoint of the largest L jump
  bool low_confidence;     // jump < 2x the median adjacent jump
};

struct LambdaSweepResult {
  std::vector<double> grid;
  std::size_t n, m;
  std::vector<LambdaRunRecord> runs;  // grid order, seed-major within lambda
  std::optional<TransitionEstimate> transition;
};

// Runs minimize for every (lambda, seed) pair; per-run seeds derive from
// base_seed and the (grid, seed) indices, so the result is independent of
// execution order. Fills `transition` when the grid has >= 5 points.
LambdaSweepResult sweep(const std::vector<double>& lambda_grid, std::size_t n,
                        std::size_t m, std::size_t seeds_per_lambda,
                        const OptimizerParams& params, std::uint64_t base_seed);

TransitionEstimate detect_transition(const LambdaSweepResult& sweep_result);

struct WindowFit {
  double lambda;
  std::uint64_t seed_index;
  PowerLawFit fit;
};

struct ZipfWindowResult {
  std::vector<WindowFit> fits;
  double median_exponent;
  std::size_t rejected;  // final matrices with too few ranked signals to fit
};

// Fits the signal rank-frequency of every final matrix whose lambda lies in
// [window_lo, window_hi], using the discrete MLE.
ZipfWindowResult zipf_at_transition(const LambdaSweepResult& sweep_result,
                                    double window_lo, double window_hi);

}  // namespace waggle
