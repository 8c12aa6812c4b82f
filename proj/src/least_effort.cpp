#include "waggle/least_effort.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "waggle/errors.hpp"
#include "waggle/rng.hpp"

namespace waggle {

namespace {

inline double xlog2x(double c) { return c > 0 ? c * std::log2(c) : 0.0; }

// Entropies of the link-uniform model from the row/column link counts.
// With A total links, p(s_i, r_j) = a_ij / A, so
//   H(S)   = log2 A - (1/A) sum_i mu_i log2 mu_i
//   H(R|S) = (1/A) sum_i mu_i log2 mu_i
//   H(S|R) = (1/A) sum_j omega_j log2 omega_j
struct Entropies {
  double h_speaker;
  double h_object_given_signal;
  double h_signal_given_object;
};

Entropies entropies_from_counts(const std::vector<std::uint32_t>& mu,
                                const std::vector<std::uint32_t>& omega,
                                std::uint64_t links) {
  double u_mu = 0, u_om = 0;
  for (std::uint32_t c : mu) u_mu += xlog2x(static_cast<double>(c));
  for (std::uint32_t c : omega) u_om += xlog2x(static_cast<double>(c));
  const double a = static_cast<double>(links);
  Entropies e;
  e.h_object_given_signal = u_mu / a;
  e.h_signal_given_object = u_om / a;
  e.h_speaker = std::log2(a) - e.h_object_given_signal;
  return e;
}

double norm_log(std::size_t k) { return k > 1 ? std::log2(static_cast<double>(k)) : 0.0; }

}  // namespace

SignalObjectMatrix::SignalObjectMatrix(std::size_t n_signals,
                                       std::size_t m_objects,
                                       std::vector<std::uint8_t> cells)
    : n_(n_signals), m_(m_objects), cells_(std::move(cells)) {
  if (n_ == 0 || m_ == 0) {
    throw DomainError("signal-object matrix needs n >= 1 and m >= 1");
  }
  if (cells_.size() != n_ * m_) {
    throw DomainError("signal-object matrix cell count mismatch");
  }
  mu_.assign(n_, 0);
  omega_.assign(m_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) {
      const std::uint8_t v = cells_[i * m_ + j];
      if (v > 1) {
        throw DomainError("signal-object matrix entries must be 0 or 1");
      }
      mu_[i] += v;
      omega_[j] += v;
      links_ += v;
    }
  }
  if (links_ == 0) {
    throw DomainError("the all-zero signal-object matrix is rejected");
  }
}

std::string SignalObjectMatrix::to_text() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) {
      out << static_cast<char>('0' + at(i, j));
    }
    out << '\n';
  }
  return out.str();
}

SignalObjectMatrix SignalObjectMatrix::from_text(const std::string& text) {
  std::vector<std::uint8_t> cells;
  std::size_t n = 0, m = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (m == 0) {
      m = line.size();
    } else if (line.size() != m) {
      throw DomainError("matrix text with ragged rows");
    }
    for (char c : line) {
      if (c != '0' && c != '1') {
        throw DomainError("matrix text must contain only 0 and 1");
      }
      cells.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    ++n;
  }
  return SignalObjectMatrix(n, m, std::move(cells));
}

MatrixProbabilities matrix_probabilities(const SignalObjectMatrix& a) {
  MatrixProbabilities p;
  const double total = static_cast<double>(a.total_links());
  p.p_signal.reserve(a.n());
  for (std::uint32_t mu : a.row_sums()) {
    p.p_signal.push_back(static_cast<double>(mu) / total);
  }
  p.p_object.reserve(a.m());
  for (std::uint32_t om : a.col_sums()) {
    p.p_object.push_back(static_cast<double>(om) / total);
  }
  return p;
}

EffortSummary effort_summary(const SignalObjectMatrix& a) {
  const Entropies e =
      entropies_from_counts(a.row_sums(), a.col_sums(), a.total_links());
  const double ln = norm_log(a.n());
  const double lm = norm_log(a.m());
  EffortSummary s;
  s.h_s = ln > 0 ? e.h_speaker / ln : 0.0;
  s.h_r_given_s = lm > 0 ? e.h_object_given_signal / lm : 0.0;
  s.mutual_info =
      ln > 0 ? (e.h_speaker - e.h_signal_given_object) / ln : 0.0;
  std::size_t active = 0;
  for (std::uint32_t mu : a.row_sums()) {
    if (mu > 0) ++active;
  }
  s.lexicon = static_cast<double>(active) / static_cast<double>(a.n());
  return s;
}

double cost(const SignalObjectMatrix& a, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("cost: lambda must lie in [0, 1]");
  }
  const EffortSummary s = effort_summary(a);
  return lambda * s.h_r_given_s + (1.0 - lambda) * s.h_s;
}

namespace {

// Hill-climb working state. Row sums are kept as exact integers; the cost is
// recomputed from them on every evaluation so accepted ties stay exact.
class ClimbState {
 public:
  ClimbState(std::size_t n, std::size_t m, double lambda, bool coverage)
      : n_(n), m_(m), lambda_(lambda), coverage_(coverage),
        cells_(n * m, 0), mu_(n, 0), omega_(m, 0),
        inv_log_n_(norm_log(n) > 0 ? 1.0 / norm_log(n) : 0.0),
        inv_log_m_(norm_log(m) > 0 ? 1.0 / norm_log(m) : 0.0) {}

  void randomize(std::mt19937_64& rng) {
    do {
      links_ = 0;
      std::fill(mu_.begin(), mu_.end(), 0);
      std::fill(omega_.begin(), omega_.end(), 0);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < m_; ++j) {
          const std::uint8_t v = uniform01(rng) < 0.5 ? 1 : 0;
          cells_[i * m_ + j] = v;
          mu_[i] += v;
          omega_[j] += v;
          links_ += v;
        }
      }
      if (coverage_) {
        // Repair empty columns so the initial system names every object.
        for (std::size_t j = 0; j < m_; ++j) {
          if (omega_[j] == 0) {
            const auto i = static_cast<std::size_t>(uniform_below(rng, n_));
            cells_[i * m_ + j] = 1;
            mu_[i] += 1;
            omega_[j] = 1;
            links_ += 1;
          }
        }
      }
    } while (links_ == 0);
  }

  // Cost of the current counts; O(n).
  double current_cost() const {
    double u_mu = 0;
    for (std::uint32_t c : mu_) u_mu += xlog2x(static_cast<double>(c));
    const double a = static_cast<double>(links_);
    const double h_r_given_s = (u_mu / a) * inv_log_m_;
    const double h_s = (std::log2(a) - u_mu / a) * inv_log_n_;
    return lambda_ * h_r_given_s + (1.0 - lambda_) * h_s;
  }

  // Applies the flip set, returning false (state untouched) when the
  // candidate is all-zero. Under the coverage constraint a flip that would
  // orphan an object instead relocates that object's link to a random
  // signal, so "move this object to another word" is a reachable step.
  // `flips` holds distinct cell indices; repairs are recorded so revert()
  // can undo the whole candidate.
  bool apply(std::vector<std::size_t>& flips, std::mt19937_64& rng) {
    std::int64_t delta_links = 0;
    for (std::size_t cell : flips) {
      delta_links += cells_[cell] ? -1 : +1;
    }
    if (!coverage_ && static_cast<std::int64_t>(links_) + delta_links <= 0) {
      return false;
    }
    const std::size_t flip_count = flips.size();
    for (std::size_t f = 0; f < flip_count; ++f) {
      toggle(flips[f]);
    }
    if (coverage_) {
      for (std::size_t f = 0; f < flip_count; ++f) {
        const std::size_t j = flips[f] % m_;
        if (omega_[j] == 0) {
          std::size_t cell;
          do {
            cell = static_cast<std::size_t>(uniform_below(rng, n_)) * m_ + j;
          } while (cells_[cell]);
          toggle(cell);
          flips.push_back(cell);
        }
      }
    }
    if (links_ == 0) {
      revert(flips);
      return false;
    }
    return true;
  }

  void revert(const std::vector<std::size_t>& flips) {
    for (std::size_t cell : flips) {
      toggle(cell);
    }
  }

  SignalObjectMatrix to_matrix() const {
    return SignalObjectMatrix(n_, m_, cells_);
  }

 private:
  void toggle(std::size_t cell) {
    const std::size_t i = cell / m_;
    const std::size_t j = cell % m_;
    if (cells_[cell]) {
      cells_[cell] = 0;
      --mu_[i];
      --omega_[j];
      --links_;
    } else {
      cells_[cell] = 1;
      ++mu_[i];
      ++omega_[j];
      ++links_;
    }
  }

  std::size_t n_, m_;
  double lambda_;
  bool coverage_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint32_t> mu_, omega_;
  std::uint64_t links_ = 0;
  double inv_log_n_, inv_log_m_;
};

// Binomial(count, p) by inverse transform; the expected value here is ~2.
std::uint64_t draw_binomial(std::mt19937_64& rng, std::uint64_t count, double p) {
  if (p >= 1.0) {
    rng();  // keep the stream position consistent
    return count;
  }
  const double u = uniform01(rng);
  double pk = std::exp(static_cast<double>(count) * std::log1p(-p));
  double cdf = pk;
  std::uint64_t k = 0;
  while (u > cdf && k < count) {
    ++k;
    pk *= (static_cast<double>(count - k + 1) / static_cast<double>(k)) *
          (p / (1.0 - p));
    cdf += pk;
  }
  return k;
}

}  // namespace

MinimizeResult minimize(double lambda, std::size_t n, std::size_t m,
                        const OptimizerParams& params, std::uint64_t seed) {
  if (n < 2 || m < 2) {
    throw ConfigError("minimize: need n >= 2 and m >= 2");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("minimize: lambda must lie in [0, 1]");
  }
  const std::uint64_t cell_count = static_cast<std::uint64_t>(n) * m;
  const double nu = params.flip_probability > 0
                        ? params.flip_probability
                        : 2.0 / static_cast<double>(cell_count);
  if (nu > 1.0) {
    throw ConfigError("minimize: flip probability above 1");
  }
  const std::uint64_t stagnation_limit =
      params.stagnation_limit > 0 ? params.stagnation_limit : 2 * cell_count;
  if (params.max_steps == 0) {
    throw ConfigError("minimize: max_steps must be positive");
  }

  std::mt19937_64 rng(seed);
  ClimbState state(n, m, lambda, params.require_object_coverage);
  state.randomize(rng);

  double current = state.current_cost();
  std::vector<double> trace{current};
  std::vector<std::size_t> flips;
  std::uint64_t stagnant = 0;
  std::uint64_t step = 0;
  for (; step < params.max_steps && stagnant < stagnation_limit; ++step) {
    const std::uint64_t k = draw_binomial(rng, cell_count, nu);
    flips.clear();
    while (flips.size() < k) {
      const auto cell = static_cast<std::size_t>(uniform_below(rng, cell_count));
      if (std::find(flips.begin(), flips.end(), cell) == flips.end()) {
        flips.push_back(cell);
      }
    }
    if (flips.empty() || !state.apply(flips, rng)) {
      ++stagnant;
      continue;
    }
    const double candidate = state.current_cost();
    if (candidate <= current) {
      if (candidate < current) {
        stagnant = 0;
      } else {
        ++stagnant;
      }
      current = candidate;
      trace.push_back(candidate);
    } else {
      state.revert(flips);
      ++stagnant;
    }
  }

  MinimizeResult result{state.to_matrix(), std::move(trace), current, step,
                        seed};
  return result;
}

LambdaSweepResult sweep(const std::vector<double>& lambda_grid, std::size_t n,
                        std::size_t m, std::size_t seeds_per_lambda,
                        const OptimizerParams& params,
                        std::uint64_t base_seed) {
  if (lambda_grid.empty()) {
    throw ConfigError("sweep: empty lambda grid");
  }
  if (seeds_per_lambda == 0) {
    throw ConfigError("sweep: need at least one seed per lambda");
  }
  for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
    if (!(lambda_grid[g] >= 0.0 && lambda_grid[g] <= 1.0)) {
      throw ConfigError("sweep: grid values must lie in [0, 1]");
    }
    if (g > 0 && lambda_grid[g] <= lambda_grid[g - 1]) {
      throw ConfigError("sweep: grid must be strictly increasing");
    }
  }

  LambdaSweepResult result;
  result.grid = lambda_grid;
  result.n = n;
  result.m = m;
  result.runs.reserve(lambda_grid.size() * seeds_per_lambda);
  for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
    for (std::size_t s = 0; s < seeds_per_lambda; ++s) {
      const std::uint64_t run_seed = derive_seed(base_seed, g, s);
      MinimizeResult run = minimize(lambda_grid[g], n, m, params, run_seed);
      std::vector<std::uint64_t> mu_counts;
      mu_counts.reserve(run.matrix.n());
      for (std::uint32_t mu : run.matrix.row_sums()) {
        mu_counts.push_back(mu);
      }
      result.runs.push_back(LambdaRunRecord{
          lambda_grid[g], s, run_seed, run.final_cost,
          effort_summary(run.matrix), rank_frequency_from_counts(mu_counts),
          run.steps, std::move(run.matrix)});
    }
  }
  if (lambda_grid.size() >= 5) {
    result.transition = detect_transition(result);
  }
  return result;
}

TransitionEstimate detect_transition(const LambdaSweepResult& sweep_result) {
  const auto& grid = sweep_result.grid;
  if (grid.size() < 5) {
    throw DomainError("detect_transition: need at least 5 grid points");
  }
  std::vector<double> mean_info(grid.size(), 0.0);
  std::vector<double> mean_lex(grid.size(), 0.0);
  std::vector<std::size_t> counts(grid.size(), 0);
  for (const auto& run : sweep_result.runs) {
    const auto it = std::find(grid.begin(), grid.end(), run.lambda);
    const auto g = static_cast<std::size_t>(it - grid.begin());
    mean_info[g] += run.summary.mutual_info;
    mean_lex[g] += run.summary.lexicon;
    ++counts[g];
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (counts[g] == 0) {
      throw DomainError("detect_transition: grid point without runs");
    }
    mean_info[g] /= static_cast<double>(counts[g]);
    mean_lex[g] /= static_cast<double>(counts[g]);
  }

  std::vector<double> info_jumps;
  std::size_t best = 0;
  double best_jump = -1.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double jump = std::fabs(mean_info[g + 1] - mean_info[g]);
    info_jumps.push_back(jump);
    if (jump > best_jump) {
      best_jump = jump;
      best = g;
    }
  }
  std::size_t best_lex = 0;
  double best_lex_jump = -1.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double jump = std::fabs(mean_lex[g + 1] - mean_lex[g]);
    if (jump > best_lex_jump) {
      best_lex_jump = jump;
      best_lex = g;
    }
  }

  std::vector<double> sorted = info_jumps;
  std::sort(sorted.begin(), sorted.end());
  const double median_jump = sorted[sorted.size() / 2];

  TransitionEstimate t;
  t.lambda_star = (grid[best] + grid[best + 1]) / 2.0;
  t.uncertainty = grid[best + 1] - grid[best];
  t.info_jump = best_jump;
  t.lexicon_jump = best_lex_jump;
  t.lexicon_jump_lambda = (grid[best_lex] + grid[best_lex + 1]) / 2.0;
  t.low_confidence = best_jump < 2.0 * median_jump;
  return t;
}

ZipfWindowResult zipf_at_transition(const LambdaSweepResult& sweep_result,
                                    double window_lo, double window_hi) {
  ZipfWindowResult result;
  result.rejected = 0;
  std::vector<double> exponents;
  bool any_in_window = false;
  for (const auto& run : sweep_result.runs) {
    if (run.lambda < window_lo || run.lambda > window_hi) continue;
    any_in_window = true;
    try {
      PowerLawFit fit =
          fit_power_law(run.signal_ranks, FitRange{}, FitMethod::DiscreteMle);
      exponents.push_back(fit.exponent_a);
      result.fits.push_back(WindowFit{run.lambda, run.seed_index, fit});
    } catch (const FitError&) {
      ++result.rejected;
    }
  }
  if (!any_in_window) {
    throw DomainError("zipf_at_transition: no sweep runs inside the window");
  }
  if (exponents.empty()) {
    result.median_exponent = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  std::sort(exponents.begin(), exponents.end());
  const std::size_t mid = exponents.size() / 2;
  result.median_exponent =
      exponents.size() % 2 == 1
          ? exponents[mid]
          : (exponents[mid - 1] + exponents[mid]) / 2.0;
  return result;
}

}  // namespace waggle
