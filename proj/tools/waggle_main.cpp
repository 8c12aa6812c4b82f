// waggle: build a discrete corpus from bee-dance observation tables and run
// the rank-frequency / entropy / least-effort analyses over it.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "waggle/articulate.hpp"
#include "waggle/corpus.hpp"
#include "waggle/entropy.hpp"
#include "waggle/errors.hpp"
#include "waggle/ingest.hpp"
#include "waggle/io_util.hpp"
#include "waggle/least_effort.hpp"
#include "waggle/randlang.hpp"
#include "waggle/rng.hpp"
#include "waggle/zipf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  return json::parse(waggle::read_file(path));
}

waggle::FormatConfig format_from_config(const json& cfg,
                                        const std::string& delimiter_flag) {
  waggle::FormatConfig fmt;
  if (cfg.contains("format")) {
    const json& f = cfg["format"];
    if (f.contains("delimiter")) {
      const std::string d = f["delimiter"].get<std::string>();
      if (d == "tab" || d == "\t") {
        fmt.delimiter = '\t';
      } else if (!d.empty()) {
        fmt.delimiter = d[0];
      }
    }
    if (f.contains("columns")) {
      for (const auto& [key, value] : f["columns"].items()) {
        fmt.column_names[key] = value.get<std::string>();
      }
    }
  }
  if (cfg.contains("calibration")) {
    waggle::CalibrationTable table;
    for (const auto& anchor : cfg["calibration"]) {
      table.anchors.emplace_back(anchor.at(0).get<double>(),
                                 anchor.at(1).get<double>());
    }
    fmt.calibration = table;
  }
  if (delimiter_flag == "comma") {
    fmt.delimiter = ',';
  } else if (delimiter_flag == "tab") {
    fmt.delimiter = '\t';
  }
  return fmt;
}

waggle::SymbolCorpus load_corpus(const std::string& path) {
  const std::string text = waggle::read_file(path);
  if (fs::path(path).extension() == ".json") {
    return waggle::corpus_from_json(text);
  }
  return waggle::corpus_from_token_stream(text);
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    int count = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
        count < 1) {
      throw waggle::ConfigError("grid must be lo:hi:count or a comma list");
    }
    for (int i = 0; i < count; ++i) {
      grid.push_back(count == 1 ? lo
                                : lo + (hi - lo) * static_cast<double>(i) /
                                           static_cast<double>(count - 1));
    }
  } else {
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
      grid.push_back(std::stod(item));
    }
  }
  return grid;
}

json summary_json(const waggle::EffortSummary& s) {
  json j;
  j["h_s"] = s.h_s;
  j["h_r_given_s"] = s.h_r_given_s;
  j["mutual_info"] = s.mutual_info;
  j["lexicon"] = s.lexicon;
  return j;
}

int cmd_ingest(const std::string& input, const std::string& config_path,
               const std::string& delimiter_flag, bool strict,
               const std::string& out_dir) {
  const json cfg = load_config(config_path);
  const waggle::FormatConfig fmt = format_from_config(cfg, delimiter_flag);
  const waggle::ParseResult parsed =
      waggle::parse_observations(waggle::read_file(input), fmt);

  for (const auto& err : parsed.row_errors) {
    std::cerr << "row " << err.row
              << (err.column.empty() ? "" : " [" + err.column + "]") << ": "
              << err.message << (strict ? "" : " (row skipped)") << "\n";
  }
  if (strict && !parsed.row_errors.empty()) {
    return kExitError;
  }

  // index discrepancies by the source data-row number, so skipped rows do
  // not shift the report
  std::vector<std::vector<waggle::Discrepancy>> per_row;
  std::size_t total = 0;
  for (std::size_t i = 0; i < parsed.observations.size(); ++i) {
    auto found = waggle::validate_observation(parsed.observations[i]);
    total += found.size();
    const std::size_t row = parsed.source_rows[i];
    if (per_row.size() < row) per_row.resize(row);
    per_row[row - 1] = std::move(found);
  }

  const fs::path out(out_dir);
  waggle::atomic_write_file(out / "observations.jsonl",
                            waggle::observations_to_jsonl(parsed.observations));
  waggle::atomic_write_file(out / "observations.csv",
                            waggle::observations_to_csv(parsed.observations));
  waggle::atomic_write_file(out / "discrepancies.json",
                            waggle::discrepancies_to_json(per_row));
  std::cout << parsed.observations.size() << " observations, " << total
            << " discrepancies, " << parsed.row_errors.size()
            << " skipped rows\n";
  return (total == 0 && parsed.row_errors.empty()) ? kExitClean
                                                   : kExitFindings;
}

int cmd_corpus(const std::string& obs_path, const std::string& scheme_path,
               const std::string& config_path, bool budget_only,
               std::size_t max_n, const std::string& out_dir) {
  const json cfg = load_config(config_path);
  waggle::QuantizationScheme scheme;
  if (!scheme_path.empty()) {
    scheme = waggle::scheme_from_json(waggle::read_file(scheme_path));
  } else if (cfg.contains("scheme")) {
    scheme = waggle::scheme_from_json(cfg["scheme"].dump());
  } else {
    std::cerr << "no quantization scheme: pass --scheme or put one in --config\n";
    return kExitError;
  }

  if (budget_only) {
    std::cout << "info_budget_bits=" << waggle::fmt_double(waggle::info_budget(scheme))
              << "\nrepresentable_words=" << waggle::representable_words(scheme)
              << "\n";
    return kExitClean;
  }

  if (obs_path.empty()) {
    std::cerr << "no observations: pass --obs\n";
    return kExitError;
  }
  const std::string text = waggle::read_file(obs_path);
  std::vector<waggle::DanceObservation> observations;
  if (fs::path(obs_path).extension() == ".jsonl") {
    observations = waggle::observations_from_jsonl(text);
  } else {
    observations =
        waggle::parse_observations(text, format_from_config(cfg, "auto"))
            .observations;
  }
  const waggle::SymbolCorpus corpus = waggle::articulate(observations, scheme);

  const fs::path out(out_dir);
  waggle::atomic_write_file(out / "corpus.json", waggle::corpus_to_json(corpus));
  waggle::atomic_write_file(out / "corpus.tokens.txt",
                            waggle::corpus_to_token_stream(corpus));
  if (corpus.empty()) {
    std::cout << "empty corpus; skipping statistics\n";
    return kExitClean;
  }
  const waggle::RankFrequencyTable table = waggle::rank_frequency(corpus);
  waggle::atomic_write_file(out / "rankfreq.csv",
                            waggle::rank_frequency_to_csv(table));
  waggle::atomic_write_file(out / "loglog.dat",
                            waggle::rank_frequency_to_loglog(table));
  json fits;
  for (auto [name, method] :
       {std::pair{"ols", waggle::FitMethod::LogLogOls},
        std::pair{"mle", waggle::FitMethod::DiscreteMle}}) {
    try {
      fits[name] = json::parse(waggle::fit_to_json(
          waggle::fit_power_law(table, {}, method)));
    } catch (const waggle::FitError& e) {
      fits[name] = nullptr;
    }
  }
  waggle::atomic_write_file(out / "powerlaw.json", fits.dump(2));
  waggle::atomic_write_file(
      out / "entropy.json",
      waggle::entropy_report_to_json(waggle::entropy_report(corpus, max_n)));
  std::cout << corpus.size() << " tokens, " << corpus.vocabulary.size()
            << " word types\n";
  return kExitClean;
}

int cmd_zipf(const std::string& corpus_path, std::uint32_t min_rank,
             std::uint32_t max_rank, const std::string& method, bool regimes,
             const std::string& out_dir) {
  const waggle::SymbolCorpus corpus = load_corpus(corpus_path);
  const waggle::RankFrequencyTable table = waggle::rank_frequency(corpus);
  const fs::path out(out_dir);
  waggle::atomic_write_file(out / "rankfreq.csv",
                            waggle::rank_frequency_to_csv(table));
  waggle::atomic_write_file(out / "loglog.dat",
                            waggle::rank_frequency_to_loglog(table));
  const waggle::FitRange range{min_rank, max_rank};
  json fits;
  if (method == "ols" || method == "both") {
    fits["ols"] = json::parse(waggle::fit_to_json(
        waggle::fit_power_law(table, range, waggle::FitMethod::LogLogOls)));
  }
  if (method == "mle" || method == "both") {
    fits["mle"] = json::parse(waggle::fit_to_json(
        waggle::fit_power_law(table, range, waggle::FitMethod::DiscreteMle)));
  }
  waggle::atomic_write_file(out / "powerlaw.json", fits.dump(2));
  if (regimes) {
    waggle::atomic_write_file(
        out / "regimes.json",
        waggle::regimes_to_json(waggle::detect_regimes(table)));
  }
  std::cout << "fitted " << table.size() << " ranks\n";
  return kExitClean;
}

int cmd_entropy(const std::string& corpus_path, std::size_t max_n,
                const std::string& out_dir) {
  const waggle::SymbolCorpus corpus = load_corpus(corpus_path);
  const waggle::EntropyReport report = waggle::entropy_report(corpus, max_n);
  waggle::atomic_write_file(fs::path(out_dir) / "entropy.json",
                            waggle::entropy_report_to_json(report));
  std::cout << "unigram entropy " << waggle::fmt_double(report.unigram_entropy)
            << " bits over " << report.token_count << " tokens\n";
  return kExitClean;
}

int cmd_leasteffort(std::size_t n, std::size_t m, const std::string& grid_spec,
                    std::size_t seeds, std::uint64_t seed,
                    std::uint64_t stagnation_factor, std::uint64_t max_steps,
                    double nu, bool no_coverage, bool dump_matrices,
                    const std::string& window_spec,
                    const std::string& out_dir) {
  const std::vector<double> grid = parse_grid(grid_spec);
  waggle::OptimizerParams params;
  params.require_object_coverage = !no_coverage;
  params.stagnation_limit = stagnation_factor * n * m;
  params.max_steps = max_steps;
  params.flip_probability = nu;
  const waggle::LambdaSweepResult result =
      waggle::sweep(grid, n, m, seeds, params, seed);

  const fs::path out(out_dir);
  std::ostringstream csv;
  csv << "lambda,seed,cost,h_s,h_r_given_s,mutual_info,lexicon,iterations\n";
  for (const auto& run : result.runs) {
    csv << waggle::fmt_double(run.lambda) << ',' << run.seed_index << ','
        << waggle::fmt_double(run.final_cost) << ','
        << waggle::fmt_double(run.summary.h_s) << ','
        << waggle::fmt_double(run.summary.h_r_given_s) << ','
        << waggle::fmt_double(run.summary.mutual_info) << ','
        << waggle::fmt_double(run.summary.lexicon) << ',' << run.iterations
        << '\n';
  }
  waggle::atomic_write_file(out / "sweep.csv", csv.str());

  if (result.transition) {
    const auto& t = *result.transition;
    json j;
    j["lambda_star"] = t.lambda_star;
    j["uncertainty"] = t.uncertainty;
    j["info_jump"] = t.info_jump;
    j["lexicon_jump"] = t.lexicon_jump;
    j["lexicon_jump_lambda"] = t.lexicon_jump_lambda;
    j["low_confidence"] = t.low_confidence;
    waggle::atomic_write_file(out / "transition.json", j.dump(2));
    std::cout << "transition lambda* = " << waggle::fmt_double(t.lambda_star)
              << " +- " << waggle::fmt_double(t.uncertainty) << "\n";
  }

  if (!window_spec.empty()) {
    double lo = 0, hi = 0;
    if (std::sscanf(window_spec.c_str(), "%lf:%lf", &lo, &hi) != 2) {
      throw waggle::ConfigError("window must be lo:hi");
    }
    const waggle::ZipfWindowResult zw =
        waggle::zipf_at_transition(result, lo, hi);
    json j;
    j["median_exponent"] = std::isnan(zw.median_exponent)
                               ? json(nullptr)
                               : json(zw.median_exponent);
    j["rejected"] = zw.rejected;
    json per = json::array();
    for (const auto& f : zw.fits) {
      json item;
      item["lambda"] = f.lambda;
      item["seed"] = f.seed_index;
      item["exponent_a"] = f.fit.exponent_a;
      per.push_back(item);
    }
    j["fits"] = per;
    waggle::atomic_write_file(out / "zipf_window.json", j.dump(2));
  }

  if (dump_matrices) {
    char name[64];
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
      const auto& run = result.runs[r];
      const auto g = static_cast<std::size_t>(r / seeds);
      std::snprintf(name, sizeof(name), "lambda%02zu_seed%02zu", g,
                    static_cast<std::size_t>(run.seed_index));
      waggle::atomic_write_file(out / "matrices" / (std::string(name) + ".txt"),
                                run.matrix.to_text());
      waggle::atomic_write_file(
          out / "matrices" / (std::string(name) + "_rankfreq.csv"),
          waggle::rank_frequency_to_csv(run.signal_ranks));
    }
  }

  json summaries = json::array();
  for (const auto& run : result.runs) {
    json j = summary_json(run.summary);
    j["lambda"] = run.lambda;
    j["seed"] = run.seed_index;
    summaries.push_back(j);
  }
  waggle::atomic_write_file(out / "summaries.json", summaries.dump(2));
  return kExitClean;
}

int cmd_baseline(const std::string& subject_path, std::uint32_t alphabet,
                 double space_q, std::uint64_t chars, std::size_t ensemble,
                 std::uint64_t seed, const std::string& out_dir) {
  const waggle::SymbolCorpus subject = load_corpus(subject_path);
  if (ensemble < 10) {
    std::cerr << "baseline ensemble must have at least 10 corpora\n";
    return kExitError;
  }
  waggle::RandomTextSpec spec;
  spec.alphabet_size = alphabet;
  spec.space_probability = space_q;
  // Default char budget aims the expected token count (char_count * q(1-q)
  // maximal letter runs) at the subject's token count.
  spec.char_count =
      chars > 0 ? chars
                : static_cast<std::uint64_t>(
                      static_cast<double>(subject.tokens.size()) /
                      (space_q * (1.0 - space_q)));

  std::vector<waggle::SymbolCorpus> baselines;
  baselines.reserve(ensemble);
  for (std::size_t i = 0; i < ensemble; ++i) {
    spec.seed = waggle::derive_seed(seed, i);
    baselines.push_back(waggle::generate_random_text(spec));
  }
  const waggle::DiscriminationReport report =
      waggle::compare_to_random(subject, baselines);
  const fs::path out(out_dir);
  waggle::atomic_write_file(out / "baseline_report.json",
                            waggle::discrimination_to_json(report));
  waggle::atomic_write_file(out / "baselines.csv",
                            waggle::discrimination_to_csv(report));
  std::cout << "entropy z = " << waggle::fmt_double(report.entropy_z);
  if (report.zipf_z) {
    std::cout << ", zipf z = " << waggle::fmt_double(*report.zipf_z);
  }
  std::cout << "\n";
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waggle: corpus statistics for bee-dance observation data"};
  app.require_subcommand(1);
  app.fallthrough();  // common flags may follow the subcommand name

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt =
      app.add_option("--seed", seed, "base seed (required for stochastic commands)");

  auto* ingest = app.add_subcommand("ingest", "parse and validate a dance table");
  std::string in_path, delimiter_flag = "auto";
  bool strict = false;
  ingest->add_option("--input", in_path, "delimited observation table")->required();
  ingest->add_option("--delimiter", delimiter_flag, "auto|comma|tab")
      ->check(CLI::IsMember({"auto", "comma", "tab"}));
  ingest->add_flag("--strict", strict, "fail on malformed rows instead of skipping");

  auto* corpus = app.add_subcommand("corpus", "articulate observations into a symbol corpus");
  std::string obs_path, scheme_path;
  bool budget_only = false;
  std::size_t corpus_max_n = 3;
  corpus->add_option("--obs", obs_path, "observations (.jsonl or .csv)");
  corpus->add_option("--scheme", scheme_path, "quantization scheme JSON");
  corpus->add_flag("--budget", budget_only, "print the scheme's bit budget and exit");
  corpus->add_option("--max-n", corpus_max_n, "highest n-gram order in the entropy report");

  auto* zipf = app.add_subcommand("zipf", "rank-frequency table and power-law fits");
  std::string corpus_path, fit_method = "both";
  std::uint32_t min_rank = 1, max_rank = 0;
  bool regimes = false;
  zipf->add_option("--corpus", corpus_path, "corpus (.json or token stream)")->required();
  zipf->add_option("--min-rank", min_rank, "first rank of the fit window");
  zipf->add_option("--max-rank", max_rank, "last rank of the fit window (0 = last)");
  zipf->add_option("--method", fit_method, "ols|mle|both")
      ->check(CLI::IsMember({"ols", "mle", "both"}));
  zipf->add_flag("--regimes", regimes, "run two-regime breakpoint detection");

  auto* entropy = app.add_subcommand("entropy", "n-gram entropy report");
  std::string entropy_corpus;
  std::size_t max_n = 3;
  entropy->add_option("--corpus", entropy_corpus, "corpus (.json or token stream)")->required();
  entropy->add_option("--max-n", max_n, "highest n-gram order");

  auto* leasteffort = app.add_subcommand("leasteffort", "signal-object least-effort sweep");
  std::size_t le_n = 32, le_m = 32, le_seeds = 10;
  std::string grid_spec = "0:1:21", window_spec;
  std::uint64_t stagnation_factor = 4, max_steps = 500000;
  double nu = 0.0;
  bool no_coverage = false, dump_matrices = false;
  leasteffort->add_option("--n", le_n, "signal count");
  leasteffort->add_option("--m", le_m, "object count");
  leasteffort->add_option("--grid", grid_spec, "lambda grid, lo:hi:count or comma list");
  leasteffort->add_option("--seeds", le_seeds, "seeds per lambda");
  leasteffort->add_option("--stagnation-factor", stagnation_factor,
                          "stop after factor*n*m non-improving steps");
  leasteffort->add_option("--max-steps", max_steps, "hard step cap per run");
  leasteffort->add_option("--nu", nu, "per-cell flip probability (0 = 2/(n*m))");
  leasteffort->add_flag("--no-coverage", no_coverage,
                        "allow optimized matrices to drop objects");
  leasteffort->add_flag("--dump-matrices", dump_matrices, "write final 0/1 grids");
  leasteffort->add_option("--window", window_spec,
                          "lambda window lo:hi for Zipf fits of final matrices");

  auto* baseline = app.add_subcommand("baseline", "compare a corpus to random-text baselines");
  std::string subject_path;
  std::uint32_t alphabet = 26;
  double space_q = 0.18;
  std::uint64_t chars = 0;
  std::size_t ensemble = 20;
  baseline->add_option("--subject", subject_path, "subject corpus")->required();
  baseline->add_option("--alphabet", alphabet, "baseline alphabet size");
  baseline->add_option("--space-q", space_q, "baseline space probability");
  baseline->add_option("--chars", chars, "characters per baseline (0 = match subject size)");
  baseline->add_option("--ensemble", ensemble, "number of baseline corpora");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  if ((*leasteffort || *baseline) && seed_opt->count() == 0) {
    std::cerr << "stochastic commands require --seed\n";
    return kExitError;
  }

  try {
    if (*ingest) {
      return cmd_ingest(in_path, config_path, delimiter_flag, strict, out_dir);
    }
    if (*corpus) {
      return cmd_corpus(obs_path, scheme_path, config_path, budget_only,
                        corpus_max_n, out_dir);
    }
    if (*zipf) {
      return cmd_zipf(corpus_path, min_rank, max_rank, fit_method, regimes, out_dir);
    }
    if (*entropy) {
      return cmd_entropy(entropy_corpus, max_n, out_dir);
    }
    if (*leasteffort) {
      if (le_n < 2 || le_m < 2) {
        std::cerr << "leasteffort needs n >= 2 and m >= 2\n";
        return kExitError;
      }
      return cmd_leasteffort(le_n, le_m, grid_spec, le_seeds, seed,
                             stagnation_factor, max_steps, nu, no_coverage,
                             dump_matrices, window_spec, out_dir);
    }
    if (*baseline) {
      return cmd_baseline(subject_path, alphabet, space_q, chars, ensemble,
                          seed, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
