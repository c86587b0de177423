// crossover: synthetic reservoirs, random-query campaigns and crossover analysis.

#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crossover/errors.hpp"
#include "crossover/experiment.hpp"
#include "crossover/util.hpp"

namespace {

using namespace crossover;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
  std::optional<bool> plot;
  std::vector<std::string> settings;
};

ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig config = g.config_path.empty() ? ExperimentConfig{} : load_experiment_config(g.config_path);
  for (const auto& s : g.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(config, std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))));
  }
  if (g.seed) apply_master_seed(config, *g.seed);
  if (g.workers) config.campaign.workers = *g.workers;
  if (g.out_dir) config.out_dir = *g.out_dir;
  if (g.plot) config.plot = *g.plot;
  return config;
}

int report_scan(const ScanResult& scan) {
  for (const auto& s : scan.summaries) {
    std::cerr << "N=" << s.n << " q=" << s.q << " P=" << format_real(s.p) << " R=" << format_real(s.r);
    const double flat = head_flatness_ratio(s.histogram);
    if (!std::isnan(flat)) std::cerr << " head_flatness=" << format_real(flat, 3);
    std::cerr << '\n';
  }
  if (scan.crossover)
    std::cerr << "N_c=" << format_real(scan.crossover->n_c) << (scan.crossover->ambiguous ? " (ambiguous)" : "") << '\n';
  else
    std::cerr << "no crossing of the threshold in the scanned range\n";
  for (const auto& length : scan.campaign.lengths) {
    if (length.space_exhausted) std::cerr << "N=" << length.n << ": query space exhausted after " << length.records.size() << " distinct queries\n";
  }
  if (!scan.campaign.complete()) {
    for (const auto& length : scan.campaign.lengths)
      if (length.failure) std::cerr << "error: PartialResults: N=" << length.n << " stopped after " << length.records.size() << " records: " << *length.failure << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-query crossover laboratory"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_option("--seed", g.seed, "master seed for corpus and campaign");
  app.add_option("--workers", g.workers, "threads issuing backend queries")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--plot", g.plot, "render SVG plots (true/false)");
  app.add_option("--set", g.settings, "override one config key (key=value), repeatable");

  auto* gen = app.add_subcommand("gen-corpus", "generate a reservoir file and its index snapshot");
  std::string spec_path;
  gen->add_option("--spec", spec_path, "corpus spec file (CorpusSpec key=value)");
  auto* scan = app.add_subcommand("scan", "run a campaign and write P(N), R(N) and histograms");
  auto* fss = app.add_subcommand("fss", "finite-size scan of N_c over reservoir sizes");
  auto* compare = app.add_subcommand("compare-null", "compare measured P with exact and null-model values");
  auto* remote = app.add_subcommand("probe-remote", "run a campaign against the configured remote backend");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = resolve_config(g);
    if (gen->parsed()) {
      if (!spec_path.empty()) {
        config.corpus_kind = CorpusKind::kZipf;
        config.zipf = read_corpus_spec(spec_path);
        if (g.seed) config.zipf.seed = *g.seed;
      }
      const auto corpus = cmd_gen_corpus(config);
      std::cerr << "wrote " << corpus.doc_count() << " documents, " << corpus.token_count() << " tokens to "
                << (config.out_dir / "reservoir.txt").string() << '\n';
      return 0;
    }
    if (scan->parsed()) return report_scan(cmd_scan(config));
    if (remote->parsed()) return report_scan(cmd_probe_remote(config));
    if (fss->parsed()) {
      const auto result = cmd_fss(config);
      for (const auto& row : result.rows)
        std::cerr << "T_N=" << row.tokens << " N_c=" << (row.n_c ? format_real(*row.n_c) : "-") << " " << row.status << '\n';
      std::cerr << "slope=" << format_real(result.fit.slope) << " intercept=" << format_real(result.fit.intercept) << '\n';
      return 0;
    }
    if (compare->parsed()) {
      const auto rows = cmd_compare_null(config);
      int flagged = 0;
      for (const auto& r : rows) flagged += r.flagged ? 1 : 0;
      std::cerr << rows.size() << " lengths compared, " << flagged << " beyond 4 sigma\n";
      return 0;
    }
  } catch (const crossover::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
