#include "crossover/experiment.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "crossover/errors.hpp"
#include "crossover/index.hpp"
#include "crossover/plot.hpp"
#include "crossover/rng.hpp"

namespace crossover {

namespace {

std::size_t parse_size(const std::string& v) { return static_cast<std::size_t>(parse_u64(v)); }

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "seed") {
      apply_master_seed(c, parse_u64(value));
    } else if (key == "workers") {
      c.campaign.workers = parse_size(value);
    } else if (key == "corpus.kind") {
      if (value == "zipf") c.corpus_kind = CorpusKind::kZipf;
      else if (value == "null" || value == "uniform") c.corpus_kind = CorpusKind::kNull;
      else if (value == "file") c.corpus_kind = CorpusKind::kFile;
      else throw ConfigError("corpus.kind must be zipf, null or file");
    } else if (key == "corpus.file") {
      c.corpus_file = value;
    } else if (key == "corpus.vocab_size") {
      c.zipf.vocab_size = parse_u64(value);
    } else if (key == "corpus.zipf_exponent") {
      c.zipf.zipf_exponent = parse_double(value);
    } else if (key == "corpus.total_tokens") {
      c.zipf.total_tokens = parse_u64(value);
    } else if (key == "corpus.doc_count") {
      c.zipf.doc_count = parse_u64(value);
      c.null_model.doc_count = c.zipf.doc_count;
    } else if (key == "corpus.word_length_range") {
      c.zipf.word_length_range = parse_range(value);
    } else if (key == "corpus.typo_prob") {
      c.zipf.typo_prob = parse_double(value);
    } else if (key == "corpus.inject_prob") {
      c.zipf.inject_prob = parse_double(value);
    } else if (key == "corpus.seed") {
      c.zipf.seed = parse_u64(value);
      c.null_model.seed = c.zipf.seed;
    } else if (key == "corpus.alphabet") {
      c.zipf.alphabet = Alphabet(value);
      c.file_alphabet = c.zipf.alphabet;
      c.campaign.alphabet = c.zipf.alphabet;
    } else if (key == "corpus.alphabet_size") {
      c.null_model.alphabet_size = parse_size(value);
      c.campaign.alphabet = Alphabet::latin(c.null_model.alphabet_size);
    } else if (key == "corpus.tokens_per_length") {
      c.null_model.tokens_per_length = parse_u64(value);
    } else if (key == "corpus.length_range") {
      c.null_model.length_range = parse_range(value);
    } else if (key == "campaign.n_range") {
      const auto [lo, hi] = parse_range(value);
      c.campaign.n_lo = lo;
      c.campaign.n_hi = hi;
    } else if (key == "campaign.queries") {
      c.campaign.queries_per_n = parse_u64(value);
    } else if (key == "campaign.seed") {
      c.campaign.seed = parse_u64(value);
    } else if (key == "campaign.dedup") {
      c.campaign.dedup = parse_bool(value);
    } else if (key == "campaign.alphabet") {
      c.campaign.alphabet = Alphabet(value);
    } else if (key == "backend") {
      if (value == "local") c.backend = BackendKind::kLocal;
      else if (value == "remote") c.backend = BackendKind::kRemote;
      else throw ConfigError("backend must be local or remote");
    } else if (key == "remote.url_template") {
      c.remote.url_template = value;
    } else if (key == "remote.count_pattern") {
      c.remote.count_pattern = value;
    } else if (key == "remote.qps") {
      c.remote.qps_limit = parse_double(value);
    } else if (key == "remote.max_retries") {
      c.remote.max_retries = static_cast<int>(parse_u64(value));
    } else if (key == "remote.backoff_ms") {
      c.remote.backoff_base = std::chrono::milliseconds(parse_u64(value));
    } else if (key == "remote.cache") {
      if (value.empty()) c.remote.cache_path.reset();
      else c.remote.cache_path = value;
    } else if (key == "remote.user_agent") {
      c.remote.user_agent = value;
    } else if (key == "output.dir") {
      c.out_dir = value;
    } else if (key == "output.plot") {
      c.plot = parse_bool(value);
    } else if (key == "analysis.threshold") {
      c.threshold = parse_double(value);
      if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError("analysis.threshold must be in (0, 1)");
    } else if (key == "fss.sizes") {
      c.fss_sizes = parse_u64_list(value);
    } else if (key == "fss.mode") {
      if (value == "simulate") c.fss_mode = FssMode::kSimulate;
      else if (value == "analytic") c.fss_mode = FssMode::kAnalytic;
      else throw ConfigError("fss.mode must be simulate or analytic");
    } else {
      throw ConfigError("unknown setting '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

void apply_master_seed(ExperimentConfig& c, std::uint64_t seed) {
  c.campaign.seed = seed;
  c.zipf.seed = seed;
  c.null_model.seed = seed;
}

ExperimentConfig parse_experiment_config(const KeyValues& values) {
  ExperimentConfig c;
  // The master seed goes first so explicit per-section seeds override it.
  if (const auto it = values.find("seed"); it != values.end()) apply_setting(c, "seed", it->second.first);
  for (const auto& [key, entry] : values) {
    if (key == "seed") continue;
    try {
      apply_setting(c, key, entry.first);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (line " + std::to_string(entry.second) + ")");
    }
  }
  if (!c.corpus_file.empty() && c.corpus_kind != CorpusKind::kFile) {
    if (values.count("corpus.kind")) throw ConfigError("corpus.file conflicts with corpus.kind; give one corpus source");
    c.corpus_kind = CorpusKind::kFile;
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_experiment_config(parse_key_values(in));
}

Corpus make_corpus(const ExperimentConfig& c) {
  switch (c.corpus_kind) {
    case CorpusKind::kZipf:
      return generate_corpus(c.zipf);
    case CorpusKind::kNull: {
      const auto range = c.null_model.length_range.value_or(std::make_pair(c.campaign.n_lo, c.campaign.n_hi));
      return generate_null_reservoir(c.null_model.alphabet_size, range.first, range.second,
                                     c.null_model.tokens_per_length, c.null_model.doc_count, c.null_model.seed);
    }
    case CorpusKind::kFile:
      if (c.corpus_file.empty()) throw ConfigError("corpus.kind=file needs corpus.file");
      return load_corpus(c.corpus_file, c.file_alphabet);
  }
  throw ConfigError("unknown corpus kind");
}

namespace {

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  writer(out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void write_plots(const std::filesystem::path& dir, const ScanResult& scan, double threshold) {
  LineChart p_chart{"Order parameter P versus query length", "N (letters)", "P", false, false, {}};
  PlotSeries p_series{"P(N), binomial error bars", {}, false};
  for (const auto& s : scan.summaries) p_series.points.push_back({static_cast<double>(s.n), s.p, s.p_stderr});
  p_chart.series.push_back(std::move(p_series));
  if (scan.crossover) {
    p_chart.title += " (N_c = " + format_real(scan.crossover->n_c, 4) + ")";
    p_chart.series.push_back({"threshold " + format_real(threshold),
                              {{scan.crossover->n_c, threshold, 0.0}},
                              true});
  }
  write_file(dir / "p_vs_n.svg", [&](std::ostream& o) { o << render_svg(p_chart); });

  LineChart r_chart{"Susceptibility R versus query length", "N (letters)", "R", false, false, {}};
  PlotSeries r_series{"R(N)", {}, false};
  for (const auto& s : scan.summaries) r_series.points.push_back({static_cast<double>(s.n), s.r, 0.0});
  r_chart.series.push_back(std::move(r_series));
  write_file(dir / "r_vs_n.svg", [&](std::ostream& o) { o << render_svg(r_chart); });

  LineChart h_chart{"Result-count histogram (log-log)", "E", "frequency per unit E", true, true, {}};
  for (const auto& s : scan.summaries) {
    PlotSeries series{"N=" + std::to_string(s.n), {}, false};
    for (const auto& b : s.histogram.bins) {
      if (b.count == 0) continue;
      const double width = static_cast<double>(b.upper - b.lower);
      series.points.push_back({std::sqrt(static_cast<double>(b.lower) * static_cast<double>(b.upper)),
                               static_cast<double>(b.count) / width, 0.0});
    }
    if (!series.points.empty()) h_chart.series.push_back(std::move(series));
  }
  write_file(dir / "histogram.svg", [&](std::ostream& o) { o << render_svg(h_chart); });
}

ScanResult scan_with(const ExperimentConfig& c, QueryBackend& backend) {
  ScanResult scan;
  scan.campaign = run_campaign(c.campaign, backend);
  scan.summaries = summarize(scan.campaign);
  const auto curve = p_curve(scan.summaries);
  try {
    scan.crossover = estimate_nc(curve, c.threshold);
  } catch (const NoCrossing&) {
  }
  ensure_out_dir(c.out_dir);
  write_file(c.out_dir / "records.csv", [&](std::ostream& o) { write_records_csv(o, scan.campaign); });
  write_file(c.out_dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, scan.summaries, scan.crossover); });
  write_file(c.out_dir / "histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, scan.summaries); });
  if (c.plot) write_plots(c.out_dir, scan, c.threshold);
  return scan;
}

}  // namespace

ScanResult cmd_scan(const ExperimentConfig& c) {
  if (c.backend == BackendKind::kRemote) return cmd_probe_remote(c);
  const auto corpus = make_corpus(c);
  const Index index(corpus);
  auto campaign_config = c;
  campaign_config.campaign.alphabet = corpus.alphabet();
  LocalBackend backend(index);
  return scan_with(campaign_config, backend);
}

ScanResult cmd_probe_remote(const ExperimentConfig& c) {
  RemoteBackend backend(c.remote);
  return scan_with(c, backend);
}

FssResult cmd_fss(const ExperimentConfig& c) {
  if (c.fss_sizes.size() < 2) throw InsufficientData("finite-size scan needs at least two reservoir sizes");
  const std::size_t alphabet_size = c.null_model.alphabet_size;
  FssResult result;
  std::vector<FssPoint> points;
  for (std::size_t k = 0; k < c.fss_sizes.size(); ++k) {
    FssRow row;
    row.tokens = c.fss_sizes[k];
    try {
      if (c.fss_mode == FssMode::kAnalytic) {
        row.n_c = analytic_null_nc(alphabet_size, row.tokens, c.threshold);
      } else {
        auto sized = c;
        sized.corpus_kind = CorpusKind::kNull;
        sized.null_model.tokens_per_length = row.tokens;
        // Each size gets its own reservoir stream; the campaign seed is shared.
        sized.null_model.seed = mix64(c.null_model.seed ^ mix64(k + 1));
        sized.campaign.alphabet = Alphabet::latin(alphabet_size);
        const auto corpus = make_corpus(sized);
        const Index index(corpus);
        LocalBackend backend(index);
        const auto campaign = run_campaign(sized.campaign, backend);
        const auto summaries = summarize(campaign);
        row.n_c = estimate_nc(p_curve(summaries), c.threshold).n_c;
      }
      row.status = "ok";
      points.push_back({static_cast<double>(row.tokens), *row.n_c});
    } catch (const NoCrossing& e) {
      row.status = e.kind();
    }
    result.rows.push_back(row);
  }
  result.fit = fss_fit(points, alphabet_size);
  ensure_out_dir(c.out_dir);
  write_file(c.out_dir / "fss.csv", [&](std::ostream& o) { write_fss_csv(o, result); });
  return result;
}

std::vector<NullComparisonRow> cmd_compare_null(const ExperimentConfig& c) {
  if (c.backend != BackendKind::kLocal) throw ConfigError("compare-null needs the local backend");
  const auto corpus = make_corpus(c);
  const Index index(corpus);
  auto campaign = c.campaign;
  campaign.alphabet = corpus.alphabet();
  LocalBackend backend(index);
  const auto result = run_campaign(campaign, backend);
  const auto model = NullModel::from_index(index, campaign.n_hi);

  std::vector<NullComparisonRow> rows;
  for (const auto& length : result.lengths) {
    const auto summary = summarize(length);
    NullComparisonRow row;
    row.n = summary.n;
    row.q = summary.q;
    row.p_measured = summary.p;
    row.p_exact = index.occupied_fraction(summary.n);
    row.p_analytic = analytic_null_p(model, summary.n);
    const double sigma = std::sqrt(row.p_exact * (1.0 - row.p_exact) / static_cast<double>(summary.q));
    const double diff = row.p_measured - row.p_exact;
    if (sigma > 0.0) row.deviation_sigma = diff / sigma;
    else row.deviation_sigma = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    row.flagged = std::abs(row.deviation_sigma) > 4.0;
    rows.push_back(row);
  }
  ensure_out_dir(c.out_dir);
  write_file(c.out_dir / "compare_null.csv", [&](std::ostream& o) { write_compare_csv(o, rows); });
  return rows;
}

Corpus cmd_gen_corpus(const ExperimentConfig& c) {
  auto corpus = make_corpus(c);
  ensure_out_dir(c.out_dir);
  save_corpus(c.out_dir / "reservoir.txt", corpus);
  const Index index(corpus);
  write_file(c.out_dir / "index_snapshot.txt", [&](std::ostream& o) { write_index_snapshot(o, index); });
  return corpus;
}

void write_fss_csv(std::ostream& out, const FssResult& result) {
  out << "t_n,n_c,status\n";
  for (const auto& row : result.rows)
    out << row.tokens << ',' << (row.n_c ? format_real(*row.n_c) : "") << ',' << row.status << '\n';
  out << "fit," << format_real(result.fit.slope) << ',' << format_real(result.fit.intercept) << '\n';
}

void write_compare_csv(std::ostream& out, const std::vector<NullComparisonRow>& rows) {
  out << "n,q,p_measured,p_exact,p_analytic,deviation_sigma,flag\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.q << ',' << format_real(r.p_measured) << ',' << format_real(r.p_exact) << ','
        << format_real(r.p_analytic) << ',' << format_real(r.deviation_sigma) << ',' << (r.flagged ? 1 : 0) << '\n';
}

}  // namespace crossover
