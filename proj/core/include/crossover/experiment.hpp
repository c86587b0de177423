#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossover/corpus.hpp"
#include "crossover/netclient.hpp"
#include "crossover/probe.hpp"
#include "crossover/stats.hpp"
#include "crossover/util.hpp"

namespace crossover {

// Parameters of a null-model reservoir (uniform strings at every length).
struct NullReservoirSpec {
  std::size_t alphabet_size = 26;
  // Defaults to the campaign's length range when unset.
  std::optional<std::pair<std::size_t, std::size_t>> length_range;
  std::uint64_t tokens_per_length = 17576;
  std::uint64_t doc_count = 100;
  std::uint64_t seed = 0;
};

enum class CorpusKind { kZipf, kNull, kFile };
enum class BackendKind { kLocal, kRemote };
enum class FssMode { kSimulate, kAnalytic };

struct ExperimentConfig {
  CorpusKind corpus_kind = CorpusKind::kZipf;
  CorpusSpec zipf;
  NullReservoirSpec null_model;
  std::filesystem::path corpus_file;
  Alphabet file_alphabet;

  Campaign campaign;
  BackendKind backend = BackendKind::kLocal;
  RemoteConfig remote;

  std::filesystem::path out_dir = "out";
  bool plot = false;
  double threshold = 0.5;

  std::vector<std::uint64_t> fss_sizes;
  FssMode fss_mode = FssMode::kSimulate;
};

// Flat "section.key=value" settings. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(const KeyValues& values);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
// Applies one "key=value" setting on top of an existing config.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
// --seed: sets the campaign seed and every corpus seed.
void apply_master_seed(ExperimentConfig& config, std::uint64_t seed);

// Builds the configured reservoir (generated or loaded).
Corpus make_corpus(const ExperimentConfig& config);

struct ScanResult {
  CampaignResult campaign;
  std::vector<LengthSummary> summaries;
  std::optional<CrossoverFit> crossover;
};

// Campaign over the configured length range, writing records.csv, summary.csv,
// histogram.csv and, with plotting on, p_vs_n.svg, r_vs_n.svg, histogram.svg.
ScanResult cmd_scan(const ExperimentConfig& config);
// Same as cmd_scan with the remote backend forced.
ScanResult cmd_probe_remote(const ExperimentConfig& config);

struct FssRow {
  std::uint64_t tokens = 0;
  std::optional<double> n_c;
  std::string status;  // "ok" or the error class that excluded the row
};

struct FssResult {
  std::vector<FssRow> rows;
  LinearFit fit;
};

// One crossover estimate per reservoir size, then the fit of N_c against
// log_A T_N; writes fss.csv. Throws InsufficientData with fewer than two
// usable sizes.
FssResult cmd_fss(const ExperimentConfig& config);

struct NullComparisonRow {
  std::size_t n = 0;
  std::uint64_t q = 0;
  double p_measured = 0.0;
  double p_exact = 0.0;
  double p_analytic = 0.0;
  double deviation_sigma = 0.0;
  bool flagged = false;
};

// Measured P against the exact index census and the analytic null model with
// T_N taken from the reservoir; writes compare_null.csv. Local backend only.
std::vector<NullComparisonRow> cmd_compare_null(const ExperimentConfig& config);

// Writes reservoir.txt and index_snapshot.txt for the configured corpus.
Corpus cmd_gen_corpus(const ExperimentConfig& config);

void write_fss_csv(std::ostream& out, const FssResult& result);
void write_compare_csv(std::ostream& out, const std::vector<NullComparisonRow>& rows);

}  // namespace crossover
