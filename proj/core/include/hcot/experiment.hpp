#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hcot/checkpoint.hpp"
#include "hcot/data.hpp"
#include "hcot/hierarchy.hpp"
#include "hcot/metrics.hpp"
#include "hcot/network.hpp"
#include "hcot/trainer.hpp"

namespace hcot {

enum class DatasetKind { synthetic, cifar100 };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::synthetic;
  SyntheticSpec synthetic;
  /// CIFAR-100 root; empty means $HCE_DATA_DIR.
  std::filesystem::path cifar_path;
  bool augment = true;
  /// Truncate each CIFAR split to this many records (0 = all).
  Index cifar_max_records = 0;
};

/// A complete experiment description. Serialized as JSON; see
/// docs/config.md for the schema.
struct ExperimentConfig {
  DatasetConfig dataset;
  /// Training hierarchy: a file path, `builtin:flat`, `builtin:identity`,
  /// `builtin:native` (the synthetic generator's tree) or
  /// `builtin:contiguous:<N>`. Required when objective is hcot.
  std::optional<std::string> hierarchy;
  /// Hierarchy for coarse error and probability profiles. Defaults to
  /// builtin:native for synthetic data and to `hierarchy` otherwise.
  std::optional<std::string> eval_hierarchy;
  /// Layer spec string; empty means dense(D->hidden), relu, dense(hidden->K).
  std::string layers;
  Index hidden = 32;
  TrainConfig train;
  /// Master seed; data, init, shuffle and augment seeds derive from it.
  std::uint64_t seed = 0;
  std::filesystem::path output;
  bool force = false;

  /// Structural checks that need no filesystem access. Throws ConfigError
  /// naming the offending field.
  void validate() const;
};

/// Parses the JSON config document. A manifest.json written by a previous
/// run is also accepted (its "config" member is used). Throws ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Canonical JSON text (all fields, fixed key order).
std::string experiment_config_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct DerivedSeeds {
  std::uint64_t data = 0;
  std::uint64_t init = 0;
  std::uint64_t shuffle = 0;
};
DerivedSeeds derive_seeds(std::uint64_t master);

/// Train/test data with the hierarchies an experiment uses.
struct PreparedData {
  Dataset train;
  Dataset test;
  Index num_fine = 0;
  /// Hierarchy implied by the data itself (synthetic tree; flat for CIFAR).
  LabelHierarchy native;
};

/// Throws DataError when the dataset is missing or malformed.
PreparedData prepare_data(const ExperimentConfig& cfg);

/// Resolves a hierarchy reference against the data. Throws ConfigError on an
/// unknown builtin, unreadable file, parse error, or size mismatch.
LabelHierarchy resolve_hierarchy(const std::string& ref, const PreparedData& data);

std::vector<LayerSpec> network_layers(const ExperimentConfig& cfg, Index input_dim, Index num_fine);

struct ExperimentResult {
  std::vector<MetricsRecord> metrics;  ///< one per epoch
  ProbabilityProfile profile;          ///< final-epoch test profile
  EpochStats last_epoch;
  Network network;
  std::string param_digest;            ///< FNV-1a 64 over final parameter bytes
};

/// Trains without touching the filesystem (besides reading data).
ExperimentResult train_experiment(const ExperimentConfig& cfg, const PreparedData& data);

/// Validates (including a non-empty cfg.output), trains, and writes metrics.csv, profile.csv, model.ckpt and
/// manifest.json into cfg.output. Refuses to reuse a non-empty output
/// directory unless cfg.force. Throws ConfigError / DataError / NumericalError.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct CompareRow {
  ObjectiveKind objective;
  MetricsRecord final_metrics;
  double staircase_gap = 0.0;
  bool complement_in_updates = false;
};

/// Runs xe, cot and hcot with identical seeds and data; each run writes its
/// artifacts under cfg.output/<objective>/ and the table goes to
/// cfg.output/compare.csv. Rows are in fixed order xe, cot, hcot.
std::vector<CompareRow> run_compare(const ExperimentConfig& cfg);

struct AblationRow {
  std::string label;  ///< "cot" for the reference run, else the granularity
  Index num_coarse = 0;
  MetricsRecord final_metrics;
  double staircase_gap = 0.0;
  std::string param_digest;
};

/// Granularities are integers (contiguous grouping of the fine classes into
/// N groups; 1 = flat, K = identity) or hierarchy file paths. One hcot run
/// per entry plus a cot reference run, all with the same seed. Metrics use
/// the config's evaluation hierarchy so rows are directly comparable.
/// Writes cfg.output/ablation_nc.csv.
std::vector<AblationRow> run_ablation_nc(const ExperimentConfig& cfg,
                                         const std::vector<std::string>& granularities);

/// Evaluates a checkpoint on the test split.
MetricsRecord evaluate_checkpoint(const ExperimentConfig& cfg, const Checkpoint& ckpt,
                                  ProbabilityProfile* profile = nullptr);

std::string compare_csv_header();
std::string ablation_csv_header();

}  // namespace hcot
