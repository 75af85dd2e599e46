#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dogid/eval.hpp"
#include "dogid/landmarks.hpp"
#include "dogid/raster.hpp"
#include "dogid/scores.hpp"
#include "dogid/softbio.hpp"

namespace dogid {

inline constexpr std::string_view kFlipSuffix = "#flip";

struct ManifestRow {
  std::string image_id;
  std::string path;  // relative paths resolve against the manifest directory
  std::string identity;
  std::string breed;
  std::optional<PixelRect> box;
  std::string split;  // "", "train" or "test"
  bool augmented = false;
  std::string source;  // provenance of derived images
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRow> rows;

  std::filesystem::path resolve(const ManifestRow& row) const;
};

/// Header-driven CSV. `image_id` and `path` are required; identity, breed,
/// box_left/box_top/box_width/box_height (all four or none), split,
/// augmented and source are optional. Other columns are ignored.
DatasetManifest read_manifest(std::string_view text, std::filesystem::path base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string write_manifest(const DatasetManifest& manifest);

struct RunConfig {
  double alpha = 0.5;
  std::size_t k = 2;
  bool coarse_filter = false;
  int out_side = 224;
  std::uint64_t seed = 0;
  bool fallback_raw = false;
  double temperature = 1.0;
  int folds = 5;
  bool augment = true;
  bool assist_gender = true;
  bool assist_breed = true;
  std::string probe_attributes;  // optional CSV probe_id,gender,breed
  EmptyClassPolicy empty_class = EmptyClassPolicy::Error;
};

/// Flat `key = value` lines; `#` starts a comment. Throws InvalidConfig.
RunConfig parse_config(std::string_view text);
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
/// Throws InvalidConfig when a field is outside its module's domain.
void validate_config(const RunConfig& config);

/// Per-probe soft attributes, `unknown` allowed for either column.
std::map<std::string, SoftAttributes> read_probe_attributes(std::string_view text);

struct RowOutcome {
  std::string image_id;
  std::string method;  // landmarks | box | resize | flip
  bool ok = true;
  std::string message;
};

struct CommandReport {
  std::vector<RowOutcome> rows;
  std::size_t failures() const;
  std::string to_json() const;
};

/// Landmark rows go through normalize_face, box rows through crop+resize,
/// bare rows through resize. Writes images and `manifest.csv` to out_dir.
/// With `strict`, throws RowFailures after writing if any row failed.
CommandReport cmd_normalize(const DatasetManifest& manifest, const LandmarkTable* landmarks,
                            const std::filesystem::path& out_dir, int out_side, bool strict);

/// Writes a horizontally flipped copy of every row (id suffix `#flip`,
/// augmented=true) and a manifest of exactly twice the input rows.
CommandReport cmd_augment(const DatasetManifest& manifest, const std::filesystem::path& out_dir);

/// Folds over the non-augmented rows that carry an identity.
FoldAssignment cmd_split(const DatasetManifest& manifest, int k, std::uint64_t seed);
std::string write_folds(const DatasetManifest& manifest, const FoldAssignment& folds);

enum class LabelField { Identity, Breed };

/// Baseline nearest-centroid classifier. Without a probe manifest, rows with
/// split=test are probes and every other labelled row trains.
ScoreTable cmd_classify(const DatasetManifest& training, const DatasetManifest* probes,
                        LabelField field, double temperature);

/// Rerank every row of a score table; z values land in the table's z column.
ScoreTable cmd_rerank(const ScoreTable& scores, const IdentityRegistry& registry,
                      const SoftAttributes& attrs,
                      const std::map<std::string, SoftAttributes>* per_probe, bool fallback_raw);

/// Predictions from a score table, true labels taken from the manifest's
/// identity column (or breed column when `field` is Breed).
std::vector<PredictionRecord> predictions_from_scores(const ScoreTable& scores,
                                                      const DatasetManifest& truth,
                                                      LabelField field);

struct ExperimentResult {
  std::string report_json;
  std::vector<PredictionRecord> default_predictions;
  std::vector<PredictionRecord> assisted_predictions;
  CrossValSummary default_summary;
  CrossValSummary assisted_summary;
  std::vector<PerClassStats> default_folds;
  std::vector<PerClassStats> assisted_folds;
};

/// k-fold experiment: folds, training-only augmentation, raw and normalised
/// baseline scores fused with alpha, optional coarse breed filter (Default),
/// then soft-biometric reranking (Assisted).
ExperimentResult cmd_run_experiment(const RunConfig& config, const DatasetManifest& manifest,
                                    const IdentityRegistry& registry,
                                    const LandmarkTable* landmarks);

}  // namespace dogid
