#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dogid {

struct PredictionRecord {
  std::string probe_id;
  std::string true_label;
  std::vector<std::string> ranked_labels;  // best first, distinct, non-empty
};

/// Rows are true classes, columns predicted classes (rank-1).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  std::int64_t count(std::size_t true_index, std::size_t predicted_index) const {
    return counts_[true_index * labels_.size() + predicted_index];
  }
  /// Throws UnknownLabel.
  std::size_t index_of(std::string_view label) const;
  void add(std::string_view true_label, std::string_view predicted_label);

  std::int64_t row_total(std::size_t true_index) const;
  std::int64_t total() const;
  std::int64_t trace() const;

  /// Each row divided by its total; empty rows stay zero.
  std::vector<std::vector<double>> row_normalized() const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::int64_t> counts_;
};

enum class EmptyClassPolicy {
  Error,    // a class row with no probes raises EmptyClassRow
  Exclude,  // such classes are left out of per-class statistics
};

struct PerClassStats {
  std::map<std::string, double> per_class_accuracy;
  double worst = 0.0;
  double best = 0.0;
  double sigma = 0.0;  // population standard deviation
  double average = 0.0;
  double balanced = 0.0;
};

struct CrossValSummary {
  double mean_averaged = 0.0;
  double mean_balanced = 0.0;
};

struct ImageIdentity {
  std::string image_id;
  std::string identity;
};

struct FoldAssignment {
  std::map<std::string, int> fold_of;
  std::uint64_t seed = 0;
  int k = 0;
  std::vector<std::string> warnings;

  std::vector<std::string> images_in(int fold) const;
};

ConfusionMatrix confusion(std::span<const PredictionRecord> records,
                          const std::vector<std::string>& labels);

/// trace / total. Throws EmptyEvaluation on an empty matrix.
double averaged_accuracy(const ConfusionMatrix& matrix);

/// Mean of per-class rank-1 accuracies.
double balanced_accuracy(const ConfusionMatrix& matrix,
                         EmptyClassPolicy policy = EmptyClassPolicy::Error);

PerClassStats per_class_stats(const ConfusionMatrix& matrix,
                              EmptyClassPolicy policy = EmptyClassPolicy::Error);

/// Groups images by identity, shuffles each group with a generator seeded
/// from (seed, identity), then deals the groups round-robin into k folds.
/// The deal continues across identities (in identity order), so every
/// identity's fold sizes differ by at most one and the folds stay balanced
/// overall.
FoldAssignment make_folds(std::span<const ImageIdentity> images, int k, std::uint64_t seed);

CrossValSummary crossval_accuracy(std::span<const PerClassStats> fold_results);

/// CSV `probe_id,true_label,ranked_labels` with `|` between ranked labels.
std::vector<PredictionRecord> read_predictions(std::string_view text);
std::string write_predictions(std::span<const PredictionRecord> records);

/// Sorted union of true and top-ranked labels.
std::vector<std::string> label_universe(std::span<const PredictionRecord> records);

/// JSON object with every PerClassStats field, the label list and the
/// row-normalised confusion matrix.
std::string evaluation_report_json(const ConfusionMatrix& matrix,
                                   EmptyClassPolicy policy = EmptyClassPolicy::Error);

}  // namespace dogid
