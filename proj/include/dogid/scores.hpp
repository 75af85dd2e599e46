#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dogid {

// Tolerance on the sum of a vector flagged as a distribution. Matches the
// ingestion tolerance of score files so that every accepted row is valid.
inline constexpr double kNormalizedTolerance = 1e-6;

/// Per-label confidences in [0, 1]. Labels are distinct and ordered.
class ScoreVector {
 public:
  ScoreVector() = default;
  ScoreVector(std::vector<std::string> labels, std::vector<double> scores, bool normalized);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& scores() const noexcept { return scores_; }
  bool normalized() const noexcept { return normalized_; }
  std::size_t size() const noexcept { return labels_.size(); }

  /// Score of `label`, or nullopt when absent.
  std::optional<double> score_of(std::string_view label) const;

  double sum() const;

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> scores_;
  bool normalized_ = false;
};

/// Labels ordered by descending score, ties broken by ascending label.
std::vector<std::string> ranked_labels(const ScoreVector& scores);

/// 1-based position of `label` in ranked_labels(scores).
std::size_t rank_of(const ScoreVector& scores, std::string_view label);

/// probe id -> scores over a shared label list, with an optional per-probe
/// normalisation constant (written as a trailing `z` column).
struct ScoreTable {
  std::vector<std::string> labels;
  std::map<std::string, ScoreVector> rows;
  std::map<std::string, double> z;
};

/// CSV `probe_id,<label1>,...`. Every row's normalized flag is set iff every
/// row sums to 1 within kNormalizedTolerance.
ScoreTable read_scores(std::string_view text);
ScoreTable load_scores(const std::filesystem::path& path);
std::string write_scores(const ScoreTable& table);
void save_scores(const ScoreTable& table, const std::filesystem::path& path);

}  // namespace dogid
