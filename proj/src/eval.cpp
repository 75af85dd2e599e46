#include "dogid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <json.hpp>

#include "dogid/error.hpp"
#include "text.hpp"

namespace dogid {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Unbiased draw from [0, n). std::uniform_int_distribution is not portable
// across standard libraries, which would break reproducible fold splits.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (!index_.emplace(labels_[i], i).second)
      fail(ErrorCode::InvalidArgument, "duplicate class label '" + labels_[i] + "'");
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  const auto it = index_.find(label);
  if (it == index_.end())
    fail(ErrorCode::UnknownLabel, "label '" + std::string(label) + "' is not a known class");
  return it->second;
}

void ConfusionMatrix::add(std::string_view true_label, std::string_view predicted_label) {
  const auto t = index_of(true_label);
  const auto p = index_of(predicted_label);
  ++counts_[t * labels_.size() + p];
}

std::int64_t ConfusionMatrix::row_total(std::size_t true_index) const {
  std::int64_t s = 0;
  for (std::size_t j = 0; j < labels_.size(); ++j) s += count(true_index, j);
  return s;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) s += count(i, i);
  return s;
}

std::vector<std::vector<double>> ConfusionMatrix::row_normalized() const {
  std::vector<std::vector<double>> out(labels_.size(), std::vector<double>(labels_.size(), 0.0));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto n = row_total(i);
    if (n == 0) continue;
    for (std::size_t j = 0; j < labels_.size(); ++j)
      out[i][j] = static_cast<double>(count(i, j)) / static_cast<double>(n);
  }
  return out;
}

std::vector<std::string> FoldAssignment::images_in(int fold) const {
  std::vector<std::string> out;
  for (const auto& [id, f] : fold_of)
    if (f == fold) out.push_back(id);
  return out;
}

ConfusionMatrix confusion(std::span<const PredictionRecord> records,
                          const std::vector<std::string>& labels) {
  ConfusionMatrix m(labels);
  for (const auto& r : records) {
    if (r.ranked_labels.empty())
      fail(ErrorCode::InvalidArgument, "probe '" + r.probe_id + "' has no ranked labels");
    m.add(r.true_label, r.ranked_labels.front());
  }
  return m;
}

double averaged_accuracy(const ConfusionMatrix& matrix) {
  const auto total = matrix.total();
  if (total == 0) fail(ErrorCode::EmptyEvaluation, "no evaluated probes");
  return static_cast<double>(matrix.trace()) / static_cast<double>(total);
}

PerClassStats per_class_stats(const ConfusionMatrix& matrix, EmptyClassPolicy policy) {
  PerClassStats stats;
  stats.average = averaged_accuracy(matrix);
  std::vector<double> acc;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto n = matrix.row_total(i);
    if (n == 0) {
      if (policy == EmptyClassPolicy::Error)
        fail(ErrorCode::EmptyClassRow,
             "class '" + matrix.labels()[i] + "' has no evaluated probes");
      continue;
    }
    const double a = static_cast<double>(matrix.count(i, i)) / static_cast<double>(n);
    stats.per_class_accuracy.emplace(matrix.labels()[i], a);
    acc.push_back(a);
  }
  if (acc.empty()) fail(ErrorCode::EmptyEvaluation, "no class has evaluated probes");
  stats.worst = *std::min_element(acc.begin(), acc.end());
  stats.best = *std::max_element(acc.begin(), acc.end());
  double sum = 0.0;
  for (double a : acc) sum += a;
  stats.balanced = sum / static_cast<double>(acc.size());
  double var = 0.0;
  for (double a : acc) var += (a - stats.balanced) * (a - stats.balanced);
  stats.sigma = std::sqrt(var / static_cast<double>(acc.size()));
  return stats;
}

double balanced_accuracy(const ConfusionMatrix& matrix, EmptyClassPolicy policy) {
  return per_class_stats(matrix, policy).balanced;
}

FoldAssignment make_folds(std::span<const ImageIdentity> images, int k, std::uint64_t seed) {
  if (k < 2) fail(ErrorCode::InvalidArgument, "fold count k must be at least 2");
  std::map<std::string, std::vector<std::string>> by_identity;
  std::set<std::string_view> seen;
  for (const auto& img : images) {
    if (!seen.insert(img.image_id).second)
      fail(ErrorCode::DuplicateImageId, "image '" + img.image_id + "' listed twice");
    by_identity[img.identity].push_back(img.image_id);
  }

  FoldAssignment out;
  out.seed = seed;
  out.k = k;
  std::size_t next_fold = 0;
  for (auto& [identity, ids] : by_identity) {
    // Sorting first makes the split independent of manifest row order.
    std::sort(ids.begin(), ids.end());
    std::mt19937_64 rng(splitmix64(seed ^ fnv1a(identity)));
    for (std::size_t i = ids.size(); i > 1; --i)
      std::swap(ids[i - 1], ids[bounded(rng, i)]);
    for (const auto& id : ids) {
      out.fold_of.emplace(id, static_cast<int>(next_fold));
      next_fold = (next_fold + 1) % static_cast<std::size_t>(k);
    }
    if (ids.size() < static_cast<std::size_t>(k))
      out.warnings.push_back("identity '" + identity + "' has " + std::to_string(ids.size()) +
                             " images, fewer than k=" + std::to_string(k));
  }
  return out;
}

CrossValSummary crossval_accuracy(std::span<const PerClassStats> fold_results) {
  if (fold_results.empty()) fail(ErrorCode::InvalidArgument, "no fold results to average");
  CrossValSummary s;
  for (const auto& f : fold_results) {
    s.mean_averaged += f.average;
    s.mean_balanced += f.balanced;
  }
  s.mean_averaged /= static_cast<double>(fold_results.size());
  s.mean_balanced /= static_cast<double>(fold_results.size());
  return s;
}

std::vector<PredictionRecord> read_predictions(std::string_view text) {
  const auto rows = text::parse_csv(text);
  if (rows.empty() ||
      rows.front().fields != std::vector<std::string>{"probe_id", "true_label", "ranked_labels"})
    fail(ErrorCode::MalformedHeader, "predictions header must be probe_id,true_label,ranked_labels");
  std::vector<PredictionRecord> out;
  std::set<std::string> probes;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 3)
      fail(ErrorCode::MissingColumn, text::where(row) + ": expected 3 fields");
    PredictionRecord rec{row.fields[0], row.fields[1], text::split(row.fields[2], '|')};
    if (rec.probe_id.empty() || rec.true_label.empty() || rec.ranked_labels.front().empty())
      fail(ErrorCode::EmptyField, text::where(row) + ": empty field");
    if (!probes.insert(rec.probe_id).second)
      fail(ErrorCode::DuplicateProbeId, text::where(row) + ": duplicate probe '" + rec.probe_id + "'");
    std::set<std::string_view> distinct(rec.ranked_labels.begin(), rec.ranked_labels.end());
    if (distinct.size() != rec.ranked_labels.size())
      fail(ErrorCode::InvalidArgument, text::where(row) + ": ranked labels must be distinct");
    out.push_back(std::move(rec));
  }
  return out;
}

std::string write_predictions(std::span<const PredictionRecord> records) {
  std::string out = "probe_id,true_label,ranked_labels\n";
  for (const auto& r : records) {
    out += r.probe_id + "," + r.true_label + ",";
    for (std::size_t i = 0; i < r.ranked_labels.size(); ++i)
      out += (i ? "|" : "") + r.ranked_labels[i];
    out += "\n";
  }
  return out;
}

std::vector<std::string> label_universe(std::span<const PredictionRecord> records) {
  std::set<std::string> labels;
  for (const auto& r : records) {
    labels.insert(r.true_label);
    if (!r.ranked_labels.empty()) labels.insert(r.ranked_labels.front());
  }
  return {labels.begin(), labels.end()};
}

std::string evaluation_report_json(const ConfusionMatrix& matrix, EmptyClassPolicy policy) {
  const auto stats = per_class_stats(matrix, policy);
  nlohmann::ordered_json j;
  j["probes"] = matrix.total();
  j["averaged"] = stats.average;
  j["balanced"] = stats.balanced;
  j["worst"] = stats.worst;
  j["best"] = stats.best;
  j["sigma"] = stats.sigma;
  j["per_class_accuracy"] = stats.per_class_accuracy;
  j["labels"] = matrix.labels();
  j["confusion_row_normalized"] = matrix.row_normalized();
  return j.dump(2) + "\n";
}

}  // namespace dogid
