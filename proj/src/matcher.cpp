#include "dogid/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dogid/error.hpp"

namespace dogid {

namespace {

constexpr double kUnitNormTolerance = 1e-9;
// Below this norm a centred vector is treated as zero.
constexpr double kZeroNorm = 1e-12;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorCode::InvalidArgument, "embedding must be non-empty");
  if (std::abs(norm(values_) - 1.0) > kUnitNormTolerance)
    fail(ErrorCode::InvalidArgument, "embedding must have unit L2 norm");
}

Embedding embed_baseline(const RasterImage& image) {
  const auto small = resize(to_gray(image), kBaselineSide, kBaselineSide);
  std::vector<double> v(small.pixels().begin(), small.pixels().end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
  const double n = norm(v);
  if (n < kZeroNorm) fail(ErrorCode::ZeroVariance, "image has no intensity variation");
  for (double& x : v) x /= n;
  return Embedding(std::move(v));
}

CentroidTable train_centroids(const std::vector<std::pair<std::string, Embedding>>& training) {
  if (training.empty()) fail(ErrorCode::EmptyTrainingSet, "no training embeddings");
  const std::size_t dim = training.front().second.size();
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
  for (const auto& [label, emb] : training) {
    if (emb.size() != dim)
      fail(ErrorCode::InvalidArgument, "training embeddings differ in dimension");
    auto& [sum, count] = sums[label];
    if (sum.empty()) sum.assign(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) sum[i] += emb.values()[i];
    ++count;
  }
  CentroidTable out;
  for (auto& [label, acc] : sums) {
    auto& [sum, count] = acc;
    for (double& x : sum) x /= static_cast<double>(count);
    const double n = norm(sum);
    if (n < kZeroNorm)
      fail(ErrorCode::ZeroCentroid, "mean embedding of '" + label + "' is the zero vector");
    for (double& x : sum) x /= n;
    out.emplace(label, Embedding(std::move(sum)));
  }
  return out;
}

ScoreVector score_probe(const Embedding& probe, const CentroidTable& centroids,
                        double temperature) {
  if (centroids.empty()) fail(ErrorCode::EmptyTrainingSet, "no centroids to score against");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    fail(ErrorCode::InvalidArgument, "temperature must be positive");
  std::vector<std::string> labels;
  std::vector<double> logits;
  for (const auto& [label, c] : centroids) {
    if (c.size() != probe.size())
      fail(ErrorCode::InvalidArgument, "probe and centroid dimensions differ");
    double d2 = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double d = probe.values()[i] - c.values()[i];
      d2 += d * d;
    }
    labels.push_back(label);
    logits.push_back(-d2 / temperature);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) total += (l = std::exp(l - top));
  for (double& l : logits) l /= total;
  return ScoreVector(std::move(labels), std::move(logits), true);
}

std::vector<std::string> top_k_breeds(const ScoreVector& breed_scores, std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be at least 1");
  auto ranked = ranked_labels(breed_scores);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

GallerySubset filter_gallery(const IdentityRegistry& registry,
                             const std::vector<std::string>& breeds) {
  if (breeds.empty()) fail(ErrorCode::InvalidArgument, "breed list must be non-empty");
  GallerySubset subset;
  for (const auto& [id, attrs] : registry.entries())
    if (std::find(breeds.begin(), breeds.end(), attrs.breed) != breeds.end())
      subset.retained_labels.insert(id);
  if (subset.retained_labels.empty())
    fail(ErrorCode::EmptySubset, "no identity belongs to the selected breeds");
  return subset;
}

ScoreVector restrict_to_gallery(const ScoreVector& scores, const GallerySubset& subset) {
  std::vector<double> kept(scores.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (subset.retained_labels.count(scores.labels()[i])) {
      kept[i] = scores.scores()[i];
      total += kept[i];
    }
  }
  if (!(total > 0.0))
    fail(ErrorCode::EmptySubset, "no scored label survives the gallery filter");
  for (double& v : kept) v /= total;
  return ScoreVector(scores.labels(), std::move(kept), true);
}

}  // namespace dogid
