#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dogid/raster.hpp"
#include "dogid/scores.hpp"
#include "dogid/softbio.hpp"

namespace dogid {

/// Unit-L2-norm feature vector.
class Embedding {
 public:
  /// Throws InvalidArgument unless the norm is within 1e-9 of 1.
  explicit Embedding(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

inline constexpr int kBaselineSide = 32;

/// Gray, 32x32 bilinear, flattened row-major, mean-centred, L2-normalised.
/// Throws ZeroVariance for images that are constant after resampling.
Embedding embed_baseline(const RasterImage& image);

using CentroidTable = std::map<std::string, Embedding>;

/// Per-label mean, re-normalised to unit length.
CentroidTable train_centroids(const std::vector<std::pair<std::string, Embedding>>& training);

/// softmax over labels of -|probe - centroid|^2 / temperature. Labels follow
/// the table's (sorted) order.
ScoreVector score_probe(const Embedding& probe, const CentroidTable& centroids,
                        double temperature = 1.0);

/// The k best labels, best first; ties by ascending label.
std::vector<std::string> top_k_breeds(const ScoreVector& breed_scores, std::size_t k);

struct GallerySubset {
  std::set<std::string> retained_labels;
};

/// Identities whose registered breed is in `breeds`.
GallerySubset filter_gallery(const IdentityRegistry& registry,
                             const std::vector<std::string>& breeds);

/// Zeroes every label outside the subset and renormalises the remainder.
/// Throws EmptySubset when nothing with positive score survives.
ScoreVector restrict_to_gallery(const ScoreVector& scores, const GallerySubset& subset);

}  // namespace dogid
