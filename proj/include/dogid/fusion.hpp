#pragma once

#include "dogid/scores.hpp"

namespace dogid {

/// Weight given to the raw-image decision; 1 - alpha goes to the normalised one.
class FusionWeight {
 public:
  /// Throws InvalidArgument outside [0, 1].
  explicit FusionWeight(double alpha = 0.5);
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// alpha * raw + (1 - alpha) * normalized_input, label by label. Both inputs
/// must carry the same labels in the same order (LabelMismatch otherwise).
ScoreVector fuse(const ScoreVector& raw, const ScoreVector& normalized_input, FusionWeight weight);

/// Element-wise fuse over two score tables holding the same probe ids.
ScoreTable fuse_batch(const ScoreTable& raw, const ScoreTable& normalized_input,
                      FusionWeight weight);

}  // namespace dogid
