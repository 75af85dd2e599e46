#include "dogid/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "dogid/error.hpp"

namespace dogid {

FusionWeight::FusionWeight(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    fail(ErrorCode::InvalidArgument, "fusion weight alpha must lie in [0, 1]");
}

ScoreVector fuse(const ScoreVector& raw, const ScoreVector& normalized_input, FusionWeight weight) {
  if (raw.labels() != normalized_input.labels())
    fail(ErrorCode::LabelMismatch, "fused score vectors must share labels in the same order");
  const double a = weight.alpha();
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = raw.scores()[i];
    const double n = normalized_input.scores()[i];
    // Equal inputs fuse to themselves exactly; the clamp only absorbs rounding above 1.
    out[i] = r == n ? r : std::min(1.0, a * r + (1.0 - a) * n);
  }
  return ScoreVector(raw.labels(), std::move(out),
                     raw.normalized() && normalized_input.normalized());
}

ScoreTable fuse_batch(const ScoreTable& raw, const ScoreTable& normalized_input,
                      FusionWeight weight) {
  if (raw.labels != normalized_input.labels)
    fail(ErrorCode::LabelMismatch, "score tables must share labels in the same order");
  ScoreTable out;
  out.labels = raw.labels;
  for (const auto& [probe, vec] : raw.rows) {
    const auto it = normalized_input.rows.find(probe);
    if (it == normalized_input.rows.end())
      fail(ErrorCode::ProbeSetMismatch, "probe '" + probe + "' missing from the normalized scores");
    out.rows.emplace(probe, fuse(vec, it->second, weight));
  }
  for (const auto& [probe, vec] : normalized_input.rows)
    if (!raw.rows.count(probe))
      fail(ErrorCode::ProbeSetMismatch, "probe '" + probe + "' missing from the raw scores");
  return out;
}

}  // namespace dogid
