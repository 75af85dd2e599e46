#include "dogid/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dogid/error.hpp"
#include "text.hpp"

namespace dogid {

ScoreVector::ScoreVector(std::vector<std::string> labels, std::vector<double> scores,
                         bool normalized)
    : labels_(std::move(labels)), scores_(std::move(scores)), normalized_(normalized) {
  if (labels_.size() != scores_.size())
    fail(ErrorCode::InvalidArgument, "score vector labels and scores differ in length");
  std::set<std::string_view> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second)
      fail(ErrorCode::InvalidArgument, "duplicate label '" + l + "' in score vector");
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (!std::isfinite(scores_[i]) || scores_[i] < 0.0)
      fail(ErrorCode::NegativeScore, "score for '" + labels_[i] + "' is negative or not finite");
    if (scores_[i] > 1.0)
      fail(ErrorCode::ScoreAboveOne, "score for '" + labels_[i] + "' exceeds 1");
  }
  if (normalized_ && std::abs(sum() - 1.0) > kNormalizedTolerance)
    fail(ErrorCode::InvalidArgument, "score vector flagged normalized does not sum to 1");
}

std::optional<double> ScoreVector::score_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return scores_[i];
  return std::nullopt;
}

double ScoreVector::sum() const { return std::accumulate(scores_.begin(), scores_.end(), 0.0); }

std::vector<std::string> ranked_labels(const ScoreVector& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& s = scores.scores();
  const auto& l = scores.labels();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return l[a] < l[b];
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(l[i]);
  return out;
}

std::size_t rank_of(const ScoreVector& scores, std::string_view label) {
  const auto ranked = ranked_labels(scores);
  const auto it = std::find(ranked.begin(), ranked.end(), label);
  if (it == ranked.end())
    fail(ErrorCode::UnknownLabel, "label '" + std::string(label) + "' not in score vector");
  return static_cast<std::size_t>(it - ranked.begin()) + 1;
}

ScoreTable read_scores(std::string_view text) {
  const auto rows = text::parse_csv(text);
  if (rows.empty()) fail(ErrorCode::MalformedHeader, "score file has no header row");
  const auto& header = rows.front().fields;
  if (header.size() < 2 || header[0] != "probe_id")
    fail(ErrorCode::MalformedHeader, "score header must be probe_id,<label1>,...");
  ScoreTable table;
  table.labels.assign(header.begin() + 1, header.end());
  bool has_z = false;
  if (table.labels.back() == "z") {
    has_z = true;
    table.labels.pop_back();
    if (table.labels.empty()) fail(ErrorCode::MalformedHeader, "score header has no labels");
  }
  {
    std::set<std::string_view> seen;
    for (const auto& l : table.labels)
      if (l.empty() || !seen.insert(l).second)
        fail(ErrorCode::MalformedHeader, "score header labels must be non-empty and distinct");
  }

  std::vector<std::pair<std::string, std::vector<double>>> parsed;
  std::set<std::string> probes;
  bool all_normalized = true;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size())
      fail(ErrorCode::MissingColumn, text::where(row) + ": expected " +
                                         std::to_string(header.size()) + " fields");
    const auto& probe = row.fields[0];
    if (probe.empty()) fail(ErrorCode::EmptyField, text::where(row) + ": empty probe_id");
    std::vector<double> values;
    for (std::size_t i = 1; i <= table.labels.size(); ++i) {
      const auto v = text::parse_double(row.fields[i]);
      if (!v)
        fail(ErrorCode::NonNumericValue, text::where(row) + ": non-numeric score '" +
                                             row.fields[i] + "'");
      if (*v < 0.0)
        fail(ErrorCode::NegativeScore, text::where(row) + ": negative score for '" +
                                           table.labels[i - 1] + "'");
      if (*v > 1.0)
        fail(ErrorCode::ScoreAboveOne, text::where(row) + ": score above 1 for '" +
                                           table.labels[i - 1] + "'");
      values.push_back(*v);
    }
    if (has_z) {
      const auto z = text::parse_double(row.fields.back());
      if (!z) fail(ErrorCode::NonNumericValue, text::where(row) + ": non-numeric z");
      table.z[probe] = *z;
    }
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    all_normalized = all_normalized && std::abs(sum - 1.0) <= kNormalizedTolerance;
    if (!probes.insert(probe).second)
      fail(ErrorCode::DuplicateProbeId, text::where(row) + ": duplicate probe '" + probe + "'");
    parsed.emplace_back(probe, std::move(values));
  }
  for (auto& [probe, values] : parsed)
    table.rows.emplace(probe, ScoreVector(table.labels, std::move(values), all_normalized));
  return table;
}

ScoreTable load_scores(const std::filesystem::path& path) {
  return read_scores(text::read_file(path));
}

std::string write_scores(const ScoreTable& table) {
  const bool with_z = !table.z.empty();
  std::string out = "probe_id";
  for (const auto& l : table.labels) out += "," + l;
  if (with_z) out += ",z";
  out += "\n";
  for (const auto& [probe, vec] : table.rows) {
    if (vec.labels() != table.labels)
      fail(ErrorCode::LabelMismatch, "probe '" + probe + "' has a different label list");
    out += probe;
    for (double s : vec.scores()) out += "," + text::format_double(s);
    if (with_z) {
      const auto it = table.z.find(probe);
      out += "," + (it == table.z.end() ? std::string("nan") : text::format_double(it->second));
    }
    out += "\n";
  }
  return out;
}

void save_scores(const ScoreTable& table, const std::filesystem::path& path) {
  text::write_file(path, write_scores(table));
}

}  // namespace dogid
