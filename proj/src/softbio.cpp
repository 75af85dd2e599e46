#include "dogid/softbio.hpp"

#include <vector>

#include "dogid/error.hpp"
#include "text.hpp"

namespace dogid {

std::string_view to_string(Gender g) { return g == Gender::Male ? "male" : "female"; }

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "male") return Gender::Male;
  if (s == "female") return Gender::Female;
  return std::nullopt;
}

void IdentityRegistry::add(std::string identity, std::string breed, Gender gender) {
  if (identity.empty() || breed.empty())
    fail(ErrorCode::EmptyField, "registry identity and breed must be non-empty");
  if (entries_.count(identity))
    fail(ErrorCode::DuplicateIdentity, "duplicate identity '" + identity + "'");
  entries_.emplace(std::move(identity), IdentityAttributes{std::move(breed), gender});
}

bool IdentityRegistry::contains(std::string_view identity) const {
  return entries_.find(identity) != entries_.end();
}

const IdentityAttributes& IdentityRegistry::at(std::string_view identity) const {
  const auto it = entries_.find(identity);
  if (it == entries_.end())
    fail(ErrorCode::UnknownIdentity, "identity '" + std::string(identity) + "' not in registry");
  return it->second;
}

std::set<std::string> IdentityRegistry::breeds() const {
  std::set<std::string> out;
  for (const auto& [id, attrs] : entries_) out.insert(attrs.breed);
  return out;
}

IdentityRegistry read_registry(std::string_view text) {
  const auto rows = text::parse_csv(text);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"identity", "breed", "gender"})
    fail(ErrorCode::MalformedHeader, "registry header must be identity,breed,gender");
  IdentityRegistry registry;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 3)
      fail(ErrorCode::MissingColumn, text::where(row) + ": expected 3 fields");
    for (const auto& f : row.fields)
      if (f.empty()) fail(ErrorCode::EmptyField, text::where(row) + ": empty field");
    const auto gender = parse_gender(row.fields[2]);
    if (!gender)
      fail(ErrorCode::InvalidGender,
           text::where(row) + ": gender must be male or female, got '" + row.fields[2] + "'");
    try {
      registry.add(row.fields[0], row.fields[1], *gender);
    } catch (const Error& e) {
      throw Error(e.code(), text::where(row) + ": " + e.what());
    }
  }
  return registry;
}

IdentityRegistry load_registry(const std::filesystem::path& path) {
  return read_registry(text::read_file(path));
}

int indicator_gender(const IdentityRegistry& registry, std::string_view id,
                     std::optional<Gender> g) {
  const auto& attrs = registry.at(id);
  return !g || attrs.gender == *g ? 1 : 0;
}

int indicator_breed(const IdentityRegistry& registry, std::string_view id,
                    const std::optional<std::string>& b) {
  const auto& attrs = registry.at(id);
  return !b || attrs.breed == *b ? 1 : 0;
}

ReRankResult rerank(const ScoreVector& scores, const IdentityRegistry& registry,
                    const SoftAttributes& attrs, RerankOptions options) {
  const auto& labels = scores.labels();
  std::vector<double> numerator(labels.size());
  ReRankResult result;
  double z = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int gate =
        indicator_gender(registry, labels[i], attrs.gender) * indicator_breed(registry, labels[i], attrs.breed);
    if (gate == 0) result.penalized_labels.insert(labels[i]);
    numerator[i] = scores.scores()[i] * gate;
    z += numerator[i];
  }
  if (!(z > 0.0)) {
    const double raw_total = scores.sum();
    if (!options.fallback_raw || !(raw_total > 0.0))
      fail(ErrorCode::NoCandidateMatches,
           "no identity with a nonzero score matches the soft attributes");
    numerator = scores.scores();
    z = raw_total;
    result.penalized_labels.clear();
    result.fell_back = true;
  }
  for (auto& v : numerator) v /= z;
  result.posterior = ScoreVector(labels, std::move(numerator), true);
  result.z = z;
  return result;
}

Rational identity_prior(const IdentityRegistry& registry, const SoftAttributes& attrs) {
  std::uint64_t matches = 0;
  for (const auto& [id, entry] : registry.entries())
    if (indicator_gender(registry, id, attrs.gender) && indicator_breed(registry, id, attrs.breed))
      ++matches;
  if (matches == 0)
    fail(ErrorCode::NoCandidateMatches, "no registry identity matches the soft attributes");
  return {1, matches};
}

}  // namespace dogid
