#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "dogid/scores.hpp"

namespace dogid {

enum class Gender { Male, Female };

std::string_view to_string(Gender g);
/// Parses "male"/"female" (case-sensitive). Anything else is nullopt.
std::optional<Gender> parse_gender(std::string_view s);

struct IdentityAttributes {
  std::string breed;
  Gender gender;
};

/// identity label -> (breed, gender). Immutable once loaded.
class IdentityRegistry {
 public:
  void add(std::string identity, std::string breed, Gender gender);

  bool contains(std::string_view identity) const;
  /// Throws UnknownIdentity.
  const IdentityAttributes& at(std::string_view identity) const;

  const std::map<std::string, IdentityAttributes, std::less<>>& entries() const noexcept {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }
  std::set<std::string> breeds() const;

 private:
  std::map<std::string, IdentityAttributes, std::less<>> entries_;
};

/// Query-side attributes. An empty optional means "unknown", which makes the
/// corresponding indicator vacuously 1.
struct SoftAttributes {
  std::optional<Gender> gender;
  std::optional<std::string> breed;
};

struct ReRankResult {
  ScoreVector posterior;
  double z = 0.0;
  std::set<std::string> penalized_labels;
  bool fell_back = false;  // true when Z was 0 and raw scores were passed through
};

struct RerankOptions {
  /// On Z = 0, return the raw scores renormalised instead of failing.
  bool fallback_raw = false;
};

struct Rational {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / denominator; }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// CSV with header `identity,breed,gender`.
IdentityRegistry read_registry(std::string_view text);
IdentityRegistry load_registry(const std::filesystem::path& path);

int indicator_gender(const IdentityRegistry& registry, std::string_view id,
                     std::optional<Gender> g);
int indicator_breed(const IdentityRegistry& registry, std::string_view id,
                    const std::optional<std::string>& b);

/// P(id | g, b; s) = Score(id) * Ind_G(id; g) * Ind_B(id; b) / Z.
/// Throws UnknownIdentity for labels missing from the registry and
/// NoCandidateMatches when Z = 0 (unless options.fallback_raw).
ReRankResult rerank(const ScoreVector& scores, const IdentityRegistry& registry,
                    const SoftAttributes& attrs, RerankOptions options = {});

/// 1 / |{id : both indicators are 1}|, exactly.
Rational identity_prior(const IdentityRegistry& registry, const SoftAttributes& attrs);

}  // namespace dogid
