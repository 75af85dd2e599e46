// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dogid/error.hpp"
#include "dogid/fusion.hpp"
#include "dogid/landmarks.hpp"
#include "dogid/pipeline.hpp"
#include "dogid/softbio.hpp"
#include "support/synthetic.hpp"

using namespace dogid;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kFuseMidpointTol = 1e-12;
constexpr double kMetricTol = 1e-12;
constexpr double kPosteriorSumTol = 1e-9;
constexpr double kScaleInvarianceTol = 1e-12;
constexpr double kAngleTol = 1e-12;
constexpr double kAlignTol = 1e-9;
constexpr int kRandomMatrices = 1000;
constexpr int kRerankCases = 1000;
constexpr int kLandmarkSets = 1000;
constexpr int kNoisySeeds = 20;
constexpr double kRerankBudgetSeconds = 5.0;
constexpr double kEndToEndBudgetSeconds = 60.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Suite {
 public:
  void run(const std::string& name, const std::function<Outcome()>& body) {
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures_ += o.pass ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

Outcome fusion_endpoints() {
  const ScoreVector raw({"a", "b"}, {0.6, 0.4}, true);
  const ScoreVector norm({"a", "b"}, {0.2, 0.8}, true);
  const bool hi = fuse(raw, norm, FusionWeight(1.0)).scores() == raw.scores();
  const bool lo = fuse(raw, norm, FusionWeight(0.0)).scores() == norm.scores();
  const auto mid = fuse(raw, norm, FusionWeight(0.5)).scores();
  const double err = std::max(std::abs(mid[0] - 0.4), std::abs(mid[1] - 0.6));
  return {hi && lo && err <= kFuseMidpointTol,
          std::string("alpha=1 bit-exact ") + (hi ? "yes" : "no") + ", alpha=0 bit-exact " +
              (lo ? "yes" : "no") + ", midpoint error " + fmt(err)};
}

Outcome metric_oracle() {
  // class1: 3 of 4 correct, class2: 1 of 1.
  std::vector<PredictionRecord> recs = {{"p0", "c1", {"c1"}}, {"p1", "c1", {"c1"}},
                                        {"p2", "c1", {"c1"}}, {"p3", "c1", {"c2"}},
                                        {"p4", "c2", {"c2"}}};
  const auto m = confusion(recs, {"c1", "c2"});
  const double avg = averaged_accuracy(m);
  const double bal = balanced_accuracy(m);
  bool ok = std::abs(avg - 0.8) <= kMetricTol && std::abs(bal - 0.875) <= kMetricTol;

  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> classes(1, 15), rows(1, 25);
  double worst = 0.0;
  for (int t = 0; t < kRandomMatrices; ++t) {
    const int n = classes(rng), per = rows(rng);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<PredictionRecord> r;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < per; ++j)
        r.push_back({std::to_string(r.size()), labels[i], {labels[pick(rng)]}});
    const auto cm = confusion(r, labels);
    worst = std::max(worst, std::abs(averaged_accuracy(cm) - balanced_accuracy(cm)));
  }
  ok = ok && worst <= kMetricTol;
  return {ok, "averaged " + fmt(avg) + ", balanced " + fmt(bal) + ", max |avg-bal| over " +
                  std::to_string(kRandomMatrices) + " equal-row matrices " + fmt(worst)};
}

Outcome priors() {
  const auto reg = read_registry(testing::flickr_like_registry_csv());
  std::size_t huskies = 0, male_pugs = 0;
  for (const auto& [id, a] : reg.entries()) {
    huskies += a.breed == "husky";
    male_pugs += a.breed == "pug" && a.gender == Gender::Male;
  }
  const auto any = identity_prior(reg, {});
  const auto mp = identity_prior(reg, {Gender::Male, "pug"});
  const bool ok = reg.size() == 42 && huskies == 21 && male_pugs == 14 && any == Rational{1, 42} &&
                  mp == Rational{1, 14};
  return {ok, "P(unknown,unknown)=" + std::to_string(any.numerator) + "/" +
                  std::to_string(any.denominator) + ", P(male,pug)=" +
                  std::to_string(mp.numerator) + "/" + std::to_string(mp.denominator)};
}

Outcome rerank_properties() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> size(2, 42), coin(0, 1);
  std::uniform_real_distribution<double> score(1e-3, 1.0), factor(0.01, 1.0);
  double worst_sum = 0.0, worst_scale = 0.0;
  int rank_violations = 0;
  for (int t = 0; t < kRerankCases; ++t) {
    const int n = size(rng);
    IdentityRegistry reg;
    std::vector<std::string> labels;
    std::vector<double> raw;
    for (int i = 0; i < n; ++i) {
      labels.push_back("id" + std::to_string(i));
      reg.add(labels.back(), coin(rng) ? "husky" : "pug", coin(rng) ? Gender::Male : Gender::Female);
      raw.push_back(score(rng));
    }
    const std::string truth = labels[std::uniform_int_distribution<int>(0, n - 1)(rng)];
    SoftAttributes attrs;
    if (coin(rng)) attrs.gender = reg.at(truth).gender;
    if (coin(rng)) attrs.breed = reg.at(truth).breed;
    const ScoreVector s(labels, raw, false);
    const auto r = rerank(s, reg, attrs);
    worst_sum = std::max(worst_sum, std::abs(r.posterior.sum() - 1.0));
    if (rank_of(r.posterior, truth) > rank_of(s, truth)) ++rank_violations;
    const double c = factor(rng);
    std::vector<double> scaled;
    for (double v : raw) scaled.push_back(v * c);
    const auto rs = rerank(ScoreVector(labels, scaled, false), reg, attrs);
    for (int i = 0; i < n; ++i)
      worst_scale =
          std::max(worst_scale, std::abs(rs.posterior.scores()[i] - r.posterior.scores()[i]));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_sum <= kPosteriorSumTol && worst_scale <= kScaleInvarianceTol &&
                  rank_violations == 0 && secs < kRerankBudgetSeconds;
  return {ok, std::to_string(kRerankCases) + " cases, max |sum-1| " + fmt(worst_sum) +
                  ", max scale deviation " + fmt(worst_scale) + ", rank violations " +
                  std::to_string(rank_violations) + ", " + fmt(secs) + " s"};
}

Outcome geometry() {
  const auto set = [](Point2 p1, Point2 p2, Point2 p4) {
    return LandmarkSet({p1, p2, Point2{55, 62}, p4, Point2{30, 40}, Point2{55, 24}, Point2{80, 40},
                        Point2{90, 60}});
  };
  const double angle = eye_angle(set({2, 3}, {8, 7}, {20, 60}));
  const double angle_err = std::abs(angle - std::atan2(4.0, 6.0));
  const auto hang = derive_face_box(set({40, 50}, {70, 50}, {20, 60})).box;
  const auto stand = derive_face_box(set({40, 50}, {70, 50}, {25, 10})).box;
  const bool boxes = hang == PixelRect{10, 24, 90, 60} && stand == PixelRect{10, 10, 90, 74};

  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
  double worst_level = 0.0, worst_dist = 0.0;
  for (int t = 0; t < kLandmarkSets; ++t) {
    std::array<Point2, kLandmarkCount> pts{};
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    if (pts[0] == pts[1]) continue;
    const auto out = align_landmarks(LandmarkSet(pts)).landmarks.points();
    worst_level = std::max(worst_level, std::abs(out[0].y - out[1].y));
    for (int i = 0; i < kLandmarkCount; ++i)
      for (int j = i + 1; j < kLandmarkCount; ++j)
        worst_dist = std::max(worst_dist, std::abs(std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) -
                                                   std::hypot(out[i].x - out[j].x, out[i].y - out[j].y)));
  }
  const bool ok = angle_err <= kAngleTol && boxes && worst_level <= kAlignTol &&
                  worst_dist <= kAlignTol;
  return {ok, "eye angle error " + fmt(angle_err) + ", golden boxes " + (boxes ? "exact" : "WRONG") +
                  ", max |y1-y2| " + fmt(worst_level) + ", max distance change " +
                  fmt(worst_dist) + " over " + std::to_string(kLandmarkSets) + " sets"};
}

Outcome crossval_protocol() {
  const auto imgs = testing::flickr_like_images();
  DatasetManifest manifest;
  for (const auto& img : imgs) {
    manifest.rows.push_back({img.image_id, img.image_id + ".pgm", img.identity, "", {}, "", false, ""});
    manifest.rows.push_back({img.image_id + std::string(kFlipSuffix), img.image_id + "_f.pgm",
                             img.identity, "", {}, "", true, "flip:" + img.image_id});
  }
  const auto a = cmd_split(manifest, 5, 42);
  const auto b = cmd_split(manifest, 5, 42);
  std::set<std::string> identities;
  std::map<std::string, std::array<int, 5>> per;
  bool partition = a.fold_of.size() == 374;
  for (const auto& img : imgs) {
    identities.insert(img.identity);
    const auto it = a.fold_of.find(img.image_id);
    if (it == a.fold_of.end() || it->second < 0 || it->second > 4) {
      partition = false;
      continue;
    }
    ++per[img.identity][it->second];
  }
  int spread = 0;
  for (const auto& [id, counts] : per)
    spread = std::max(spread, *std::max_element(counts.begin(), counts.end()) -
                                  *std::min_element(counts.begin(), counts.end()));
  int augmented_in_folds = 0;
  for (const auto& [id, fold] : a.fold_of) augmented_in_folds += id.ends_with(kFlipSuffix);
  const bool ok = imgs.size() == 374 && identities.size() == 42 && partition && spread <= 1 &&
                  a.fold_of == b.fold_of && augmented_in_folds == 0;
  return {ok, std::to_string(a.fold_of.size()) + " images over " +
                  std::to_string(identities.size()) + " identities, max per-identity fold spread " +
                  std::to_string(spread) + ", same seed identical " +
                  (a.fold_of == b.fold_of ? "yes" : "no") + ", augmented rows in folds " +
                  std::to_string(augmented_in_folds)};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  RunConfig config;  // alpha 0.5, out_side 224, five folds, training-only flips
  std::string detail;
  bool ok = true;
  {
    testing::TempDir dir("accept-clean");
    testing::DatasetSpec spec;
    const auto files = testing::write_dog_dataset(dir.path(), spec);
    const auto manifest = load_manifest(files.manifest);
    const auto registry = load_registry(files.registry);
    const auto landmarks = load_landmark_file(files.landmarks);
    const auto r = cmd_run_experiment(config, manifest, registry, &landmarks);
    int flips_evaluated = 0;
    for (const auto& p : r.default_predictions) flips_evaluated += p.probe_id.ends_with(kFlipSuffix);
    ok = ok && r.default_summary.mean_averaged == 1.0 && r.default_predictions.size() == 80 &&
         flips_evaluated == 0;
    detail = "clean Default " + fmt(100.0 * r.default_summary.mean_averaged) + "%, Assisted " +
             fmt(100.0 * r.assisted_summary.mean_averaged) + "%";
  }
  int violations = 0, below_ceiling = 0;
  double min_default = 1.0, min_gain = 1.0, max_gain = 0.0;
  for (int seed = 1; seed <= kNoisySeeds; ++seed) {
    testing::TempDir dir("accept-noisy");
    testing::DatasetSpec spec;
    spec.seed = static_cast<std::uint64_t>(seed);
    spec.noise_sigma = 30.0;
    spec.max_rotation = 0.35;
    spec.texture_blend = 0.75;
    const auto files = testing::write_dog_dataset(dir.path(), spec);
    auto c = config;
    c.seed = static_cast<std::uint64_t>(seed);
    const auto landmarks = load_landmark_file(files.landmarks);
    const auto r = cmd_run_experiment(c, load_manifest(files.manifest),
                                      load_registry(files.registry), &landmarks);
    const double d = r.default_summary.mean_averaged, a = r.assisted_summary.mean_averaged;
    violations += a < d;
    below_ceiling += d < 1.0;
    min_default = std::min(min_default, d);
    min_gain = std::min(min_gain, a - d);
    max_gain = std::max(max_gain, a - d);
  }
  const double secs = seconds_since(t0);
  ok = ok && violations == 0 && secs < kEndToEndBudgetSeconds;
  detail += "; noisy sweep " + std::to_string(kNoisySeeds) + " seeds, Assisted < Default on " +
            std::to_string(violations) + ", Default below 100% on " +
            std::to_string(below_ceiling) + " (min " + fmt(100.0 * min_default) +
            "%), Assisted gain range [" + fmt(100.0 * min_gain) + ", " + fmt(100.0 * max_gain) +
            "] points; " + fmt(secs) + " s";
  return {ok, detail};
}

Outcome external_score_replay() {
  // Score files from an external model pass through fusion, reranking and
  // evaluation unchanged; this is the path that would replay CNN outputs.
  const auto raw = read_scores("probe_id,A,B,C,D\np1,0.1,0.6,0.2,0.1\np2,0.3,0.3,0.2,0.2\n");
  const auto norm = read_scores("probe_id,A,B,C,D\np1,0.5,0.2,0.2,0.1\np2,0.1,0.1,0.7,0.1\n");
  const auto reg = read_registry(
      "identity,breed,gender\nA,husky,female\nB,husky,male\nC,pug,female\nD,pug,male\n");
  const auto fused = fuse_batch(raw, norm, FusionWeight(0.5));
  const auto truth = read_manifest("image_id,path,identity\np1,x,A\np2,y,C\n");
  const auto def = predictions_from_scores(fused, truth, LabelField::Identity);
  const std::map<std::string, SoftAttributes> attrs = {{"p1", {Gender::Female, "husky"}},
                                                       {"p2", {Gender::Female, "pug"}}};
  const auto assisted =
      predictions_from_scores(cmd_rerank(fused, reg, {}, &attrs, false), truth, LabelField::Identity);
  const double d = averaged_accuracy(confusion(def, {"A", "B", "C", "D"}));
  const double a = averaged_accuracy(confusion(assisted, {"A", "B", "C", "D"}));
  const bool ok = d == 0.5 && a == 1.0;
  return {ok, "published CNN accuracy tables are not reproducible at desk scale (GPU training on "
              "the full CU, ST and Flickr-dog corpora); score-file replay verified: Default " +
                  fmt(100.0 * d) + "%, Assisted " + fmt(100.0 * a) + "%"};
}

}  // namespace

int main() {
  Suite suite;
  suite.run("fusion-endpoints", fusion_endpoints);
  suite.run("averaged-balanced-oracle", metric_oracle);
  suite.run("identity-priors", priors);
  suite.run("rerank-properties", rerank_properties);
  suite.run("normalization-geometry", geometry);
  suite.run("crossval-protocol", crossval_protocol);
  suite.run("end-to-end", end_to_end);
  suite.run("cnn-tables-not-reproducible", external_score_replay);
  std::printf("%d criterion(s) failed\n", suite.failures());
  return suite.failures() == 0 ? 0 : 1;
}
