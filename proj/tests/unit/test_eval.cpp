#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>
#include <json.hpp>

#include "dogid/error.hpp"
#include "dogid/eval.hpp"
#include "support/synthetic.hpp"

using namespace dogid;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

std::vector<PredictionRecord> records(
    std::initializer_list<std::pair<std::string, std::string>> truth_predicted) {
  std::vector<PredictionRecord> out;
  for (const auto& [t, p] : truth_predicted)
    out.push_back({"p" + std::to_string(out.size()), t, {p}});
  return out;
}

// class1: 3 of 4 correct, class2: 1 of 1 correct.
ConfusionMatrix three_of_four() {
  return confusion(records({{"c1", "c1"}, {"c1", "c1"}, {"c1", "c1"}, {"c1", "c2"}, {"c2", "c2"}}),
                   {"c1", "c2"});
}

}  // namespace

TEST_CASE("confusion") {
  SUBCASE("all correct gives a diagonal matrix") {
    const auto m = confusion(records({{"a", "a"}, {"b", "b"}, {"b", "b"}}), {"a", "b"});
    CHECK(m.count(0, 0) == 1);
    CHECK(m.count(1, 1) == 2);
    CHECK(m.count(0, 1) == 0);
    CHECK(m.count(1, 0) == 0);
  }
  SUBCASE("single off-diagonal entry") {
    const auto m = confusion(records({{"a", "b"}}), {"a", "b"});
    CHECK(m.count(0, 1) == 1);
    CHECK(m.trace() == 0);
  }
  SUBCASE("unknown label") {
    CHECK(code_of([] { confusion(records({{"a", "z"}}), {"a"}); }) == ErrorCode::UnknownLabel);
  }
  SUBCASE("row-normalised view") {
    const auto rn = three_of_four().row_normalized();
    CHECK(rn[0] == std::vector<double>{0.75, 0.25});
    CHECK(rn[1] == std::vector<double>{0.0, 1.0});
  }
}

TEST_CASE("averaged and balanced accuracy references") {
  const auto m = three_of_four();
  CHECK(averaged_accuracy(m) == 4.0 / 5.0);
  CHECK(balanced_accuracy(m) == 0.875);
  CHECK(averaged_accuracy(confusion(records({{"a", "a"}}), {"a"})) == 1.0);
  CHECK(averaged_accuracy(confusion(records({{"a", "b"}, {"b", "a"}}), {"a", "b"})) == 0.0);
  CHECK(code_of([] { averaged_accuracy(ConfusionMatrix({"a"})); }) == ErrorCode::EmptyEvaluation);
}

TEST_CASE("empty class rows") {
  const auto m = confusion(records({{"a", "a"}, {"a", "b"}}), {"a", "b", "c"});
  CHECK(code_of([&] { balanced_accuracy(m); }) == ErrorCode::EmptyClassRow);
  CHECK(balanced_accuracy(m, EmptyClassPolicy::Exclude) == 0.5);
}

TEST_CASE("per_class_stats") {
  SUBCASE("accuracies 1.0 and 0.5") {
    const auto s = per_class_stats(confusion(records({{"a", "a"}, {"b", "b"}, {"b", "a"}}),
                                             {"a", "b"}));
    CHECK(s.worst == 0.5);
    CHECK(s.best == 1.0);
    CHECK(s.sigma == 0.25);
    CHECK(s.balanced == 0.75);
    CHECK(s.per_class_accuracy.at("b") == 0.5);
  }
  SUBCASE("all perfect") {
    const auto s = per_class_stats(confusion(records({{"a", "a"}, {"b", "b"}}), {"a", "b"}));
    CHECK(s.worst == 1.0);
    CHECK(s.best == 1.0);
    CHECK(s.sigma == 0.0);
  }
  SUBCASE("single class") {
    const auto s = per_class_stats(confusion(records({{"a", "a"}, {"a", "b"}}), {"a", "b"}),
                                   EmptyClassPolicy::Exclude);
    CHECK(s.sigma == 0.0);
    CHECK(s.balanced == s.average);
  }
}

TEST_CASE("metric properties on random matrices") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> classes(1, 12);
  std::uniform_int_distribution<int> per_row(1, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = classes(rng);
    const bool equal_rows = trial % 2 == 0;
    const int m = per_row(rng);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i));
    std::vector<PredictionRecord> recs;
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int i = 0; i < n; ++i) {
      const int rows = equal_rows ? m : per_row(rng);
      for (int r = 0; r < rows; ++r)
        recs.push_back({"p" + std::to_string(recs.size()), labels[i], {labels[pick(rng)]}});
    }
    const auto mat = confusion(recs, labels);
    const double avg = averaged_accuracy(mat);
    const double bal = balanced_accuracy(mat);
    CHECK(avg >= 0.0);
    CHECK(avg <= 1.0);
    CHECK(bal >= 0.0);
    CHECK(bal <= 1.0);
    if (equal_rows) CHECK(std::abs(avg - bal) <= 1e-12);

    // Relabelling every class by one permutation leaves the metrics unchanged.
    std::vector<std::string> perm = labels;
    std::shuffle(perm.begin(), perm.end(), rng);
    auto renamed = recs;
    for (auto& r : renamed) {
      r.true_label = perm[std::stoi(r.true_label.substr(1))];
      r.ranked_labels[0] = perm[std::stoi(r.ranked_labels[0].substr(1))];
    }
    std::vector<std::string> sorted_perm = perm;
    std::sort(sorted_perm.begin(), sorted_perm.end());
    const auto pm = confusion(renamed, sorted_perm);
    CHECK(averaged_accuracy(pm) == avg);
    CHECK(std::abs(balanced_accuracy(pm) - bal) <= 1e-12);
    for (std::size_t i = 0; i < labels.size(); ++i)
      CHECK(pm.row_total(pm.index_of(perm[i])) == mat.row_total(i));
  }
}

TEST_CASE("make_folds") {
  SUBCASE("five images over five folds") {
    std::vector<ImageIdentity> imgs;
    for (int i = 0; i < 5; ++i) imgs.push_back({"img" + std::to_string(i), "dog"});
    const auto f = make_folds(imgs, 5, 3);
    std::vector<int> count(5, 0);
    for (const auto& [id, fold] : f.fold_of) ++count[fold];
    CHECK(count == std::vector<int>{1, 1, 1, 1, 1});
    CHECK(f.warnings.empty());
  }
  SUBCASE("374 images over 42 identities") {
    const auto imgs = testing::flickr_like_images();
    REQUIRE(imgs.size() == 374);
    const auto f = make_folds(imgs, 5, 7);
    CHECK(f.fold_of.size() == 374);
    std::map<std::string, std::vector<int>> per_identity;
    for (const auto& img : imgs) {
      auto& v = per_identity[img.identity];
      v.resize(5);
      ++v[f.fold_of.at(img.image_id)];
    }
    CHECK(per_identity.size() == 42);
    for (const auto& [id, v] : per_identity)
      CHECK(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) <= 1);
    std::size_t covered = 0;
    for (int k = 0; k < 5; ++k) covered += f.images_in(k).size();
    CHECK(covered == 374);
  }
  SUBCASE("determinism and input-order independence") {
    auto imgs = testing::flickr_like_images();
    const auto a = make_folds(imgs, 5, 11);
    std::mt19937_64 rng(1);
    std::shuffle(imgs.begin(), imgs.end(), rng);
    const auto b = make_folds(imgs, 5, 11);
    CHECK(a.fold_of == b.fold_of);
    CHECK(make_folds(imgs, 5, 12).fold_of != a.fold_of);
  }
  SUBCASE("small identities warn") {
    const std::vector<ImageIdentity> imgs = {{"a", "x"}, {"b", "x"}};
    const auto f = make_folds(imgs, 5, 0);
    CHECK(f.warnings.size() == 1);
    CHECK(f.fold_of.size() == 2);
  }
  SUBCASE("errors") {
    const std::vector<ImageIdentity> dup = {{"a", "x"}, {"a", "y"}};
    CHECK(code_of([&] { make_folds(dup, 5, 0); }) == ErrorCode::DuplicateImageId);
    CHECK(code_of([&] { make_folds(dup, 1, 0); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("make_folds partitions random inputs") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ids(1, 20), per(1, 15), kk(2, 7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ImageIdentity> imgs;
    const int n = ids(rng);
    for (int i = 0; i < n; ++i) {
      const int c = per(rng);
      for (int j = 0; j < c; ++j)
        imgs.push_back({"i" + std::to_string(i) + "_" + std::to_string(j), "d" + std::to_string(i)});
    }
    const int k = kk(rng);
    const auto f = make_folds(imgs, k, trial);
    CHECK(f.fold_of.size() == imgs.size());
    std::map<std::string, std::vector<int>> per_identity;
    for (const auto& img : imgs) {
      const int fold = f.fold_of.at(img.image_id);
      CHECK(fold >= 0);
      CHECK(fold < k);
      auto& v = per_identity[img.identity];
      v.resize(k);
      ++v[fold];
    }
    for (const auto& [id, v] : per_identity)
      CHECK(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) <= 1);
  }
}

TEST_CASE("crossval_accuracy") {
  std::vector<PerClassStats> folds(5);
  const double avgs[5] = {0.8, 0.9, 1.0, 0.7, 0.6};
  for (int i = 0; i < 5; ++i) folds[i].average = folds[i].balanced = avgs[i];
  const auto s = crossval_accuracy(folds);
  CHECK(std::abs(s.mean_averaged - 0.8) <= 1e-15);
  CHECK(crossval_accuracy(std::vector<PerClassStats>(1, folds[3])).mean_averaged == 0.7);
  CHECK(code_of([] { crossval_accuracy({}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("prediction files") {
  const std::string text = "probe_id,true_label,ranked_labels\np1,a,a|b\np2,b,a|b\n";
  const auto recs = read_predictions(text);
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].ranked_labels == std::vector<std::string>{"a", "b"});
  CHECK(write_predictions(recs) == text);
  CHECK(label_universe(recs) == std::vector<std::string>{"a", "b"});
  CHECK(code_of([] { read_predictions("probe,true_label,ranked_labels\n"); }) ==
        ErrorCode::MalformedHeader);
  CHECK(code_of([] { read_predictions("probe_id,true_label,ranked_labels\np1,a,a|a\n"); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] {
          read_predictions("probe_id,true_label,ranked_labels\np1,a,a\np1,a,a\n");
        }) == ErrorCode::DuplicateProbeId);
}

TEST_CASE("evaluation report") {
  const auto j = nlohmann::json::parse(evaluation_report_json(three_of_four()));
  CHECK(j["averaged"].get<double>() == 0.8);
  CHECK(j["balanced"].get<double>() == 0.875);
  CHECK(j["probes"].get<int>() == 5);
  CHECK(j["labels"] == nlohmann::json::array({"c1", "c2"}));
  CHECK(j["confusion_row_normalized"][0][1].get<double>() == 0.25);
  for (const char* key : {"worst", "best", "sigma", "per_class_accuracy"}) CHECK(j.contains(key));
}
