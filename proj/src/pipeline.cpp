#include "dogid/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "dogid/error.hpp"
#include "dogid/fusion.hpp"
#include "dogid/matcher.hpp"
#include "text.hpp"

namespace dogid {

namespace fs = std::filesystem;

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string extension_for(const RasterImage& img) { return img.channels() == 1 ? ".pgm" : ".ppm"; }

// File-system safe stem; collisions get a numeric suffix.
class FileNamer {
 public:
  std::string name(std::string_view image_id, std::string_view ext) {
    std::string stem;
    for (char c : image_id) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
      stem += ok ? c : '_';
    }
    std::string candidate = stem + std::string(ext);
    for (int n = 1; !used_.insert(candidate).second; ++n)
      candidate = stem + "_" + std::to_string(n) + std::string(ext);
    return candidate;
  }

 private:
  std::set<std::string> used_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::string relative_to(const fs::path& target, const fs::path& dir) {
  std::error_code ec;
  const auto rel = fs::relative(fs::absolute(target), fs::absolute(dir), ec);
  return ec || rel.empty() ? fs::absolute(target).string() : rel.generic_string();
}

// The face region used by every command that reads a manifest image: the
// annotated box when present, the whole image otherwise.
RasterImage load_view(const DatasetManifest& manifest, const ManifestRow& row) {
  auto img = load_pnm(manifest.resolve(row));
  if (row.box) img = crop(img, *row.box);
  return img;
}

const std::string& label_of(const ManifestRow& row, LabelField field) {
  return field == LabelField::Identity ? row.identity : row.breed;
}

nlohmann::ordered_json stats_json(const PerClassStats& s) {
  nlohmann::ordered_json j;
  j["averaged"] = s.average;
  j["balanced"] = s.balanced;
  j["worst"] = s.worst;
  j["best"] = s.best;
  j["sigma"] = s.sigma;
  return j;
}

nlohmann::ordered_json summary_json(const CrossValSummary& s) {
  nlohmann::ordered_json j;
  j["mean_averaged"] = s.mean_averaged;
  j["mean_balanced"] = s.mean_balanced;
  return j;
}

std::string source_of(const ManifestRow& row) {
  if (ends_with(row.image_id, kFlipSuffix))
    return row.image_id.substr(0, row.image_id.size() - kFlipSuffix.size());
  return row.image_id;
}

struct Views {
  Embedding raw;
  Embedding normalized;
};

struct LabelledViews {
  std::string label;
  Views views;
};

}  // namespace

std::size_t CommandReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const RowOutcome& r) { return !r.ok; }));
}

std::string CommandReport::to_json() const {
  nlohmann::ordered_json j;
  j["rows"] = rows.size();
  j["failures"] = failures();
  auto& arr = j["outcomes"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["image_id"] = r.image_id;
    o["method"] = r.method;
    o["ok"] = r.ok;
    if (!r.ok) o["message"] = r.message;
    arr.push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

CommandReport cmd_normalize(const DatasetManifest& manifest, const LandmarkTable* landmarks,
                            const fs::path& out_dir, int out_side, bool strict) {
  if (out_side < 1) fail(ErrorCode::InvalidArgument, "out_side must be positive");
  ensure_dir(out_dir);
  CommandReport report;
  DatasetManifest out;
  out.base_dir = out_dir;
  FileNamer namer;
  for (const auto& row : manifest.rows) {
    const LandmarkSet* lm = landmarks ? landmarks->find(row.image_id) : nullptr;
    RowOutcome outcome{row.image_id, lm ? "landmarks" : row.box ? "box" : "resize", true, {}};
    try {
      const auto img = load_pnm(manifest.resolve(row));
      RasterImage result = lm        ? normalize_face(img, *lm, out_side)
                           : row.box ? resize(crop(img, *row.box), out_side, out_side)
                                     : resize(img, out_side, out_side);
      const auto file = namer.name(row.image_id, extension_for(result));
      save_pnm(result, out_dir / file);
      ManifestRow n = row;
      n.path = file;
      n.box.reset();
      n.source = outcome.method + ":" + row.image_id;
      out.rows.push_back(std::move(n));
    } catch (const Error& e) {
      outcome.ok = false;
      outcome.message = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    report.rows.push_back(std::move(outcome));
  }
  text::write_file(out_dir / "manifest.csv", write_manifest(out));
  text::write_file(out_dir / "normalize_report.json", report.to_json());
  if (strict && report.failures() > 0)
    fail(ErrorCode::RowFailures,
         std::to_string(report.failures()) + " row(s) failed to normalize; see normalize_report.json");
  return report;
}

CommandReport cmd_augment(const DatasetManifest& manifest, const fs::path& out_dir) {
  for (const auto& row : manifest.rows)
    if (row.augmented || ends_with(row.image_id, kFlipSuffix))
      fail(ErrorCode::AlreadyAugmented, "row '" + row.image_id + "' is already augmented");
  ensure_dir(out_dir);
  CommandReport report;
  DatasetManifest out;
  out.base_dir = out_dir;
  FileNamer namer;
  for (const auto& row : manifest.rows) {
    ManifestRow original = row;
    original.path = relative_to(manifest.resolve(row), out_dir);
    RasterImage flipped = [&] {
      try {
        return flip_horizontal(load_pnm(manifest.resolve(row)));
      } catch (const Error& e) {
        throw Error(e.code(), "row '" + row.image_id + "': " + e.what());
      }
    }();
    ManifestRow aug = row;
    aug.image_id = row.image_id + std::string(kFlipSuffix);
    aug.path = namer.name(aug.image_id, extension_for(flipped));
    aug.augmented = true;
    aug.source = "flip:" + row.image_id;
    // Boxes are mirrored with the image.
    if (row.box)
      aug.box = PixelRect{flipped.width() - row.box->left - row.box->width, row.box->top,
                          row.box->width, row.box->height};
    save_pnm(flipped, out_dir / aug.path);
    out.rows.push_back(std::move(original));
    out.rows.push_back(std::move(aug));
    report.rows.push_back({row.image_id, "flip", true, {}});
  }
  text::write_file(out_dir / "manifest.csv", write_manifest(out));
  return report;
}

FoldAssignment cmd_split(const DatasetManifest& manifest, int k, std::uint64_t seed) {
  std::vector<ImageIdentity> images;
  for (const auto& row : manifest.rows)
    if (!row.augmented && !row.identity.empty()) images.push_back({row.image_id, row.identity});
  return make_folds(images, k, seed);
}

std::string write_folds(const DatasetManifest& manifest, const FoldAssignment& folds) {
  std::string out = "image_id,identity,fold\n";
  for (const auto& row : manifest.rows) {
    const auto it = folds.fold_of.find(row.image_id);
    if (it == folds.fold_of.end()) continue;
    out += row.image_id + "," + row.identity + "," + std::to_string(it->second) + "\n";
  }
  return out;
}

ScoreTable cmd_classify(const DatasetManifest& training, const DatasetManifest* probes,
                        LabelField field, double temperature) {
  std::vector<std::pair<std::string, Embedding>> train;
  std::vector<std::pair<std::string, Embedding>> probe_embs;
  const auto embed_row = [](const DatasetManifest& m, const ManifestRow& row) {
    try {
      return embed_baseline(load_view(m, row));
    } catch (const Error& e) {
      throw Error(e.code(), "image '" + row.image_id + "': " + e.what());
    }
  };
  for (const auto& row : training.rows) {
    const bool is_probe = !probes && row.split == "test";
    if (is_probe) {
      probe_embs.emplace_back(row.image_id, embed_row(training, row));
    } else if (!label_of(row, field).empty()) {
      train.emplace_back(label_of(row, field), embed_row(training, row));
    }
  }
  if (probes)
    for (const auto& row : probes->rows) probe_embs.emplace_back(row.image_id, embed_row(*probes, row));

  const auto centroids = train_centroids(train);
  ScoreTable table;
  for (const auto& [label, c] : centroids) table.labels.push_back(label);
  for (const auto& [id, emb] : probe_embs) table.rows.emplace(id, score_probe(emb, centroids, temperature));
  return table;
}

ScoreTable cmd_rerank(const ScoreTable& scores, const IdentityRegistry& registry,
                      const SoftAttributes& attrs,
                      const std::map<std::string, SoftAttributes>* per_probe, bool fallback_raw) {
  ScoreTable out;
  out.labels = scores.labels;
  for (const auto& [probe, vec] : scores.rows) {
    const SoftAttributes* a = &attrs;
    if (per_probe) {
      const auto it = per_probe->find(probe);
      if (it != per_probe->end()) a = &it->second;
    }
    try {
      auto r = rerank(vec, registry, *a, {fallback_raw});
      out.rows.emplace(probe, std::move(r.posterior));
      out.z.emplace(probe, r.z);
    } catch (const Error& e) {
      throw Error(e.code(), "probe '" + probe + "': " + e.what());
    }
  }
  return out;
}

std::vector<PredictionRecord> predictions_from_scores(const ScoreTable& scores,
                                                      const DatasetManifest& truth,
                                                      LabelField field) {
  std::map<std::string, std::string> label_by_id;
  for (const auto& row : truth.rows) label_by_id.emplace(row.image_id, label_of(row, field));
  std::vector<PredictionRecord> out;
  for (const auto& [probe, vec] : scores.rows) {
    const auto it = label_by_id.find(probe);
    if (it == label_by_id.end() || it->second.empty())
      fail(ErrorCode::UnknownLabel, "probe '" + probe + "' has no true label in the manifest");
    out.push_back({probe, it->second, ranked_labels(vec)});
  }
  return out;
}

ExperimentResult cmd_run_experiment(const RunConfig& config, const DatasetManifest& manifest,
                                    const IdentityRegistry& registry,
                                    const LandmarkTable* landmarks) {
  validate_config(config);
  const FusionWeight weight(config.alpha);
  std::map<std::string, SoftAttributes> overrides;
  if (!config.probe_attributes.empty())
    overrides = read_probe_attributes(text::read_file(config.probe_attributes));

  // Both views of every labelled image, computed once.
  std::map<std::string, Views> views;
  std::map<std::string, Views> flips;  // training-time augmentation, keyed by source id
  std::map<std::string, const ManifestRow*> rows_by_id;
  std::vector<ImageIdentity> base_images;
  std::set<std::string> universe;
  for (const auto& row : manifest.rows) {
    if (row.identity.empty()) continue;
    if (!registry.contains(row.identity))
      fail(ErrorCode::UnknownIdentity,
           "image '" + row.image_id + "': identity '" + row.identity + "' not in registry");
    try {
      const auto raw_img = load_view(manifest, row);
      const auto raw = resize(raw_img, config.out_side, config.out_side);
      const LandmarkSet* lm = landmarks ? landmarks->find(row.image_id) : nullptr;
      const auto norm =
          lm ? normalize_face(load_pnm(manifest.resolve(row)), *lm, config.out_side) : raw;
      views.emplace(row.image_id, Views{embed_baseline(raw), embed_baseline(norm)});
      if (config.augment && !row.augmented)
        flips.emplace(row.image_id, Views{embed_baseline(flip_horizontal(raw)),
                                          embed_baseline(flip_horizontal(norm))});
    } catch (const Error& e) {
      throw Error(e.code(), "image '" + row.image_id + "': " + e.what());
    }
    rows_by_id.emplace(row.image_id, &row);
    universe.insert(row.identity);
    if (!row.augmented) base_images.push_back({row.image_id, row.identity});
  }
  if (base_images.empty()) fail(ErrorCode::EmptyEvaluation, "manifest has no labelled images");
  const std::vector<std::string> labels(universe.begin(), universe.end());
  const auto folds = make_folds(base_images, config.folds, config.seed);

  ExperimentResult result;
  nlohmann::ordered_json report;
  {
    auto& c = report["config"];
    c["alpha"] = config.alpha;
    c["k"] = config.k;
    c["coarse_filter"] = config.coarse_filter;
    c["out_side"] = config.out_side;
    c["seed"] = config.seed;
    c["fallback_raw"] = config.fallback_raw;
    c["temperature"] = config.temperature;
    c["folds"] = config.folds;
    c["augment"] = config.augment;
    c["assist_gender"] = config.assist_gender;
    c["assist_breed"] = config.assist_breed;
    c["empty_class"] = config.empty_class == EmptyClassPolicy::Error ? "error" : "exclude";
  }
  report["images"] = base_images.size();
  report["identities"] = labels.size();
  auto& fold_reports = report["folds"] = nlohmann::ordered_json::array();

  for (int f = 0; f < config.folds; ++f) {
    std::set<std::string> test_ids;
    for (const auto& [id, fold] : folds.fold_of)
      if (fold == f) test_ids.insert(id);

    std::vector<LabelledViews> train;
    for (const auto& [id, v] : views) {
      const auto& row = *rows_by_id.at(id);
      if (row.augmented) {
        if (!test_ids.count(source_of(row))) train.push_back({row.identity, v});
      } else if (!test_ids.count(id)) {
        train.push_back({row.identity, v});
      }
    }
    for (const auto& [src, v] : flips)
      if (!test_ids.count(src)) train.push_back({rows_by_id.at(src)->identity, v});
    for (const auto& id : test_ids)
      if (rows_by_id.at(id)->augmented)
        fail(ErrorCode::AugmentedInTestFold, "augmented image '" + id + "' selected for testing");

    const auto centroids_for = [&](bool normalized_view, bool by_breed) {
      std::vector<std::pair<std::string, Embedding>> samples;
      for (const auto& t : train)
        samples.emplace_back(by_breed ? registry.at(t.label).breed : t.label,
                             normalized_view ? t.views.normalized : t.views.raw);
      return train_centroids(samples);
    };
    const auto id_raw = centroids_for(false, false);
    const auto id_norm = centroids_for(true, false);
    std::optional<CentroidTable> breed_raw, breed_norm;
    if (config.coarse_filter) {
      breed_raw = centroids_for(false, true);
      breed_norm = centroids_for(true, true);
    }

    std::vector<PredictionRecord> default_records, assisted_records;
    for (const auto& id : test_ids) {
      const auto& row = *rows_by_id.at(id);
      const auto& v = views.at(id);
      try {
        auto scores = fuse(score_probe(v.raw, id_raw, config.temperature),
                           score_probe(v.normalized, id_norm, config.temperature), weight);
        if (config.coarse_filter) {
          const auto breed_scores =
              fuse(score_probe(v.raw, *breed_raw, config.temperature),
                   score_probe(v.normalized, *breed_norm, config.temperature), weight);
          try {
            scores = restrict_to_gallery(
                scores, filter_gallery(registry, top_k_breeds(breed_scores, config.k)));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptySubset || !config.fallback_raw) throw;
          }
        }
        default_records.push_back({id, row.identity, ranked_labels(scores)});

        SoftAttributes attrs;
        if (const auto it = overrides.find(id); it != overrides.end()) {
          attrs = it->second;
        } else {
          const auto& truth = registry.at(row.identity);
          if (config.assist_gender) attrs.gender = truth.gender;
          if (config.assist_breed) attrs.breed = truth.breed;
        }
        const auto reranked = rerank(scores, registry, attrs, {config.fallback_raw});
        assisted_records.push_back({id, row.identity, ranked_labels(reranked.posterior)});
      } catch (const Error& e) {
        throw Error(e.code(), "fold " + std::to_string(f) + ", probe '" + id + "': " + e.what());
      }
    }

    nlohmann::ordered_json fr;
    fr["fold"] = f;
    fr["test_probes"] = test_ids.size();
    fr["train_images"] = train.size();
    if (test_ids.empty()) {
      fr["skipped"] = "no test probes";
      fold_reports.push_back(std::move(fr));
      continue;
    }
    try {
      const auto d = per_class_stats(confusion(default_records, labels), config.empty_class);
      const auto a = per_class_stats(confusion(assisted_records, labels), config.empty_class);
      fr["default"] = stats_json(d);
      fr["assisted"] = stats_json(a);
      result.default_folds.push_back(d);
      result.assisted_folds.push_back(a);
    } catch (const Error& e) {
      throw Error(e.code(), "fold " + std::to_string(f) + ": " + e.what());
    }
    fold_reports.push_back(std::move(fr));
    result.default_predictions.insert(result.default_predictions.end(), default_records.begin(),
                                      default_records.end());
    result.assisted_predictions.insert(result.assisted_predictions.end(),
                                       assisted_records.begin(), assisted_records.end());
  }

  result.default_summary = crossval_accuracy(result.default_folds);
  result.assisted_summary = crossval_accuracy(result.assisted_folds);
  report["default"] = summary_json(result.default_summary);
  report["assisted"] = summary_json(result.assisted_summary);
  report["warnings"] = folds.warnings;
  result.report_json = report.dump(2) + "\n";
  return result;
}

}  // namespace dogid
