#include "dogid/dogid.h"

#include <array>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <map>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "dogid/error.hpp"
#include "dogid/eval.hpp"
#include "dogid/fusion.hpp"
#include "dogid/landmarks.hpp"
#include "dogid/pipeline.hpp"
#include "dogid/raster.hpp"
#include "dogid/scores.hpp"
#include "dogid/softbio.hpp"
#include "text.hpp"

struct dogid_image {
  dogid::RasterImage value;
};

struct dogid_scores {
  dogid::ScoreTable table;
  std::vector<std::string> probe_ids;  // index -> probe, ascending
};

struct dogid_registry {
  dogid::IdentityRegistry value;
};

struct dogid_confusion {
  dogid::ConfusionMatrix value;
};

struct dogid_config {
  dogid::RunConfig value;
};

namespace {

static_assert(DOGID_E_MALFORMED_HEADER == static_cast<int>(dogid::ErrorCode::MalformedHeader));
static_assert(DOGID_E_NO_CANDIDATE_MATCHES ==
              static_cast<int>(dogid::ErrorCode::NoCandidateMatches));
static_assert(DOGID_E_AUGMENTED_IN_TEST_FOLD ==
              static_cast<int>(dogid::ErrorCode::AugmentedInTestFold));

thread_local std::string g_last_error;

dogid_status set_error(dogid_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs `body`, mapping exceptions onto status codes. No exception crosses
// the C boundary.
template <typename F>
dogid_status guarded(F&& body) noexcept {
  try {
    body();
    return DOGID_OK;
  } catch (const dogid::Error& e) {
    return set_error(static_cast<dogid_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DOGID_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DOGID_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(DOGID_E_INTERNAL, "unknown error");
  }
}

void require(bool cond, const char* what) {
  if (!cond) dogid::fail(dogid::ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

dogid_image* wrap(dogid::RasterImage img) { return new dogid_image{std::move(img)}; }

dogid_scores* wrap(dogid::ScoreTable table) {
  auto* s = new dogid_scores{std::move(table), {}};
  for (const auto& [probe, vec] : s->table.rows) s->probe_ids.push_back(probe);
  return s;
}

dogid::LandmarkSet to_cpp(const dogid_landmarks& lm) {
  std::array<dogid::Point2, dogid::kLandmarkCount> pts{};
  for (int i = 0; i < dogid::kLandmarkCount; ++i) pts[i] = {lm.points[i].x, lm.points[i].y};
  return dogid::LandmarkSet(pts);
}

dogid_landmarks to_c(const dogid::LandmarkSet& lm) {
  dogid_landmarks out{};
  for (int i = 0; i < dogid::kLandmarkCount; ++i)
    out.points[i] = {lm.points()[i].x, lm.points()[i].y};
  return out;
}

std::optional<dogid::Gender> to_cpp(dogid_gender g) {
  switch (g) {
    case DOGID_GENDER_MALE: return dogid::Gender::Male;
    case DOGID_GENDER_FEMALE: return dogid::Gender::Female;
    case DOGID_GENDER_UNKNOWN: return std::nullopt;
  }
  dogid::fail(dogid::ErrorCode::InvalidGender, "invalid gender value");
}

dogid::SoftAttributes attrs_of(dogid_gender gender, const char* breed) {
  dogid::SoftAttributes a;
  a.gender = to_cpp(gender);
  if (breed) a.breed = std::string(breed);
  return a;
}

dogid::EmptyClassPolicy policy(int exclude_empty) {
  return exclude_empty ? dogid::EmptyClassPolicy::Exclude : dogid::EmptyClassPolicy::Error;
}

const dogid::ScoreVector& row_at(const dogid_scores* s, size_t probe) {
  require(probe < s->probe_ids.size(), "probe index out of range");
  return s->table.rows.at(s->probe_ids[probe]);
}

}  // namespace

extern "C" {

const char* dogid_version(void) { return DOGID_VERSION; }

const char* dogid_status_name(dogid_status status) {
  if (status == DOGID_E_INTERNAL) return "Internal";
  static thread_local std::string name;
  name = dogid::error_code_name(static_cast<dogid::ErrorCode>(status));
  return name.c_str();
}

const char* dogid_last_error(void) { return g_last_error.c_str(); }

void dogid_string_free(char* s) { std::free(s); }

// ---- raster ----------------------------------------------------------------

dogid_status dogid_image_create(int width, int height, int channels, const uint8_t* pixels,
                                dogid_image** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be null");
    dogid::RasterImage img(width, height, channels);
    if (pixels) std::memcpy(img.pixels().data(), pixels, img.pixels().size());
    *out = wrap(std::move(img));
  });
}

dogid_status dogid_image_read_pnm(const uint8_t* bytes, size_t len, dogid_image** out) {
  return guarded([&] {
    require(out != nullptr && (bytes != nullptr || len == 0), "null argument");
    *out = wrap(dogid::read_pnm({bytes, len}));
  });
}

dogid_status dogid_image_write_pnm(const dogid_image* image, uint8_t* buf, size_t capacity,
                                   size_t* needed) {
  return guarded([&] {
    require(image != nullptr && needed != nullptr, "null argument");
    const auto bytes = dogid::write_pnm(image->value);
    *needed = bytes.size();
    if (buf && capacity >= bytes.size()) std::memcpy(buf, bytes.data(), bytes.size());
  });
}

dogid_status dogid_image_load(const char* path, dogid_image** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::load_pnm(path));
  });
}

dogid_status dogid_image_save(const dogid_image* image, const char* path) {
  return guarded([&] {
    require(image != nullptr && path != nullptr, "null argument");
    dogid::save_pnm(image->value, path);
  });
}

void dogid_image_free(dogid_image* image) { delete image; }

int dogid_image_width(const dogid_image* image) { return image ? image->value.width() : 0; }
int dogid_image_height(const dogid_image* image) { return image ? image->value.height() : 0; }
int dogid_image_channels(const dogid_image* image) { return image ? image->value.channels() : 0; }
const uint8_t* dogid_image_pixels(const dogid_image* image) {
  return image ? image->value.pixels().data() : nullptr;
}

dogid_status dogid_image_rotate(const dogid_image* image, dogid_point center, double angle,
                                dogid_image** out) {
  return guarded([&] {
    require(image != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::rotate_about(image->value, {center.x, center.y}, angle));
  });
}

dogid_status dogid_image_crop(const dogid_image* image, dogid_rect rect, dogid_image** out) {
  return guarded([&] {
    require(image != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::crop(image->value, {rect.left, rect.top, rect.width, rect.height}));
  });
}

dogid_status dogid_image_resize(const dogid_image* image, int width, int height,
                                dogid_image** out) {
  return guarded([&] {
    require(image != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::resize(image->value, width, height));
  });
}

dogid_status dogid_image_flip(const dogid_image* image, dogid_image** out) {
  return guarded([&] {
    require(image != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::flip_horizontal(image->value));
  });
}

// ---- landmarks -------------------------------------------------------------

dogid_status dogid_eye_angle(const dogid_landmarks* landmarks, double* angle) {
  return guarded([&] {
    require(landmarks != nullptr && angle != nullptr, "null argument");
    *angle = dogid::eye_angle(to_cpp(*landmarks));
  });
}

dogid_status dogid_align_landmarks(const dogid_landmarks* landmarks, dogid_landmarks* aligned,
                                   dogid_point* center, double* angle) {
  return guarded([&] {
    require(landmarks != nullptr && aligned != nullptr, "null argument");
    const auto a = dogid::align_landmarks(to_cpp(*landmarks));
    *aligned = to_c(a.landmarks);
    if (center) *center = {a.rotation.center.x, a.rotation.center.y};
    if (angle) *angle = a.rotation.angle;
  });
}

dogid_status dogid_derive_face_box(const dogid_landmarks* aligned, dogid_face_box* out) {
  return guarded([&] {
    require(aligned != nullptr && out != nullptr, "null argument");
    const auto d = dogid::derive_face_box(to_cpp(*aligned));
    *out = {d.theta,
            {d.centroid.x, d.centroid.y},
            d.face_width,
            d.base_length,
            d.standing_ear_extension,
            {d.box.left, d.box.top, d.box.width, d.box.height}};
  });
}

dogid_status dogid_normalize_face(const dogid_image* image, const dogid_landmarks* landmarks,
                                  int out_side, dogid_image** out) {
  return guarded([&] {
    require(image != nullptr && landmarks != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::normalize_face(image->value, to_cpp(*landmarks), out_side));
  });
}

// ---- scores ----------------------------------------------------------------

dogid_status dogid_scores_parse(const char* csv, dogid_scores** out) {
  return guarded([&] {
    require(csv != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::read_scores(csv));
  });
}

dogid_status dogid_scores_load(const char* path, dogid_scores** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::load_scores(path));
  });
}

dogid_status dogid_scores_save(const dogid_scores* scores, const char* path) {
  return guarded([&] {
    require(scores != nullptr && path != nullptr, "null argument");
    dogid::save_scores(scores->table, path);
  });
}

dogid_status dogid_scores_to_csv(const dogid_scores* scores, char** out) {
  return guarded([&] {
    require(scores != nullptr && out != nullptr, "null argument");
    *out = dup_string(dogid::write_scores(scores->table));
  });
}

void dogid_scores_free(dogid_scores* scores) { delete scores; }

size_t dogid_scores_probe_count(const dogid_scores* scores) {
  return scores ? scores->probe_ids.size() : 0;
}

size_t dogid_scores_label_count(const dogid_scores* scores) {
  return scores ? scores->table.labels.size() : 0;
}

const char* dogid_scores_probe_id(const dogid_scores* scores, size_t probe) {
  return scores && probe < scores->probe_ids.size() ? scores->probe_ids[probe].c_str() : nullptr;
}

const char* dogid_scores_label(const dogid_scores* scores, size_t label) {
  return scores && label < scores->table.labels.size() ? scores->table.labels[label].c_str()
                                                       : nullptr;
}

dogid_status dogid_scores_row(const dogid_scores* scores, size_t probe, double* values,
                              size_t count) {
  return guarded([&] {
    require(scores != nullptr && values != nullptr, "null argument");
    const auto& row = row_at(scores, probe);
    require(count >= row.size(), "output buffer too small");
    std::copy(row.scores().begin(), row.scores().end(), values);
  });
}

int dogid_scores_normalized(const dogid_scores* scores, size_t probe) {
  if (!scores || probe >= scores->probe_ids.size()) return 0;
  return scores->table.rows.at(scores->probe_ids[probe]).normalized() ? 1 : 0;
}

dogid_status dogid_scores_z(const dogid_scores* scores, size_t probe, double* z) {
  return guarded([&] {
    require(scores != nullptr && z != nullptr, "null argument");
    require(probe < scores->probe_ids.size(), "probe index out of range");
    const auto it = scores->table.z.find(scores->probe_ids[probe]);
    require(it != scores->table.z.end(), "score table has no z column");
    *z = it->second;
  });
}

dogid_status dogid_fuse(const dogid_scores* raw, const dogid_scores* normalized, double alpha,
                        dogid_scores** out) {
  return guarded([&] {
    require(raw != nullptr && normalized != nullptr && out != nullptr, "null argument");
    *out = wrap(dogid::fuse_batch(raw->table, normalized->table, dogid::FusionWeight(alpha)));
  });
}

// ---- registry / soft biometrics --------------------------------------------

dogid_status dogid_registry_parse(const char* csv, dogid_registry** out) {
  return guarded([&] {
    require(csv != nullptr && out != nullptr, "null argument");
    *out = new dogid_registry{dogid::read_registry(csv)};
  });
}

dogid_status dogid_registry_load(const char* path, dogid_registry** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new dogid_registry{dogid::load_registry(path)};
  });
}

void dogid_registry_free(dogid_registry* registry) { delete registry; }

size_t dogid_registry_size(const dogid_registry* registry) {
  return registry ? registry->value.size() : 0;
}

dogid_status dogid_indicator_gender(const dogid_registry* registry, const char* identity,
                                    dogid_gender gender, int* out) {
  return guarded([&] {
    require(registry != nullptr && identity != nullptr && out != nullptr, "null argument");
    *out = dogid::indicator_gender(registry->value, identity, to_cpp(gender));
  });
}

dogid_status dogid_indicator_breed(const dogid_registry* registry, const char* identity,
                                   const char* breed, int* out) {
  return guarded([&] {
    require(registry != nullptr && identity != nullptr && out != nullptr, "null argument");
    std::optional<std::string> b;
    if (breed) b = breed;
    *out = dogid::indicator_breed(registry->value, identity, b);
  });
}

dogid_status dogid_identity_prior(const dogid_registry* registry, dogid_gender gender,
                                  const char* breed, uint64_t* numerator, uint64_t* denominator) {
  return guarded([&] {
    require(registry != nullptr && numerator != nullptr && denominator != nullptr,
            "null argument");
    const auto r = dogid::identity_prior(registry->value, attrs_of(gender, breed));
    *numerator = r.numerator;
    *denominator = r.denominator;
  });
}

dogid_status dogid_rerank(const dogid_scores* scores, const dogid_registry* registry,
                          dogid_gender gender, const char* breed, const char* attributes_csv,
                          int fallback_raw, dogid_scores** out) {
  return guarded([&] {
    require(scores != nullptr && registry != nullptr && out != nullptr, "null argument");
    std::map<std::string, dogid::SoftAttributes> per_probe;
    if (attributes_csv) per_probe = dogid::read_probe_attributes(attributes_csv);
    *out = wrap(dogid::cmd_rerank(scores->table, registry->value, attrs_of(gender, breed),
                                  attributes_csv ? &per_probe : nullptr, fallback_raw != 0));
  });
}

// ---- evaluation ------------------------------------------------------------

dogid_status dogid_confusion_from_predictions(const char* predictions_csv, dogid_confusion** out) {
  return guarded([&] {
    require(predictions_csv != nullptr && out != nullptr, "null argument");
    const auto records = dogid::read_predictions(predictions_csv);
    *out = new dogid_confusion{dogid::confusion(records, dogid::label_universe(records))};
  });
}

dogid_status dogid_confusion_from_scores(const dogid_scores* scores, const char* manifest_path,
                                         dogid_confusion** out) {
  return guarded([&] {
    require(scores != nullptr && manifest_path != nullptr && out != nullptr, "null argument");
    const auto manifest = dogid::load_manifest(manifest_path);
    const auto records =
        dogid::predictions_from_scores(scores->table, manifest, dogid::LabelField::Identity);
    *out = new dogid_confusion{dogid::confusion(records, dogid::label_universe(records))};
  });
}

void dogid_confusion_free(dogid_confusion* matrix) { delete matrix; }

size_t dogid_confusion_size(const dogid_confusion* matrix) {
  return matrix ? matrix->value.size() : 0;
}

const char* dogid_confusion_label(const dogid_confusion* matrix, size_t index) {
  return matrix && index < matrix->value.size() ? matrix->value.labels()[index].c_str() : nullptr;
}

int64_t dogid_confusion_count(const dogid_confusion* matrix, size_t true_index,
                              size_t predicted_index) {
  if (!matrix || true_index >= matrix->value.size() || predicted_index >= matrix->value.size())
    return -1;
  return matrix->value.count(true_index, predicted_index);
}

dogid_status dogid_averaged_accuracy(const dogid_confusion* matrix, double* out) {
  return guarded([&] {
    require(matrix != nullptr && out != nullptr, "null argument");
    *out = dogid::averaged_accuracy(matrix->value);
  });
}

dogid_status dogid_balanced_accuracy(const dogid_confusion* matrix, int exclude_empty,
                                     double* out) {
  return guarded([&] {
    require(matrix != nullptr && out != nullptr, "null argument");
    *out = dogid::balanced_accuracy(matrix->value, policy(exclude_empty));
  });
}

dogid_status dogid_per_class_stats(const dogid_confusion* matrix, int exclude_empty,
                                   dogid_class_stats* out) {
  return guarded([&] {
    require(matrix != nullptr && out != nullptr, "null argument");
    const auto s = dogid::per_class_stats(matrix->value, policy(exclude_empty));
    *out = {s.worst, s.best, s.sigma, s.average, s.balanced};
  });
}

dogid_status dogid_confusion_report_json(const dogid_confusion* matrix, int exclude_empty,
                                         char** out) {
  return guarded([&] {
    require(matrix != nullptr && out != nullptr, "null argument");
    *out = dup_string(dogid::evaluation_report_json(matrix->value, policy(exclude_empty)));
  });
}

// ---- pipeline --------------------------------------------------------------

dogid_status dogid_config_create(dogid_config** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new dogid_config{};
  });
}

dogid_status dogid_config_parse(const char* text, dogid_config** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new dogid_config{dogid::parse_config(text)};
  });
}

dogid_status dogid_config_load(const char* path, dogid_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new dogid_config{dogid::parse_config(dogid::text::read_file(path))};
  });
}

dogid_status dogid_config_set(dogid_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    auto updated = config->value;
    dogid::set_config_value(updated, key, value);
    dogid::validate_config(updated);
    config->value = updated;
  });
}

void dogid_config_free(dogid_config* config) { delete config; }

dogid_status dogid_cmd_normalize(const char* manifest_path, const char* landmarks_path,
                                 const char* out_dir, int out_side, int strict, char** report) {
  if (report) *report = nullptr;
  return guarded([&] {
    require(manifest_path != nullptr && out_dir != nullptr, "null argument");
    const auto manifest = dogid::load_manifest(manifest_path);
    std::optional<dogid::LandmarkTable> landmarks;
    if (landmarks_path) landmarks = dogid::load_landmark_file(landmarks_path);
    try {
      const auto r = dogid::cmd_normalize(manifest, landmarks ? &*landmarks : nullptr, out_dir,
                                          out_side, strict != 0);
      if (report) *report = dup_string(r.to_json());
    } catch (const dogid::Error& e) {
      if (e.code() == dogid::ErrorCode::RowFailures && report)
        *report = dup_string(dogid::text::read_file(std::filesystem::path(out_dir) /
                                                    "normalize_report.json"));
      throw;
    }
  });
}

dogid_status dogid_cmd_augment(const char* manifest_path, const char* out_dir, char** report) {
  if (report) *report = nullptr;
  return guarded([&] {
    require(manifest_path != nullptr && out_dir != nullptr, "null argument");
    const auto r = dogid::cmd_augment(dogid::load_manifest(manifest_path), out_dir);
    if (report) *report = dup_string(r.to_json());
  });
}

dogid_status dogid_cmd_split(const char* manifest_path, int k, uint64_t seed, const char* out_csv,
                             char** warnings) {
  if (warnings) *warnings = nullptr;
  return guarded([&] {
    require(manifest_path != nullptr && out_csv != nullptr, "null argument");
    const auto manifest = dogid::load_manifest(manifest_path);
    const auto folds = dogid::cmd_split(manifest, k, seed);
    dogid::text::write_file(out_csv, dogid::write_folds(manifest, folds));
    if (warnings) *warnings = dup_string(nlohmann::json(folds.warnings).dump());
  });
}

dogid_status dogid_cmd_classify(const char* manifest_path, const char* probe_manifest_path,
                                const char* label_field, double temperature, dogid_scores** out) {
  return guarded([&] {
    require(manifest_path != nullptr && out != nullptr, "null argument");
    const std::string field = label_field ? label_field : "identity";
    require(field == "identity" || field == "breed", "label_field must be identity or breed");
    const auto training = dogid::load_manifest(manifest_path);
    std::optional<dogid::DatasetManifest> probes;
    if (probe_manifest_path) probes = dogid::load_manifest(probe_manifest_path);
    *out = wrap(dogid::cmd_classify(
        training, probes ? &*probes : nullptr,
        field == "identity" ? dogid::LabelField::Identity : dogid::LabelField::Breed, temperature));
  });
}

dogid_status dogid_cmd_run(const dogid_config* config, const char* manifest_path,
                           const char* registry_path, const char* landmarks_path,
                           const char* predictions_dir, char** report) {
  if (report) *report = nullptr;
  return guarded([&] {
    require(config != nullptr && manifest_path != nullptr && registry_path != nullptr,
            "null argument");
    const auto manifest = dogid::load_manifest(manifest_path);
    const auto registry = dogid::load_registry(registry_path);
    std::optional<dogid::LandmarkTable> landmarks;
    if (landmarks_path) landmarks = dogid::load_landmark_file(landmarks_path);
    const auto result = dogid::cmd_run_experiment(config->value, manifest, registry,
                                                  landmarks ? &*landmarks : nullptr);
    if (predictions_dir) {
      std::filesystem::create_directories(predictions_dir);
      const std::filesystem::path dir(predictions_dir);
      dogid::text::write_file(dir / "default_predictions.csv",
                              dogid::write_predictions(result.default_predictions));
      dogid::text::write_file(dir / "assisted_predictions.csv",
                              dogid::write_predictions(result.assisted_predictions));
    }
    if (report) *report = dup_string(result.report_json);
  });
}

}  // extern "C"
