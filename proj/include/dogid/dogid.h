/*
 * dogid C API.
 *
 * Every fallible call returns a dogid_status. On failure the calling
 * thread's last error message is available from dogid_last_error() until the
 * next failing call on that thread. Objects are opaque handles owned by the
 * caller and released with the matching *_free function. Strings returned
 * through `char**` out-parameters are released with dogid_string_free.
 */
#ifndef DOGID_DOGID_H
#define DOGID_DOGID_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DOGID_BUILDING_LIBRARY)
#    define DOGID_API __declspec(dllexport)
#  else
#    define DOGID_API __declspec(dllimport)
#  endif
#else
#  define DOGID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dogid_status {
  DOGID_OK = 0,
  DOGID_E_INVALID_ARGUMENT = 1,
  DOGID_E_IO = 2,
  DOGID_E_MALFORMED_HEADER = 10,
  DOGID_E_TRUNCATED_PIXEL_DATA = 11,
  DOGID_E_UNSUPPORTED_MAXVAL = 12,
  DOGID_E_EMPTY_AFTER_CLAMP = 13,
  DOGID_E_MISSING_COLUMN = 20,
  DOGID_E_NON_NUMERIC_COORDINATE = 21,
  DOGID_E_DUPLICATE_IMAGE_ID = 22,
  DOGID_E_DEGENERATE_EYES = 23,
  DOGID_E_NOT_ALIGNED = 24,
  DOGID_E_NON_POSITIVE_LENGTH = 25,
  DOGID_E_ZERO_VARIANCE = 30,
  DOGID_E_EMPTY_TRAINING_SET = 31,
  DOGID_E_ZERO_CENTROID = 32,
  DOGID_E_NEGATIVE_SCORE = 33,
  DOGID_E_SCORE_ABOVE_ONE = 34,
  DOGID_E_DUPLICATE_PROBE_ID = 35,
  DOGID_E_EMPTY_SUBSET = 36,
  DOGID_E_NON_NUMERIC_VALUE = 37,
  DOGID_E_LABEL_MISMATCH = 40,
  DOGID_E_PROBE_SET_MISMATCH = 41,
  DOGID_E_UNKNOWN_IDENTITY = 50,
  DOGID_E_NO_CANDIDATE_MATCHES = 51,
  DOGID_E_DUPLICATE_IDENTITY = 52,
  DOGID_E_INVALID_GENDER = 53,
  DOGID_E_EMPTY_FIELD = 54,
  DOGID_E_UNKNOWN_LABEL = 60,
  DOGID_E_EMPTY_EVALUATION = 61,
  DOGID_E_EMPTY_CLASS_ROW = 62,
  DOGID_E_INVALID_CONFIG = 70,
  DOGID_E_ALREADY_AUGMENTED = 71,
  DOGID_E_ROW_FAILURES = 72,
  DOGID_E_AUGMENTED_IN_TEST_FOLD = 73,
  DOGID_E_INTERNAL = 99
} dogid_status;

typedef enum dogid_gender {
  DOGID_GENDER_UNKNOWN = 0,
  DOGID_GENDER_MALE = 1,
  DOGID_GENDER_FEMALE = 2
} dogid_gender;

typedef struct dogid_point {
  double x;
  double y;
} dogid_point;

typedef struct dogid_rect {
  double left;
  double top;
  double width;
  double height;
} dogid_rect;

/* points[0] is landmark 1 (right eye) ... points[7] is landmark 8. */
typedef struct dogid_landmarks {
  dogid_point points[8];
} dogid_landmarks;

typedef struct dogid_face_box {
  double theta;
  dogid_point centroid;
  double face_width;
  double base_length;
  double standing_ear_extension;
  dogid_rect box;
} dogid_face_box;

typedef struct dogid_class_stats {
  double worst;
  double best;
  double sigma;
  double averaged;
  double balanced;
} dogid_class_stats;

typedef struct dogid_image dogid_image;
typedef struct dogid_scores dogid_scores;
typedef struct dogid_registry dogid_registry;
typedef struct dogid_confusion dogid_confusion;
typedef struct dogid_config dogid_config;

/* ---- library ---------------------------------------------------------- */

DOGID_API const char* dogid_version(void);
DOGID_API const char* dogid_status_name(dogid_status status);
DOGID_API const char* dogid_last_error(void);
DOGID_API void dogid_string_free(char* s);

/* ---- raster ----------------------------------------------------------- */

DOGID_API dogid_status dogid_image_create(int width, int height, int channels,
                                          const uint8_t* pixels, dogid_image** out);
DOGID_API dogid_status dogid_image_read_pnm(const uint8_t* bytes, size_t len, dogid_image** out);
/* Writes into buf when capacity suffices; *needed always receives the size. */
DOGID_API dogid_status dogid_image_write_pnm(const dogid_image* image, uint8_t* buf,
                                             size_t capacity, size_t* needed);
DOGID_API dogid_status dogid_image_load(const char* path, dogid_image** out);
DOGID_API dogid_status dogid_image_save(const dogid_image* image, const char* path);
DOGID_API void dogid_image_free(dogid_image* image);

DOGID_API int dogid_image_width(const dogid_image* image);
DOGID_API int dogid_image_height(const dogid_image* image);
DOGID_API int dogid_image_channels(const dogid_image* image);
DOGID_API const uint8_t* dogid_image_pixels(const dogid_image* image);

DOGID_API dogid_status dogid_image_rotate(const dogid_image* image, dogid_point center,
                                          double angle, dogid_image** out);
DOGID_API dogid_status dogid_image_crop(const dogid_image* image, dogid_rect rect,
                                        dogid_image** out);
DOGID_API dogid_status dogid_image_resize(const dogid_image* image, int width, int height,
                                          dogid_image** out);
DOGID_API dogid_status dogid_image_flip(const dogid_image* image, dogid_image** out);

/* ---- landmarks -------------------------------------------------------- */

DOGID_API dogid_status dogid_eye_angle(const dogid_landmarks* landmarks, double* angle);
DOGID_API dogid_status dogid_align_landmarks(const dogid_landmarks* landmarks,
                                             dogid_landmarks* aligned, dogid_point* center,
                                             double* angle);
DOGID_API dogid_status dogid_derive_face_box(const dogid_landmarks* aligned,
                                             dogid_face_box* out);
DOGID_API dogid_status dogid_normalize_face(const dogid_image* image,
                                            const dogid_landmarks* landmarks, int out_side,
                                            dogid_image** out);

/* ---- scores, fusion, re-ranking --------------------------------------- */

DOGID_API dogid_status dogid_scores_parse(const char* csv, dogid_scores** out);
DOGID_API dogid_status dogid_scores_load(const char* path, dogid_scores** out);
DOGID_API dogid_status dogid_scores_save(const dogid_scores* scores, const char* path);
DOGID_API dogid_status dogid_scores_to_csv(const dogid_scores* scores, char** out);
DOGID_API void dogid_scores_free(dogid_scores* scores);

DOGID_API size_t dogid_scores_probe_count(const dogid_scores* scores);
DOGID_API size_t dogid_scores_label_count(const dogid_scores* scores);
/* Probes are ordered by ascending id. Returned pointers live as long as the handle. */
DOGID_API const char* dogid_scores_probe_id(const dogid_scores* scores, size_t probe);
DOGID_API const char* dogid_scores_label(const dogid_scores* scores, size_t label);
DOGID_API dogid_status dogid_scores_row(const dogid_scores* scores, size_t probe,
                                        double* values, size_t count);
DOGID_API int dogid_scores_normalized(const dogid_scores* scores, size_t probe);
/* DOGID_E_INVALID_ARGUMENT when the table carries no z column. */
DOGID_API dogid_status dogid_scores_z(const dogid_scores* scores, size_t probe, double* z);

DOGID_API dogid_status dogid_fuse(const dogid_scores* raw, const dogid_scores* normalized,
                                  double alpha, dogid_scores** out);

DOGID_API dogid_status dogid_registry_parse(const char* csv, dogid_registry** out);
DOGID_API dogid_status dogid_registry_load(const char* path, dogid_registry** out);
DOGID_API void dogid_registry_free(dogid_registry* registry);
DOGID_API size_t dogid_registry_size(const dogid_registry* registry);

/* breed == NULL means unknown. */
DOGID_API dogid_status dogid_indicator_gender(const dogid_registry* registry, const char* identity,
                                              dogid_gender gender, int* out);
DOGID_API dogid_status dogid_indicator_breed(const dogid_registry* registry, const char* identity,
                                             const char* breed, int* out);
DOGID_API dogid_status dogid_identity_prior(const dogid_registry* registry, dogid_gender gender,
                                            const char* breed, uint64_t* numerator,
                                            uint64_t* denominator);
/* Reranks every probe; the result carries a z column. attributes_csv
 * (probe_id,gender,breed) overrides gender/breed per probe and may be NULL. */
DOGID_API dogid_status dogid_rerank(const dogid_scores* scores, const dogid_registry* registry,
                                    dogid_gender gender, const char* breed,
                                    const char* attributes_csv, int fallback_raw,
                                    dogid_scores** out);

/* ---- evaluation ------------------------------------------------------- */

/* Labels are the sorted union of true and top-ranked labels. */
DOGID_API dogid_status dogid_confusion_from_predictions(const char* predictions_csv,
                                                        dogid_confusion** out);
/* Builds predictions from a score table and a manifest's identity column. */
DOGID_API dogid_status dogid_confusion_from_scores(const dogid_scores* scores,
                                                   const char* manifest_path,
                                                   dogid_confusion** out);
DOGID_API void dogid_confusion_free(dogid_confusion* matrix);
DOGID_API size_t dogid_confusion_size(const dogid_confusion* matrix);
DOGID_API const char* dogid_confusion_label(const dogid_confusion* matrix, size_t index);
DOGID_API int64_t dogid_confusion_count(const dogid_confusion* matrix, size_t true_index,
                                        size_t predicted_index);
DOGID_API dogid_status dogid_averaged_accuracy(const dogid_confusion* matrix, double* out);
DOGID_API dogid_status dogid_balanced_accuracy(const dogid_confusion* matrix, int exclude_empty,
                                               double* out);
DOGID_API dogid_status dogid_per_class_stats(const dogid_confusion* matrix, int exclude_empty,
                                             dogid_class_stats* out);
DOGID_API dogid_status dogid_confusion_report_json(const dogid_confusion* matrix,
                                                   int exclude_empty, char** out);

/* ---- pipeline commands ------------------------------------------------ */

DOGID_API dogid_status dogid_config_create(dogid_config** out);
DOGID_API dogid_status dogid_config_parse(const char* text, dogid_config** out);
DOGID_API dogid_status dogid_config_load(const char* path, dogid_config** out);
/* On failure the config is left unchanged. */
DOGID_API dogid_status dogid_config_set(dogid_config* config, const char* key, const char* value);
DOGID_API void dogid_config_free(dogid_config* config);

/* landmarks_path may be NULL. *report (may be NULL) receives the JSON row report. */
DOGID_API dogid_status dogid_cmd_normalize(const char* manifest_path, const char* landmarks_path,
                                           const char* out_dir, int out_side, int strict,
                                           char** report);
DOGID_API dogid_status dogid_cmd_augment(const char* manifest_path, const char* out_dir,
                                         char** report);
/* Writes image_id,identity,fold. *warnings (may be NULL) receives a JSON array. */
DOGID_API dogid_status dogid_cmd_split(const char* manifest_path, int k, uint64_t seed,
                                       const char* out_csv, char** warnings);
/* probe_manifest_path may be NULL; label_field is "identity" or "breed". */
DOGID_API dogid_status dogid_cmd_classify(const char* manifest_path,
                                          const char* probe_manifest_path,
                                          const char* label_field, double temperature,
                                          dogid_scores** out);
/* landmarks_path and predictions_dir may be NULL. */
DOGID_API dogid_status dogid_cmd_run(const dogid_config* config, const char* manifest_path,
                                     const char* registry_path, const char* landmarks_path,
                                     const char* predictions_dir, char** report);

#ifdef __cplusplus
}
#endif

#endif /* DOGID_DOGID_H */
