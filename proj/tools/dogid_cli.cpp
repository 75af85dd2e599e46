// dogid command-line front end. Uses only the C API in dogid/dogid.h.
//
// Exit codes: 0 success, 1 row-level failures under --strict, 2 any other
// error (configuration, input or I/O).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dogid/dogid.h"

namespace {

constexpr int kExitRowFailures = 1;
constexpr int kExitError = 2;

struct CStringDeleter {
  void operator()(char* s) const { dogid_string_free(s); }
};
using CString = std::unique_ptr<char, CStringDeleter>;

template <typename T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Scores = std::unique_ptr<dogid_scores, HandleDeleter<dogid_scores, dogid_scores_free>>;
using Registry =
    std::unique_ptr<dogid_registry, HandleDeleter<dogid_registry, dogid_registry_free>>;
using Confusion =
    std::unique_ptr<dogid_confusion, HandleDeleter<dogid_confusion, dogid_confusion_free>>;
using Config = std::unique_ptr<dogid_config, HandleDeleter<dogid_config, dogid_config_free>>;

class CommandFailed : public std::exception {
 public:
  explicit CommandFailed(dogid_status status) : status(status) {}
  dogid_status status;
};

void check(dogid_status status) {
  if (status != DOGID_OK) throw CommandFailed(status);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    throw CommandFailed(DOGID_E_IO);
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit(const std::string& out_path, const char* text) {
  if (out_path.empty() || out_path == "-") {
    std::fputs(text, stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    throw CommandFailed(DOGID_E_IO);
  }
}

dogid_gender parse_gender_flag(const std::string& s) {
  if (s == "male") return DOGID_GENDER_MALE;
  if (s == "female") return DOGID_GENDER_FEMALE;
  return DOGID_GENDER_UNKNOWN;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-to-fine animal identification: normalization, fusion, "
               "soft-biometric re-ranking and evaluation"};
  app.set_version_flag("--version", std::string(dogid_version()));
  app.require_subcommand(1);

  // normalize
  std::string manifest, landmarks, out_dir, out, registry, config_path, predictions_dir;
  int out_side = 224;
  bool strict = false;
  auto* normalize = app.add_subcommand("normalize", "Align, crop and resize manifest images");
  normalize->add_option("--manifest", manifest, "Dataset manifest CSV")->required();
  normalize->add_option("--landmarks", landmarks, "Landmark CSV");
  normalize->add_option("--out-dir", out_dir, "Output directory")->required();
  normalize->add_option("--out-side", out_side, "Output side length in pixels")
      ->check(CLI::PositiveNumber);
  normalize->add_flag("--strict", strict, "Exit 1 if any row fails");

  // augment
  auto* augment = app.add_subcommand("augment", "Add a horizontally flipped copy of every row");
  augment->add_option("--manifest", manifest, "Dataset manifest CSV")->required();
  augment->add_option("--out-dir", out_dir, "Output directory")->required();

  // split
  int k = 5;
  std::uint64_t seed = 0;
  auto* split = app.add_subcommand("split", "Assign images to cross-validation folds");
  split->add_option("--manifest", manifest, "Dataset manifest CSV")->required();
  split->add_option("--k", k, "Number of folds")->check(CLI::Range(2, 1000));
  split->add_option("--seed", seed, "Shuffle seed");
  split->add_option("--out", out, "Output fold CSV")->required();

  // classify
  std::string probes, label_field = "identity";
  double temperature = 1.0;
  auto* classify = app.add_subcommand("classify", "Score probes with the baseline classifier");
  classify->add_option("--manifest", manifest, "Training manifest (split=test rows are probes "
                                               "when --probes is absent)")
      ->required();
  classify->add_option("--probes", probes, "Probe manifest");
  classify->add_option("--label", label_field, "Label column")
      ->check(CLI::IsMember({"identity", "breed"}));
  classify->add_option("--temperature", temperature, "Softmax temperature")
      ->check(CLI::PositiveNumber);
  classify->add_option("--out", out, "Output score CSV (default stdout)");

  // fuse
  std::string raw_scores, norm_scores;
  double alpha = 0.5;
  auto* fuse = app.add_subcommand("fuse", "Weighted-sum fusion of two score files");
  fuse->add_option("--raw", raw_scores, "Scores from raw images")->required();
  fuse->add_option("--normalized", norm_scores, "Scores from normalized images")->required();
  fuse->add_option("--alpha", alpha, "Weight of the raw scores")->check(CLI::Range(0.0, 1.0));
  fuse->add_option("--out", out, "Output score CSV (default stdout)");

  // rerank
  std::string scores_path, gender = "unknown", breed = "unknown", attributes;
  bool fallback_raw = false;
  auto* rerank = app.add_subcommand("rerank", "Re-rank identity scores with soft biometrics");
  rerank->add_option("--scores", scores_path, "Identity score CSV")->required();
  rerank->add_option("--registry", registry, "Registry CSV identity,breed,gender")->required();
  rerank->add_option("--gender", gender, "male, female or unknown")
      ->check(CLI::IsMember({"male", "female", "unknown"}));
  rerank->add_option("--breed", breed, "Breed label or unknown");
  rerank->add_option("--attributes", attributes, "Per-probe CSV probe_id,gender,breed");
  rerank->add_flag("--fallback-raw", fallback_raw, "Pass raw scores through when nothing matches");
  rerank->add_option("--out", out, "Output score CSV with z column (default stdout)");

  // evaluate
  std::string predictions;
  bool exclude_empty = false;
  auto* evaluate = app.add_subcommand("evaluate", "Rank-1 accuracy report");
  auto* pred_opt = evaluate->add_option("--predictions", predictions,
                                        "Predictions CSV probe_id,true_label,ranked_labels");
  auto* scores_opt = evaluate->add_option("--scores", scores_path, "Score CSV");
  evaluate->add_option("--manifest", manifest, "Manifest giving true identities for --scores");
  pred_opt->excludes(scores_opt);
  evaluate->add_flag("--exclude-empty", exclude_empty, "Skip classes with no probes");
  evaluate->add_option("--out", out, "Output JSON report (default stdout)");

  // run
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Cross-validated Default vs Assisted experiment");
  run->add_option("--config", config_path, "Config file (key=value)");
  run->add_option("--set", overrides, "Override a config key, e.g. --set alpha=0.7");
  run->add_option("--manifest", manifest, "Dataset manifest CSV")->required();
  run->add_option("--registry", registry, "Registry CSV")->required();
  run->add_option("--landmarks", landmarks, "Landmark CSV");
  run->add_option("--predictions-dir", predictions_dir, "Write per-probe predictions here");
  run->add_option("--out", out, "Output JSON report (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*normalize) {
      char* report = nullptr;
      const auto status = dogid_cmd_normalize(manifest.c_str(), opt(landmarks), out_dir.c_str(),
                                              out_side, strict ? 1 : 0, &report);
      CString guard(report);
      if (report) std::fputs(report, stdout);
      check(status);
    } else if (*augment) {
      char* report = nullptr;
      check(dogid_cmd_augment(manifest.c_str(), out_dir.c_str(), &report));
      CString guard(report);
      std::fputs(report, stdout);
    } else if (*split) {
      char* warnings = nullptr;
      check(dogid_cmd_split(manifest.c_str(), k, seed, out.c_str(), &warnings));
      CString guard(warnings);
      if (std::string(warnings) != "[]") std::cerr << "warnings: " << warnings << "\n";
    } else if (*classify) {
      dogid_scores* s = nullptr;
      check(dogid_cmd_classify(manifest.c_str(), opt(probes), label_field.c_str(), temperature, &s));
      Scores scores(s);
      char* csv = nullptr;
      check(dogid_scores_to_csv(scores.get(), &csv));
      CString guard(csv);
      emit(out, csv);
    } else if (*fuse) {
      dogid_scores *r = nullptr, *n = nullptr, *f = nullptr;
      check(dogid_scores_load(raw_scores.c_str(), &r));
      Scores raw(r);
      check(dogid_scores_load(norm_scores.c_str(), &n));
      Scores norm(n);
      check(dogid_fuse(raw.get(), norm.get(), alpha, &f));
      Scores fused(f);
      char* csv = nullptr;
      check(dogid_scores_to_csv(fused.get(), &csv));
      CString guard(csv);
      emit(out, csv);
    } else if (*rerank) {
      dogid_scores* s = nullptr;
      dogid_registry* g = nullptr;
      check(dogid_scores_load(scores_path.c_str(), &s));
      Scores scores(s);
      check(dogid_registry_load(registry.c_str(), &g));
      Registry reg(g);
      std::optional<std::string> attr_text;
      if (!attributes.empty()) attr_text = slurp(attributes);
      dogid_scores* r = nullptr;
      check(dogid_rerank(scores.get(), reg.get(), parse_gender_flag(gender),
                         breed == "unknown" ? nullptr : breed.c_str(),
                         attr_text ? attr_text->c_str() : nullptr, fallback_raw ? 1 : 0, &r));
      Scores reranked(r);
      char* csv = nullptr;
      check(dogid_scores_to_csv(reranked.get(), &csv));
      CString guard(csv);
      emit(out, csv);
    } else if (*evaluate) {
      dogid_confusion* c = nullptr;
      if (!predictions.empty()) {
        const auto text = slurp(predictions);
        check(dogid_confusion_from_predictions(text.c_str(), &c));
      } else if (!scores_path.empty() && !manifest.empty()) {
        dogid_scores* s = nullptr;
        check(dogid_scores_load(scores_path.c_str(), &s));
        Scores scores(s);
        check(dogid_confusion_from_scores(scores.get(), manifest.c_str(), &c));
      } else {
        std::cerr << "error: evaluate needs --predictions, or --scores with --manifest\n";
        return kExitError;
      }
      Confusion matrix(c);
      char* json = nullptr;
      check(dogid_confusion_report_json(matrix.get(), exclude_empty ? 1 : 0, &json));
      CString guard(json);
      emit(out, json);
    } else if (*run) {
      dogid_config* cfg = nullptr;
      check(config_path.empty() ? dogid_config_create(&cfg)
                                : dogid_config_load(config_path.c_str(), &cfg));
      Config config(cfg);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
          return kExitError;
        }
        check(dogid_config_set(config.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
      }
      char* report = nullptr;
      check(dogid_cmd_run(config.get(), manifest.c_str(), registry.c_str(), opt(landmarks),
                          opt(predictions_dir), &report));
      CString guard(report);
      emit(out, report);
    }
  } catch (const CommandFailed& e) {
    if (e.status != DOGID_E_IO || *dogid_last_error())
      std::cerr << "error [" << dogid_status_name(e.status) << "]: " << dogid_last_error() << "\n";
    return e.status == DOGID_E_ROW_FAILURES ? kExitRowFailures : kExitError;
  }
  return 0;
}
