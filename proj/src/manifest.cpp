#include <array>
#include <algorithm>
#include <map>
#include <set>

#include "dogid/error.hpp"
#include "dogid/pipeline.hpp"
#include "text.hpp"

namespace dogid {

namespace {

const std::vector<std::string> kManifestColumns = {
    "image_id",  "path",       "identity", "breed", "box_left", "box_top",
    "box_width", "box_height", "split",    "augmented", "source"};

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no" || s.empty()) return false;
  return std::nullopt;
}

[[noreturn]] void bad_config(std::string_view key, std::string_view value) {
  fail(ErrorCode::InvalidConfig,
       "invalid value '" + std::string(value) + "' for config key '" + std::string(key) + "'");
}

double config_double(std::string_view key, std::string_view value) {
  const auto v = text::parse_double(value);
  if (!v) bad_config(key, value);
  return *v;
}

std::int64_t config_int(std::string_view key, std::string_view value) {
  const auto v = text::parse_int(value);
  if (!v) bad_config(key, value);
  return *v;
}

bool config_bool(std::string_view key, std::string_view value) {
  const auto v = parse_bool(value);
  if (!v || value.empty()) bad_config(key, value);
  return *v;
}

}  // namespace

std::filesystem::path DatasetManifest::resolve(const ManifestRow& row) const {
  const std::filesystem::path p(row.path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

DatasetManifest read_manifest(std::string_view text, std::filesystem::path base_dir) {
  const auto rows = text::parse_csv(text);
  if (rows.empty()) fail(ErrorCode::MalformedHeader, "manifest has no header row");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows.front().fields.size(); ++i)
    if (!col.emplace(rows.front().fields[i], i).second)
      fail(ErrorCode::MalformedHeader, "duplicate manifest column '" + rows.front().fields[i] + "'");
  for (const char* required : {"image_id", "path"})
    if (!col.count(required))
      fail(ErrorCode::MissingColumn, std::string("manifest lacks required column '") + required + "'");
  const int box_cols = static_cast<int>(col.count("box_left") + col.count("box_top") +
                                        col.count("box_width") + col.count("box_height"));
  if (box_cols != 0 && box_cols != 4)
    fail(ErrorCode::MissingColumn, "manifest box columns must appear all together");

  DatasetManifest manifest;
  manifest.base_dir = std::move(base_dir);
  std::set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != rows.front().fields.size())
      fail(ErrorCode::MissingColumn, text::where(row) + ": field count differs from header");
    const auto get = [&](const char* name) -> std::string {
      const auto it = col.find(name);
      return it == col.end() ? std::string() : row.fields[it->second];
    };
    ManifestRow m;
    m.image_id = get("image_id");
    m.path = get("path");
    if (m.image_id.empty() || m.path.empty())
      fail(ErrorCode::EmptyField, text::where(row) + ": image_id and path are required");
    if (!ids.insert(m.image_id).second)
      fail(ErrorCode::DuplicateImageId, text::where(row) + ": duplicate image '" + m.image_id + "'");
    m.identity = get("identity");
    m.breed = get("breed");
    if (box_cols == 4) {
      const std::array<std::string, 4> raw = {get("box_left"), get("box_top"), get("box_width"),
                                              get("box_height")};
      const auto empty = std::count_if(raw.begin(), raw.end(), [](auto& s) { return s.empty(); });
      if (empty == 0) {
        std::array<double, 4> v{};
        for (int i = 0; i < 4; ++i) {
          const auto d = text::parse_double(raw[i]);
          if (!d) fail(ErrorCode::NonNumericValue, text::where(row) + ": non-numeric box value");
          v[i] = *d;
        }
        if (!(v[2] > 0.0) || !(v[3] > 0.0))
          fail(ErrorCode::InvalidArgument, text::where(row) + ": box must have positive area");
        m.box = PixelRect{v[0], v[1], v[2], v[3]};
      } else if (empty != 4) {
        fail(ErrorCode::MissingColumn, text::where(row) + ": partial bounding box");
      }
    }
    m.split = get("split");
    if (!m.split.empty() && m.split != "train" && m.split != "test")
      fail(ErrorCode::InvalidArgument, text::where(row) + ": split must be train or test");
    const auto aug = parse_bool(get("augmented"));
    if (!aug) fail(ErrorCode::InvalidArgument, text::where(row) + ": augmented must be true/false");
    m.augmented = *aug;
    m.source = get("source");
    manifest.rows.push_back(std::move(m));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  return read_manifest(text::read_file(path), path.parent_path());
}

std::string write_manifest(const DatasetManifest& manifest) {
  std::string out;
  for (std::size_t i = 0; i < kManifestColumns.size(); ++i)
    out += (i ? "," : "") + kManifestColumns[i];
  out += "\n";
  for (const auto& r : manifest.rows) {
    out += r.image_id + "," + r.path + "," + r.identity + "," + r.breed + ",";
    if (r.box)
      out += text::format_double(r.box->left) + "," + text::format_double(r.box->top) + "," +
             text::format_double(r.box->width) + "," + text::format_double(r.box->height) + ",";
    else
      out += ",,,,";
    out += r.split + "," + (r.augmented ? "true" : "false") + "," + r.source + "\n";
  }
  return out;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  if (key == "alpha") {
    c.alpha = config_double(key, value);
  } else if (key == "k") {
    const auto v = config_int(key, value);
    if (v < 1) bad_config(key, value);
    c.k = static_cast<std::size_t>(v);
  } else if (key == "coarse_filter") {
    c.coarse_filter = config_bool(key, value);
  } else if (key == "out_side") {
    const auto v = config_int(key, value);
    if (v < 1 || v > 65536) bad_config(key, value);
    c.out_side = static_cast<int>(v);
  } else if (key == "seed") {
    const auto v = config_int(key, value);
    if (v < 0) bad_config(key, value);
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "fallback_raw") {
    c.fallback_raw = config_bool(key, value);
  } else if (key == "temperature") {
    c.temperature = config_double(key, value);
  } else if (key == "folds") {
    const auto v = config_int(key, value);
    if (v < 2 || v > 1000) bad_config(key, value);
    c.folds = static_cast<int>(v);
  } else if (key == "augment") {
    c.augment = config_bool(key, value);
  } else if (key == "assist_gender") {
    c.assist_gender = config_bool(key, value);
  } else if (key == "assist_breed") {
    c.assist_breed = config_bool(key, value);
  } else if (key == "probe_attributes") {
    c.probe_attributes = std::string(value);
  } else if (key == "empty_class") {
    if (value == "error")
      c.empty_class = EmptyClassPolicy::Error;
    else if (value == "exclude")
      c.empty_class = EmptyClassPolicy::Exclude;
    else
      bad_config(key, value);
  } else {
    fail(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
  }
}

void validate_config(const RunConfig& c) {
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0))
    fail(ErrorCode::InvalidConfig, "alpha must lie in [0, 1]");
  if (!(c.temperature > 0.0)) fail(ErrorCode::InvalidConfig, "temperature must be positive");
  if (c.k < 1) fail(ErrorCode::InvalidConfig, "k must be at least 1");
  if (c.out_side < 1) fail(ErrorCode::InvalidConfig, "out_side must be positive");
  if (c.folds < 2) fail(ErrorCode::InvalidConfig, "folds must be at least 2");
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + " lacks '='");
    set_config_value(config, text::trim(line.substr(0, eq)), text::trim(line.substr(eq + 1)));
  }
  validate_config(config);
  return config;
}

std::map<std::string, SoftAttributes> read_probe_attributes(std::string_view text) {
  const auto rows = text::parse_csv(text);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"probe_id", "gender", "breed"})
    fail(ErrorCode::MalformedHeader, "probe attribute header must be probe_id,gender,breed");
  std::map<std::string, SoftAttributes> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 3) fail(ErrorCode::MissingColumn, text::where(row) + ": expected 3 fields");
    SoftAttributes attrs;
    if (row.fields[1] != "unknown") {
      attrs.gender = parse_gender(row.fields[1]);
      if (!attrs.gender)
        fail(ErrorCode::InvalidGender, text::where(row) + ": gender must be male, female or unknown");
    }
    if (row.fields[2].empty()) fail(ErrorCode::EmptyField, text::where(row) + ": empty breed");
    if (row.fields[2] != "unknown") attrs.breed = row.fields[2];
    if (!out.emplace(row.fields[0], attrs).second)
      fail(ErrorCode::DuplicateProbeId, text::where(row) + ": duplicate probe '" + row.fields[0] + "'");
  }
  return out;
}

}  // namespace dogid
