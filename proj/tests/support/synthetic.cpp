#include "synthetic.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <unistd.h>

namespace dogid::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("dogid-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

struct Identity {
  std::string name;
  std::string breed;
  std::string gender;
};

std::vector<Identity> dog_identities() {
  std::vector<Identity> out;
  for (const char* breed : {"husky", "pug"})
    for (const char* gender : {"male", "female"})
      for (int dog = 0; dog < 2; ++dog)
        out.push_back({std::string(breed) + "-" + gender[0] + std::to_string(dog), breed, gender});
  return out;
}

double texture(int identity, double x, double y, int side) {
  const double orient = identity * std::numbers::pi / 8.0;
  const double freq = 2.0 * std::numbers::pi * (3.0 + identity) / side;
  const double u = x * std::cos(orient) + y * std::sin(orient);
  const double v = -x * std::sin(orient) + y * std::cos(orient);
  return 70.0 * std::sin(freq * u + identity) + 40.0 * std::cos(0.5 * freq * v);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

std::array<Point2, kLandmarkCount> canonical_landmarks(int side) {
  const double s = side / 96.0;
  const std::array<Point2, kLandmarkCount> base = {{
      {36, 40}, {60, 40}, {48, 52}, {24, 50}, {30, 30}, {48, 20}, {66, 30}, {72, 50}}};
  std::array<Point2, kLandmarkCount> out{};
  for (int i = 0; i < kLandmarkCount; ++i) out[i] = {base[i].x * s, base[i].y * s};
  return out;
}

DatasetFiles write_dog_dataset(const fs::path& dir, const DatasetSpec& spec) {
  fs::create_directories(dir / "images");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto ids = dog_identities();

  DatasetFiles files;
  files.manifest = dir / "manifest.csv";
  files.registry = dir / "registry.csv";
  if (spec.with_landmarks) files.landmarks = dir / "landmarks.csv";

  std::ostringstream manifest, registry, lms;
  lms << std::setprecision(17);
  manifest << "image_id,path,identity,breed\n";
  registry << "identity,breed,gender\n";
  lms << "image_id";
  for (int i = 1; i <= kLandmarkCount; ++i) lms << ",x" << i << ",y" << i;
  lms << "\n";

  const auto canon = canonical_landmarks(spec.side);
  const Point2 eye_mid{(canon[0].x + canon[1].x) / 2, (canon[0].y + canon[1].y) / 2};
  for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
    const auto& who = ids[i];
    files.identities.push_back(who.name);
    registry << who.name << "," << who.breed << "," << who.gender << "\n";
    for (int n = 0; n < spec.images_per_identity; ++n) {
      const int other = static_cast<int>(unit(rng) * ids.size()) % static_cast<int>(ids.size());
      const double mix = spec.texture_blend * unit(rng);
      RasterImage img(spec.side, spec.side, 1);
      for (int y = 0; y < spec.side; ++y)
        for (int x = 0; x < spec.side; ++x) {
          const double t = (1.0 - mix) * texture(i, x, y, spec.side) +
                           mix * texture(other, x, y, spec.side);
          img.at(x, y) = static_cast<std::uint8_t>(std::clamp(128.0 + t + noise(rng), 0.0, 255.0));
        }
      const double angle = spec.max_rotation * (2.0 * unit(rng) - 1.0);
      auto points = canon;
      if (angle != 0.0) {
        img = rotate_about(img, eye_mid, angle);
        const double c = std::cos(angle), s = std::sin(angle);
        for (auto& p : points) {
          const double dx = p.x - eye_mid.x, dy = p.y - eye_mid.y;
          p = {eye_mid.x + c * dx - s * dy, eye_mid.y + s * dx + c * dy};
        }
      }
      const std::string image_id = who.name + "_" + std::to_string(n);
      save_pnm(img, dir / "images" / (image_id + ".pgm"));
      manifest << image_id << ",images/" << image_id << ".pgm," << who.name << "," << who.breed
               << "\n";
      lms << image_id;
      for (const auto& p : points) lms << "," << p.x << "," << p.y;
      lms << "\n";
    }
  }
  write_text(files.manifest, manifest.str());
  write_text(files.registry, registry.str());
  if (spec.with_landmarks) write_text(files.landmarks, lms.str());
  return files;
}

std::vector<ImageIdentity> flickr_like_images() {
  std::vector<ImageIdentity> out;
  for (int id = 0; id < 42; ++id) {
    const int count = id < 38 ? 9 : 8;
    const std::string name = (id < 10 ? "id0" : "id") + std::to_string(id);
    for (int n = 0; n < count; ++n) out.push_back({name + "_img" + std::to_string(n), name});
  }
  return out;
}

std::string flickr_like_registry_csv() {
  std::string csv = "identity,breed,gender\n";
  for (int id = 0; id < 42; ++id) {
    const std::string name = (id < 10 ? "id0" : "id") + std::to_string(id);
    const bool pug = id >= 21;
    const bool male = pug ? id - 21 < 14 : id % 2 == 0;
    csv += name + (pug ? ",pug," : ",husky,") + (male ? "male" : "female") + "\n";
  }
  return csv;
}

RasterImage random_image(std::mt19937_64& rng, int width, int height, int channels) {
  RasterImage img(width, height, channels);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(byte(rng));
  return img;
}

}  // namespace dogid::testing
