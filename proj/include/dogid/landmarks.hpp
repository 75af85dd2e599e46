#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dogid/raster.hpp"

namespace dogid {

// Anatomical key points, numbered as in the annotation files.
enum class Landmark : int {
  RightEye = 1,
  LeftEye = 2,
  Nose = 3,
  RightEarTip = 4,
  RightEarBase = 5,
  HeadTop = 6,
  LeftEarBase = 7,
  LeftEarTip = 8,
};

inline constexpr int kLandmarkCount = 8;

/// Eight facial key points of one image. All coordinates are finite and the
/// eyes are distinct; the constructor enforces both.
class LandmarkSet {
 public:
  explicit LandmarkSet(const std::array<Point2, kLandmarkCount>& points);

  const Point2& operator[](Landmark which) const {
    return points_[static_cast<int>(which) - 1];
  }
  const std::array<Point2, kLandmarkCount>& points() const noexcept { return points_; }

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;

 private:
  std::array<Point2, kLandmarkCount> points_;
};

struct LandmarkRecord {
  std::string image_id;
  LandmarkSet landmarks;
};

/// Landmark annotations keyed by image id, in file order.
class LandmarkTable {
 public:
  void add(std::string image_id, LandmarkSet landmarks);

  const LandmarkSet* find(std::string_view image_id) const;
  const std::vector<LandmarkRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<LandmarkRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Rotation that maps the original landmarks onto their eye-aligned copy.
struct Rotation {
  Point2 center;
  double angle = 0.0;  // radians, applied as rotate_about(image, center, angle)
};

struct AlignedLandmarks {
  LandmarkSet landmarks;
  Rotation rotation;
};

struct FaceBoxDerivation {
  double theta = 0.0;
  Point2 centroid;
  double face_width = 0.0;
  double base_length = 0.0;
  double standing_ear_extension = 0.0;
  PixelRect box;
};

inline constexpr double kAlignmentTolerance = 1e-6;

/// CSV with header image_id,x1,y1,...,x8,y8.
LandmarkTable parse_landmark_file(std::string_view text);
LandmarkTable load_landmark_file(const std::filesystem::path& path);

/// Angle of the right-eye to left-eye line against the x axis, in (-pi, pi].
double eye_angle(const LandmarkSet& landmarks);

/// Rotates all points by -eye_angle about the eye midpoint.
AlignedLandmarks align_landmarks(const LandmarkSet& landmarks);

/// Face rectangle from eye-aligned landmarks:
///   width  = 3 * |eye1 - eye2|, centred on the eye/nose centroid c;
///   top    = head top, raised to the highest standing ear tip if any ear
///            tip lies strictly above the head top;
///   height = 2 * |c - head top| plus that ear extension.
FaceBoxDerivation derive_face_box(const LandmarkSet& landmarks);

/// Align, crop the derived face box, then resize to out_side x out_side.
RasterImage normalize_face(const RasterImage& image, const LandmarkSet& landmarks,
                           int out_side);

}  // namespace dogid
