#include "dogid/landmarks.hpp"

#include <cmath>

#include "dogid/error.hpp"
#include "text.hpp"

namespace dogid {

namespace {

double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

Point2 rotate_point(Point2 p, Point2 center, double cs, double sn) {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  return {center.x + cs * dx - sn * dy, center.y + sn * dx + cs * dy};
}

const std::array<std::string_view, 17> kHeader = {
    "image_id", "x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4",
    "x5",       "y5", "x6", "y6", "x7", "y7", "x8", "y8"};

}  // namespace

LandmarkSet::LandmarkSet(const std::array<Point2, kLandmarkCount>& points)
    : points_(points) {
  for (const auto& p : points_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      fail(ErrorCode::NonNumericCoordinate, "landmark coordinates must be finite");
  if (points_[0] == points_[1])
    fail(ErrorCode::DegenerateEyes, "right and left eye coincide");
}

void LandmarkTable::add(std::string image_id, LandmarkSet landmarks) {
  if (index_.count(image_id))
    fail(ErrorCode::DuplicateImageId, "duplicate landmark row for image '" + image_id + "'");
  index_.emplace(image_id, records_.size());
  records_.push_back({std::move(image_id), landmarks});
}

const LandmarkSet* LandmarkTable::find(std::string_view image_id) const {
  const auto it = index_.find(std::string(image_id));
  return it == index_.end() ? nullptr : &records_[it->second].landmarks;
}

LandmarkTable parse_landmark_file(std::string_view text) {
  const auto rows = text::parse_csv(text);
  if (rows.empty()) fail(ErrorCode::MissingColumn, "landmark file has no header row");
  const auto& header = rows.front();
  if (header.fields.size() != kHeader.size())
    fail(ErrorCode::MissingColumn, "landmark header must have 17 columns");
  for (std::size_t i = 0; i < kHeader.size(); ++i)
    if (header.fields[i] != kHeader[i])
      fail(ErrorCode::MissingColumn,
           "landmark header column " + std::to_string(i + 1) + " must be '" +
               std::string(kHeader[i]) + "'");

  LandmarkTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != kHeader.size())
      fail(ErrorCode::MissingColumn, text::where(row) + ": expected 17 fields, got " +
                                         std::to_string(row.fields.size()));
    if (row.fields[0].empty())
      fail(ErrorCode::MissingColumn, text::where(row) + ": empty image_id");
    std::array<Point2, kLandmarkCount> pts{};
    for (int i = 0; i < kLandmarkCount; ++i) {
      const auto x = text::parse_double(row.fields[1 + 2 * i]);
      const auto y = text::parse_double(row.fields[2 + 2 * i]);
      if (!x || !y)
        fail(ErrorCode::NonNumericCoordinate,
             text::where(row) + ": non-numeric coordinate for point " + std::to_string(i + 1));
      pts[i] = {*x, *y};
    }
    try {
      table.add(row.fields[0], LandmarkSet(pts));
    } catch (const Error& e) {
      throw Error(e.code(), text::where(row) + ": " + e.what());
    }
  }
  return table;
}

LandmarkTable load_landmark_file(const std::filesystem::path& path) {
  return parse_landmark_file(text::read_file(path));
}

double eye_angle(const LandmarkSet& landmarks) {
  const auto& a = landmarks[Landmark::RightEye];
  const auto& b = landmarks[Landmark::LeftEye];
  return std::atan2(b.y - a.y, b.x - a.x);
}

AlignedLandmarks align_landmarks(const LandmarkSet& landmarks) {
  const auto& a = landmarks[Landmark::RightEye];
  const auto& b = landmarks[Landmark::LeftEye];
  const Point2 center{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
  const double angle = -eye_angle(landmarks);
  if (angle == 0.0) return {landmarks, {center, 0.0}};
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  std::array<Point2, kLandmarkCount> out{};
  for (int i = 0; i < kLandmarkCount; ++i)
    out[i] = rotate_point(landmarks.points()[i], center, cs, sn);
  return {LandmarkSet(out), {center, angle}};
}

FaceBoxDerivation derive_face_box(const LandmarkSet& landmarks) {
  const auto& p1 = landmarks[Landmark::RightEye];
  const auto& p2 = landmarks[Landmark::LeftEye];
  const auto& p3 = landmarks[Landmark::Nose];
  const auto& p6 = landmarks[Landmark::HeadTop];
  if (std::abs(p1.y - p2.y) > kAlignmentTolerance)
    fail(ErrorCode::NotAligned, "landmarks are not eye-aligned; call align_landmarks first");

  FaceBoxDerivation d;
  d.theta = eye_angle(landmarks);
  d.face_width = 3.0 * distance(p1, p2);
  d.centroid = {(p1.x + p2.x + p3.x) / 3.0, (p1.y + p2.y + p3.y) / 3.0};
  const double half_length = distance(d.centroid, p6);
  if (!(half_length > 0.0))
    fail(ErrorCode::NonPositiveLength, "head top coincides with the eye/nose centroid");
  d.base_length = 2.0 * half_length;

  // Smaller y is higher on screen; an ear stands when its tip is above p6.
  double highest_standing = p6.y;
  for (const auto tip : {Landmark::RightEarTip, Landmark::LeftEarTip})
    if (landmarks[tip].y < p6.y) highest_standing = std::min(highest_standing, landmarks[tip].y);
  d.standing_ear_extension = p6.y - highest_standing;

  d.box = {d.centroid.x - d.face_width / 2.0, p6.y - d.standing_ear_extension, d.face_width,
           d.base_length + d.standing_ear_extension};
  return d;
}

RasterImage normalize_face(const RasterImage& image, const LandmarkSet& landmarks,
                           int out_side) {
  if (out_side < 1) fail(ErrorCode::InvalidArgument, "out_side must be positive");
  const auto aligned = align_landmarks(landmarks);
  const auto rotated = rotate_about(image, aligned.rotation.center, aligned.rotation.angle);
  const auto box = derive_face_box(aligned.landmarks).box;
  return resize(crop(rotated, box), out_side, out_side);
}

}  // namespace dogid
