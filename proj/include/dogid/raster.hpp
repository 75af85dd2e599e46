#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dogid {

// Pixel coordinates: origin at the top-left corner, x grows rightward and y
// grows downward. Integer coordinates address pixel centres.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct PixelRect {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Row-major 8-bit image with 1 (gray) or 3 (RGB, interleaved) channels.
class RasterImage {
 public:
  /// Zero-filled image. Throws InvalidArgument on non-positive dimensions or
  /// an unsupported channel count.
  RasterImage(int width, int height, int channels);
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels_[index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) { return pixels_[index(x, y, c)]; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_;
  int height_;
  int channels_;
  std::vector<std::uint8_t> pixels_;
};

/// Decodes binary PGM (P5) or PPM (P6) with maxval 255. Header comments are
/// accepted. Trailing bytes after the pixel payload are ignored.
RasterImage read_pnm(std::span<const std::uint8_t> bytes);

/// Encodes as P5 (gray) or P6 (RGB) with a minimal "P5\n<w> <h>\n255\n" header.
std::vector<std::uint8_t> write_pnm(const RasterImage& image);

RasterImage load_pnm(const std::filesystem::path& path);
void save_pnm(const RasterImage& image, const std::filesystem::path& path);

/// Rotates the image content by `angle` radians about `center`: a feature at
/// source point p lands at center + R(angle)(p - center). Output pixels are
/// bilinearly sampled from the inverse-rotated location; locations outside
/// the source pixel grid read as 0.
RasterImage rotate_about(const RasterImage& image, Point2 center, double angle);

/// Copies the pixels covered by `rect` after clamping it to the image. The
/// integer extent is [floor(left), ceil(left + width)) on each axis.
RasterImage crop(const RasterImage& image, const PixelRect& rect);

/// Bilinear resampling with pixel-centre alignment.
RasterImage resize(const RasterImage& image, int out_width, int out_height);

RasterImage flip_horizontal(const RasterImage& image);

/// round(0.299 R + 0.587 G + 0.114 B); gray input is returned unchanged.
RasterImage to_gray(const RasterImage& image);

}  // namespace dogid
