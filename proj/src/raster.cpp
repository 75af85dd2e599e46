#include "dogid/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dogid/error.hpp"
#include "text.hpp"

namespace dogid {

namespace {

// Sample positions this close to an integer are snapped onto it, so that
// exact symmetries (e.g. a half turn) do not leak through rounding noise.
constexpr double kSnap = 1e-9;

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= kSnap ? r : v;
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads a decimal integer.
  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !is_digit(bytes_[pos_]))
      fail(ErrorCode::MalformedHeader, "expected a decimal number in PNM header");
    long long value = 0;
    while (pos_ < bytes_.size() && is_digit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000)
        fail(ErrorCode::MalformedHeader, "PNM header value out of range");
      ++pos_;
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
      fail(ErrorCode::MalformedHeader, "missing whitespace after maxval");
    return pos_ + 1;
  }

 private:
  static bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }
  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

// Bilinear sample at a real position; positions off the pixel grid give 0.
double sample(const RasterImage& img, double x, double y, int c) {
  x = snap(x);
  y = snap(y);
  if (x < 0.0 || y < 0.0 || x > img.width() - 1 || y > img.height() - 1) return 0.0;
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
  const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels)
    : RasterImage(width, height, channels,
                  std::vector<std::uint8_t>(
                      width > 0 && height > 0 && channels > 0
                          ? static_cast<std::size_t>(width) * height * channels
                          : 0)) {}

RasterImage::RasterImage(int width, int height, int channels,
                         std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1)
    fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
  if (channels != 1 && channels != 3)
    fail(ErrorCode::InvalidArgument, "image must have 1 or 3 channels");
  if (pixels_.size() != static_cast<std::size_t>(width) * height * channels)
    fail(ErrorCode::InvalidArgument, "pixel count does not match width*height*channels");
}

RasterImage read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    fail(ErrorCode::MalformedHeader, "not a binary PGM/PPM file (expected P5 or P6)");
  const int channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader header(bytes);
  const int width = header.next_int();
  const int height = header.next_int();
  const int maxval = header.next_int();
  if (width < 1 || height < 1)
    fail(ErrorCode::MalformedHeader, "PNM dimensions must be positive");
  if (maxval != 255)
    fail(ErrorCode::UnsupportedMaxval,
         "PNM maxval " + std::to_string(maxval) + " is not supported (need 255)");
  const std::size_t offset = header.payload_offset();
  const std::size_t needed = static_cast<std::size_t>(width) * height * channels;
  const std::size_t available = bytes.size() > offset ? bytes.size() - offset : 0;
  if (available < needed)
    fail(ErrorCode::TruncatedPixelData,
         "PNM payload has " + std::to_string(available) + " bytes, expected " +
             std::to_string(needed));
  auto payload = bytes.subspan(offset, needed);
  return RasterImage(width, height, channels, {payload.begin(), payload.end()});
}

std::vector<std::uint8_t> write_pnm(const RasterImage& image) {
  const std::string header = std::string(image.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  return out;
}

RasterImage load_pnm(const std::filesystem::path& path) {
  const auto bytes = text::read_binary(path);
  try {
    return read_pnm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_pnm(const RasterImage& image, const std::filesystem::path& path) {
  text::write_binary(path, write_pnm(image));
}

RasterImage rotate_about(const RasterImage& image, Point2 center, double angle) {
  if (!std::isfinite(angle)) fail(ErrorCode::InvalidArgument, "rotation angle must be finite");
  if (angle == 0.0) return image;
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  RasterImage out(image.width(), image.height(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      // Inverse map: source = center + R(-angle)(dest - center).
      const double dx = x - center.x;
      const double dy = y - center.y;
      const double sx = center.x + cs * dx + sn * dy;
      const double sy = center.y - sn * dx + cs * dy;
      for (int c = 0; c < image.channels(); ++c)
        out.at(x, y, c) = to_byte(sample(image, sx, sy, c));
    }
  }
  return out;
}

RasterImage crop(const RasterImage& image, const PixelRect& rect) {
  if (!(rect.width > 0.0) || !(rect.height > 0.0) || !std::isfinite(rect.left) ||
      !std::isfinite(rect.top) || !std::isfinite(rect.width) || !std::isfinite(rect.height))
    fail(ErrorCode::InvalidArgument, "crop rectangle must have positive finite extent");
  const auto lo = [](double v, int limit) {
    return static_cast<long long>(std::clamp(std::floor(snap(v)), 0.0, double(limit)));
  };
  const auto hi = [](double v, int limit) {
    return static_cast<long long>(std::clamp(std::ceil(snap(v)), 0.0, double(limit)));
  };
  const auto x0 = lo(rect.left, image.width());
  const auto y0 = lo(rect.top, image.height());
  const auto x1 = hi(rect.left + rect.width, image.width());
  const auto y1 = hi(rect.top + rect.height, image.height());
  if (x1 <= x0 || y1 <= y0)
    fail(ErrorCode::EmptyAfterClamp, "crop rectangle lies entirely outside the image");
  const int w = static_cast<int>(x1 - x0);
  const int h = static_cast<int>(y1 - y0);
  const int ch = image.channels();
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(w) * h * ch);
  const auto src = image.pixels();
  for (long long y = y0; y < y1; ++y) {
    const auto row = src.subspan((static_cast<std::size_t>(y) * image.width() + x0) * ch,
                                 static_cast<std::size_t>(w) * ch);
    pixels.insert(pixels.end(), row.begin(), row.end());
  }
  return RasterImage(w, h, ch, std::move(pixels));
}

RasterImage resize(const RasterImage& image, int out_width, int out_height) {
  if (out_width < 1 || out_height < 1)
    fail(ErrorCode::InvalidArgument, "resize target must be positive");
  if (out_width == image.width() && out_height == image.height()) return image;
  RasterImage out(out_width, out_height, image.channels());
  const double sx = static_cast<double>(image.width()) / out_width;
  const double sy = static_cast<double>(image.height()) / out_height;
  for (int y = 0; y < out_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
    for (int x = 0; x < out_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width() - 1.0);
      for (int c = 0; c < image.channels(); ++c)
        out.at(x, y, c) = to_byte(sample(image, fx, fy, c));
    }
  }
  return out;
}

RasterImage flip_horizontal(const RasterImage& image) {
  RasterImage out(image.width(), image.height(), image.channels());
  const int w = image.width();
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < image.channels(); ++c) out.at(w - 1 - x, y, c) = image.at(x, y, c);
  return out;
}

RasterImage to_gray(const RasterImage& image) {
  if (image.channels() == 1) return image;
  RasterImage out(image.width(), image.height(), 1);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      out.at(x, y) = to_byte(0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                             0.114 * image.at(x, y, 2));
  return out;
}

}  // namespace dogid
