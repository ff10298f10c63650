#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sevc {

// A rectangular grid of samples stored row-major.
template <typename T>
struct PlaneOf {
  int width = 0;
  int height = 0;
  std::vector<T> samples;

  PlaneOf() = default;
  PlaneOf(int w, int h, T fill = T{})
      : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {}

  T& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const {
    return samples[static_cast<std::size_t>(y) * width + x];
  }

  // Sample with coordinates clamped to the plane (edge replication).
  const T& clamped(int x, int y) const {
    x = x < 0 ? 0 : (x >= width ? width - 1 : x);
    y = y < 0 ? 0 : (y >= height ? height - 1 : y);
    return at(x, y);
  }

  bool operator==(const PlaneOf&) const = default;
};

using Plane = PlaneOf<std::uint8_t>;

// One 8-bit 4:2:0 picture.
struct Frame {
  Plane y;
  Plane u;
  Plane v;
  int index = 0;

  Frame() = default;
  Frame(int width, int height, int idx = 0, std::uint8_t luma = 0,
        std::uint8_t chroma = 128)
      : y(width, height, luma),
        u(width / 2, height / 2, chroma),
        v(width / 2, height / 2, chroma),
        index(idx) {}

  int width() const { return y.width; }
  int height() const { return y.height; }

  // Samples only; the frame index is bookkeeping.
  bool same_pixels(const Frame& o) const { return y == o.y && u == o.u && v == o.v; }
  bool operator==(const Frame&) const = default;
};

struct VideoSequence {
  int width = 0;
  int height = 0;
  int fps_num = 30;
  int fps_den = 1;
  std::vector<Frame> frames;

  double fps() const { return static_cast<double>(fps_num) / fps_den; }
  bool operator==(const VideoSequence&) const = default;
};

// YUV4MPEG2 with 4:2:0 ("C420") chroma only. Throws FormatError.
VideoSequence read_y4m(std::istream& in);
void write_y4m(const VideoSequence& seq, std::ostream& out);

VideoSequence read_y4m_file(const std::string& path);
void write_y4m_file(const VideoSequence& seq, const std::string& path);

using Rgb = std::array<std::uint8_t, 3>;

// BT.601 limited range, nearest chroma replication.
Rgb yuv_to_rgb(int y, int u, int v);
std::vector<Rgb> frame_to_rgb(const Frame& f);

// Binary P6.
void write_ppm(const Frame& f, std::ostream& out);
void write_ppm_file(const Frame& f, const std::string& path);
// Grey P6 export of a single plane (edge maps and the like).
void write_ppm(const Plane& p, std::ostream& out);
void write_ppm_file(const Plane& p, const std::string& path);

}  // namespace sevc
