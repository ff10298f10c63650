#include "sevc/frame.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sevc/error.hpp"

namespace sevc {

namespace {

int parse_int(const std::string& s, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(std::string("y4m: bad ") + what + " value '" + s + "'");
  }
  return value;
}

std::string read_line(std::istream& in, std::size_t limit) {
  std::string line;
  char c;
  while (in.get(c)) {
    if (c == '\n') return line;
    line.push_back(c);
    if (line.size() > limit) throw FormatError("y4m: header line too long");
  }
  throw FormatError("y4m: unterminated header line");
}

void read_plane(std::istream& in, Plane& p) {
  in.read(reinterpret_cast<char*>(p.samples.data()),
          static_cast<std::streamsize>(p.samples.size()));
  if (static_cast<std::size_t>(in.gcount()) != p.samples.size()) {
    throw FormatError("y4m: truncated frame payload");
  }
}

void write_plane(std::ostream& out, const Plane& p) {
  out.write(reinterpret_cast<const char*>(p.samples.data()),
            static_cast<std::streamsize>(p.samples.size()));
}

std::uint8_t clip8(double v) {
  const double r = std::round(v);  // half away from zero
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

VideoSequence read_y4m(std::istream& in) {
  const std::string header = read_line(in, 4096);
  std::istringstream tokens(header);
  std::string tok;
  tokens >> tok;
  if (tok != "YUV4MPEG2") throw FormatError("y4m: missing YUV4MPEG2 signature");

  VideoSequence seq;
  while (tokens >> tok) {
    const char key = tok[0];
    const std::string val = tok.substr(1);
    switch (key) {
      case 'W':
        seq.width = parse_int(val, "width");
        break;
      case 'H':
        seq.height = parse_int(val, "height");
        break;
      case 'F': {
        const auto colon = val.find(':');
        if (colon == std::string::npos) throw FormatError("y4m: bad frame rate");
        seq.fps_num = parse_int(val.substr(0, colon), "frame rate");
        seq.fps_den = parse_int(val.substr(colon + 1), "frame rate");
        if (seq.fps_num <= 0 || seq.fps_den <= 0) throw FormatError("y4m: bad frame rate");
        break;
      }
      case 'C':
        if (val != "420") throw FormatError("y4m: unsupported colorspace C" + val);
        break;
      default:
        break;  // I, A, X and friends carry nothing we need
    }
  }
  if (seq.width <= 0 || seq.height <= 0) throw FormatError("y4m: missing dimensions");
  if (seq.width % 2 || seq.height % 2) throw FormatError("y4m: odd dimensions for 4:2:0");

  int index = 0;
  while (in.peek() != std::char_traits<char>::eof()) {
    const std::string marker = read_line(in, 1024);
    if (marker.rfind("FRAME", 0) != 0) throw FormatError("y4m: expected FRAME marker");
    Frame f(seq.width, seq.height, index++);
    read_plane(in, f.y);
    read_plane(in, f.u);
    read_plane(in, f.v);
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

void write_y4m(const VideoSequence& seq, std::ostream& out) {
  out << "YUV4MPEG2 W" << seq.width << " H" << seq.height << " F" << seq.fps_num << ':'
      << seq.fps_den << " C420\n";
  for (const Frame& f : seq.frames) {
    out << "FRAME\n";
    write_plane(out, f.y);
    write_plane(out, f.u);
    write_plane(out, f.v);
  }
}

VideoSequence read_y4m_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_y4m(in);
}

void write_y4m_file(const VideoSequence& seq, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_y4m(seq, out);
}

Rgb yuv_to_rgb(int y, int u, int v) {
  const double luma = 1.164 * (y - 16);
  const double cb = u - 128;
  const double cr = v - 128;
  return {clip8(luma + 1.596 * cr), clip8(luma - 0.813 * cr - 0.391 * cb),
          clip8(luma + 2.018 * cb)};
}

std::vector<Rgb> frame_to_rgb(const Frame& f) {
  std::vector<Rgb> rgb;
  rgb.reserve(static_cast<std::size_t>(f.width()) * f.height());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      rgb.push_back(yuv_to_rgb(f.y.at(x, y), f.u.at(x / 2, y / 2), f.v.at(x / 2, y / 2)));
    }
  }
  return rgb;
}

void write_ppm(const Frame& f, std::ostream& out) {
  out << "P6\n" << f.width() << ' ' << f.height() << "\n255\n";
  for (const Rgb& px : frame_to_rgb(f)) {
    out.write(reinterpret_cast<const char*>(px.data()), 3);
  }
}

void write_ppm(const Plane& p, std::ostream& out) {
  out << "P6\n" << p.width << ' ' << p.height << "\n255\n";
  for (std::uint8_t s : p.samples) {
    const char px[3] = {static_cast<char>(s), static_cast<char>(s), static_cast<char>(s)};
    out.write(px, 3);
  }
}

void write_ppm_file(const Frame& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_ppm(f, out);
}

void write_ppm_file(const Plane& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_ppm(p, out);
}

}  // namespace sevc
