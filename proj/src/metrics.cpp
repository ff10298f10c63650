#include "sevc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace sevc {

namespace {

void require_same_size(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("planes differ in size");
  }
}

std::uint8_t rounded_mean(std::uint64_t sum, std::uint64_t count) {
  // Half away from zero on a non-negative mean.
  return static_cast<std::uint8_t>((2 * sum + count) / (2 * count));
}

void pixelate_plane(const Plane& src, Plane& dst, int block) {
  for (int by = 0; by < src.height; by += block) {
    for (int bx = 0; bx < src.width; bx += block) {
      const int h = std::min(block, src.height - by);
      const int w = std::min(block, src.width - bx);
      std::uint64_t sum = 0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) sum += src.at(bx + x, by + y);
      const std::uint8_t mean = rounded_mean(sum, static_cast<std::uint64_t>(w) * h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) dst.at(bx + x, by + y) = mean;
    }
  }
}

}  // namespace

double Psnr::value_or_inf() const {
  return db ? *db : std::numeric_limits<double>::infinity();
}

std::string Psnr::to_string(int decimals) const {
  if (!db) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *db);
  return buf;
}

double mse(const Plane& ref, const Plane& test) {
  require_same_size(ref, test);
  if (ref.samples.empty()) throw std::invalid_argument("empty plane");
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < ref.samples.size(); ++i) {
    const int d = int(ref.samples[i]) - int(test.samples[i]);
    acc += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(acc) / static_cast<double>(ref.samples.size());
}

Psnr psnr_from_mse(double m) {
  if (m == 0) return Psnr::infinite();
  return Psnr{10.0 * std::log10(255.0 * 255.0 / m)};
}

Psnr psnr(const Plane& ref, const Plane& test) { return psnr_from_mse(mse(ref, test)); }

double ssim(const Plane& a, const Plane& b) {
  require_same_size(a, b);
  constexpr int kWin = 8;
  if (a.width < kWin || a.height < kWin) throw std::invalid_argument("plane smaller than 8x8");
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);
  const double n = kWin * kWin;
  double total = 0;
  std::size_t windows = 0;
  for (int y0 = 0; y0 + kWin <= a.height; ++y0) {
    for (int x0 = 0; x0 + kWin <= a.width; ++x0) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int y = 0; y < kWin; ++y) {
        for (int x = 0; x < kWin; ++x) {
          const double va = a.at(x0 + x, y0 + y);
          const double vb = b.at(x0 + x, y0 + y);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      }
      const double ma = sa / n, mb = sb / n;
      const double va = saa / n - ma * ma;
      const double vb = sbb / n - mb * mb;
      const double cov = sab / n - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double delta_percent(double baseline, double candidate) {
  if (baseline == 0) throw std::invalid_argument("delta: zero baseline");
  return (candidate - baseline) / baseline * 100.0;
}

HistogramReport& HistogramReport::operator+=(const HistogramReport& o) {
  for (int i = 0; i < 256; ++i) {
    r[i] += o.r[i];
    g[i] += o.g[i];
    b[i] += o.b[i];
    y[i] += o.y[i];
  }
  return *this;
}

double HistogramReport::entropy_r() const { return shannon_entropy(r); }
double HistogramReport::entropy_g() const { return shannon_entropy(g); }
double HistogramReport::entropy_b() const { return shannon_entropy(b); }
double HistogramReport::entropy_y() const { return shannon_entropy(y); }
double HistogramReport::mean_entropy() const {
  return (entropy_r() + entropy_g() + entropy_b() + entropy_y()) / 4.0;
}

HistogramReport histogram(const Frame& f) {
  HistogramReport h;
  for (const Rgb& px : frame_to_rgb(f)) {
    ++h.r[px[0]];
    ++h.g[px[1]];
    ++h.b[px[2]];
  }
  for (std::uint8_t s : f.y.samples) ++h.y[s];
  return h;
}

double shannon_entropy(const Histogram& h) {
  std::uint64_t total = 0;
  for (std::uint64_t c : h) total += c;
  if (total == 0) return 0;
  double e = 0;
  for (std::uint64_t c : h) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    e -= p * std::log2(p);
  }
  return e;
}

Plane laplacian_edges(const Frame& f) {
  const Plane& y = f.y;
  Plane out(y.width, y.height);
  for (int r = 0; r < y.height; ++r) {
    for (int c = 0; c < y.width; ++c) {
      const int resp = y.clamped(c, r - 1) + y.clamped(c - 1, r) + y.clamped(c + 1, r) +
                       y.clamped(c, r + 1) - 4 * y.at(c, r);
      out.at(c, r) = static_cast<std::uint8_t>(std::min(std::abs(resp), 255));
    }
  }
  return out;
}

Frame pixelate(const Frame& f) {
  Frame out = f;
  pixelate_plane(f.y, out.y, 8);
  pixelate_plane(f.u, out.u, 4);
  pixelate_plane(f.v, out.v, 4);
  return out;
}

SequenceQuality compare_sequences(const VideoSequence& ref, const VideoSequence& test) {
  if (ref.frames.size() != test.frames.size()) {
    throw std::invalid_argument("sequences differ in frame count");
  }
  SequenceQuality q;
  double sum_y = 0, sum_u = 0, sum_v = 0;
  double finite_psnr = 0;
  std::size_t finite_count = 0;
  for (std::size_t i = 0; i < ref.frames.size(); ++i) {
    const Frame& a = ref.frames[i];
    const Frame& b = test.frames[i];
    const double my = mse(a.y, b.y), mu = mse(a.u, b.u), mv = mse(a.v, b.v);
    sum_y += my;
    sum_u += mu;
    sum_v += mv;
    q.psnr_y.push_back(psnr_from_mse(my));
    q.psnr_u.push_back(psnr_from_mse(mu));
    q.psnr_v.push_back(psnr_from_mse(mv));
    if (!q.psnr_y.back().is_infinite()) {
      finite_psnr += *q.psnr_y.back().db;
      ++finite_count;
    }
    q.ssim_y.push_back(ssim(a.y, b.y));
  }
  const double n = static_cast<double>(ref.frames.size());
  if (n > 0) {
    q.pooled_y = psnr_from_mse(sum_y / n);
    q.pooled_u = psnr_from_mse(sum_u / n);
    q.pooled_v = psnr_from_mse(sum_v / n);
    double s = 0;
    for (double v : q.ssim_y) s += v;
    q.mean_ssim_y = s / n;
  }
  q.mean_psnr_y = finite_count ? finite_psnr / static_cast<double>(finite_count) : 0;
  return q;
}

double bitrate_bps(std::size_t file_bytes, std::size_t frames, double fps) {
  if (frames == 0) return 0;
  return static_cast<double>(file_bytes) * 8.0 * fps / static_cast<double>(frames);
}

}  // namespace sevc
