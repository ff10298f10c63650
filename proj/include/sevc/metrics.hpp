#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sevc/frame.hpp"

namespace sevc {

// PSNR in dB; identical inputs have no finite value.
struct Psnr {
  std::optional<double> db;

  static Psnr infinite() { return {}; }
  bool is_infinite() const { return !db.has_value(); }
  // For orderings: +inf when infinite.
  double value_or_inf() const;
  std::string to_string(int decimals = 4) const;  // "inf" when infinite
};

double mse(const Plane& ref, const Plane& test);
Psnr psnr_from_mse(double mse);
Psnr psnr(const Plane& ref, const Plane& test);  // 8-bit peak 255

// Mean SSIM over all 8x8 windows at stride 1, uniform weights,
// c1 = (0.01*255)^2, c2 = (0.03*255)^2. Planes must be at least 8x8.
double ssim(const Plane& ref, const Plane& test);

// Relative change in percent: (candidate - baseline) / baseline * 100.
// Used for bitrate, PSNR and encoding-time comparisons between profiles.
double delta_percent(double baseline, double candidate);
inline double delta_bitrate(double baseline, double candidate) {
  return delta_percent(baseline, candidate);
}
inline double delta_psnr(double baseline, double candidate) {
  return delta_percent(baseline, candidate);
}
inline double delta_time(double baseline, double candidate) {
  return delta_percent(baseline, candidate);
}

using Histogram = std::array<std::uint64_t, 256>;

struct HistogramReport {
  Histogram r{}, g{}, b{}, y{};
  HistogramReport& operator+=(const HistogramReport& o);
  double entropy_r() const;
  double entropy_g() const;
  double entropy_b() const;
  double entropy_y() const;
  double mean_entropy() const;
};

HistogramReport histogram(const Frame& f);
double shannon_entropy(const Histogram& h);  // bits

// |Laplacian| of luma with kernel [[0,1,0],[1,-4,1],[0,1,0]], replicated
// borders, clipped to 255.
Plane laplacian_edges(const Frame& f);

// Replace every 8x8 luma block (4x4 chroma block) by its rounded mean.
Frame pixelate(const Frame& f);

// Per-sequence quality of a test video against a reference.
struct SequenceQuality {
  std::vector<Psnr> psnr_y, psnr_u, psnr_v;
  std::vector<double> ssim_y;
  Psnr pooled_y, pooled_u, pooled_v;  // from pooled MSE
  double mean_psnr_y = 0;             // mean of finite per-frame values
  double mean_ssim_y = 0;
};

SequenceQuality compare_sequences(const VideoSequence& ref, const VideoSequence& test);

double bitrate_bps(std::size_t file_bytes, std::size_t frames, double fps);

}  // namespace sevc
