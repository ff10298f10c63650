#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace sevc {

// Coding profile: transform size used for every residual block.
enum class Profile : std::uint8_t {
  A = 0,  // 4x4 transform
  H = 1,  // 8x8 transform
};

constexpr int transform_size(Profile p) { return p == Profile::A ? 4 : 8; }

enum class PredictionMode : std::uint8_t { Intra, Inter };

constexpr int kBasisScale = 128;
constexpr int kMaxQp = 51;

// Square block of integers, row-major, up to 8x8. The meaning of the
// values (residual samples, raw coefficients, quantized levels or
// 16x-scaled dequantized coefficients) depends on the pipeline stage.
struct Block {
  int n = 4;
  std::array<std::int64_t, 64> v{};

  Block() = default;
  explicit Block(int size) : n(size) {}

  std::int64_t& at(int i, int j) { return v[i * n + j]; }
  std::int64_t at(int i, int j) const { return v[i * n + j]; }
  int count() const { return n * n; }
  bool all_zero() const;
  Block negated() const;

  bool operator==(const Block& o) const;
};

// Rounded, scaled DCT-II basis: C[i][j] = round(S * b_i * cos((2j+1) i pi / 2n)).
struct TransformSpec {
  int n = 4;
  std::array<std::int64_t, 64> basis{};
  std::array<std::int64_t, 8> rownorm{};  // sum_j C[i][j]^2, exact

  std::int64_t c(int i, int j) const { return basis[i * n + j]; }

  static const TransformSpec& get(int n);  // n in {4, 8}
};

// delta16(qp) = base[qp % 6] << (qp / 6); doubles every 6 QP, 16 at qp 4.
std::int64_t qp_step16(int qp);

struct QuantSpec {
  int qp = 0;
  int n = 4;
  PredictionMode mode = PredictionMode::Intra;
  std::int64_t delta16 = 0;
  std::array<std::int64_t, 64> step{};  // effective step per position, raw scale, >= 1

  QuantSpec(const TransformSpec& t, int qp, PredictionMode mode);

  std::int64_t step_at(int pos) const { return step[pos]; }
  std::int64_t dead_zone(int pos) const {
    return mode == PredictionMode::Intra ? (16 * step[pos]) / 3 : (16 * step[pos]) / 6;
  }
  // |level| for a raw-scale magnitude at one position.
  std::int64_t quantize_magnitude(std::int64_t magnitude, int pos) const {
    return (16 * magnitude + dead_zone(pos)) / (16 * step[pos]);
  }
  // Raw-scale reconstruction magnitude of |level|.
  std::int64_t dequantize_magnitude(std::int64_t level, int pos) const {
    return level * step[pos];
  }
};

// W = C X C^T, exact.
Block forward_transform(const Block& residual, const TransformSpec& t);
Block quantize(const Block& coefs, const QuantSpec& q);
// Dequantized coefficients in 16x raw scale: w16 = level * 16 * step.
Block dequantize(const Block& levels, const QuantSpec& q);
// Dequantized coefficients in raw transform scale: level * step.
Block dequantize_raw(const Block& levels, const QuantSpec& q);
// Fixed-point inverse of a 16x-scaled coefficient block, clipped to [-255, 255].
Block inverse_transform(const Block& coefs16, const TransformSpec& t);

// Zigzag scan: scan position -> raster index. Ascending anti-diagonals with
// alternating direction, starting (0,0), (0,1), (1,0).
std::span<const int> zigzag_scan(int n);

// Context class of a scan position: {0}, {1,2}, {3..6}, rest.
constexpr int scan_class(int scan_pos) {
  return scan_pos == 0 ? 0 : scan_pos <= 2 ? 1 : scan_pos <= 6 ? 2 : 3;
}

}  // namespace sevc
