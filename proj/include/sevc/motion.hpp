#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sevc/frame.hpp"

namespace sevc {

constexpr int kMacroblockSize = 16;

// Full-pel displacement. The predicted block for macroblock (x, y) is the
// reference block at (x + mv.x, y + mv.y).
struct MotionVector {
  int x = 0;
  int y = 0;
  bool operator==(const MotionVector&) const = default;
  MotionVector operator+(const MotionVector& o) const { return {x + o.x, y + o.y}; }
  MotionVector operator-(const MotionVector& o) const { return {x - o.x, y - o.y}; }
};

// Chroma displacement: half the luma vector, rounded toward zero.
constexpr MotionVector chroma_vector(MotionVector mv) { return {mv.x / 2, mv.y / 2}; }

struct MotionSearchResult {
  MotionVector mv;
  std::int64_t sad = 0;
};

// Exhaustive luma SAD search over in-bounds displacements in [-range, range]^2.
// Ties: smaller |x|+|y|, then smaller y, then smaller x.
MotionSearchResult estimate_motion(const Frame& cur, const Frame& ref, int mb_x, int mb_y,
                                   int range = 16);

std::int64_t block_sad(const Plane& cur, const Plane& ref, int x0, int y0, MotionVector mv,
                       int size);

// True when the 16x16 luma block displaced by mv lies inside the frame.
bool vector_in_bounds(const Frame& ref, int mb_x, int mb_y, MotionVector mv);

struct MacroblockPrediction {
  std::array<std::uint8_t, 256> y{};
  std::array<std::uint8_t, 64> u{};
  std::array<std::uint8_t, 64> v{};
};

// Motion compensation for an in-bounds vector. Throws std::out_of_range otherwise.
MacroblockPrediction compensate(const Frame& ref, int mb_x, int mb_y, MotionVector mv);

// Same, but samples outside the reference are edge-replicated. Decoders use
// this so that vectors reconstructed from undecrypted MVDs never fault.
MacroblockPrediction compensate_clamped(const Frame& ref, int mb_x, int mb_y, MotionVector mv);

// Copy a size x size block at (x0 + mv.x, y0 + mv.y), edge-replicated.
template <typename T>
void copy_displaced(const PlaneOf<T>& ref, int x0, int y0, MotionVector mv, int size, T* out) {
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) out[y * size + x] = ref.clamped(x0 + x + mv.x, y0 + y + mv.y);
}

// Componentwise median of left, top and top-right; absent neighbors count as (0,0).
MotionVector predict_mv(std::optional<MotionVector> left, std::optional<MotionVector> top,
                        std::optional<MotionVector> top_right);

// Per-frame motion field, one entry per macroblock in raster order. Intra
// macroblocks have no vector.
struct MotionField {
  int mbs_x = 0;
  int mbs_y = 0;
  std::vector<std::optional<MotionVector>> mvs;

  MotionField() = default;
  MotionField(int w, int h) : mbs_x(w), mbs_y(h), mvs(static_cast<std::size_t>(w) * h) {}

  const std::optional<MotionVector>& at(int x, int y) const { return mvs[y * mbs_x + x]; }
  std::optional<MotionVector>& at(int x, int y) { return mvs[y * mbs_x + x]; }

  // Median predictor for macroblock (x, y) from already-coded neighbors.
  MotionVector predictor(int x, int y) const;
};

struct MvRecord {
  std::uint32_t frame = 0;
  std::uint16_t mb_x = 0;
  std::uint16_t mb_y = 0;
  std::int16_t mv_x = 0;
  std::int16_t mv_y = 0;
  std::uint8_t ref = 0;
  bool operator==(const MvRecord&) const = default;
};

// "MVS1" | u32 count | records of (u32 frame, u16 mb_x, u16 mb_y, i16 mv_x,
// i16 mv_y, u8 ref), all little-endian.
struct MvSidecar {
  std::vector<MvRecord> records;
  bool operator==(const MvSidecar&) const = default;
};

void write_mv_sidecar(const MvSidecar& sc, std::ostream& out);
MvSidecar read_mv_sidecar(std::istream& in);
void write_mv_sidecar_file(const MvSidecar& sc, const std::string& path);
MvSidecar read_mv_sidecar_file(const std::string& path);

// Append one record per inter macroblock of a frame's motion field.
void append_records(MvSidecar& sc, std::uint32_t frame, const MotionField& field);

}  // namespace sevc
