#include "sevc/motion.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "sevc/error.hpp"

namespace sevc {

namespace {

int median3(int a, int b, int c) { return std::max(std::min(a, b), std::min(std::max(a, b), c)); }

// Search order key: SAD first, then the tie-break rules.
bool better(std::int64_t sad, MotionVector mv, std::int64_t best_sad, MotionVector best) {
  if (sad != best_sad) return sad < best_sad;
  const int l1 = std::abs(mv.x) + std::abs(mv.y);
  const int best_l1 = std::abs(best.x) + std::abs(best.y);
  if (l1 != best_l1) return l1 < best_l1;
  if (mv.y != best.y) return mv.y < best.y;
  return mv.x < best.x;
}

std::int16_t saturate16(int v) {
  return static_cast<std::int16_t>(std::clamp(v, -32768, 32767));
}

template <typename T>
void put_le(std::ostream& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::istream& in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw FormatError("mv sidecar: truncated");
    v |= static_cast<std::uint64_t>(c & 0xFF) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

std::int64_t block_sad(const Plane& cur, const Plane& ref, int x0, int y0, MotionVector mv,
                       int size) {
  std::int64_t sad = 0;
  for (int y = 0; y < size; ++y) {
    const std::uint8_t* a = &cur.at(x0, y0 + y);
    const std::uint8_t* b = &ref.at(x0 + mv.x, y0 + y + mv.y);
    for (int x = 0; x < size; ++x) sad += std::abs(int(a[x]) - int(b[x]));
  }
  return sad;
}

bool vector_in_bounds(const Frame& ref, int mb_x, int mb_y, MotionVector mv) {
  const int x = mb_x * kMacroblockSize + mv.x;
  const int y = mb_y * kMacroblockSize + mv.y;
  return x >= 0 && y >= 0 && x + kMacroblockSize <= ref.width() &&
         y + kMacroblockSize <= ref.height();
}

MotionSearchResult estimate_motion(const Frame& cur, const Frame& ref, int mb_x, int mb_y,
                                   int range) {
  const int x0 = mb_x * kMacroblockSize;
  const int y0 = mb_y * kMacroblockSize;
  MotionSearchResult best{{0, 0}, std::numeric_limits<std::int64_t>::max()};
  for (int dy = -range; dy <= range; ++dy) {
    for (int dx = -range; dx <= range; ++dx) {
      const MotionVector mv{dx, dy};
      if (!vector_in_bounds(ref, mb_x, mb_y, mv)) continue;
      const std::int64_t sad = block_sad(cur.y, ref.y, x0, y0, mv, kMacroblockSize);
      if (better(sad, mv, best.sad, best.mv)) best = {mv, sad};
    }
  }
  return best;
}

MacroblockPrediction compensate(const Frame& ref, int mb_x, int mb_y, MotionVector mv) {
  if (!vector_in_bounds(ref, mb_x, mb_y, mv)) {
    throw std::out_of_range("motion vector points outside the reference frame");
  }
  return compensate_clamped(ref, mb_x, mb_y, mv);
}

MacroblockPrediction compensate_clamped(const Frame& ref, int mb_x, int mb_y, MotionVector mv) {
  MacroblockPrediction p;
  const MotionVector cmv = chroma_vector(mv);
  copy_displaced(ref.y, mb_x * 16, mb_y * 16, mv, 16, p.y.data());
  copy_displaced(ref.u, mb_x * 8, mb_y * 8, cmv, 8, p.u.data());
  copy_displaced(ref.v, mb_x * 8, mb_y * 8, cmv, 8, p.v.data());
  return p;
}

MotionVector predict_mv(std::optional<MotionVector> left, std::optional<MotionVector> top,
                        std::optional<MotionVector> top_right) {
  const MotionVector a = left.value_or(MotionVector{});
  const MotionVector b = top.value_or(MotionVector{});
  const MotionVector c = top_right.value_or(MotionVector{});
  return {median3(a.x, b.x, c.x), median3(a.y, b.y, c.y)};
}

MotionVector MotionField::predictor(int x, int y) const {
  std::optional<MotionVector> left, top, top_right;
  if (x > 0) left = at(x - 1, y);
  if (y > 0) top = at(x, y - 1);
  if (y > 0 && x + 1 < mbs_x) top_right = at(x + 1, y - 1);
  return predict_mv(left, top, top_right);
}

void append_records(MvSidecar& sc, std::uint32_t frame, const MotionField& field) {
  for (int y = 0; y < field.mbs_y; ++y) {
    for (int x = 0; x < field.mbs_x; ++x) {
      const auto& mv = field.at(x, y);
      if (!mv) continue;
      sc.records.push_back({frame, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                            saturate16(mv->x), saturate16(mv->y), 0});
    }
  }
}

void write_mv_sidecar(const MvSidecar& sc, std::ostream& out) {
  out.write("MVS1", 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sc.records.size()));
  for (const MvRecord& r : sc.records) {
    put_le(out, r.frame);
    put_le(out, r.mb_x);
    put_le(out, r.mb_y);
    put_le(out, static_cast<std::uint16_t>(r.mv_x));
    put_le(out, static_cast<std::uint16_t>(r.mv_y));
    put_le(out, r.ref);
  }
}

MvSidecar read_mv_sidecar(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "MVS1") {
    throw FormatError("mv sidecar: bad magic");
  }
  const auto count = get_le<std::uint32_t>(in);
  MvSidecar sc;
  for (std::uint32_t i = 0; i < count; ++i) {
    MvRecord r;
    r.frame = get_le<std::uint32_t>(in);
    r.mb_x = get_le<std::uint16_t>(in);
    r.mb_y = get_le<std::uint16_t>(in);
    r.mv_x = static_cast<std::int16_t>(get_le<std::uint16_t>(in));
    r.mv_y = static_cast<std::int16_t>(get_le<std::uint16_t>(in));
    r.ref = get_le<std::uint8_t>(in);
    sc.records.push_back(r);
  }
  return sc;
}

void write_mv_sidecar_file(const MvSidecar& sc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_mv_sidecar(sc, out);
}

MvSidecar read_mv_sidecar_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_mv_sidecar(in);
}

}  // namespace sevc
