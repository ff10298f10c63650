#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sevc/cipher.hpp"
#include "sevc/entropy.hpp"
#include "sevc/motion.hpp"
#include "sevc/transform.hpp"

namespace sevc {

enum class FrameType : std::uint8_t { I = 0, P = 1 };

// Macroblock and transform-block geometry of a frame.
struct FrameLayout {
  Profile profile = Profile::A;
  int width = 0;
  int height = 0;

  // Throws std::invalid_argument unless both dimensions are positive multiples of 16.
  FrameLayout(Profile p, int w, int h);

  int n() const { return transform_size(profile); }
  int mbs_x() const { return width / kMacroblockSize; }
  int mbs_y() const { return height / kMacroblockSize; }
  int mb_count() const { return mbs_x() * mbs_y(); }
  int luma_blocks() const { return (16 / n()) * (16 / n()); }
  int chroma_blocks() const { return (8 / n()) * (8 / n()); }  // per chroma plane
  int blocks_per_mb() const { return luma_blocks() + 2 * chroma_blocks(); }
  // 0 for luma blocks, 1 for U/V blocks; block order is Y (raster), U, V.
  int plane_class(int block) const { return block < luma_blocks() ? 0 : 1; }
};

// Decoded syntax of one macroblock. Levels are quantized coefficients in
// raster order; signs are as coded (possibly encrypted).
struct MacroblockSyntax {
  bool inter = false;
  MotionVector mvd;
  std::vector<Block> levels;
  bool operator==(const MacroblockSyntax&) const = default;
};

struct FrameSyntax {
  FrameType type = FrameType::I;
  int qp = 0;
  std::vector<MacroblockSyntax> mbs;
  bool operator==(const FrameSyntax&) const = default;
};

// Context ids. Significance and gt1 contexts are indexed by
// plane_class * 4 + scan_class.
enum ContextId : std::uint16_t {
  kCtxMbType = 0,
  kCtxMvdX = 1,
  kCtxMvdY = 2,
  kCtxCbf = 3,
  kCtxSig = 5,
  kCtxGt1 = 13,
  kNumContexts = 21,
};

// Keystream slot layout: per macroblock in raster order, 2 MVD slots when
// inter, then n*n slots per transform block in scan order.
struct SlotCursor {
  std::uint64_t next = 0;
  std::uint64_t take(std::uint64_t count) {
    const std::uint64_t first = next;
    next += count;
    return first;
  }
};

template <typename Sink>
void write_frame_bins(Sink& s, const FrameSyntax& fs, const FrameLayout& layout) {
  const int n = layout.n();
  const auto scan = zigzag_scan(n);
  if (static_cast<int>(fs.mbs.size()) != layout.mb_count()) {
    throw std::invalid_argument("frame syntax has wrong macroblock count");
  }
  SlotCursor slots;
  for (const MacroblockSyntax& mb : fs.mbs) {
    if (fs.type == FrameType::P) {
      s.regular(kCtxMbType, mb.inter);
    } else if (mb.inter) {
      throw std::invalid_argument("inter macroblock in an I frame");
    }
    if (mb.inter) {
      const std::uint64_t mvd_slot = slots.take(2);
      write_mvd_component(s, mb.mvd.x, kCtxMvdX, mvd_slot);
      write_mvd_component(s, mb.mvd.y, kCtxMvdY, mvd_slot + 1);
    }
    if (static_cast<int>(mb.levels.size()) != layout.blocks_per_mb()) {
      throw std::invalid_argument("macroblock has wrong block count");
    }
    for (int b = 0; b < layout.blocks_per_mb(); ++b) {
      const Block& blk = mb.levels[b];
      const int pc = layout.plane_class(b);
      const std::uint64_t base = slots.take(static_cast<std::uint64_t>(n) * n);
      const bool coded = !blk.all_zero();
      s.regular(static_cast<std::uint16_t>(kCtxCbf + pc), coded);
      if (!coded) continue;
      for (int k = 0; k < n * n; ++k) {
        const std::int64_t level = blk.v[scan[k]];
        const auto ctx = static_cast<std::uint16_t>(pc * 4 + scan_class(k));
        s.regular(static_cast<std::uint16_t>(kCtxSig + ctx), level != 0);
        if (level != 0) write_level(s, level, static_cast<std::uint16_t>(kCtxGt1 + ctx), base + k);
      }
    }
  }
}

template <typename Source>
FrameSyntax read_frame_bins(Source& s, const FrameLayout& layout, FrameType type, int qp) {
  const int n = layout.n();
  const auto scan = zigzag_scan(n);
  FrameSyntax fs;
  fs.type = type;
  fs.qp = qp;
  fs.mbs.resize(layout.mb_count());
  SlotCursor slots;
  for (MacroblockSyntax& mb : fs.mbs) {
    mb.inter = type == FrameType::P && s.regular(kCtxMbType);
    if (mb.inter) {
      const std::uint64_t mvd_slot = slots.take(2);
      mb.mvd.x = read_mvd_component(s, kCtxMvdX, mvd_slot);
      mb.mvd.y = read_mvd_component(s, kCtxMvdY, mvd_slot + 1);
    }
    mb.levels.assign(layout.blocks_per_mb(), Block(n));
    for (int b = 0; b < layout.blocks_per_mb(); ++b) {
      Block& blk = mb.levels[b];
      const int pc = layout.plane_class(b);
      const std::uint64_t base = slots.take(static_cast<std::uint64_t>(n) * n);
      if (!s.regular(static_cast<std::uint16_t>(kCtxCbf + pc))) continue;
      for (int k = 0; k < n * n; ++k) {
        const auto ctx = static_cast<std::uint16_t>(pc * 4 + scan_class(k));
        if (!s.regular(static_cast<std::uint16_t>(kCtxSig + ctx))) continue;
        blk.v[scan[k]] = read_level(s, static_cast<std::uint16_t>(kCtxGt1 + ctx), base + k);
      }
    }
  }
  return fs;
}

// Entropy-code one frame. With a keystream, each sign bin is XORed with the
// keystream bit of its slot before coding. The trace records coded bins.
std::vector<std::uint8_t> encode_frame_payload(const FrameSyntax& fs, const FrameLayout& layout,
                                               Keystream* encrypt = nullptr,
                                               BinString* trace = nullptr);

// Inverse of encode_frame_payload. With a keystream, decoded sign bins are
// decrypted; without one they are returned as coded. Throws FormatError on
// exhausted or trailing payload bytes.
FrameSyntax decode_frame_payload(std::span<const std::uint8_t> payload, const FrameLayout& layout,
                                 FrameType type, int qp, Keystream* decrypt = nullptr,
                                 BinString* trace = nullptr);

}  // namespace sevc
