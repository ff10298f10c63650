#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sevc/error.hpp"

namespace sevc {

// Adaptive binary model: probability of a 1 in 1/4096 units.
struct Context {
  std::uint16_t p1 = 2048;

  void update(bool bin) {
    int p = p1;
    p = bin ? p + ((4096 - p) >> 5) : p - (p >> 5);
    p1 = static_cast<std::uint16_t>(p < 1 ? 1 : (p > 4095 ? 4095 : p));
  }
};

constexpr std::uint32_t kRangeTop = 1u << 24;

// Byte-oriented range encoder with context-coded ("regular") and
// equiprobable ("bypass") bins. A bypass bin halves the range whatever its
// value, so the output length never depends on bypass bin values.
class RangeEncoder {
 public:
  void encode_regular(Context& ctx, bool bin);
  void encode_bypass(bool bin);

  // Terminates the stream. A second call throws std::logic_error.
  std::vector<std::uint8_t> finish();

  std::uint32_t range() const { return range_; }
  std::uint64_t low() const { return low_; }

 private:
  void shift_low();
  void renormalize();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 0;
  bool leading_ = true;  // cache_ holds the implicit leading zero byte
  bool finished_ = false;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  // Throws FormatError if fewer than 4 bytes are available.
  explicit RangeDecoder(std::span<const std::uint8_t> data);

  bool decode_regular(Context& ctx);
  bool decode_bypass();

  std::size_t consumed() const { return pos_; }
  std::uint32_t range() const { return range_; }

 private:
  std::uint8_t next_byte();
  void renormalize();

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

// Labeled bin, the unit of the syntax stream. Sign bins are bypass-coded and
// are the only bins a cipher may touch.
enum class BinKind : std::uint8_t { Regular, Bypass, Sign };

struct Bin {
  BinKind kind = BinKind::Regular;
  bool value = false;
  std::uint16_t context = 0;  // regular bins only
  std::uint64_t slot = 0;     // sign bins only: keystream slot
  bool operator==(const Bin&) const = default;
};

using BinString = std::vector<Bin>;

// Sink that just records bins.
class BinRecorder {
 public:
  void regular(std::uint16_t ctx, bool bin) { bins.push_back({BinKind::Regular, bin, ctx, 0}); }
  void bypass(bool bin) { bins.push_back({BinKind::Bypass, bin, 0, 0}); }
  void sign(bool negative, std::uint64_t slot) {
    bins.push_back({BinKind::Sign, negative, 0, slot});
  }
  BinString bins;
};

// Source reading back a recorded bin string; checks labels as it goes.
class BinStringReader {
 public:
  explicit BinStringReader(std::span<const Bin> bins) : bins_(bins) {}
  bool regular(std::uint16_t ctx) { return take(BinKind::Regular, ctx).value; }
  bool bypass() { return take(BinKind::Bypass, 0).value; }
  bool sign(std::uint64_t) { return take(BinKind::Sign, 0).value; }
  bool done() const { return pos_ == bins_.size(); }

 private:
  const Bin& take(BinKind kind, std::uint16_t ctx) {
    if (pos_ >= bins_.size()) throw FormatError("bin string exhausted");
    const Bin& b = bins_[pos_++];
    if (b.kind != kind || (kind == BinKind::Regular && b.context != ctx)) {
      throw FormatError("bin string label mismatch");
    }
    return b;
  }
  std::span<const Bin> bins_;
  std::size_t pos_ = 0;
};

constexpr int kMaxGolombPrefix = 32;

// k-th order exp-Golomb, all bins bypass: (prefix zeros) then value + 2^k in binary.
template <typename Sink>
void write_exp_golomb(Sink& s, std::uint64_t value, int k) {
  const std::uint64_t x = value + (std::uint64_t{1} << k);
  int bits = 0;
  while ((x >> (bits + 1)) != 0) ++bits;
  for (int i = 0; i < bits - k; ++i) s.bypass(false);
  for (int i = bits; i >= 0; --i) s.bypass(((x >> i) & 1) != 0);
}

template <typename Source>
std::uint64_t read_exp_golomb(Source& s, int k) {
  int zeros = 0;
  while (!s.bypass()) {
    if (++zeros > kMaxGolombPrefix) throw FormatError("exp-Golomb prefix too long");
  }
  std::uint64_t x = 1;
  for (int i = 0; i < zeros + k; ++i) x = (x << 1) | (s.bypass() ? 1u : 0u);
  return x - (std::uint64_t{1} << k);
}

// Nonzero level: gt1 flag (regular), |l|-2 as EG0 when |l| >= 2 (bypass),
// sign (encryptable, 1 = negative).
template <typename Sink>
void write_level(Sink& s, std::int64_t level, std::uint16_t gt1_ctx, std::uint64_t slot) {
  const std::uint64_t mag = static_cast<std::uint64_t>(level < 0 ? -level : level);
  s.regular(gt1_ctx, mag >= 2);
  if (mag >= 2) write_exp_golomb(s, mag - 2, 0);
  s.sign(level < 0, slot);
}

template <typename Source>
std::int64_t read_level(Source& s, std::uint16_t gt1_ctx, std::uint64_t slot) {
  std::int64_t mag = 1;
  if (s.regular(gt1_ctx)) {
    const std::uint64_t rest = read_exp_golomb(s, 0);
    if (rest > (std::uint64_t{1} << 40)) throw FormatError("level magnitude out of range");
    mag = static_cast<std::int64_t>(rest) + 2;
  }
  return s.sign(slot) ? -mag : mag;
}

// MVD component: nonzero flag (regular); if nonzero |d|-1 as EG1 (bypass)
// and sign (encryptable). Zero has no sign bin.
template <typename Sink>
void write_mvd_component(Sink& s, int d, std::uint16_t ctx, std::uint64_t slot) {
  s.regular(ctx, d != 0);
  if (d == 0) return;
  write_exp_golomb(s, static_cast<std::uint64_t>(d < 0 ? -static_cast<std::int64_t>(d) : d) - 1,
                   1);
  s.sign(d < 0, slot);
}

template <typename Source>
int read_mvd_component(Source& s, std::uint16_t ctx, std::uint64_t slot) {
  if (!s.regular(ctx)) return 0;
  const std::uint64_t rest = read_exp_golomb(s, 1);
  if (rest >= (1u << 20)) throw FormatError("mvd magnitude out of range");
  const int mag = static_cast<int>(rest) + 1;
  return s.sign(slot) ? -mag : mag;
}

// Standalone binarizations (context ids 0, slot 0) and their inverses.
BinString binarize_level(std::int64_t level);  // level != 0, else std::invalid_argument
BinString binarize_mvd(int d);
std::int64_t debinarize_level(std::span<const Bin> bins);
int debinarize_mvd(std::span<const Bin> bins);

}  // namespace sevc
