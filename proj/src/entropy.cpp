#include "sevc/entropy.hpp"

#include <stdexcept>

namespace sevc {

void RangeEncoder::shift_low() {
  if (low_ < 0xFF000000u || low_ >= (std::uint64_t{1} << 32)) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    if (!leading_) out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
    leading_ = false;
    for (; pending_ > 0; --pending_) out_.push_back(static_cast<std::uint8_t>(0xFF + carry));
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  } else {
    ++pending_;
  }
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::renormalize() {
  while (range_ < kRangeTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_regular(Context& ctx, bool bin) {
  const std::uint32_t split = (range_ >> 12) * ctx.p1;
  if (bin) {
    range_ = split;
  } else {
    low_ += split;
    range_ -= split;
  }
  ctx.update(bin);
  renormalize();
}

void RangeEncoder::encode_bypass(bool bin) {
  const std::uint32_t half = range_ >> 1;
  if (bin) low_ += half;
  range_ = half;
  renormalize();
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  if (finished_) throw std::logic_error("range encoder already finished");
  finished_ = true;
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> data) : data_(data) {
  if (data_.size() < 4) throw FormatError("range decoder: payload shorter than 4 bytes");
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= data_.size()) throw FormatError("range decoder: input exhausted");
  return data_[pos_++];
}

void RangeDecoder::renormalize() {
  while (range_ < kRangeTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
}

bool RangeDecoder::decode_regular(Context& ctx) {
  const std::uint32_t split = (range_ >> 12) * ctx.p1;
  bool bin;
  if (code_ < split) {
    range_ = split;
    bin = true;
  } else {
    code_ -= split;
    range_ -= split;
    bin = false;
  }
  ctx.update(bin);
  renormalize();
  return bin;
}

bool RangeDecoder::decode_bypass() {
  const std::uint32_t half = range_ >> 1;
  range_ = half;
  bool bin = false;
  if (code_ >= half) {
    code_ -= half;
    bin = true;
  }
  renormalize();
  return bin;
}

BinString binarize_level(std::int64_t level) {
  if (level == 0) throw std::invalid_argument("binarize_level: zero level has no binarization");
  BinRecorder r;
  write_level(r, level, 0, 0);
  return r.bins;
}

BinString binarize_mvd(int d) {
  BinRecorder r;
  write_mvd_component(r, d, 0, 0);
  return r.bins;
}

std::int64_t debinarize_level(std::span<const Bin> bins) {
  BinStringReader reader(bins);
  const std::int64_t level = read_level(reader, 0, 0);
  if (!reader.done()) throw FormatError("trailing bins after level");
  return level;
}

int debinarize_mvd(std::span<const Bin> bins) {
  BinStringReader reader(bins);
  const int d = read_mvd_component(reader, 0, 0);
  if (!reader.done()) throw FormatError("trailing bins after mvd");
  return d;
}

}  // namespace sevc
