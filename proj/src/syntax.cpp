#include "sevc/syntax.hpp"

#include <array>

namespace sevc {

namespace {

class CodingSink {
 public:
  CodingSink(Keystream* ks, BinString* trace) : ks_(ks), trace_(trace) {}

  void regular(std::uint16_t ctx, bool bin) {
    rc_.encode_regular(contexts_[ctx], bin);
    if (trace_) trace_->push_back({BinKind::Regular, bin, ctx, 0});
  }
  void bypass(bool bin) {
    rc_.encode_bypass(bin);
    if (trace_) trace_->push_back({BinKind::Bypass, bin, 0, 0});
  }
  void sign(bool negative, std::uint64_t slot) {
    const bool coded = ks_ ? negative != ks_->bit(slot) : negative;
    rc_.encode_bypass(coded);
    if (trace_) trace_->push_back({BinKind::Sign, coded, 0, slot});
  }
  std::vector<std::uint8_t> finish() { return rc_.finish(); }

 private:
  RangeEncoder rc_;
  std::array<Context, kNumContexts> contexts_{};
  Keystream* ks_;
  BinString* trace_;
};

class CodingSource {
 public:
  CodingSource(std::span<const std::uint8_t> data, Keystream* ks, BinString* trace)
      : rd_(data), ks_(ks), trace_(trace) {}

  bool regular(std::uint16_t ctx) {
    const bool bin = rd_.decode_regular(contexts_[ctx]);
    if (trace_) trace_->push_back({BinKind::Regular, bin, ctx, 0});
    return bin;
  }
  bool bypass() {
    const bool bin = rd_.decode_bypass();
    if (trace_) trace_->push_back({BinKind::Bypass, bin, 0, 0});
    return bin;
  }
  bool sign(std::uint64_t slot) {
    const bool coded = rd_.decode_bypass();
    if (trace_) trace_->push_back({BinKind::Sign, coded, 0, slot});
    return ks_ ? coded != ks_->bit(slot) : coded;
  }
  std::size_t consumed() const { return rd_.consumed(); }

 private:
  RangeDecoder rd_;
  std::array<Context, kNumContexts> contexts_{};
  Keystream* ks_;
  BinString* trace_;
};

}  // namespace

FrameLayout::FrameLayout(Profile p, int w, int h) : profile(p), width(w), height(h) {
  if (w <= 0 || h <= 0 || w % kMacroblockSize || h % kMacroblockSize) {
    throw std::invalid_argument("frame dimensions must be positive multiples of 16");
  }
}

std::vector<std::uint8_t> encode_frame_payload(const FrameSyntax& fs, const FrameLayout& layout,
                                               Keystream* encrypt, BinString* trace) {
  CodingSink sink(encrypt, trace);
  write_frame_bins(sink, fs, layout);
  return sink.finish();
}

FrameSyntax decode_frame_payload(std::span<const std::uint8_t> payload, const FrameLayout& layout,
                                 FrameType type, int qp, Keystream* decrypt, BinString* trace) {
  CodingSource source(payload, decrypt, trace);
  FrameSyntax fs = read_frame_bins(source, layout, type, qp);
  if (source.consumed() != payload.size()) {
    throw FormatError("frame payload has trailing bytes");
  }
  return fs;
}

}  // namespace sevc
