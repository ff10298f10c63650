#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sevc/entropy.hpp"
#include "sevc/error.hpp"

using namespace sevc;

namespace {

struct Op {
  bool bypass;
  bool bin;
  int ctx;
};

std::vector<std::uint8_t> encode_ops(const std::vector<Op>& ops, int contexts) {
  std::vector<Context> ctx(contexts);
  RangeEncoder enc;
  for (const Op& op : ops) {
    if (op.bypass) {
      enc.encode_bypass(op.bin);
    } else {
      enc.encode_regular(ctx[op.ctx], op.bin);
    }
  }
  return enc.finish();
}

std::vector<bool> decode_ops(std::span<const std::uint8_t> bytes, const std::vector<Op>& shape,
                             int contexts, std::size_t* consumed = nullptr) {
  std::vector<Context> ctx(contexts);
  RangeDecoder dec(bytes);
  std::vector<bool> out;
  for (const Op& op : shape) out.push_back(op.bypass ? dec.decode_bypass() : dec.decode_regular(ctx[op.ctx]));
  if (consumed) *consumed = dec.consumed();
  return out;
}

std::vector<Op> random_ops(std::mt19937_64& rng, std::size_t count, int contexts) {
  std::vector<Op> ops(count);
  std::bernoulli_distribution skew(0.85);
  for (Op& op : ops) {
    op.bypass = rng() % 3 == 0;
    op.ctx = static_cast<int>(rng() % contexts);
    op.bin = op.bypass ? (rng() & 1) : (op.ctx % 2 ? skew(rng) : !skew(rng));
  }
  return ops;
}

std::string bits_of(const BinString& bins) {
  std::string s;
  for (const Bin& b : bins) s.push_back(b.value ? '1' : '0');
  return s;
}

}  // namespace

TEST(RangeCoder, FreshRegularOneGolden) {
  RangeEncoder enc;
  Context ctx;
  enc.encode_regular(ctx, true);
  EXPECT_EQ(enc.range(), 0x7FFFF800u);
  EXPECT_EQ(ctx.p1, 2112);
}

TEST(RangeCoder, ContextAdaptationAndClamp) {
  Context c;
  c.update(false);
  EXPECT_EQ(c.p1, 2048 - 64);
  Context hi{4095};
  hi.update(true);
  EXPECT_EQ(hi.p1, 4095);
  Context lo{1};
  for (int i = 0; i < 10; ++i) lo.update(false);
  EXPECT_EQ(lo.p1, 1);
}

TEST(RangeCoder, FlushOfEmptyStream) {
  RangeEncoder enc;
  EXPECT_EQ(enc.finish(), std::vector<std::uint8_t>(4, 0));
}

TEST(RangeCoder, SecondFinishThrows) {
  RangeEncoder enc;
  enc.finish();
  EXPECT_THROW(enc.finish(), std::logic_error);
}

TEST(RangeCoder, TenThousandZeros) {
  std::vector<Op> ops(10000, Op{false, false, 0});
  const auto bytes = encode_ops(ops, 1);
  std::size_t consumed = 0;
  const auto out = decode_ops(bytes, ops, 1, &consumed);
  EXPECT_EQ(std::count(out.begin(), out.end(), true), 0);
  EXPECT_EQ(consumed, bytes.size());
}

TEST(RangeCoder, SkewedSourceCompresses) {
  // p1 settles near 4000/4096 on a 97.7% ones source.
  std::mt19937_64 rng(1);
  std::bernoulli_distribution src(4000.0 / 4096.0);
  std::vector<Op> ops(4096);
  for (Op& op : ops) op = {false, src(rng), 0};
  const auto bytes = encode_ops(ops, 1);
  const double h = -(4000.0 / 4096) * std::log2(4000.0 / 4096) - (96.0 / 4096) * std::log2(96.0 / 4096);
  EXPECT_LT(bytes.size() * 8.0, 4096 * h * 1.5 + 64);
  EXPECT_LT(bytes.size() * 8, 4096u / 4);
  const auto out = decode_ops(bytes, ops, 1);
  for (std::size_t i = 0; i < ops.size(); ++i) ASSERT_EQ(out[i], ops[i].bin);
}

TEST(RangeCoder, BypassRangeIndependentOfValues) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    RangeEncoder a, b;
    for (int i = 0; i < 300; ++i) {
      a.encode_bypass(rng() & 1);
      b.encode_bypass(rng() & 1);
      ASSERT_EQ(a.range(), b.range());
    }
  }
}

TEST(RangeCoder, BypassLengthIsFloorKOver8Plus4) {
  for (int k : {0, 1, 7, 8, 9, 15, 16, 17, 100, 1000}) {
    RangeEncoder enc;
    for (int i = 0; i < k; ++i) enc.encode_bypass(i % 3 == 0);
    EXPECT_EQ(enc.finish().size(), static_cast<std::size_t>(k / 8 + 4)) << k;
  }
}

TEST(RangeCoder, EightBypassBinsAllPatternsSameLength) {
  for (int pattern = 0; pattern < 256; ++pattern) {
    RangeEncoder enc;
    for (int i = 0; i < 8; ++i) enc.encode_bypass((pattern >> i) & 1);
    ASSERT_EQ(enc.finish().size(), 5u) << pattern;
  }
}

TEST(RangeCoder, ExhaustiveSixteenBinBypass) {
  std::vector<Op> shape(16, Op{true, false, 0});
  for (std::uint32_t pattern = 0; pattern < (1u << 16); ++pattern) {
    for (int i = 0; i < 16; ++i) shape[i].bin = (pattern >> i) & 1;
    const auto bytes = encode_ops(shape, 1);
    ASSERT_EQ(bytes.size(), 6u);
    const auto out = decode_ops(bytes, shape, 1);
    for (int i = 0; i < 16; ++i) ASSERT_EQ(out[i], shape[i].bin) << pattern;
  }
}

TEST(RangeCoder, RandomMixedRoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ops = random_ops(rng, 10000, 8);
    const auto bytes = encode_ops(ops, 8);
    std::size_t consumed = 0;
    const auto out = decode_ops(bytes, ops, 8, &consumed);
    for (std::size_t i = 0; i < ops.size(); ++i) ASSERT_EQ(out[i], ops[i].bin);
    EXPECT_EQ(consumed, bytes.size());
  }
}

TEST(RangeCoder, FlippedBypassLeavesRegularBinsIntact) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto ops = random_ops(rng, 2000, 6);
    const auto ref = encode_ops(ops, 6);
    auto flipped = ops;
    for (Op& op : flipped)
      if (op.bypass && rng() % 4 == 0) op.bin = !op.bin;
    const auto bytes = encode_ops(flipped, 6);
    ASSERT_EQ(bytes.size(), ref.size());
    const auto out = decode_ops(bytes, ops, 6);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      ASSERT_EQ(out[i], flipped[i].bin);
      if (!ops[i].bypass) ASSERT_EQ(out[i], ops[i].bin);
    }
  }
}

TEST(RangeCoder, TruncatedStreamIsAnError) {
  std::mt19937_64 rng(5);
  const auto ops = random_ops(rng, 3000, 4);
  auto bytes = encode_ops(ops, 4);
  bytes.pop_back();
  EXPECT_THROW(decode_ops(bytes, ops, 4), FormatError);
  EXPECT_THROW(RangeDecoder(std::span<const std::uint8_t>(bytes.data(), 3)), FormatError);
}

TEST(ExpGolomb, OrderZeroAndOne) {
  BinRecorder r;
  write_exp_golomb(r, 0, 0);
  EXPECT_EQ(bits_of(r.bins), "1");
  r.bins.clear();
  write_exp_golomb(r, 1, 0);
  EXPECT_EQ(bits_of(r.bins), "010");
  r.bins.clear();
  write_exp_golomb(r, 4, 0);
  EXPECT_EQ(bits_of(r.bins), "00101");
  r.bins.clear();
  write_exp_golomb(r, 0, 1);
  EXPECT_EQ(bits_of(r.bins), "10");
  r.bins.clear();
  write_exp_golomb(r, 2, 1);
  EXPECT_EQ(bits_of(r.bins), "0100");
}

TEST(ExpGolomb, RoundTripAndPrefixCap) {
  for (std::uint64_t v : {0ull, 1ull, 2ull, 100ull, 65535ull, 1ull << 31}) {
    for (int k : {0, 1}) {
      BinRecorder r;
      write_exp_golomb(r, v, k);
      BinStringReader rd(r.bins);
      EXPECT_EQ(read_exp_golomb(rd, k), v);
      EXPECT_TRUE(rd.done());
    }
  }
  BinString zeros(40, Bin{BinKind::Bypass, false, 0, 0});
  BinStringReader rd(zeros);
  EXPECT_THROW(read_exp_golomb(rd, 0), FormatError);
}

TEST(Binarize, PlusOne) {
  const BinString b = binarize_level(1);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].kind, BinKind::Regular);
  EXPECT_FALSE(b[0].value);
  EXPECT_EQ(b[1].kind, BinKind::Sign);
  EXPECT_FALSE(b[1].value);
}

TEST(Binarize, MinusThree) {
  const BinString b = binarize_level(-3);
  ASSERT_EQ(b.size(), 5u);
  EXPECT_EQ(b[0].kind, BinKind::Regular);
  EXPECT_TRUE(b[0].value);
  EXPECT_EQ(bits_of(BinString(b.begin() + 1, b.begin() + 4)), "010");
  for (int i = 1; i < 4; ++i) EXPECT_EQ(b[i].kind, BinKind::Bypass);
  EXPECT_EQ(b[4].kind, BinKind::Sign);
  EXPECT_TRUE(b[4].value);
  EXPECT_EQ(debinarize_level(b), -3);
}

TEST(Binarize, ZeroLevelRejected) { EXPECT_THROW(binarize_level(0), std::invalid_argument); }

TEST(Binarize, ZeroMvdHasNoSign) {
  const BinString b = binarize_mvd(0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].kind, BinKind::Regular);
  EXPECT_FALSE(b[0].value);
}

TEST(Binarize, RoundTrips) {
  for (std::int64_t l = -300; l <= 300; ++l) {
    if (l == 0) continue;
    EXPECT_EQ(debinarize_level(binarize_level(l)), l);
  }
  for (int d = -300; d <= 300; ++d) {
    const BinString b = binarize_mvd(d);
    EXPECT_EQ(debinarize_mvd(b), d);
    EXPECT_EQ(std::count_if(b.begin(), b.end(), [](const Bin& x) { return x.kind == BinKind::Sign; }),
              d != 0 ? 1 : 0);
  }
}

TEST(Binarize, SignFlipTouchesOnlySignBin) {
  for (std::int64_t l : {1, 2, 7, 1000}) {
    const BinString p = binarize_level(l), n = binarize_level(-l);
    ASSERT_EQ(p.size(), n.size());
    for (std::size_t i = 0; i + 1 < p.size(); ++i) EXPECT_EQ(p[i], n[i]);
    EXPECT_NE(p.back().value, n.back().value);
  }
}
