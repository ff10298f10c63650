#include <gtest/gtest.h>

#include "sevc/codec.hpp"
#include "sevc/metrics.hpp"
#include "sevc/transrater.hpp"
#include "support.hpp"

using namespace sevc;

namespace {

CodedBitstream encode(const VideoSequence& v, Profile p, CipherSpec cipher = {}, int gop = 16) {
  EncoderConfig cfg;
  cfg.profile = p;
  cfg.cipher = cipher;
  cfg.gop = gop;
  cfg.search_range = 8;
  return encode_sequence(v, cfg);
}

VideoSequence panning_clip(std::uint64_t seed) {
  SynthOptions o;
  o.width = 48;
  o.height = 48;
  o.frames = 10;
  o.random_pan = false;
  o.pan_x = 2;
  o.pan_y = 1;
  o.rectangles = 1;
  return synthesize_clip(seed, o);
}

}  // namespace

TEST(Transrate, RejectsNonIncreasingTargets) {
  const CodedBitstream bs = encode(test::small_clip(1, 2), Profile::A);
  EXPECT_THROW(transrate_open(bs, 12), std::invalid_argument);
  EXPECT_THROW(transrate_open(bs, 8), std::invalid_argument);
  EXPECT_THROW(transrate_closed(bs, 52), std::invalid_argument);
  const int targets[] = {24, 12};
  EXPECT_THROW(transrate_many(bs, targets, TransrateMode::Open), std::invalid_argument);
}

TEST(Transrate, EmptyTargetListGivesNothing) {
  const CodedBitstream bs = encode(test::small_clip(1, 2), Profile::A);
  EXPECT_TRUE(transrate_many(bs, {}, TransrateMode::Closed).empty());
}

TEST(Transrate, ZeroLevelsStayZeroAndHeaderCarries) {
  const CodedBitstream bs = encode(test::small_clip(2, 4), Profile::H, test::random_spec(CipherKind::XorPrng, 1));
  const CodedBitstream out = transrate_open(bs, 30);
  EXPECT_EQ(out.header.qp, 30);
  EXPECT_EQ(out.header.cipher, bs.header.cipher);
  EXPECT_EQ(out.header.nonce, bs.header.nonce);
  DecodeDetails din, dout;
  decode_sequence(bs, std::nullopt, &din);
  decode_sequence(out, std::nullopt, &dout);
  for (std::size_t f = 0; f < din.syntax.size(); ++f) {
    EXPECT_EQ(dout.syntax[f].qp, 30);
    for (std::size_t m = 0; m < din.syntax[f].mbs.size(); ++m) {
      const MacroblockSyntax& a = din.syntax[f].mbs[m];
      const MacroblockSyntax& b = dout.syntax[f].mbs[m];
      EXPECT_EQ(a.inter, b.inter);
      EXPECT_EQ(a.mvd, b.mvd);
      for (std::size_t k = 0; k < a.levels.size(); ++k)
        for (int i = 0; i < a.levels[k].count(); ++i) {
          if (a.levels[k].v[i] == 0) ASSERT_EQ(b.levels[k].v[i], 0);
          // Requantization never changes a sign.
          ASSERT_GE(a.levels[k].v[i] * b.levels[k].v[i], 0);
        }
    }
  }
}

TEST(Transrate, OpenLoopCommutesWithEncryption) {
  for (Profile p : {Profile::A, Profile::H}) {
    for (CipherKind kind : {CipherKind::Aes128Cfb, CipherKind::XorPrng, CipherKind::XorFixed}) {
      const VideoSequence v = test::small_clip(3 + static_cast<int>(kind), 6);
      const CipherSpec spec = test::random_spec(kind, 10);
      const CodedBitstream plain = encode(v, p, {}, 4);
      const CodedBitstream enc = encode(v, p, spec, 4);
      for (int q2 : {24, 36, 48}) {
        const VideoSequence a = decode_sequence(transrate_open(enc, q2), spec.key);
        const VideoSequence b = decode_sequence(transrate_open(plain, q2));
        EXPECT_EQ(a, b) << cipher_name(kind) << " qp " << q2;
      }
    }
  }
}

TEST(Transrate, ManyEqualsSingles) {
  const VideoSequence v = test::small_clip(4, 8);
  const CodedBitstream bs = encode(v, Profile::A, test::random_spec(CipherKind::Aes128Cfb, 2), 4);
  const std::vector<int> targets = {24, 36, 48};
  const auto open = transrate_many(bs, targets, TransrateMode::Open);
  const auto closed = transrate_many(bs, targets, TransrateMode::Closed);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    EXPECT_EQ(serialize(open[i]), serialize(transrate_open(bs, targets[i])));
    EXPECT_EQ(serialize(closed[i]), serialize(transrate_closed(bs, targets[i])));
  }
}

TEST(Transrate, OutputSizeIndependentOfCipher) {
  const VideoSequence v = test::small_clip(5, 6);
  const CodedBitstream plain = encode(v, Profile::H);
  const CodedBitstream enc = encode(v, Profile::H, test::random_spec(CipherKind::Aes128Cfb, 3));
  for (int q2 : {24, 36, 48})
    EXPECT_EQ(serialize(transrate_open(plain, q2)).size(), serialize(transrate_open(enc, q2)).size());
}

TEST(ClosedLoop, ExactRequantizationKeepsDriftZero) {
  // Flat luma 100 over a flat-128 intra prediction is reproduced exactly at
  // qp 12, 24 and 36, so nothing drifts.
  const VideoSequence v = test::constant_video(32, 32, 5, 100, 128);
  for (Profile p : {Profile::A, Profile::H}) {
    const CodedBitstream bs = encode(v, p);
    for (int q2 : {24, 36}) {
      bool all_zero = true;
      const CodedBitstream closed =
          transrate_closed(bs, q2, [&](int, const DriftBuffer& d) { all_zero &= d.all_zero(); });
      EXPECT_TRUE(all_zero) << q2;
      EXPECT_EQ(serialize(closed), serialize(transrate_open(bs, q2)));
    }
  }
}

TEST(ClosedLoop, StaticClipCarriesIntraDriftUnchanged) {
  // Flat luma 60 loses 4 levels of DC at qp 48; P frames have no residual
  // and the compensated drift requantizes to zero, so it is carried as is.
  const VideoSequence v = test::constant_video(32, 32, 4, 60, 128);
  const CodedBitstream bs = encode(v, Profile::A);
  std::vector<DriftBuffer> seen;
  const CodedBitstream out =
      transrate_closed(bs, 48, [&](int, const DriftBuffer& d) { seen.push_back(d); });
  ASSERT_EQ(seen.size(), 4u);
  EXPECT_FALSE(seen[0].all_zero());
  for (std::size_t f = 1; f < seen.size(); ++f) {
    EXPECT_EQ(seen[f].y, seen[0].y) << f;
    EXPECT_EQ(seen[f].u, seen[0].u) << f;
  }
  // The drift equals the pixel difference between input and output decodes.
  const VideoSequence din = decode_sequence(bs), dout = decode_sequence(out);
  for (std::size_t i = 0; i < din.frames[0].y.samples.size(); ++i)
    EXPECT_EQ(seen.back().y.samples[i], int(din.frames.back().y.samples[i]) - int(dout.frames.back().y.samples[i]));
}

TEST(ClosedLoop, BeatsOpenLoopAgainstCascadeOnPanningClip) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const VideoSequence v = panning_clip(seed);
    for (Profile p : {Profile::A, Profile::H}) {
      const CodedBitstream bs = encode(v, p);
      for (int q2 : {24, 36}) {
        const VideoSequence ref = decode_sequence(cascade_reference(bs, q2, Key128{}));
        const double open = compare_sequences(ref, decode_sequence(transrate_open(bs, q2))).pooled_y.value_or_inf();
        const double closed = compare_sequences(ref, decode_sequence(transrate_closed(bs, q2))).pooled_y.value_or_inf();
        EXPECT_GE(closed, open) << "seed " << seed << " qp " << q2;
      }
    }
  }
}

TEST(Cascade, NullCipherIsDecodeThenEncode) {
  const VideoSequence v = test::small_clip(6, 5);
  const CodedBitstream bs = encode(v, Profile::A, {}, 3);
  DecodeDetails d;
  const VideoSequence decoded = decode_sequence(bs, std::nullopt, &d);
  EncoderConfig cfg;
  cfg.qp = 30;
  cfg.gop = 3;
  cfg.reuse_motion = d.motion;
  EXPECT_EQ(serialize(cascade_reference(bs, 30, Key128{})), serialize(encode_sequence(decoded, cfg)));
}

TEST(Cascade, ReencryptsWithSameKey) {
  const VideoSequence v = test::small_clip(7, 5);
  const CipherSpec spec = test::random_spec(CipherKind::Aes128Cfb, 4);
  const CodedBitstream enc = encode(v, Profile::H, spec);
  const CodedBitstream plain = encode(v, Profile::H);
  const CodedBitstream c_enc = cascade_reference(enc, 36, spec.key);
  const CodedBitstream c_plain = cascade_reference(plain, 36, Key128{});
  EXPECT_EQ(c_enc.header.cipher, CipherKind::Aes128Cfb);
  EXPECT_EQ(decode_sequence(c_enc, spec.key), decode_sequence(c_plain));
}
