#include <gtest/gtest.h>

#include "sevc/codec.hpp"
#include "sevc/error.hpp"
#include "sevc/metrics.hpp"
#include "support.hpp"

using namespace sevc;

namespace {

int max_abs_diff(const Plane& a, const Plane& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    m = std::max(m, std::abs(int(a.samples[i]) - int(b.samples[i])));
  return m;
}

}  // namespace

TEST(Codec, GrayFrameWithinTwo) {
  for (Profile p : {Profile::A, Profile::H}) {
    for (int luma : {0, 16, 77, 128, 200, 255}) {
      const VideoSequence v = test::constant_video(32, 16, 1, static_cast<std::uint8_t>(luma), 90);
      EncoderConfig cfg;
      cfg.profile = p;
      const VideoSequence d = decode_sequence(encode_sequence(v, cfg));
      ASSERT_EQ(d.frames.size(), 1u);
      EXPECT_LE(max_abs_diff(d.frames[0].y, v.frames[0].y), 2) << luma;
      EXPECT_LE(max_abs_diff(d.frames[0].u, v.frames[0].u), 2) << luma;
    }
  }
}

TEST(Codec, DeterministicBytes) {
  const VideoSequence v = test::small_clip(1);
  EncoderConfig cfg;
  cfg.cipher = test::random_spec(CipherKind::Aes128Cfb, 4);
  EXPECT_EQ(serialize(encode_sequence(v, cfg)), serialize(encode_sequence(v, cfg)));
}

TEST(Codec, StaticPFrameIsCheap) {
  VideoSequence v = test::small_clip(2, 1);
  v.frames.push_back(v.frames[0]);
  v.frames[1].index = 1;
  EncoderConfig cfg;
  DecodeDetails d;
  const CodedBitstream bs = encode_sequence(v, cfg);
  decode_sequence(bs, std::nullopt, &d);
  ASSERT_EQ(bs.frames.size(), 2u);
  EXPECT_EQ(bs.frames[0].type, FrameType::I);
  EXPECT_EQ(bs.frames[1].type, FrameType::P);
  EXPECT_LT(bs.frames[1].payload.size(), bs.frames[0].payload.size());
  for (const MacroblockSyntax& mb : d.syntax[1].mbs) {
    EXPECT_TRUE(mb.inter);
    EXPECT_EQ(mb.mvd, (MotionVector{0, 0}));
  }
}

TEST(Codec, GopSetsFrameTypes) {
  EncoderConfig cfg;
  cfg.gop = 3;
  const CodedBitstream bs = encode_sequence(test::small_clip(3, 7), cfg);
  for (std::size_t i = 0; i < bs.frames.size(); ++i)
    EXPECT_EQ(bs.frames[i].type, i % 3 == 0 ? FrameType::I : FrameType::P) << i;
}

TEST(Codec, KeyedDecodeMatchesEncoderReconstruction) {
  for (Profile p : {Profile::A, Profile::H}) {
    EncoderConfig cfg;
    cfg.profile = p;
    cfg.gop = 4;
    cfg.cipher = test::random_spec(CipherKind::Aes128Cfb, 5);
    std::vector<Frame> recon;
    const VideoSequence v = test::small_clip(4, 6);
    const CodedBitstream bs = encode_sequence(v, cfg, &recon);
    const VideoSequence d = decode_sequence(bs, cfg.cipher.key);
    ASSERT_EQ(d.frames.size(), recon.size());
    for (std::size_t i = 0; i < recon.size(); ++i) EXPECT_TRUE(d.frames[i].same_pixels(recon[i])) << i;
  }
}

TEST(Codec, NullCipherKeylessEqualsKeyed) {
  EncoderConfig cfg;
  const CodedBitstream bs = encode_sequence(test::small_clip(5), cfg);
  EXPECT_EQ(decode_sequence(bs), decode_sequence(bs, Key128{}));
}

TEST(Codec, KeylessAesDecodeIsWorse) {
  EncoderConfig cfg;
  cfg.cipher = test::random_spec(CipherKind::Aes128Cfb, 6);
  const VideoSequence v = test::small_clip(6);
  const CodedBitstream bs = encode_sequence(v, cfg);
  const SequenceQuality keyless = compare_sequences(v, decode_sequence(bs));
  const SequenceQuality keyed = compare_sequences(v, decode_sequence(bs, cfg.cipher.key));
  EXPECT_LT(keyless.pooled_y.value_or_inf(), keyed.pooled_y.value_or_inf());
}

TEST(Codec, RejectsBadDimensionsAndConfig) {
  EncoderConfig cfg;
  EXPECT_THROW(encode_sequence(test::constant_video(24, 16, 1, 0), cfg), std::invalid_argument);
  cfg.qp = 52;
  EXPECT_THROW(encode_sequence(test::constant_video(16, 16, 1, 0), cfg), std::invalid_argument);
}

TEST(Container, HeaderIs33Bytes) {
  CodedBitstream bs;
  bs.header.width = 16;
  bs.header.height = 16;
  EXPECT_EQ(serialize(bs).size(), 33u);
  EXPECT_EQ(kHeaderSize, 33u);
}

TEST(Container, RoundTripAndByteSize) {
  EncoderConfig cfg;
  cfg.profile = Profile::H;
  cfg.cipher = test::random_spec(CipherKind::XorPrng, 7);
  const CodedBitstream bs = encode_sequence(test::small_clip(7), cfg);
  const auto bytes = serialize(bs);
  EXPECT_EQ(bytes.size(), bs.byte_size());
  EXPECT_EQ(deserialize(bytes), bs);
  // The key never reaches the container.
  const std::string s(bytes.begin(), bytes.end());
  EXPECT_EQ(s.find(std::string(cfg.cipher.key.begin(), cfg.cipher.key.end())), std::string::npos);
}

TEST(Container, StructuralErrors) {
  EncoderConfig cfg;
  const auto good = serialize(encode_sequence(test::small_clip(8, 2), cfg));
  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(deserialize(bad), FormatError);
  bad = good;
  bad[4] = 9;  // version
  EXPECT_THROW(deserialize(bad), FormatError);
  bad = good;
  bad[16] = 7;  // cipher kind
  EXPECT_THROW(deserialize(bad), FormatError);
  bad = good;
  bad.pop_back();
  EXPECT_THROW(deserialize(bad), FormatError);
  bad = good;
  bad.push_back(0);
  EXPECT_THROW(deserialize(bad), FormatError);
  EXPECT_THROW(deserialize(std::span<const std::uint8_t>(good.data(), 10)), FormatError);
}

TEST(Container, CipherByteChangesOnlySemantics) {
  EncoderConfig cfg;
  cfg.cipher = test::random_spec(CipherKind::Aes128Cfb, 9);
  const VideoSequence v = test::small_clip(9);
  auto bytes = serialize(encode_sequence(v, cfg));
  const Key128 key = cfg.cipher.key;
  const VideoSequence keyed = decode_sequence(deserialize(bytes), key);
  const VideoSequence keyless = decode_sequence(deserialize(bytes));
  bytes[16] = static_cast<std::uint8_t>(CipherKind::XorPrng);
  const CodedBitstream relabeled = deserialize(bytes);
  EXPECT_EQ(decode_sequence(relabeled), keyless);
  EXPECT_NE(decode_sequence(relabeled, key), keyed);
}

TEST(Container, CorruptPayloadIsFormatErrorNotCrash) {
  EncoderConfig cfg;
  const CodedBitstream bs = encode_sequence(test::small_clip(10, 2), cfg);
  CodedBitstream cut = bs;
  cut.frames[0].payload.resize(cut.frames[0].payload.size() / 2);
  EXPECT_THROW(decode_sequence(cut), FormatError);
  CodedBitstream ptype = bs;
  ptype.frames[0].type = FrameType::P;
  EXPECT_THROW(decode_sequence(ptype), FormatError);
}
