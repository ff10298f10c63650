#pragma once

#include <optional>
#include <vector>

#include "sevc/bitstream.hpp"
#include "sevc/cipher.hpp"
#include "sevc/frame.hpp"
#include "sevc/motion.hpp"
#include "sevc/syntax.hpp"

namespace sevc {

struct EncoderConfig {
  Profile profile = Profile::A;
  int qp = 12;
  int gop = 16;
  int search_range = 16;
  CipherSpec cipher;
  // When non-empty, one motion field per frame to use instead of motion
  // search (vectors are clamped in-bounds). Intra frames ignore theirs.
  std::vector<MotionField> reuse_motion;
};

// Encoder reconstruction from true signs; encryption happens only at the
// entropy stage. Throws std::invalid_argument on bad config or dimensions.
CodedBitstream encode_sequence(const VideoSequence& video, const EncoderConfig& cfg,
                               std::vector<Frame>* reconstruction = nullptr);

struct DecodeDetails {
  bool keep_bins = false;
  std::vector<FrameSyntax> syntax;
  std::vector<MotionField> motion;
  std::vector<BinString> bins;  // only with keep_bins
};

// With a key, sign bins are decrypted and the output matches the encoder
// reconstruction. Without one the same control flow runs on the coded signs,
// which yields the scrambled picture. Throws FormatError on structural damage.
VideoSequence decode_sequence(const CodedBitstream& bs,
                              const std::optional<Key128>& key = std::nullopt,
                              DecodeDetails* details = nullptr);

// Per-frame decode steps, shared by decoder, encoder and transrater.
MotionField motion_field_from_syntax(const FrameSyntax& fs, const FrameLayout& layout);
Frame reconstruct_frame(const FrameSyntax& fs, const FrameLayout& layout, const Frame* reference,
                        const MotionField& motion, int index);

// Block placement inside a macroblock: plane (0=Y,1=U,2=V) and top-left
// offset in that plane's macroblock area.
struct BlockPlacement {
  int plane = 0;
  int x = 0;
  int y = 0;
};
BlockPlacement block_placement(const FrameLayout& layout, int block);

// Keyless parse of every inter macroblock's vector (as decoded, so possibly
// built from encrypted MVD signs).
MvSidecar extract_mv_sidecar(const CodedBitstream& bs);

// Recover MVDs from sidecar records by re-running the median predictor.
std::vector<MotionVector> mvds_from_sidecar(const MvSidecar& sc, int mbs_x, int mbs_y);

}  // namespace sevc
