#pragma once

#include <cstdint>
#include <random>

#include "sevc/cipher.hpp"
#include "sevc/experiment.hpp"
#include "sevc/frame.hpp"

namespace sevc::test {

inline VideoSequence constant_video(int w, int h, int frames, std::uint8_t luma,
                                    std::uint8_t chroma = 128) {
  VideoSequence v;
  v.width = w;
  v.height = h;
  for (int i = 0; i < frames; ++i) v.frames.emplace_back(w, h, i, luma, chroma);
  return v;
}

inline VideoSequence small_clip(std::uint64_t seed, int frames = 6, int w = 32, int h = 32) {
  SynthOptions o;
  o.width = w;
  o.height = h;
  o.frames = frames;
  o.rectangles = 2;
  return synthesize_clip(seed, o);
}

inline CipherSpec random_spec(CipherKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CipherSpec s;
  s.kind = kind;
  for (auto& b : s.key) b = static_cast<std::uint8_t>(rng());
  for (auto& b : s.nonce) b = static_cast<std::uint8_t>(rng());
  return s;
}

}  // namespace sevc::test
