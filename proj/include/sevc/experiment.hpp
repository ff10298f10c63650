#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sevc/cipher.hpp"
#include "sevc/frame.hpp"
#include "sevc/metrics.hpp"
#include "sevc/transform.hpp"
#include "sevc/transrater.hpp"

namespace sevc {

struct NamedClip {
  std::string name;
  VideoSequence video;
};

struct SynthOptions {
  int width = 64;
  int height = 64;
  int frames = 20;
  int rectangles = 3;
  // Global pan of the textured background, pixels per frame.
  int pan_x = 0;
  int pan_y = 0;
  bool random_pan = true;
  int noise = 2;  // per-frame sensor noise amplitude
};

// Seeded synthetic clip: panning textured background with moving textured
// rectangles. Identical seeds give identical clips.
VideoSequence synthesize_clip(std::uint64_t seed, const SynthOptions& opt = {});
std::vector<NamedClip> synthesize_corpus(std::uint64_t seed, int clips,
                                         const SynthOptions& opt = {});

// All *.y4m files in a directory, sorted by file name.
std::vector<NamedClip> load_corpus(const std::string& dir);

struct ExperimentConfig {
  int base_qp = 12;
  std::vector<int> targets = {24, 36, 48};
  int gop = 16;
  std::vector<Profile> profiles = {Profile::A, Profile::H};
  CipherSpec cipher{CipherKind::Aes128Cfb, {}, {}};
  TransrateMode mode = TransrateMode::Closed;
  int jobs = 1;
  std::string report_dir;  // empty: no files written
};

struct ExperimentRow {
  std::string clip;
  Profile profile = Profile::A;
  int qp = 0;
  std::size_t bytes = 0;
  double bitrate_bps = 0;
  Psnr psnr_y_keyless;  // pooled, scrambled decode vs original
  Psnr psnr_y_keyed;    // pooled, decrypted decode vs original
  double mean_psnr_y_keyless = 0;  // mean of per-frame dB
  double mean_psnr_y_keyed = 0;
  double ssim_keyless = 0;
  double ssim_keyed = 0;
  double entropy_keyless = 0;  // mean of R, G, B, Y histogram entropies
  double entropy_keyed = 0;
};

struct ExperimentTiming {
  std::string clip;
  Profile profile = Profile::A;
  double enc_time_ms = 0;
  double transrate_time_ms = 0;  // all targets, shared parse
};

struct ExperimentDelta {
  std::string clip;
  int qp = 0;
  double delta_bitrate = 0;  // profile H vs profile A, percent
  double delta_psnr = 0;     // keyless PSNR_Y, percent
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<ExperimentTiming> timings;
  std::vector<ExperimentDelta> deltas;
};

// Step 1 crypto-encode at base_qp, keyless transrate to every target,
// keyless and keyed decode of each stream, quality and size per row. When
// report_dir is set writes results.csv, deltas.csv, timings.csv,
// summary.json, frames/*.ppm and histograms/*.csv there.
ExperimentResult run_experiment(const std::vector<NamedClip>& corpus, const ExperimentConfig& cfg);

std::string results_csv(const ExperimentResult& r);
std::string deltas_csv(const ExperimentResult& r);
std::string timings_csv(const ExperimentResult& r);

}  // namespace sevc
