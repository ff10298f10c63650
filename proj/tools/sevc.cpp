// sevc: command-line front end for the selective-encryption codec.
//
// Exit codes: 0 ok, 1 usage, 2 data/format, 3 key.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sevc/codec.hpp"
#include "sevc/error.hpp"
#include "sevc/experiment.hpp"
#include "sevc/metrics.hpp"
#include "sevc/transrater.hpp"

namespace {

using namespace sevc;

constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitKey = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string in, out, ref, key_file, report, corpus, mvs;
  int qp = 12;
  int gop = 16;
  int frame = 0;
  int clips = 10;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string profile = "A";
  std::string cipher = "null";
  std::string mode = "closed";
  std::vector<int> targets = {24, 36, 48};
};

std::optional<std::string> key_path(const Options& o) {
  if (!o.key_file.empty()) return o.key_file;
  if (const char* env = std::getenv("CVB_KEY_FILE"); env && *env) return std::string(env);
  return std::nullopt;
}

Profile parse_profile(const std::string& s) {
  if (s == "A") return Profile::A;
  if (s == "H") return Profile::H;
  throw UsageError("profile must be A or H");
}

CipherKind parse_cipher(const std::string& s) {
  const auto kind = parse_cipher_name(s);
  if (!kind) throw UsageError("unknown cipher '" + s + "'");
  return *kind;
}

std::string output_for_target(const std::string& out, int qp, bool many) {
  const std::string tag = "{qp}";
  if (auto pos = out.find(tag); pos != std::string::npos) {
    return out.substr(0, pos) + std::to_string(qp) + out.substr(pos + tag.size());
  }
  if (!many) return out;
  const auto dot = out.rfind('.');
  const std::string suffix = "_qp" + std::to_string(qp);
  if (dot == std::string::npos || out.find('/', dot) != std::string::npos) return out + suffix;
  return out.substr(0, dot) + suffix + out.substr(dot);
}

const Frame& pick_frame(const VideoSequence& v, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= v.frames.size()) {
    throw UsageError("frame index out of range");
  }
  return v.frames[static_cast<std::size_t>(index)];
}

int cmd_encode(const Options& o) {
  EncoderConfig cfg;
  cfg.profile = parse_profile(o.profile);
  cfg.qp = o.qp;
  cfg.gop = o.gop;
  cfg.cipher.kind = parse_cipher(o.cipher);
  if (cfg.cipher.kind != CipherKind::Null) {
    const auto path = key_path(o);
    if (!path) throw KeyError("cipher " + o.cipher + " needs --key-file or CVB_KEY_FILE");
    const KeyMaterial km = read_key_file(*path);
    cfg.cipher.key = km.key;
    cfg.cipher.nonce = km.nonce;
  }
  if (auto warn = weak_key_warning(cfg.cipher)) std::cerr << "warning: " << *warn << "\n";
  const VideoSequence video = read_y4m_file(o.in);
  write_bitstream_file(encode_sequence(video, cfg), o.out);
  return 0;
}

int cmd_decode(const Options& o) {
  const CodedBitstream bs = read_bitstream_file(o.in);
  std::optional<Key128> key;
  if (const auto path = key_path(o)) key = read_key_file(*path).key;
  write_y4m_file(decode_sequence(bs, key), o.out);
  return 0;
}

int cmd_transrate(const Options& o) {
  const bool cascade = o.mode == "cascade";
  if (!cascade && key_path(o)) throw UsageError("transrate accepts no key");
  if (!cascade && o.mode != "open" && o.mode != "closed") {
    throw UsageError("mode must be open, closed or cascade");
  }
  if (o.targets.empty()) throw UsageError("no targets");
  const CodedBitstream bs = read_bitstream_file(o.in);
  if (!o.mvs.empty()) write_mv_sidecar_file(extract_mv_sidecar(bs), o.mvs);

  std::vector<CodedBitstream> outs;
  if (cascade) {
    const auto path = key_path(o);
    if (!path) throw KeyError("cascade mode re-encodes and needs the key");
    const Key128 key = read_key_file(*path).key;
    for (int q2 : o.targets) outs.push_back(cascade_reference(bs, q2, key));
  } else {
    const TransrateMode mode = o.mode == "open" ? TransrateMode::Open : TransrateMode::Closed;
    std::vector<TransrateReport> reports;
    outs = transrate_many(bs, o.targets, mode, &reports);
    for (const TransrateReport& r : reports) {
      if (r.drift_saturations) {
        std::cerr << "qp " << r.target_qp << ": " << r.drift_saturations
                  << " drift samples saturated\n";
      }
    }
  }
  const bool many = outs.size() > 1;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const std::string path = output_for_target(o.out, o.targets[i], many);
    write_bitstream_file(outs[i], path);
    std::cout << path << " " << outs[i].byte_size() << "\n";
  }
  return 0;
}

int cmd_extract_mv(const Options& o) {
  write_mv_sidecar_file(extract_mv_sidecar(read_bitstream_file(o.in)), o.out);
  return 0;
}

int cmd_metrics(const Options& o) {
  const VideoSequence ref = read_y4m_file(o.ref);
  const VideoSequence test = read_y4m_file(o.in);
  if (ref.width != test.width || ref.height != test.height) {
    throw FormatError("sequences differ in dimensions");
  }
  if (ref.frames.size() != test.frames.size()) throw FormatError("sequences differ in length");
  const SequenceQuality q = compare_sequences(ref, test);
  std::cout << "psnr_y " << q.pooled_y.to_string() << "\n"
            << "psnr_u " << q.pooled_u.to_string() << "\n"
            << "psnr_v " << q.pooled_v.to_string() << "\n"
            << "mean_psnr_y " << q.mean_psnr_y << "\n"
            << "ssim_y " << q.mean_ssim_y << "\n";
  return 0;
}

int cmd_histogram(const Options& o) {
  const VideoSequence v = read_y4m_file(o.in);
  const HistogramReport h = histogram(pick_frame(v, o.frame));
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << "value,r,g,b,y\n";
    for (int i = 0; i < 256; ++i)
      f << i << ',' << h.r[i] << ',' << h.g[i] << ',' << h.b[i] << ',' << h.y[i] << '\n';
  }
  std::cout << "entropy_r " << h.entropy_r() << "\n"
            << "entropy_g " << h.entropy_g() << "\n"
            << "entropy_b " << h.entropy_b() << "\n"
            << "entropy_y " << h.entropy_y() << "\n"
            << "entropy_mean " << h.mean_entropy() << "\n";
  return 0;
}

int cmd_edges(const Options& o) {
  const VideoSequence v = read_y4m_file(o.in);
  write_ppm_file(laplacian_edges(pick_frame(v, o.frame)), o.out);
  return 0;
}

int cmd_pixelate(const Options& o) {
  const VideoSequence v = read_y4m_file(o.in);
  write_ppm_file(pixelate(pick_frame(v, o.frame)), o.out);
  return 0;
}

// Experiments without a key file use key material derived from the seed so
// reruns are reproducible.
KeyMaterial experiment_key(const Options& o) {
  if (const auto path = key_path(o)) return read_key_file(*path);
  KeyMaterial km;
  std::uint64_t i = 0;
  for (std::uint8_t& b : km.key) b = static_cast<std::uint8_t>(SplitMix64::output_at(o.seed, i++) >> 56);
  for (std::uint8_t& b : km.nonce) b = static_cast<std::uint8_t>(SplitMix64::output_at(o.seed, i++) >> 56);
  return km;
}

int cmd_experiment(const Options& o) {
  ExperimentConfig cfg;
  cfg.base_qp = o.qp;
  cfg.targets = o.targets;
  cfg.gop = o.gop;
  cfg.jobs = o.jobs;
  cfg.report_dir = o.report;
  if (o.mode == "open") {
    cfg.mode = TransrateMode::Open;
  } else if (o.mode == "closed") {
    cfg.mode = TransrateMode::Closed;
  } else {
    throw UsageError("experiment mode must be open or closed");
  }
  cfg.cipher.kind = parse_cipher(o.cipher);
  const KeyMaterial km = experiment_key(o);
  cfg.cipher.key = km.key;
  cfg.cipher.nonce = km.nonce;
  if (auto warn = weak_key_warning(cfg.cipher)) std::cerr << "warning: " << *warn << "\n";

  const std::vector<NamedClip> corpus =
      o.corpus.empty() ? synthesize_corpus(o.seed, o.clips) : load_corpus(o.corpus);
  if (corpus.empty()) throw FormatError("corpus is empty");
  const ExperimentResult r = run_experiment(corpus, cfg);
  std::cout << results_csv(r);
  return 0;
}

int cmd_keygen(const Options& o) {
  const std::string hex = format_key_hex(generate_key_material());
  if (o.out.empty()) {
    std::cout << hex << "\n";
  } else {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << hex << "\n";
  }
  return 0;
}

int cmd_synth(const Options& o) {
  SynthOptions so;
  so.frames = o.frame > 0 ? o.frame : so.frames;
  write_y4m_file(synthesize_clip(o.seed, so), o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective-encryption video codec with keyless transrating"};
  app.require_subcommand(1);
  Options o;

  auto key_opt = [&](CLI::App* c) {
    c->add_option("--key-file", o.key_file, "56 hex chars: key || nonce (or CVB_KEY_FILE)");
  };

  auto* encode = app.add_subcommand("encode", "encode a y4m clip");
  encode->add_option("--in", o.in)->required();
  encode->add_option("--out", o.out)->required();
  encode->add_option("--qp", o.qp)->check(CLI::Range(0, 51));
  encode->add_option("--gop", o.gop)->check(CLI::Range(1, 255));
  encode->add_option("--profile", o.profile)->check(CLI::IsMember({"A", "H"}));
  encode->add_option("--cipher", o.cipher)
      ->check(CLI::IsMember({"null", "aes-cfb", "xor-fixed", "xor-prng"}));
  key_opt(encode);

  auto* decode = app.add_subcommand("decode", "decode to y4m (keyless without a key)");
  decode->add_option("--in", o.in)->required();
  decode->add_option("--out", o.out)->required();
  key_opt(decode);

  auto* transrate = app.add_subcommand("transrate", "requantize to coarser qps without a key");
  transrate->add_option("--in", o.in)->required();
  transrate->add_option("--out", o.out, "output path; {qp} is replaced per target")->required();
  transrate->add_option("--targets", o.targets)->delimiter(',');
  transrate->add_option("--mode", o.mode);
  transrate->add_option("--mvs", o.mvs, "also write the motion vector sidecar");
  key_opt(transrate);

  auto* extract = app.add_subcommand("extract-mv", "write the motion vector sidecar");
  extract->add_option("--in", o.in)->required();
  extract->add_option("--out", o.out)->required();

  auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM of --in against --ref");
  metrics->add_option("--ref", o.ref)->required();
  metrics->add_option("--in", o.in)->required();

  auto* hist = app.add_subcommand("histogram", "RGB and Y histograms of one frame");
  hist->add_option("--in", o.in)->required();
  hist->add_option("--out", o.out, "CSV output");
  hist->add_option("--frame", o.frame);

  auto* edges = app.add_subcommand("edges", "Laplacian edge map of one frame as PPM");
  edges->add_option("--in", o.in)->required();
  edges->add_option("--out", o.out)->required();
  edges->add_option("--frame", o.frame);

  auto* pix = app.add_subcommand("pixelate", "8x8 pixelated frame as PPM");
  pix->add_option("--in", o.in)->required();
  pix->add_option("--out", o.out)->required();
  pix->add_option("--frame", o.frame);

  auto* experiment = app.add_subcommand("experiment", "qp sweep over a corpus");
  experiment->add_option("--corpus", o.corpus, "directory of y4m clips (default: synthetic)");
  experiment->add_option("--report", o.report);
  experiment->add_option("--seed", o.seed);
  experiment->add_option("--clips", o.clips)->check(CLI::PositiveNumber);
  experiment->add_option("--qp", o.qp)->check(CLI::Range(0, 51));
  experiment->add_option("--gop", o.gop)->check(CLI::Range(1, 255));
  experiment->add_option("--targets", o.targets)->delimiter(',');
  experiment->add_option("--mode", o.mode);
  experiment->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  experiment->add_option("--cipher", o.cipher)
      ->check(CLI::IsMember({"null", "aes-cfb", "xor-fixed", "xor-prng"}));
  key_opt(experiment);

  auto* keygen = app.add_subcommand("keygen", "write a fresh key file");
  keygen->add_option("--out", o.out);

  auto* synth = app.add_subcommand("synth", "write a synthetic test clip");
  synth->add_option("--out", o.out)->required();
  synth->add_option("--seed", o.seed);
  synth->add_option("--frames", o.frame);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (experiment->parsed() && experiment->count("--cipher") == 0) o.cipher = "aes-cfb";

  try {
    if (encode->parsed()) return cmd_encode(o);
    if (decode->parsed()) return cmd_decode(o);
    if (transrate->parsed()) return cmd_transrate(o);
    if (extract->parsed()) return cmd_extract_mv(o);
    if (metrics->parsed()) return cmd_metrics(o);
    if (hist->parsed()) return cmd_histogram(o);
    if (edges->parsed()) return cmd_edges(o);
    if (pix->parsed()) return cmd_pixelate(o);
    if (experiment->parsed()) return cmd_experiment(o);
    if (keygen->parsed()) return cmd_keygen(o);
    if (synth->parsed()) return cmd_synth(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const KeyError& e) {
    std::cerr << "key error: " << e.what() << "\n";
    return kExitKey;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  }
  return kExitUsage;
}
