#include "sevc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sevc/codec.hpp"
#include "sevc/error.hpp"

namespace sevc {

namespace fs = std::filesystem;

namespace {

// Draws built directly on the engine output so clips are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  int uniform(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(eng_() % span);
  }

 private:
  std::mt19937_64 eng_;
};

std::uint8_t clip8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

// Blocky value noise upsampled with bilinear weights.
PlaneOf<std::int16_t> value_noise(Rng& rng, int w, int h, int cell, int amplitude) {
  const int gw = w / cell + 2, gh = h / cell + 2;
  std::vector<int> grid(static_cast<std::size_t>(gw) * gh);
  for (int& g : grid) g = rng.uniform(-amplitude, amplitude);
  PlaneOf<std::int16_t> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int gx = x / cell, gy = y / cell;
      const int fx = x % cell, fy = y % cell;
      auto g = [&](int i, int j) { return grid[static_cast<std::size_t>(j) * gw + i]; };
      const int top = g(gx, gy) * (cell - fx) + g(gx + 1, gy) * fx;
      const int bot = g(gx, gy + 1) * (cell - fx) + g(gx + 1, gy + 1) * fx;
      out.at(x, y) = static_cast<std::int16_t>((top * (cell - fy) + bot * fy) / (cell * cell));
    }
  }
  return out;
}

struct Rect {
  int x, y, w, h, vx, vy;
  int luma, cb, cr;
  int stripe;  // stripe period of the rectangle texture
};

}  // namespace

VideoSequence synthesize_clip(std::uint64_t seed, const SynthOptions& opt) {
  if (opt.width <= 0 || opt.height <= 0 || opt.width % 16 || opt.height % 16 || opt.frames <= 0) {
    throw std::invalid_argument("synthetic clip needs positive dimensions in multiples of 16");
  }
  Rng rng(seed);
  const int pan_x = opt.random_pan ? rng.uniform(-2, 2) : opt.pan_x;
  const int pan_y = opt.random_pan ? rng.uniform(-1, 1) : opt.pan_y;
  const int max_shift = std::max(std::abs(pan_x), std::abs(pan_y)) * opt.frames;
  const int tw = opt.width + 2 * max_shift, th = opt.height + 2 * max_shift;

  const int base = rng.uniform(70, 150);
  const PlaneOf<std::int16_t> fine = value_noise(rng, tw, th, 4, 40);
  const PlaneOf<std::int16_t> coarse = value_noise(rng, tw, th, 16, 50);
  const PlaneOf<std::int16_t> cb_tex = value_noise(rng, tw / 2 + 1, th / 2 + 1, 8, 30);
  const PlaneOf<std::int16_t> cr_tex = value_noise(rng, tw / 2 + 1, th / 2 + 1, 8, 30);

  std::vector<Rect> rects(static_cast<std::size_t>(opt.rectangles));
  for (Rect& r : rects) {
    r.w = rng.uniform(8, std::max(8, opt.width / 3));
    r.h = rng.uniform(8, std::max(8, opt.height / 3));
    r.x = rng.uniform(0, opt.width - r.w);
    r.y = rng.uniform(0, opt.height - r.h);
    r.vx = rng.uniform(-3, 3);
    r.vy = rng.uniform(-3, 3);
    r.luma = rng.uniform(20, 235);
    r.cb = rng.uniform(60, 196);
    r.cr = rng.uniform(60, 196);
    r.stripe = rng.uniform(2, 6);
  }

  VideoSequence seq;
  seq.width = opt.width;
  seq.height = opt.height;
  for (int t = 0; t < opt.frames; ++t) {
    Frame f(opt.width, opt.height, t);
    const int ox = max_shift + pan_x * t, oy = max_shift + pan_y * t;
    for (int y = 0; y < opt.height; ++y) {
      for (int x = 0; x < opt.width; ++x) {
        const int tex = fine.at(x + ox, y + oy) + coarse.at(x + ox, y + oy);
        const int grad = (x + ox) / 2 - (y + oy) / 3;
        f.y.at(x, y) = clip8(base + tex + grad);
      }
    }
    for (int y = 0; y < opt.height / 2; ++y) {
      for (int x = 0; x < opt.width / 2; ++x) {
        f.u.at(x, y) = clip8(128 + cb_tex.at(x + ox / 2, y + oy / 2));
        f.v.at(x, y) = clip8(128 + cr_tex.at(x + ox / 2, y + oy / 2));
      }
    }
    for (const Rect& r : rects) {
      for (int y = 0; y < r.h; ++y) {
        for (int x = 0; x < r.w; ++x) {
          const int px = r.x + x, py = r.y + y;
          if (px < 0 || py < 0 || px >= opt.width || py >= opt.height) continue;
          const int stripe = ((x + y) / r.stripe) % 2 ? 24 : -24;
          f.y.at(px, py) = clip8(r.luma + stripe);
          f.u.at(px / 2, py / 2) = clip8(r.cb);
          f.v.at(px / 2, py / 2) = clip8(r.cr);
        }
      }
    }
    if (opt.noise > 0) {
      for (std::uint8_t& s : f.y.samples) s = clip8(s + rng.uniform(-opt.noise, opt.noise));
    }
    seq.frames.push_back(std::move(f));
    for (Rect& r : rects) {
      r.x += r.vx;
      r.y += r.vy;
      if (r.x < 0 || r.x + r.w > opt.width) {
        r.vx = -r.vx;
        r.x = std::clamp(r.x, 0, opt.width - r.w);
      }
      if (r.y < 0 || r.y + r.h > opt.height) {
        r.vy = -r.vy;
        r.y = std::clamp(r.y, 0, opt.height - r.h);
      }
    }
  }
  return seq;
}

std::vector<NamedClip> synthesize_corpus(std::uint64_t seed, int clips, const SynthOptions& opt) {
  std::vector<NamedClip> out;
  std::mt19937_64 seeds(seed);
  for (int i = 0; i < clips; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "synth%02d", i);
    out.push_back({name, synthesize_clip(seeds(), opt)});
  }
  return out;
}

std::vector<NamedClip> load_corpus(const std::string& dir) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".y4m") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<NamedClip> out;
  for (const fs::path& p : paths) out.push_back({p.stem().string(), read_y4m_file(p.string())});
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const char* profile_label(Profile p) { return p == Profile::A ? "A" : "H"; }

struct Job {
  const NamedClip* clip;
  Profile profile;
};

struct JobOutput {
  std::vector<ExperimentRow> rows;
  ExperimentTiming timing;
  std::vector<std::pair<std::string, HistogramReport>> histograms;
};

HistogramReport sequence_histogram(const VideoSequence& s) {
  HistogramReport h;
  for (const Frame& f : s.frames) h += histogram(f);
  return h;
}

void export_frames(const fs::path& dir, const std::string& stem, const Frame& keyless,
                   const Frame& keyed) {
  write_ppm_file(keyless, (dir / (stem + "_encrypted.ppm")).string());
  write_ppm_file(keyed, (dir / (stem + "_plain.ppm")).string());
  write_ppm_file(laplacian_edges(keyless), (dir / (stem + "_encrypted_edges.ppm")).string());
  write_ppm_file(pixelate(keyless), (dir / (stem + "_encrypted_pixelated.ppm")).string());
}

JobOutput run_job(const Job& job, const ExperimentConfig& cfg, const fs::path& frames_dir) {
  const VideoSequence& video = job.clip->video;
  JobOutput out;
  out.timing.clip = job.clip->name;
  out.timing.profile = job.profile;

  EncoderConfig ec;
  ec.profile = job.profile;
  ec.qp = cfg.base_qp;
  ec.gop = cfg.gop;
  ec.cipher = cfg.cipher;
  auto t0 = Clock::now();
  const CodedBitstream base = encode_sequence(video, ec);
  out.timing.enc_time_ms = ms_since(t0);

  t0 = Clock::now();
  std::vector<CodedBitstream> streams =
      transrate_many(base, std::span<const int>(cfg.targets), cfg.mode);
  out.timing.transrate_time_ms = ms_since(t0);
  streams.insert(streams.begin(), base);

  const std::size_t sample = video.frames.size() / 2;
  for (const CodedBitstream& bs : streams) {
    const VideoSequence keyless = decode_sequence(bs);
    const VideoSequence keyed = decode_sequence(bs, cfg.cipher.key);
    const SequenceQuality ql = compare_sequences(video, keyless);
    const SequenceQuality qk = compare_sequences(video, keyed);
    const HistogramReport hl = sequence_histogram(keyless);
    const HistogramReport hk = sequence_histogram(keyed);

    ExperimentRow row;
    row.clip = job.clip->name;
    row.profile = job.profile;
    row.qp = bs.header.qp;
    row.bytes = serialize(bs).size();
    row.bitrate_bps = bitrate_bps(row.bytes, video.frames.size(), video.fps());
    row.psnr_y_keyless = ql.pooled_y;
    row.psnr_y_keyed = qk.pooled_y;
    row.mean_psnr_y_keyless = ql.mean_psnr_y;
    row.mean_psnr_y_keyed = qk.mean_psnr_y;
    row.ssim_keyless = ql.mean_ssim_y;
    row.ssim_keyed = qk.mean_ssim_y;
    row.entropy_keyless = hl.mean_entropy();
    row.entropy_keyed = hk.mean_entropy();
    out.rows.push_back(row);

    const std::string stem =
        job.clip->name + "_" + profile_label(job.profile) + "_qp" + std::to_string(row.qp);
    out.histograms.emplace_back(stem + "_encrypted", hl);
    out.histograms.emplace_back(stem + "_plain", hk);
    if (!frames_dir.empty() && sample < keyless.frames.size()) {
      export_frames(frames_dir, stem, keyless.frames[sample], keyed.frames[sample]);
    }
  }
  return out;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

std::string histogram_csv(const HistogramReport& h) {
  std::ostringstream o;
  o << "value,r,g,b,y\n";
  for (int i = 0; i < 256; ++i) {
    o << i << ',' << h.r[i] << ',' << h.g[i] << ',' << h.b[i] << ',' << h.y[i] << '\n';
  }
  return o.str();
}

nlohmann::json summary_json(const ExperimentResult& r, const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["cipher"] = cipher_name(cfg.cipher.kind);
  j["mode"] = cfg.mode == TransrateMode::Closed ? "closed" : "open";
  j["base_qp"] = cfg.base_qp;
  j["targets"] = cfg.targets;
  j["gop"] = cfg.gop;
  j["psnr"] = "pooled MSE over frames, luma, peak 255";
  j["ssim"] = "luma, 8x8 uniform window, stride 1";
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const ExperimentRow& row : r.rows) {
    rows.push_back({{"clip", row.clip},
                    {"profile", profile_label(row.profile)},
                    {"qp", row.qp},
                    {"bytes", row.bytes},
                    {"bitrate_bps", row.bitrate_bps},
                    {"psnr_y_keyless", row.psnr_y_keyless.to_string()},
                    {"psnr_y_keyed", row.psnr_y_keyed.to_string()},
                    {"mean_psnr_y_keyless", row.mean_psnr_y_keyless},
                    {"mean_psnr_y_keyed", row.mean_psnr_y_keyed},
                    {"ssim_keyless", row.ssim_keyless},
                    {"ssim_keyed", row.ssim_keyed},
                    {"entropy_keyless", row.entropy_keyless},
                    {"entropy_keyed", row.entropy_keyed}});
  }
  auto& deltas = j["deltas"] = nlohmann::json::array();
  for (const ExperimentDelta& d : r.deltas) {
    deltas.push_back({{"clip", d.clip},
                      {"qp", d.qp},
                      {"delta_bitrate_percent", d.delta_bitrate},
                      {"delta_psnr_percent", d.delta_psnr}});
  }
  return j;
}

}  // namespace

std::string results_csv(const ExperimentResult& r) {
  std::ostringstream o;
  o << "clip,profile,qp,bytes,bitrate_bps,psnr_y_keyless,psnr_y_keyed,mean_psnr_y_keyless,"
       "mean_psnr_y_keyed,ssim_keyless,ssim_keyed,entropy_keyless,entropy_keyed\n";
  for (const ExperimentRow& row : r.rows) {
    o << row.clip << ',' << profile_label(row.profile) << ',' << row.qp << ',' << row.bytes << ','
      << fixed(row.bitrate_bps, 1) << ',' << row.psnr_y_keyless.to_string() << ','
      << row.psnr_y_keyed.to_string() << ',' << fixed(row.mean_psnr_y_keyless, 4) << ','
      << fixed(row.mean_psnr_y_keyed, 4) << ',' << fixed(row.ssim_keyless, 5) << ','
      << fixed(row.ssim_keyed, 5) << ',' << fixed(row.entropy_keyless, 5) << ','
      << fixed(row.entropy_keyed, 5) << '\n';
  }
  return o.str();
}

std::string deltas_csv(const ExperimentResult& r) {
  std::ostringstream o;
  o << "clip,qp,delta_bitrate_percent,delta_psnr_percent\n";
  for (const ExperimentDelta& d : r.deltas) {
    o << d.clip << ',' << d.qp << ',' << fixed(d.delta_bitrate, 3) << ','
      << fixed(d.delta_psnr, 3) << '\n';
  }
  return o.str();
}

std::string timings_csv(const ExperimentResult& r) {
  std::ostringstream o;
  o << "clip,profile,enc_time_ms,transrate_time_ms\n";
  for (const ExperimentTiming& t : r.timings) {
    o << t.clip << ',' << profile_label(t.profile) << ',' << fixed(t.enc_time_ms, 3) << ','
      << fixed(t.transrate_time_ms, 3) << '\n';
  }
  return o.str();
}

ExperimentResult run_experiment(const std::vector<NamedClip>& corpus, const ExperimentConfig& cfg) {
  if (cfg.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  std::vector<Job> jobs;
  for (const NamedClip& c : corpus)
    for (Profile p : cfg.profiles) jobs.push_back({&c, p});

  fs::path root, frames_dir, hist_dir;
  if (!cfg.report_dir.empty()) {
    root = cfg.report_dir;
    frames_dir = root / "frames";
    hist_dir = root / "histograms";
    fs::create_directories(frames_dir);
    fs::create_directories(hist_dir);
  }

  std::vector<JobOutput> outputs(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        outputs[i] = run_job(jobs[i], cfg, frames_dir);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(cfg.jobs, static_cast<int>(std::max<std::size_t>(1, jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult result;
  for (JobOutput& o : outputs) {
    result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
    result.timings.push_back(o.timing);
  }

  // Profile H against profile A for every clip and qp present in both.
  for (const ExperimentRow& a : result.rows) {
    if (a.profile != Profile::A) continue;
    for (const ExperimentRow& h : result.rows) {
      if (h.profile != Profile::H || h.clip != a.clip || h.qp != a.qp) continue;
      ExperimentDelta d;
      d.clip = a.clip;
      d.qp = a.qp;
      d.delta_bitrate = delta_bitrate(a.bitrate_bps, h.bitrate_bps);
      if (a.psnr_y_keyless.db && h.psnr_y_keyless.db) {
        d.delta_psnr = delta_psnr(*a.psnr_y_keyless.db, *h.psnr_y_keyless.db);
      }
      result.deltas.push_back(d);
    }
  }

  if (!root.empty()) {
    write_text(root / "results.csv", results_csv(result));
    write_text(root / "deltas.csv", deltas_csv(result));
    write_text(root / "timings.csv", timings_csv(result));
    write_text(root / "summary.json", summary_json(result, cfg).dump(2) + "\n");
    for (const JobOutput& o : outputs)
      for (const auto& [stem, h] : o.histograms)
        write_text(hist_dir / (stem + ".csv"), histogram_csv(h));
  }
  return result;
}

}  // namespace sevc
