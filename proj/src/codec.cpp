#include "sevc/codec.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "sevc/error.hpp"

namespace sevc {

namespace {

std::uint8_t clip_pixel(std::int64_t v) {
  return static_cast<std::uint8_t>(std::clamp<std::int64_t>(v, 0, 255));
}

Plane& plane_of(Frame& f, int plane) { return plane == 0 ? f.y : (plane == 1 ? f.u : f.v); }
const Plane& plane_of(const Frame& f, int plane) {
  return plane == 0 ? f.y : (plane == 1 ? f.u : f.v);
}

const std::uint8_t* prediction_plane(const MacroblockPrediction& p, int plane) {
  return plane == 0 ? p.y.data() : (plane == 1 ? p.u.data() : p.v.data());
}

MacroblockPrediction flat_prediction() {
  MacroblockPrediction p;
  p.y.fill(128);
  p.u.fill(128);
  p.v.fill(128);
  return p;
}

MotionVector clamp_in_bounds(const Frame& ref, int mb_x, int mb_y, MotionVector mv, int range) {
  mv.x = std::clamp(mv.x, -range, range);
  mv.y = std::clamp(mv.y, -range, range);
  mv.x = std::clamp(mv.x, -mb_x * 16, ref.width() - 16 - mb_x * 16);
  mv.y = std::clamp(mv.y, -mb_y * 16, ref.height() - 16 - mb_y * 16);
  return mv;
}

}  // namespace

BlockPlacement block_placement(const FrameLayout& layout, int block) {
  const int n = layout.n();
  if (block < layout.luma_blocks()) {
    const int per_row = 16 / n;
    return {0, (block % per_row) * n, (block / per_row) * n};
  }
  const int c = block - layout.luma_blocks();
  const int per_row = 8 / n;
  const int idx = c % layout.chroma_blocks();
  return {1 + c / layout.chroma_blocks(), (idx % per_row) * n, (idx / per_row) * n};
}

MotionField motion_field_from_syntax(const FrameSyntax& fs, const FrameLayout& layout) {
  MotionField field(layout.mbs_x(), layout.mbs_y());
  for (int y = 0; y < layout.mbs_y(); ++y) {
    for (int x = 0; x < layout.mbs_x(); ++x) {
      const MacroblockSyntax& mb = fs.mbs[y * layout.mbs_x() + x];
      if (mb.inter) field.at(x, y) = field.predictor(x, y) + mb.mvd;
    }
  }
  return field;
}

Frame reconstruct_frame(const FrameSyntax& fs, const FrameLayout& layout, const Frame* reference,
                        const MotionField& motion, int index) {
  const int n = layout.n();
  const TransformSpec& t = TransformSpec::get(n);
  const QuantSpec intra(t, fs.qp, PredictionMode::Intra);
  const QuantSpec inter(t, fs.qp, PredictionMode::Inter);
  const MacroblockPrediction flat = flat_prediction();

  Frame out(layout.width, layout.height, index);
  for (int my = 0; my < layout.mbs_y(); ++my) {
    for (int mx = 0; mx < layout.mbs_x(); ++mx) {
      const MacroblockSyntax& mb = fs.mbs[my * layout.mbs_x() + mx];
      MacroblockPrediction pred = flat;
      if (mb.inter) {
        if (!reference) throw FormatError("inter macroblock without a reference frame");
        pred = compensate_clamped(*reference, mx, my, *motion.at(mx, my));
      }
      const QuantSpec& q = mb.inter ? inter : intra;
      for (int b = 0; b < layout.blocks_per_mb(); ++b) {
        const BlockPlacement bp = block_placement(layout, b);
        const int mb_size = bp.plane == 0 ? 16 : 8;
        const std::uint8_t* pp = prediction_plane(pred, bp.plane);
        Plane& dst = plane_of(out, bp.plane);
        const Block& levels = mb.levels[b];
        const Block residual =
            levels.all_zero() ? Block(n) : inverse_transform(dequantize(levels, q), t);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const int px = bp.x + j;
            const int py = bp.y + i;
            dst.at(mx * mb_size + px, my * mb_size + py) =
                clip_pixel(pp[py * mb_size + px] + residual.at(i, j));
          }
        }
      }
    }
  }
  return out;
}

CodedBitstream encode_sequence(const VideoSequence& video, const EncoderConfig& cfg,
                               std::vector<Frame>* reconstruction) {
  if (cfg.gop < 1 || cfg.gop > 255) throw std::invalid_argument("gop must be in 1..255");
  if (cfg.qp < 0 || cfg.qp > kMaxQp) throw std::invalid_argument("qp must be in 0..51");
  if (cfg.search_range < 0) throw std::invalid_argument("negative search range");
  const FrameLayout layout(cfg.profile, video.width, video.height);
  if (video.width > 65535 || video.height > 65535) throw std::invalid_argument("frame too large");
  if (!cfg.reuse_motion.empty() && cfg.reuse_motion.size() != video.frames.size()) {
    throw std::invalid_argument("reuse_motion must hold one field per frame");
  }

  const int n = layout.n();
  const TransformSpec& t = TransformSpec::get(n);
  const QuantSpec intra(t, cfg.qp, PredictionMode::Intra);
  const QuantSpec inter(t, cfg.qp, PredictionMode::Inter);
  const MacroblockPrediction flat = flat_prediction();

  CodedBitstream bs;
  StreamHeader& h = bs.header;
  h.profile = cfg.profile;
  h.width = static_cast<std::uint16_t>(video.width);
  h.height = static_cast<std::uint16_t>(video.height);
  h.fps_num = static_cast<std::uint16_t>(video.fps_num);
  h.fps_den = static_cast<std::uint16_t>(video.fps_den);
  h.gop = static_cast<std::uint8_t>(cfg.gop);
  h.qp = static_cast<std::uint8_t>(cfg.qp);
  h.cipher = cfg.cipher.kind;
  if (cfg.cipher.kind != CipherKind::Null) h.nonce = cfg.cipher.nonce;

  std::optional<Frame> ref;
  for (std::size_t fi = 0; fi < video.frames.size(); ++fi) {
    const Frame& cur = video.frames[fi];
    if (cur.width() != video.width || cur.height() != video.height) {
      throw std::invalid_argument("frame dimensions differ from sequence dimensions");
    }
    FrameSyntax fs;
    fs.type = (fi % cfg.gop == 0) ? FrameType::I : FrameType::P;
    fs.qp = cfg.qp;
    fs.mbs.resize(layout.mb_count());
    MotionField field(layout.mbs_x(), layout.mbs_y());

    for (int my = 0; my < layout.mbs_y(); ++my) {
      for (int mx = 0; mx < layout.mbs_x(); ++mx) {
        MacroblockSyntax& mb = fs.mbs[my * layout.mbs_x() + mx];
        MacroblockPrediction pred = flat;
        if (fs.type == FrameType::P) {
          MotionVector mv;
          const auto& reuse =
              cfg.reuse_motion.empty() ? std::nullopt : cfg.reuse_motion[fi].at(mx, my);
          if (reuse) {
            mv = clamp_in_bounds(*ref, mx, my, *reuse, cfg.search_range);
          } else {
            mv = estimate_motion(cur, *ref, mx, my, cfg.search_range).mv;
          }
          mb.inter = true;
          mb.mvd = mv - field.predictor(mx, my);
          field.at(mx, my) = mv;
          pred = compensate(*ref, mx, my, mv);
        }
        const QuantSpec& q = mb.inter ? inter : intra;
        mb.levels.assign(layout.blocks_per_mb(), Block(n));
        for (int b = 0; b < layout.blocks_per_mb(); ++b) {
          const BlockPlacement bp = block_placement(layout, b);
          const int mb_size = bp.plane == 0 ? 16 : 8;
          const std::uint8_t* pp = prediction_plane(pred, bp.plane);
          const Plane& src = plane_of(cur, bp.plane);
          Block residual(n);
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
              const int px = bp.x + j;
              const int py = bp.y + i;
              residual.at(i, j) =
                  int(src.at(mx * mb_size + px, my * mb_size + py)) - int(pp[py * mb_size + px]);
            }
          }
          mb.levels[b] = quantize(forward_transform(residual, t), q);
        }
      }
    }

    Frame recon = reconstruct_frame(fs, layout, ref ? &*ref : nullptr, field,
                                    static_cast<int>(fi));
    CodedFrame cf;
    cf.type = fs.type;
    cf.qp = static_cast<std::uint8_t>(fs.qp);
    if (cfg.cipher.kind != CipherKind::Null) {
      Keystream ks(cfg.cipher, static_cast<std::uint32_t>(fi));
      cf.payload = encode_frame_payload(fs, layout, &ks);
    } else {
      cf.payload = encode_frame_payload(fs, layout);
    }
    bs.frames.push_back(std::move(cf));
    if (reconstruction) reconstruction->push_back(recon);
    ref = std::move(recon);
  }
  return bs;
}

VideoSequence decode_sequence(const CodedBitstream& bs, const std::optional<Key128>& key,
                              DecodeDetails* details) {
  const FrameLayout layout = bs.layout();
  VideoSequence out;
  out.width = bs.header.width;
  out.height = bs.header.height;
  out.fps_num = bs.header.fps_num;
  out.fps_den = bs.header.fps_den;
  const bool decrypt = key.has_value() && bs.header.cipher != CipherKind::Null;
  const CipherSpec spec{bs.header.cipher, key.value_or(Key128{}), bs.header.nonce};

  out.frames.reserve(bs.frames.size());
  const Frame* ref = nullptr;
  for (std::size_t fi = 0; fi < bs.frames.size(); ++fi) {
    const CodedFrame& cf = bs.frames[fi];
    if (fi == 0 && cf.type != FrameType::I) throw FormatError("first frame is not an I frame");
    std::optional<Keystream> ks;
    if (decrypt) ks.emplace(spec, static_cast<std::uint32_t>(fi));
    BinString* trace = nullptr;
    if (details && details->keep_bins) trace = &details->bins.emplace_back();
    FrameSyntax fs = decode_frame_payload(cf.payload, layout, cf.type, cf.qp,
                                          ks ? &*ks : nullptr, trace);
    MotionField field = motion_field_from_syntax(fs, layout);
    out.frames.push_back(reconstruct_frame(fs, layout, ref, field, static_cast<int>(fi)));
    ref = &out.frames.back();
    if (details) {
      details->syntax.push_back(std::move(fs));
      details->motion.push_back(std::move(field));
    }
  }
  return out;
}

MvSidecar extract_mv_sidecar(const CodedBitstream& bs) {
  const FrameLayout layout = bs.layout();
  MvSidecar sc;
  for (std::size_t fi = 0; fi < bs.frames.size(); ++fi) {
    const CodedFrame& cf = bs.frames[fi];
    const FrameSyntax fs = decode_frame_payload(cf.payload, layout, cf.type, cf.qp);
    append_records(sc, static_cast<std::uint32_t>(fi), motion_field_from_syntax(fs, layout));
  }
  return sc;
}

std::vector<MotionVector> mvds_from_sidecar(const MvSidecar& sc, int mbs_x, int mbs_y) {
  std::map<std::uint32_t, MotionField> fields;
  for (const MvRecord& r : sc.records) {
    auto [it, inserted] = fields.try_emplace(r.frame, mbs_x, mbs_y);
    it->second.at(r.mb_x, r.mb_y) = MotionVector{r.mv_x, r.mv_y};
  }
  std::vector<MotionVector> mvds;
  mvds.reserve(sc.records.size());
  for (const MvRecord& r : sc.records) {
    const MotionField& f = fields.at(r.frame);
    mvds.push_back(MotionVector{r.mv_x, r.mv_y} - f.predictor(r.mb_x, r.mb_y));
  }
  return mvds;
}

}  // namespace sevc
