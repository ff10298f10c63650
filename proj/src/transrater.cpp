#include "sevc/transrater.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>

#include "sevc/codec.hpp"
#include "sevc/syntax.hpp"

namespace sevc {

namespace {

// Target-independent view of one input frame.
struct ParsedFrame {
  FrameSyntax syntax;
  MotionField motion;
  // Per macroblock, per block: raw-scale dequantized coefficients.
  std::vector<std::vector<Block>> raw;
  // Closed loop only: pixel-domain residual of the input stream.
  std::vector<std::vector<Block>> residual;
};

ParsedFrame parse_frame(const CodedFrame& cf, const FrameLayout& layout, bool want_residual) {
  ParsedFrame pf;
  pf.syntax = decode_frame_payload(cf.payload, layout, cf.type, cf.qp);
  pf.motion = motion_field_from_syntax(pf.syntax, layout);
  const TransformSpec& t = TransformSpec::get(layout.n());
  const QuantSpec intra(t, cf.qp, PredictionMode::Intra);
  const QuantSpec inter(t, cf.qp, PredictionMode::Inter);
  pf.raw.resize(pf.syntax.mbs.size());
  if (want_residual) pf.residual.resize(pf.syntax.mbs.size());
  for (std::size_t m = 0; m < pf.syntax.mbs.size(); ++m) {
    const MacroblockSyntax& mb = pf.syntax.mbs[m];
    const QuantSpec& q = mb.inter ? inter : intra;
    for (const Block& levels : mb.levels) {
      pf.raw[m].push_back(dequantize_raw(levels, q));
      if (want_residual) {
        pf.residual[m].push_back(levels.all_zero() ? Block(t.n)
                                                   : inverse_transform(dequantize(levels, q), t));
      }
    }
  }
  return pf;
}

PlaneOf<std::int16_t>& plane_of(DriftBuffer& d, int plane) {
  return plane == 0 ? d.y : (plane == 1 ? d.u : d.v);
}

class Requantizer {
 public:
  Requantizer(const FrameLayout& layout, int q2, TransrateMode mode)
      : layout_(layout),
        t_(TransformSpec::get(layout.n())),
        intra_(t_, q2, PredictionMode::Intra),
        inter_(t_, q2, PredictionMode::Inter),
        mode_(mode),
        drift_(layout.width, layout.height) {
    report_.target_qp = q2;
  }

  FrameSyntax process(const ParsedFrame& in, int frame_index, const DriftObserver& observer) {
    FrameSyntax out;
    out.type = in.syntax.type;
    out.qp = intra_.qp;
    out.mbs.resize(in.syntax.mbs.size());
    if (mode_ == TransrateMode::Open) {
      for (std::size_t m = 0; m < out.mbs.size(); ++m) open_mb(in, m, out.mbs[m]);
    } else {
      DriftBuffer next(layout_.width, layout_.height);
      for (int my = 0; my < layout_.mbs_y(); ++my)
        for (int mx = 0; mx < layout_.mbs_x(); ++mx) closed_mb(in, mx, my, out, next);
      drift_ = std::move(next);
      if (observer) observer(frame_index, drift_);
    }
    return out;
  }

  const TransrateReport& report() const { return report_; }

 private:
  void open_mb(const ParsedFrame& in, std::size_t m, MacroblockSyntax& out) {
    const MacroblockSyntax& src = in.syntax.mbs[m];
    out.inter = src.inter;
    out.mvd = src.mvd;
    const QuantSpec& q = src.inter ? inter_ : intra_;
    out.levels.reserve(src.levels.size());
    for (const Block& raw : in.raw[m]) out.levels.push_back(quantize(raw, q));
  }

  void closed_mb(const ParsedFrame& in, int mx, int my, FrameSyntax& out, DriftBuffer& next) {
    const std::size_t m = static_cast<std::size_t>(my) * layout_.mbs_x() + mx;
    const MacroblockSyntax& src = in.syntax.mbs[m];
    MacroblockSyntax& dst = out.mbs[m];
    dst.inter = src.inter;
    dst.mvd = src.mvd;
    const QuantSpec& q = src.inter ? inter_ : intra_;
    const int n = layout_.n();

    // Drift of the previous frame seen through this macroblock's vector.
    std::array<std::int16_t, 256> ey{};
    std::array<std::int16_t, 64> eu{}, ev{};
    if (src.inter) {
      const MotionVector mv = *in.motion.at(mx, my);
      const MotionVector cmv = chroma_vector(mv);
      copy_displaced(drift_.y, mx * 16, my * 16, mv, 16, ey.data());
      copy_displaced(drift_.u, mx * 8, my * 8, cmv, 8, eu.data());
      copy_displaced(drift_.v, mx * 8, my * 8, cmv, 8, ev.data());
    }
    const std::int16_t* eplanes[3] = {ey.data(), eu.data(), ev.data()};

    dst.levels.reserve(src.levels.size());
    for (int b = 0; b < layout_.blocks_per_mb(); ++b) {
      const BlockPlacement bp = block_placement(layout_, b);
      const int mb_size = bp.plane == 0 ? 16 : 8;
      Block e(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e.at(i, j) = eplanes[bp.plane][(bp.y + i) * mb_size + bp.x + j];

      Block w = in.raw[m][b];
      if (!e.all_zero()) {
        const Block fe = forward_transform(e, t_);
        for (int k = 0; k < n * n; ++k) w.v[k] += fe.v[k];
      }
      Block levels = quantize(w, q);
      const Block out_res =
          levels.all_zero() ? Block(n) : inverse_transform(dequantize(levels, q), t_);
      const Block& in_res = in.residual[m][b];

      PlaneOf<std::int16_t>& dp = plane_of(next, bp.plane);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const std::int64_t d = in_res.at(i, j) + e.at(i, j) - out_res.at(i, j);
          const std::int64_t sat = std::clamp<std::int64_t>(d, -32767, 32767);
          if (sat != d) ++report_.drift_saturations;
          dp.at(mx * mb_size + bp.x + j, my * mb_size + bp.y + i) = static_cast<std::int16_t>(sat);
        }
      }
      dst.levels.push_back(std::move(levels));
    }
  }

  FrameLayout layout_;
  const TransformSpec& t_;
  QuantSpec intra_;
  QuantSpec inter_;
  TransrateMode mode_;
  DriftBuffer drift_;
  TransrateReport report_;
};

void check_targets(const CodedBitstream& bs, std::span<const int> targets) {
  int max_in = bs.header.qp;
  for (const CodedFrame& f : bs.frames) max_in = std::max<int>(max_in, f.qp);
  for (int q2 : targets) {
    if (q2 > kMaxQp) throw std::invalid_argument("target qp above 51");
    if (q2 <= max_in) throw std::invalid_argument("target qp must exceed the input qp");
  }
}

std::vector<CodedBitstream> run(const CodedBitstream& bs, std::span<const int> targets,
                                TransrateMode mode, const DriftObserver& observer,
                                std::vector<TransrateReport>* reports) {
  check_targets(bs, targets);
  const FrameLayout layout = bs.layout();
  std::vector<Requantizer> workers;
  std::vector<CodedBitstream> outputs;
  for (int q2 : targets) {
    workers.emplace_back(layout, q2, mode);
    CodedBitstream& o = outputs.emplace_back();
    o.header = bs.header;
    o.header.qp = static_cast<std::uint8_t>(q2);
    o.frames.reserve(bs.frames.size());
  }
  if (targets.empty()) return outputs;

  for (std::size_t fi = 0; fi < bs.frames.size(); ++fi) {
    const CodedFrame& cf = bs.frames[fi];
    const ParsedFrame parsed = parse_frame(cf, layout, mode == TransrateMode::Closed);
    for (std::size_t t = 0; t < workers.size(); ++t) {
      const FrameSyntax fs = workers[t].process(parsed, static_cast<int>(fi), observer);
      CodedFrame out;
      out.type = cf.type;
      out.qp = static_cast<std::uint8_t>(fs.qp);
      out.payload = encode_frame_payload(fs, layout);
      outputs[t].frames.push_back(std::move(out));
    }
  }
  if (reports) {
    reports->clear();
    for (const Requantizer& w : workers) reports->push_back(w.report());
  }
  return outputs;
}

}  // namespace

bool DriftBuffer::all_zero() const {
  auto zero = [](const PlaneOf<std::int16_t>& p) {
    return std::all_of(p.samples.begin(), p.samples.end(), [](std::int16_t s) { return s == 0; });
  };
  return zero(y) && zero(u) && zero(v);
}

CodedBitstream transrate_open(const CodedBitstream& bs, int q2) {
  const int targets[] = {q2};
  return std::move(run(bs, targets, TransrateMode::Open, {}, nullptr).front());
}

CodedBitstream transrate_closed(const CodedBitstream& bs, int q2, const DriftObserver& observer,
                                TransrateReport* report) {
  const int targets[] = {q2};
  std::vector<TransrateReport> reports;
  CodedBitstream out =
      std::move(run(bs, targets, TransrateMode::Closed, observer, &reports).front());
  if (report) *report = reports.front();
  return out;
}

std::vector<CodedBitstream> transrate_many(const CodedBitstream& bs, std::span<const int> targets,
                                           TransrateMode mode,
                                           std::vector<TransrateReport>* reports) {
  return run(bs, targets, mode, {}, reports);
}

CodedBitstream cascade_reference(const CodedBitstream& bs, int q2, const Key128& key) {
  check_targets(bs, std::span<const int>(&q2, 1));
  DecodeDetails details;
  const VideoSequence decoded = decode_sequence(bs, key, &details);
  EncoderConfig cfg;
  cfg.profile = bs.header.profile;
  cfg.qp = q2;
  cfg.gop = bs.header.gop;
  cfg.cipher = CipherSpec{bs.header.cipher, key, bs.header.nonce};
  cfg.reuse_motion = std::move(details.motion);
  return encode_sequence(decoded, cfg);
}

}  // namespace sevc
