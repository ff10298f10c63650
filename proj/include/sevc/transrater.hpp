#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sevc/bitstream.hpp"
#include "sevc/cipher.hpp"
#include "sevc/frame.hpp"

namespace sevc {

// Keyless requantization of a coded stream to a coarser QP. None of the
// open/closed entry points accept key material; signs (encrypted or not)
// are carried through verbatim and cipher fields are copied.

enum class TransrateMode { Open, Closed };

// Pixel-domain difference between the input stream's reconstruction and the
// output stream's reconstruction, saturated to int16.
struct DriftBuffer {
  PlaneOf<std::int16_t> y;
  PlaneOf<std::int16_t> u;
  PlaneOf<std::int16_t> v;

  DriftBuffer() = default;
  DriftBuffer(int width, int height)
      : y(width, height), u(width / 2, height / 2), v(width / 2, height / 2) {}
  bool all_zero() const;
};

struct TransrateReport {
  int target_qp = 0;
  std::uint64_t drift_saturations = 0;  // closed loop only
};

// Called after each frame of a closed-loop run with that frame's drift.
using DriftObserver = std::function<void(int frame, const DriftBuffer&)>;

// Throws std::invalid_argument unless q2 > every input QP and q2 <= 51.
CodedBitstream transrate_open(const CodedBitstream& bs, int q2);

CodedBitstream transrate_closed(const CodedBitstream& bs, int q2,
                                const DriftObserver& observer = {},
                                TransrateReport* report = nullptr);

// Entropy decoding and dequantization run once per frame and fan out to
// every target. Output i is byte-identical to a single-target run for
// targets[i].
std::vector<CodedBitstream> transrate_many(const CodedBitstream& bs, std::span<const int> targets,
                                           TransrateMode mode,
                                           std::vector<TransrateReport>* reports = nullptr);

// Cascaded benchmark: decrypt and decode, re-encode at q2 reusing the decoded
// motion vectors, re-encrypt with the same cipher kind, key and nonce.
CodedBitstream cascade_reference(const CodedBitstream& bs, int q2, const Key128& key);

}  // namespace sevc
