#include "sevc/transform.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sevc {

namespace {

std::int64_t round_half_away(double x) { return static_cast<std::int64_t>(std::round(x)); }

TransformSpec build_spec(int n) {
  TransformSpec t;
  t.n = n;
  for (int i = 0; i < n; ++i) {
    const double b = std::sqrt((i == 0 ? 1.0 : 2.0) / n);
    std::int64_t norm = 0;
    for (int j = 0; j < n; ++j) {
      const double angle = (2 * j + 1) * i * std::numbers::pi / (2.0 * n);
      const std::int64_t c = round_half_away(kBasisScale * b * std::cos(angle));
      t.basis[i * n + j] = c;
      norm += c * c;
    }
    t.rownorm[i] = norm;
  }
  return t;
}

std::vector<int> build_zigzag(int n) {
  std::vector<int> order;
  order.reserve(n * n);
  for (int s = 0; s <= 2 * (n - 1); ++s) {
    if (s % 2 == 1) {
      for (int row = std::max(0, s - n + 1); row <= std::min(s, n - 1); ++row) {
        order.push_back(row * n + (s - row));
      }
    } else {
      for (int row = std::min(s, n - 1); row >= std::max(0, s - n + 1); --row) {
        order.push_back(row * n + (s - row));
      }
    }
  }
  return order;
}

int sign_of(std::int64_t x) { return (x > 0) - (x < 0); }

}  // namespace

bool Block::all_zero() const {
  return std::all_of(v.begin(), v.begin() + count(), [](std::int64_t x) { return x == 0; });
}

Block Block::negated() const {
  Block out(n);
  for (int k = 0; k < count(); ++k) out.v[k] = -v[k];
  return out;
}

bool Block::operator==(const Block& o) const {
  return n == o.n && std::equal(v.begin(), v.begin() + count(), o.v.begin());
}

const TransformSpec& TransformSpec::get(int n) {
  static const TransformSpec t4 = build_spec(4);
  static const TransformSpec t8 = build_spec(8);
  if (n == 4) return t4;
  if (n == 8) return t8;
  throw std::invalid_argument("transform size must be 4 or 8");
}

std::int64_t qp_step16(int qp) {
  static constexpr std::array<std::int64_t, 6> base = {10, 11, 13, 14, 16, 18};
  if (qp < 0 || qp > kMaxQp) throw std::invalid_argument("qp out of range 0..51");
  return base[qp % 6] << (qp / 6);
}

QuantSpec::QuantSpec(const TransformSpec& t, int qp_, PredictionMode mode_)
    : qp(qp_), n(t.n), mode(mode_), delta16(qp_step16(qp_)) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double geo = std::sqrt(static_cast<double>(t.rownorm[i] * t.rownorm[j]));
      step[i * n + j] = std::max<std::int64_t>(1, round_half_away(delta16 * geo / kBasisScale));
    }
  }
}

Block forward_transform(const Block& x, const TransformSpec& t) {
  const int n = t.n;
  assert(x.n == n);
  Block tmp(n);  // C * X
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::int64_t acc = 0;
      for (int k = 0; k < n; ++k) acc += t.c(i, k) * x.at(k, j);
      tmp.at(i, j) = acc;
    }
  Block w(n);  // (C * X) * C^T
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::int64_t acc = 0;
      for (int k = 0; k < n; ++k) acc += tmp.at(i, k) * t.c(j, k);
      w.at(i, j) = acc;
    }
  return w;
}

Block quantize(const Block& w, const QuantSpec& q) {
  Block out(w.n);
  for (int k = 0; k < w.count(); ++k) {
    const std::int64_t mag = q.quantize_magnitude(std::abs(w.v[k]), k);
    out.v[k] = sign_of(w.v[k]) * mag;
  }
  return out;
}

Block dequantize(const Block& levels, const QuantSpec& q) {
  Block out(levels.n);
  for (int k = 0; k < levels.count(); ++k) out.v[k] = levels.v[k] * 16 * q.step[k];
  return out;
}

Block dequantize_raw(const Block& levels, const QuantSpec& q) {
  Block out(levels.n);
  for (int k = 0; k < levels.count(); ++k) out.v[k] = levels.v[k] * q.step[k];
  return out;
}

Block inverse_transform(const Block& w16, const TransformSpec& t) {
  const int n = t.n;
  assert(w16.n == n);
  Block scaled(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::int64_t w = w16.at(i, j);
      const std::int64_t norm = t.rownorm[i] * t.rownorm[j];
      const std::int64_t mag = (std::abs(w) * 1024 + 8 * norm) / (16 * norm);
      scaled.at(i, j) = sign_of(w) * mag;
    }
  Block tmp(n);  // C^T * V
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) {
      std::int64_t acc = 0;
      for (int i = 0; i < n; ++i) acc += t.c(i, a) * scaled.at(i, j);
      tmp.at(a, j) = acc;
    }
  Block x(n);  // (C^T * V) * C
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::int64_t acc = 0;
      for (int j = 0; j < n; ++j) acc += tmp.at(a, j) * t.c(j, b);
      const std::int64_t rounded = sign_of(acc) * ((std::abs(acc) + 512) >> 10);
      x.at(a, b) = std::clamp<std::int64_t>(rounded, -255, 255);
    }
  return x;
}

std::span<const int> zigzag_scan(int n) {
  static const std::vector<int> z4 = build_zigzag(4);
  static const std::vector<int> z8 = build_zigzag(8);
  if (n == 4) return z4;
  if (n == 8) return z8;
  throw std::invalid_argument("scan size must be 4 or 8");
}

}  // namespace sevc
