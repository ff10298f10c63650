#include "sevc/cipher.hpp"

#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "sevc/error.hpp"

namespace sevc {

namespace {

std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1B : 0x00));
}

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

// S-box from its definition: multiplicative inverse in GF(2^8) followed by
// the affine map b ^ rotl(b,1..4) ^ 0x63.
std::array<std::uint8_t, 256> build_sbox() {
  std::array<std::uint8_t, 256> sbox{};
  for (int x = 0; x < 256; ++x) {
    std::uint8_t inv = 0;
    if (x != 0) {
      for (int y = 1; y < 256; ++y) {
        if (gf_mul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
          inv = static_cast<std::uint8_t>(y);
          break;
        }
      }
    }
    std::uint8_t s = inv;
    for (int r = 1; r <= 4; ++r) {
      s ^= static_cast<std::uint8_t>((inv << r) | (inv >> (8 - r)));
    }
    sbox[x] = static_cast<std::uint8_t>(s ^ 0x63);
  }
  return sbox;
}

const std::array<std::uint8_t, 256>& sbox() {
  static const auto table = build_sbox();
  return table;
}

std::uint64_t load_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

bool msb_first_bit(std::span<const std::uint8_t> bytes, std::uint64_t index) {
  return (bytes[index / 8] >> (7 - index % 8)) & 1;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

const char* cipher_name(CipherKind kind) {
  switch (kind) {
    case CipherKind::Null: return "null";
    case CipherKind::Aes128Cfb: return "aes-cfb";
    case CipherKind::XorFixed: return "xor-fixed";
    case CipherKind::XorPrng: return "xor-prng";
  }
  return "unknown";
}

std::optional<CipherKind> parse_cipher_name(const std::string& name) {
  for (auto k : {CipherKind::Null, CipherKind::Aes128Cfb, CipherKind::XorFixed,
                 CipherKind::XorPrng}) {
    if (name == cipher_name(k)) return k;
  }
  return std::nullopt;
}

bool valid_cipher_id(std::uint8_t id) { return id <= 3; }

Aes128::Aes128(const Key128& key) {
  const auto& s = sbox();
  std::array<std::uint8_t, 176> w{};
  std::copy(key.begin(), key.end(), w.begin());
  std::uint8_t rcon = 1;
  for (int i = 16; i < 176; i += 4) {
    std::array<std::uint8_t, 4> t = {w[i - 4], w[i - 3], w[i - 2], w[i - 1]};
    if (i % 16 == 0) {
      t = {static_cast<std::uint8_t>(s[t[1]] ^ rcon), s[t[2]], s[t[3]], s[t[0]]};
      rcon = xtime(rcon);
    }
    for (int j = 0; j < 4; ++j) w[i + j] = static_cast<std::uint8_t>(w[i - 16 + j] ^ t[j]);
  }
  for (int r = 0; r < 11; ++r) std::copy_n(w.begin() + 16 * r, 16, round_keys_[r].begin());
}

AesBlock Aes128::encrypt(const AesBlock& in) const {
  const auto& s = sbox();
  // State is column-major: state[c * 4 + r], matching the input byte order.
  AesBlock st = in;
  auto add_round_key = [&](int r) {
    for (int i = 0; i < 16; ++i) st[i] ^= round_keys_[r][i];
  };
  auto sub_shift = [&] {
    AesBlock t;
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r) t[c * 4 + r] = s[st[((c + r) % 4) * 4 + r]];
    st = t;
  };
  auto mix_columns = [&] {
    for (int c = 0; c < 4; ++c) {
      std::uint8_t* col = &st[c * 4];
      const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
      const std::uint8_t all = a0 ^ a1 ^ a2 ^ a3;
      col[0] ^= all ^ xtime(a0 ^ a1);
      col[1] ^= all ^ xtime(a1 ^ a2);
      col[2] ^= all ^ xtime(a2 ^ a3);
      col[3] ^= all ^ xtime(a3 ^ a0);
    }
  };

  add_round_key(0);
  for (int round = 1; round <= 9; ++round) {
    sub_shift();
    mix_columns();
    add_round_key(round);
  }
  sub_shift();
  add_round_key(10);
  return st;
}

AesBlock aes128_encrypt(const Key128& key, const AesBlock& block) {
  return Aes128(key).encrypt(block);
}

Keystream::Keystream(const CipherSpec& spec, std::uint32_t frame_index)
    : spec_(spec), frame_(frame_index) {
  switch (spec_.kind) {
    case CipherKind::Aes128Cfb:
      aes_.emplace(spec_.key);
      std::copy(spec_.nonce.begin(), spec_.nonce.end(), iv_.begin());
      for (int i = 0; i < 4; ++i) {
        iv_[12 + i] = static_cast<std::uint8_t>(frame_index >> (24 - 8 * i));
      }
      break;
    case CipherKind::XorPrng:
      prng_seed_ = load_le64(spec_.key.data()) ^ load_le64(spec_.nonce.data()) ^ frame_index;
      break;
    default:
      break;
  }
}

bool Keystream::aes_bit(std::uint64_t slot) {
  const std::uint64_t wanted = slot / 128;
  if (!have_block_ || wanted < block_index_) {
    block_ = aes_->encrypt(iv_);
    ++evaluations_;
    block_index_ = 0;
    have_block_ = true;
  }
  while (block_index_ < wanted) {
    block_ = aes_->encrypt(block_);
    ++evaluations_;
    ++block_index_;
  }
  return msb_first_bit(block_, slot % 128);
}

bool Keystream::bit(std::uint64_t slot) {
  switch (spec_.kind) {
    case CipherKind::Null:
      return false;
    case CipherKind::Aes128Cfb:
      return aes_bit(slot);
    case CipherKind::XorFixed:
      return msb_first_bit(spec_.key, slot % 128);
    case CipherKind::XorPrng: {
      const std::uint64_t word = SplitMix64::output_at(prng_seed_, slot / 64);
      return (word >> (63 - slot % 64)) & 1;
    }
  }
  return false;
}

std::vector<std::uint8_t> encrypt_bins(std::span<const std::uint8_t> bins, const CipherSpec& spec,
                                       std::uint32_t frame_index) {
  Keystream ks(spec, frame_index);
  std::vector<std::uint8_t> out;
  out.reserve(bins.size());
  for (std::uint8_t b : bins) out.push_back(static_cast<std::uint8_t>((b & 1) ^ ks.next_bit()));
  return out;
}

std::optional<std::string> weak_key_warning(const CipherSpec& spec) {
  if (spec.kind != CipherKind::XorFixed) return std::nullopt;
  for (std::uint8_t b : spec.key) {
    if (b != 0) return std::nullopt;
  }
  return std::string("xor-fixed with an all-zero key leaves every sign bin unchanged");
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

KeyMaterial parse_key_hex(const std::string& text) {
  std::string hex;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) hex.push_back(c);
  }
  if (hex.size() != 56) throw KeyError("key file must hold 56 hex characters (key || nonce)");
  std::array<std::uint8_t, 28> raw{};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw KeyError("key file contains a non-hex character");
    raw[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  KeyMaterial km;
  std::copy_n(raw.begin(), 16, km.key.begin());
  std::copy_n(raw.begin() + 16, 12, km.nonce.begin());
  return km;
}

std::string format_key_hex(const KeyMaterial& km) { return to_hex(km.key) + to_hex(km.nonce); }

KeyMaterial read_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KeyError("cannot read key file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_hex(ss.str());
}

KeyMaterial generate_key_material() {
  std::random_device rd;
  KeyMaterial km;
  for (auto& b : km.key) b = static_cast<std::uint8_t>(rd());
  for (auto& b : km.nonce) b = static_cast<std::uint8_t>(rd());
  return km;
}

}  // namespace sevc
