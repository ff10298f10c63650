#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sevc {

using Key128 = std::array<std::uint8_t, 16>;
using Nonce96 = std::array<std::uint8_t, 12>;
using AesBlock = std::array<std::uint8_t, 16>;

enum class CipherKind : std::uint8_t {
  Null = 0,
  Aes128Cfb = 1,
  XorFixed = 2,
  XorPrng = 3,
};

const char* cipher_name(CipherKind kind);                  // "null", "aes-cfb", ...
std::optional<CipherKind> parse_cipher_name(const std::string& name);
bool valid_cipher_id(std::uint8_t id);

struct CipherSpec {
  CipherKind kind = CipherKind::Null;
  Key128 key{};
  Nonce96 nonce{};
};

// FIPS-197 AES-128 forward cipher.
class Aes128 {
 public:
  explicit Aes128(const Key128& key);
  AesBlock encrypt(const AesBlock& in) const;

 private:
  std::array<std::array<std::uint8_t, 16>, 11> round_keys_{};
};

AesBlock aes128_encrypt(const Key128& key, const AesBlock& block);

// SplitMix64 generator (Steele, Lea, Flood).
struct SplitMix64 {
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  std::uint64_t state = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  std::uint64_t next() { return mix(state += kGamma); }
  // Output number i (0-based) of a generator seeded with seed, in O(1).
  static std::uint64_t output_at(std::uint64_t seed, std::uint64_t i) {
    return mix(seed + (i + 1) * kGamma);
  }
};

// Per-frame keystream. Every potential sign position of a frame owns one
// keystream bit ("slot"); the bit for a slot depends only on
// (key, nonce, frame index, slot). Bits are taken MSB-first from 128-bit AES
// output blocks, 64-bit SplitMix64 words or the repeating 128-bit key.
//
// AES: block 0 = AES(key, nonce || frame_index as u32 big-endian), block
// b+1 = AES(key, block b), i.e. 128-bit cipher feedback over an all-zero
// plaintext.
class Keystream {
 public:
  Keystream(const CipherSpec& spec, std::uint32_t frame_index);

  bool bit(std::uint64_t slot);
  bool next_bit() { return bit(cursor_++); }

  CipherKind kind() const { return spec_.kind; }
  std::uint64_t block_evaluations() const { return evaluations_; }

 private:
  bool aes_bit(std::uint64_t slot);

  CipherSpec spec_;
  std::uint32_t frame_ = 0;
  std::uint64_t cursor_ = 0;
  std::uint64_t prng_seed_ = 0;
  std::optional<Aes128> aes_;
  AesBlock iv_{};
  AesBlock block_{};
  std::uint64_t block_index_ = 0;
  bool have_block_ = false;
  std::uint64_t evaluations_ = 0;
};

// XOR each bin (0/1) with the frame keystream; bins[i] sits at slot i.
// Self-inverse.
std::vector<std::uint8_t> encrypt_bins(std::span<const std::uint8_t> bins, const CipherSpec& spec,
                                       std::uint32_t frame_index);

// Non-empty when the cipher setup is degenerate (e.g. XOR with an all-zero key).
std::optional<std::string> weak_key_warning(const CipherSpec& spec);

// Key file: 56 hex characters, 16-byte key followed by 12-byte nonce.
struct KeyMaterial {
  Key128 key{};
  Nonce96 nonce{};
  bool operator==(const KeyMaterial&) const = default;
};

KeyMaterial parse_key_hex(const std::string& text);  // throws KeyError
std::string format_key_hex(const KeyMaterial& km);
KeyMaterial read_key_file(const std::string& path);  // throws KeyError
KeyMaterial generate_key_material();                 // OS entropy

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace sevc
