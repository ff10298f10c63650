#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sevc/cipher.hpp"
#include "sevc/syntax.hpp"
#include "sevc/transform.hpp"

namespace sevc {

// "CVB1" container. Header layout, little-endian:
//   magic[4] version:u8 profile:u8 width:u16 height:u16 fps_num:u16 fps_den:u16
//   gop:u8 qp:u8 cipher_kind:u8 nonce[12] frame_count:u32
// followed by frame records: type:u8 qp:u8 payload_len:u32 payload[payload_len].
// The key is never stored.
constexpr std::size_t kHeaderSize = 33;
constexpr std::size_t kFrameRecordOverhead = 6;
constexpr std::uint8_t kContainerVersion = 1;

struct StreamHeader {
  std::uint8_t version = kContainerVersion;
  Profile profile = Profile::A;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint16_t fps_num = 30;
  std::uint16_t fps_den = 1;
  std::uint8_t gop = 16;
  std::uint8_t qp = 0;
  CipherKind cipher = CipherKind::Null;
  Nonce96 nonce{};
  bool operator==(const StreamHeader&) const = default;
};

struct CodedFrame {
  FrameType type = FrameType::I;
  std::uint8_t qp = 0;
  std::vector<std::uint8_t> payload;
  bool operator==(const CodedFrame&) const = default;
};

struct CodedBitstream {
  StreamHeader header;
  std::vector<CodedFrame> frames;

  FrameLayout layout() const { return FrameLayout(header.profile, header.width, header.height); }
  std::size_t byte_size() const;
  bool operator==(const CodedBitstream&) const = default;
};

std::vector<std::uint8_t> serialize(const CodedBitstream& bs);
// Throws FormatError on bad magic, unknown version, invalid fields or length overruns.
CodedBitstream deserialize(std::span<const std::uint8_t> bytes);

void write_bitstream_file(const CodedBitstream& bs, const std::string& path);
CodedBitstream read_bitstream_file(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace sevc
