#include "sevc/bitstream.hpp"

#include <fstream>
#include <iterator>
#include <string_view>

#include "sevc/error.hpp"

namespace sevc {

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  template <typename T>
  void le(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
    }
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
  template <typename T>
  T le() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > in_.size() - pos_) throw FormatError("cvb: length overrun");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t CodedBitstream::byte_size() const {
  std::size_t size = kHeaderSize;
  for (const CodedFrame& f : frames) size += kFrameRecordOverhead + f.payload.size();
  return size;
}

std::vector<std::uint8_t> serialize(const CodedBitstream& bs) {
  std::vector<std::uint8_t> out;
  out.reserve(bs.byte_size());
  ByteWriter w(out);
  const StreamHeader& h = bs.header;
  for (char c : std::string_view("CVB1")) w.le(static_cast<std::uint8_t>(c));
  w.le(h.version);
  w.le(static_cast<std::uint8_t>(h.profile));
  w.le(h.width);
  w.le(h.height);
  w.le(h.fps_num);
  w.le(h.fps_den);
  w.le(h.gop);
  w.le(h.qp);
  w.le(static_cast<std::uint8_t>(h.cipher));
  w.bytes(h.nonce);
  w.le(static_cast<std::uint32_t>(bs.frames.size()));
  for (const CodedFrame& f : bs.frames) {
    w.le(static_cast<std::uint8_t>(f.type));
    w.le(f.qp);
    w.le(static_cast<std::uint32_t>(f.payload.size()));
    w.bytes(f.payload);
  }
  return out;
}

CodedBitstream deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.bytes(4);
  if (std::string(magic.begin(), magic.end()) != "CVB1") throw FormatError("cvb: bad magic");
  CodedBitstream bs;
  StreamHeader& h = bs.header;
  h.version = r.le<std::uint8_t>();
  if (h.version != kContainerVersion) throw FormatError("cvb: unsupported version");
  const auto profile = r.le<std::uint8_t>();
  if (profile > 1) throw FormatError("cvb: unknown profile");
  h.profile = static_cast<Profile>(profile);
  h.width = r.le<std::uint16_t>();
  h.height = r.le<std::uint16_t>();
  if (h.width == 0 || h.height == 0 || h.width % 16 || h.height % 16) {
    throw FormatError("cvb: dimensions must be nonzero multiples of 16");
  }
  h.fps_num = r.le<std::uint16_t>();
  h.fps_den = r.le<std::uint16_t>();
  if (h.fps_num == 0 || h.fps_den == 0) throw FormatError("cvb: zero frame rate");
  h.gop = r.le<std::uint8_t>();
  if (h.gop == 0) throw FormatError("cvb: zero gop");
  h.qp = r.le<std::uint8_t>();
  if (h.qp > kMaxQp) throw FormatError("cvb: qp out of range");
  const auto cipher = r.le<std::uint8_t>();
  if (!valid_cipher_id(cipher)) throw FormatError("cvb: unknown cipher kind");
  h.cipher = static_cast<CipherKind>(cipher);
  const auto nonce = r.bytes(h.nonce.size());
  std::copy(nonce.begin(), nonce.end(), h.nonce.begin());
  const auto count = r.le<std::uint32_t>();
  if (count > r.remaining() / kFrameRecordOverhead) throw FormatError("cvb: length overrun");
  bs.frames.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    CodedFrame f;
    const auto type = r.le<std::uint8_t>();
    if (type > 1) throw FormatError("cvb: unknown frame type");
    f.type = static_cast<FrameType>(type);
    f.qp = r.le<std::uint8_t>();
    if (f.qp > kMaxQp) throw FormatError("cvb: frame qp out of range");
    const auto len = r.le<std::uint32_t>();
    const auto payload = r.bytes(len);
    f.payload.assign(payload.begin(), payload.end());
    bs.frames.push_back(std::move(f));
  }
  if (r.remaining() != 0) throw FormatError("cvb: trailing bytes after last frame");
  return bs;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_bitstream_file(const CodedBitstream& bs, const std::string& path) {
  write_file_bytes(path, serialize(bs));
}

CodedBitstream read_bitstream_file(const std::string& path) {
  return deserialize(read_file_bytes(path));
}

}  // namespace sevc
