#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "airwrite/detail/endian.hpp"
#include "airwrite/errors.hpp"

namespace airwrite {

// Dense f32 tensor, row-major.
struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> values;

  std::uint64_t element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// "MYOT", u16 version, u8 dtype (0 = f32), u8 ndim, ndim x u64 dims, payload.
inline constexpr std::array<char, 4> kTensorMagic{'M', 'Y', 'O', 'T'};
inline constexpr std::uint16_t kTensorFormatVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 0;

inline std::size_t tensor_header_bytes(std::size_t ndim) { return 4 + 2 + 1 + 1 + 8 * ndim; }

inline void check_tensor(const Tensor& t) {
  if (t.dims.empty() || t.dims.size() > 255) throw Error(ErrorCode::InvalidArgument, "tensor rank must be 1..255");
  if (t.element_count() == 0) throw Error(ErrorCode::InvalidArgument, "tensor has a zero dimension");
  if (t.values.size() != t.element_count()) {
    throw Error(ErrorCode::InvalidArgument, "tensor payload does not match dims");
  }
}

// `host` is the byte order the float payload is laid out in memory; callers
// other than tests leave it at the native order.
inline std::vector<std::byte> encode_tensor(const Tensor& t, std::endian host = std::endian::native) {
  check_tensor(t);
  const std::size_t header = tensor_header_bytes(t.dims.size());
  std::vector<std::byte> buf(header + 4 * t.values.size());
  std::memcpy(buf.data(), kTensorMagic.data(), 4);
  detail::store_le<std::uint16_t>(buf.data() + 4, kTensorFormatVersion);
  buf[6] = std::byte{kDtypeF32};
  buf[7] = static_cast<std::byte>(t.dims.size());
  for (std::size_t i = 0; i < t.dims.size(); ++i) detail::store_le<std::uint64_t>(buf.data() + 8 + 8 * i, t.dims[i]);
  std::byte* payload = buf.data() + header;
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    std::array<std::byte, 4> image;
    std::memcpy(image.data(), &t.values[i], 4);
    detail::store_le_image<float>(payload + 4 * i, image, host);
    if (!std::isfinite(detail::load_le<float>(payload + 4 * i))) {
      throw Error(ErrorCode::NonFiniteData, "tensor holds a non-finite value");
    }
  }
  return buf;
}

inline Tensor decode_tensor(std::span<const std::byte> bytes, std::endian host = std::endian::native) {
  if (bytes.size() < 8) throw Error(ErrorCode::TruncatedPayload, "tensor header truncated");
  if (std::memcmp(bytes.data(), kTensorMagic.data(), 4) != 0) throw Error(ErrorCode::BadMagic, "not a tensor file");
  const auto version = detail::load_le<std::uint16_t>(bytes.data() + 4);
  if (version != kTensorFormatVersion) throw Error(ErrorCode::CorruptFile, "unsupported tensor version");
  if (std::to_integer<std::uint8_t>(bytes[6]) != kDtypeF32) throw Error(ErrorCode::CorruptFile, "unsupported dtype");
  const std::size_t ndim = std::to_integer<std::uint8_t>(bytes[7]);
  if (ndim == 0) throw Error(ErrorCode::CorruptFile, "tensor rank is zero");
  const std::size_t header = tensor_header_bytes(ndim);
  if (bytes.size() < header) throw Error(ErrorCode::TruncatedPayload, "tensor dims truncated");
  Tensor t;
  t.dims.resize(ndim);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    t.dims[i] = detail::load_le<std::uint64_t>(bytes.data() + 8 + 8 * i);
    if (t.dims[i] == 0) throw Error(ErrorCode::CorruptFile, "tensor has a zero dimension");
    if (count > (bytes.size() / 4) / t.dims[i]) throw Error(ErrorCode::TruncatedPayload, "payload shorter than dims");
    count *= t.dims[i];
  }
  if (bytes.size() - header < 4 * count) throw Error(ErrorCode::TruncatedPayload, "payload shorter than dims");
  if (bytes.size() - header > 4 * count) throw Error(ErrorCode::CorruptFile, "trailing bytes after payload");
  t.values.resize(count);
  const std::byte* payload = bytes.data() + header;
  for (std::size_t i = 0; i < count; ++i) {
    const auto image = detail::load_le_image<float>(payload + 4 * i, host);
    std::memcpy(&t.values[i], image.data(), 4);
  }
  return t;
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  std::vector<std::byte> buf(size);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error(ErrorCode::IoError, "read failed for " + path.string());
  return decode_tensor(buf);
}

}  // namespace airwrite
