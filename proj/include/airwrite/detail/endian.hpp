#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <type_traits>

namespace airwrite::detail {

template <typename T>
constexpr T byteswap(T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  U in = static_cast<U>(value);
  U out = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out = static_cast<U>((out << 8) | (in & 0xFF));
    in = static_cast<U>(in >> 8);
  }
  return static_cast<T>(out);
}

template <typename T>
using uint_of = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                std::conditional_t<sizeof(T) == 2, std::uint16_t,
                std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;

// Writes the in-memory image of a value (as laid out on a host of byte order
// `host`) into little-endian bytes. `host` defaults to the real host; tests
// pass std::endian::big together with a byte-reversed image to exercise the
// swap path on little-endian machines.
template <typename T>
void store_le_image(std::byte* out, const std::array<std::byte, sizeof(T)>& image,
                    std::endian host = std::endian::native) {
  if (host == std::endian::little) {
    std::memcpy(out, image.data(), sizeof(T));
  } else {
    for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = image[sizeof(T) - 1 - i];
  }
}

template <typename T>
std::array<std::byte, sizeof(T)> load_le_image(const std::byte* in,
                                               std::endian host = std::endian::native) {
  std::array<std::byte, sizeof(T)> image{};
  if (host == std::endian::little) {
    std::memcpy(image.data(), in, sizeof(T));
  } else {
    for (std::size_t i = 0; i < sizeof(T); ++i) image[i] = in[sizeof(T) - 1 - i];
  }
  return image;
}

template <typename T>
void store_le(std::byte* out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  auto bits = std::bit_cast<uint_of<T>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[i] = static_cast<std::byte>(bits & 0xFF);
    bits = static_cast<uint_of<T>>(bits >> 8);
  }
}

template <typename T>
T load_le(const std::byte* in) {
  static_assert(std::is_trivially_copyable_v<T>);
  uint_of<T> bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) {
    bits = static_cast<uint_of<T>>((bits << 8) | std::to_integer<uint_of<T>>(in[i]));
  }
  return std::bit_cast<T>(bits);
}

}  // namespace airwrite::detail
