#pragma once

// NLSF field snapshots. Layout, little-endian throughout:
//   "NLSF" | version u32 | dim u32 | N u64 x dim | L f64 x dim | space u8 |
//   (re, im) f64 pairs, row-major.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "field.hpp"

namespace xfelnls {

inline constexpr std::uint32_t kNlsfVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw IoError("NLSF: unexpected end of file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_nlsf(std::ostream& os, const Field& f) {
  const auto& g = f.grid();
  os.write("NLSF", 4);
  detail::put_le<std::uint32_t>(os, kNlsfVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  for (int i = 0; i < g.dim(); ++i) detail::put_le<std::uint64_t>(os, g.points(i));
  for (int i = 0; i < g.dim(); ++i) detail::put_le<double>(os, g.extent(i));
  detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(f.space()));
  for (const auto& v : f.values()) {
    detail::put_le<double>(os, v.real());
    detail::put_le<double>(os, v.imag());
  }
}

inline void write_nlsf(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_nlsf(os, f);
  if (!os) throw IoError("write failed: " + path.string());
}

inline Field read_nlsf(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "NLSF", 4) != 0)
    throw IoError("NLSF: bad magic bytes");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kNlsfVersion) throw IoError("NLSF: unsupported version " + std::to_string(version));
  const auto dim = detail::get_le<std::uint32_t>(is);
  if (dim < 1 || dim > 3) throw IoError("NLSF: bad dimension");
  std::array<std::size_t, 3> n{1, 1, 1};
  Vec3 l{1.0, 1.0, 1.0};
  for (std::uint32_t i = 0; i < dim; ++i) n[i] = detail::get_le<std::uint64_t>(is);
  for (std::uint32_t i = 0; i < dim; ++i) l[i] = detail::get_le<double>(is);
  const auto space = detail::get_le<std::uint8_t>(is);
  if (space > 1) throw IoError("NLSF: bad space flag");
  GridSpec grid;
  try {
    grid = GridSpec(static_cast<int>(dim), l, n);
  } catch (const ContractViolation& e) {
    throw IoError(std::string("NLSF: invalid grid header: ") + e.what());
  }
  Field f(grid, static_cast<Space>(space));
  for (auto& v : f.values()) {
    const double re = detail::get_le<double>(is);
    const double im = detail::get_le<double>(is);
    v = Complex(re, im);
  }
  return f;
}

inline Field read_nlsf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_nlsf(is);
}

}  // namespace xfelnls
