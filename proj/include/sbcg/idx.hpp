#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbcg {

// IDX image/label container (big-endian): magic 0x00000803 for images
// (count, rows, cols, bytes) and 0x00000801 for labels (count, bytes).
struct IdxImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
};

struct IdxLabels {
  int count = 0;
  std::vector<std::uint8_t> labels;
};

namespace detail {

inline std::uint32_t read_be32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("idx: truncated payload reading " + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

inline void write_be32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

inline IdxImages read_idx_images(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  const std::uint32_t magic = detail::read_be32(is, "magic");
  if (magic != 0x00000803u)
    throw std::runtime_error("idx: bad image magic in '" + path + "'");
  IdxImages out;
  out.count = static_cast<int>(detail::read_be32(is, "count"));
  out.rows = static_cast<int>(detail::read_be32(is, "rows"));
  out.cols = static_cast<int>(detail::read_be32(is, "cols"));
  if (out.count < 0 || out.rows <= 0 || out.cols <= 0)
    throw std::runtime_error("idx: implausible image header in '" + path + "'");
  const std::size_t n =
      std::size_t(out.count) * std::size_t(out.rows) * std::size_t(out.cols);
  out.pixels.resize(n);
  is.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw std::runtime_error("idx: truncated image payload in '" + path + "'");
  return out;
}

inline IdxLabels read_idx_labels(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  const std::uint32_t magic = detail::read_be32(is, "magic");
  if (magic != 0x00000801u)
    throw std::runtime_error("idx: bad label magic in '" + path + "'");
  IdxLabels out;
  out.count = static_cast<int>(detail::read_be32(is, "count"));
  if (out.count < 0) throw std::runtime_error("idx: implausible label count in '" + path + "'");
  out.labels.resize(static_cast<std::size_t>(out.count));
  is.read(reinterpret_cast<char*>(out.labels.data()), out.count);
  if (is.gcount() != out.count)
    throw std::runtime_error("idx: truncated label payload in '" + path + "'");
  return out;
}

// Writers, used for fixtures and cache dumps.
inline void write_idx_images(const std::string& path, const IdxImages& img) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  detail::write_be32(os, 0x00000803u);
  detail::write_be32(os, static_cast<std::uint32_t>(img.count));
  detail::write_be32(os, static_cast<std::uint32_t>(img.rows));
  detail::write_be32(os, static_cast<std::uint32_t>(img.cols));
  os.write(reinterpret_cast<const char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_idx_labels(const std::string& path, const IdxLabels& lab) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  detail::write_be32(os, 0x00000801u);
  detail::write_be32(os, static_cast<std::uint32_t>(lab.count));
  os.write(reinterpret_cast<const char*>(lab.labels.data()),
           static_cast<std::streamsize>(lab.labels.size()));
}

}  // namespace sbcg
