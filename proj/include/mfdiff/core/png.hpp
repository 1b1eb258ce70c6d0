#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "mfdiff/core/error.hpp"

namespace mfdiff {

namespace detail {

inline void png_put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>(v & 0xff));
}

inline void png_chunk(std::vector<unsigned char>& out, const char type[4], const unsigned char* data,
                      std::size_t n) {
  png_put_u32(out, static_cast<std::uint32_t>(n));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data, data + n);
  const auto crc =
      ::crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  png_put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

// Minimal 8-bit grayscale PNG writer (zlib-deflated, no interlacing).
inline void write_gray_png(const std::string& path, int width, int height,
                           const std::vector<unsigned char>& pixels) {
  if (width <= 0 || height <= 0 || pixels.size() != static_cast<std::size_t>(width) * height)
    throw ContractError("write_gray_png: pixel buffer does not match dimensions");

  // Raw scanlines, each prefixed with filter type 0.
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), pixels.begin() + static_cast<std::size_t>(y) * width,
               pixels.begin() + static_cast<std::size_t>(y + 1) * width);
  }

  uLongf zlen = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> zdata(zlen);
  if (::compress2(zdata.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw Error("write_gray_png: deflate failed");
  zdata.resize(zlen);

  std::vector<unsigned char> out;
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  out.insert(out.end(), sig, sig + 8);

  unsigned char ihdr[13];
  ihdr[0] = static_cast<unsigned char>((width >> 24) & 0xff);
  ihdr[1] = static_cast<unsigned char>((width >> 16) & 0xff);
  ihdr[2] = static_cast<unsigned char>((width >> 8) & 0xff);
  ihdr[3] = static_cast<unsigned char>(width & 0xff);
  ihdr[4] = static_cast<unsigned char>((height >> 24) & 0xff);
  ihdr[5] = static_cast<unsigned char>((height >> 16) & 0xff);
  ihdr[6] = static_cast<unsigned char>((height >> 8) & 0xff);
  ihdr[7] = static_cast<unsigned char>(height & 0xff);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // no interlace
  detail::png_chunk(out, "IHDR", ihdr, sizeof(ihdr));
  detail::png_chunk(out, "IDAT", zdata.data(), zdata.size());
  detail::png_chunk(out, "IEND", nullptr, 0);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("write_gray_png: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write_gray_png: write failed for " + path);
}

}  // namespace mfdiff
