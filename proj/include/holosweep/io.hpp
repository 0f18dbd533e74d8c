#pragma once

#include <png.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "holosweep/errors.hpp"
#include "holosweep/field.hpp"
#include "holosweep/image.hpp"

namespace holosweep::io {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- PGM (P5)

inline void write_pgm(const fs::path& path, const ImageU8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

namespace detail {

inline int pgm_token(std::istream& in) {
  // skips whitespace and '#' comments between header tokens
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF) throw DataError("truncated PGM header");
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1000000) throw DataError("implausible PGM header value");
    c = in.get();
  }
  return value;
}

}  // namespace detail

inline ImageU8 read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5')
    throw DataError("not a binary PGM (P5) file: " + path.string());
  const int width = detail::pgm_token(in);
  const int height = detail::pgm_token(in);
  const int maxval = detail::pgm_token(in);
  if (width <= 0 || height <= 0 || maxval != 255)
    throw DataError("unsupported PGM geometry in " + path.string());
  ImageU8 img(width, height);
  in.read(reinterpret_cast<char*>(img.pixels().data()),
          static_cast<std::streamsize>(img.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.size()))
    throw DataError("truncated PGM pixel data: " + path.string());
  return img;
}

// ------------------------------------------------------------------- PNG

inline void write_png_rgb8(const fs::path& path, const ImageRgb8& img) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = PNG_FORMAT_RGB;
  static_assert(sizeof(Rgb8) == 3);
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, img.pixels().data(),
                               static_cast<png_int_32>(img.width() * 3), nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw DataError("PNG write failed for " + path.string() + ": " + msg);
  }
}

inline ImageRgb8 read_png_rgb8(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
    std::string msg = png.message;
    png_image_free(&png);
    throw DataError("PNG read failed for " + path.string() + ": " + msg);
  }
  png.format = PNG_FORMAT_RGB;
  ImageRgb8 img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, img.pixels().data(),
                             static_cast<png_int_32>(img.width() * 3), nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw DataError("PNG decode failed for " + path.string() + ": " + msg);
  }
  return img;
}

// --------------------------------------------------- complex field (HSWF)

// Layout: "HSWF" magic, u32 width, u32 height, f64 wavelength_m, f64 pitch_m,
// then row-major interleaved (re, im) f32 pairs. Little-endian throughout.

inline void write_field(const fs::path& path, const holo::ComplexField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write("HSWF", 4);
  const std::uint32_t w = static_cast<std::uint32_t>(field.width);
  const std::uint32_t h = static_cast<std::uint32_t>(field.height);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&field.wavelength_m), 8);
  out.write(reinterpret_cast<const char*>(&field.pitch_m), 8);
  std::vector<float> row;
  row.reserve(static_cast<std::size_t>(field.width) * 2);
  for (int y = 0; y < field.height; ++y) {
    row.clear();
    for (int x = 0; x < field.width; ++x) {
      const auto& v = field.at(x, y);
      row.push_back(static_cast<float>(v.real()));
      row.push_back(static_cast<float>(v.imag()));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw DataError("write failed: " + path.string());
}

inline holo::ComplexField read_field(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HSWF", 4) != 0)
    throw DataError("not an HSWF field file: " + path.string());
  std::uint32_t w = 0;
  std::uint32_t h = 0;
  double wavelength = 0.0;
  double pitch = 0.0;
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&wavelength), 8);
  in.read(reinterpret_cast<char*>(&pitch), 8);
  if (!in || w == 0 || h == 0) throw DataError("bad HSWF header: " + path.string());
  holo::ComplexField field(static_cast<int>(w), static_cast<int>(h), wavelength, pitch);
  std::vector<float> buf(static_cast<std::size_t>(w) * 2);
  for (std::uint32_t y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
      throw DataError("truncated HSWF pixel data: " + path.string());
    for (std::uint32_t x = 0; x < w; ++x)
      field.at(static_cast<int>(x), static_cast<int>(y)) = {buf[2 * x], buf[2 * x + 1]};
  }
  return field;
}

// ------------------------------------------------------------------ JSON

inline json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw DataError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

inline void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path.string());
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace holosweep::io
