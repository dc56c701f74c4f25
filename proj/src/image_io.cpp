// Copyright 2026 The omnedit Authors
// SPDX-License-Identifier: Apache-2.0
#include "omnedit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

namespace omnedit {

namespace {

namespace fs = std::filesystem;

std::uint8_t encode_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(clip01(v) * 255.0));
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

bool is_jpeg(const fs::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".jpg" || ext == ".jpeg";
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw FormatError("cannot open " + path.string());
  return f;
}

// Reads any PNG into 8-bit samples of the requested format.
std::vector<std::uint8_t> read_png(const fs::path& path, png_uint_32 format,
                                   int& width, int& height) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    throw FormatError("cannot read PNG " + path.string() + ": " +
                      image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  width = static_cast<int>(image.width);
  height = static_cast<int>(image.height);
  return buf;
}

void write_png(const fs::path& path, png_uint_32 format, int width, int height,
               const std::vector<std::uint8_t>& buf) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0,
                              nullptr) == 0) {
    throw FormatError("cannot write PNG " + path.string() + ": " +
                      image.message);
  }
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  char message[JMSG_LENGTH_MAX];
};

[[noreturn]] void jpeg_throw(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  throw FormatError(std::string("JPEG error: ") + err->message);
}

Image read_jpeg(const fs::path& path) {
  FilePtr f = open_file(path, "rb");
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_throw;
  jpeg_create_decompress(&cinfo);
  try {
    jpeg_stdio_src(&cinfo, f.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    Image img(w, h);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
      const int y = static_cast<int>(cinfo.output_scanline);
      JSAMPROW rows[1] = {row.data()};
      jpeg_read_scanlines(&cinfo, rows, 1);
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) {
          img.at(x, y, c) = row[static_cast<std::size_t>(x) * 3 + c] / 255.0;
        }
      }
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
  } catch (...) {
    jpeg_destroy_decompress(&cinfo);
    throw;
  }
}

void write_jpeg(const Image& img, const fs::path& path) {
  FilePtr f = open_file(path, "wb");
  jpeg_compress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_throw;
  jpeg_create_compress(&cinfo);
  try {
    jpeg_stdio_dest(&cinfo, f.get());
    cinfo.image_width = static_cast<JDIMENSION>(img.width());
    cinfo.image_height = static_cast<JDIMENSION>(img.height());
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, 95, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width()) * 3);
    while (cinfo.next_scanline < cinfo.image_height) {
      const int y = static_cast<int>(cinfo.next_scanline);
      for (int x = 0; x < img.width(); ++x) {
        for (int c = 0; c < 3; ++c) {
          row[static_cast<std::size_t>(x) * 3 + c] = encode_byte(img.at(x, y, c));
        }
      }
      JSAMPROW rows[1] = {row.data()};
      jpeg_write_scanlines(&cinfo, rows, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
  } catch (...) {
    jpeg_destroy_compress(&cinfo);
    throw;
  }
}

}  // namespace

Image read_image(const fs::path& path) {
  if (!fs::exists(path)) throw FormatError("no such image: " + path.string());
  if (is_jpeg(path)) return read_jpeg(path);
  int w = 0;
  int h = 0;
  const auto buf = read_png(path, PNG_FORMAT_RGB, w, h);
  Image img(w, h);
  auto out = img.values();
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i] / 255.0;
  return img;
}

void write_image(const Image& img, const fs::path& path) {
  if (is_jpeg(path)) {
    write_jpeg(img, path);
    return;
  }
  if (lower_extension(path) != ".png") {
    throw FormatError("unsupported image extension: " + path.string());
  }
  std::vector<std::uint8_t> buf(img.size());
  const auto in = img.values();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = encode_byte(in[i]);
  write_png(path, PNG_FORMAT_RGB, img.width(), img.height(), buf);
}

Mask read_mask(const fs::path& path) {
  if (!fs::exists(path)) throw FormatError("no such mask: " + path.string());
  int w = 0;
  int h = 0;
  const auto buf = read_png(path, PNG_FORMAT_GRAY, w, h);
  Mask mask(w, h);
  auto out = mask.values();
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i] / 255.0;
  return mask;
}

void write_mask(const Mask& mask, const fs::path& path) {
  std::vector<std::uint8_t> buf(mask.size());
  const auto in = mask.values();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = encode_byte(in[i]);
  write_png(path, PNG_FORMAT_GRAY, mask.width(), mask.height(), buf);
}

double quantize8(double v) { return encode_byte(v) / 255.0; }

Image quantize8(const Image& img) {
  Image out = img;
  for (double& v : out.values()) v = quantize8(v);
  return out;
}

}  // namespace omnedit
