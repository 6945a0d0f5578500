// SPDX-License-Identifier: Apache-2.0

#include "spm/image.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "spm/errors.hpp"
#include "spm/hash.hpp"

namespace spm {

namespace {

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Raw raster as read from disk, before any normalization.
struct RawRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  int max_value = 255;
  std::vector<std::uint16_t> samples;  // row-major, interleaved channels

  std::uint16_t at(int x, int y, int c) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

RawRaster read_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError("not a PNG file: " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }

  RawRaster out;
  std::vector<std::uint8_t> row_storage;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG " + path);
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  if (png_get_bit_depth(png, info) == 16 &&
      std::endian::native == std::endian::little)
    png_set_swap(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = static_cast<int>(png_get_channels(png, info));
  const int depth = png_get_bit_depth(png, info);
  out.max_value = depth == 16 ? 65535 : 255;

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  row_storage.resize(row_bytes * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y)
    rows[y] = row_storage.data() + row_bytes * y;

  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n =
      static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (depth == 16) {
    std::memcpy(out.samples.data(), row_storage.data(), n * 2);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = row_storage[i];
  }
  return out;
}

void write_png(const std::string& path, int width, int height, int channels,
               int bit_depth, const std::vector<std::uint16_t>& samples) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }

  std::vector<std::uint8_t> row_storage;
  std::vector<png_bytep> rows;
  const std::size_t row_bytes =
      static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  row_storage.resize(row_bytes * height);
  if (bit_depth == 16) {
    // PNG stores 16-bit samples big-endian.
    for (std::size_t i = 0; i < samples.size(); ++i) {
      row_storage[2 * i] = static_cast<std::uint8_t>(samples[i] >> 8);
      row_storage[2 * i + 1] = static_cast<std::uint8_t>(samples[i] & 0xff);
    }
  } else {
    for (std::size_t i = 0; i < samples.size(); ++i)
      row_storage[i] = static_cast<std::uint8_t>(samples[i]);
  }
  rows.resize(height);
  for (int y = 0; y < height; ++y)
    rows[y] = row_storage.data() + row_bytes * y;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG " + path);
  }

  png_init_io(png, file.get());
  const int color =
      channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, width, height, bit_depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RawRaster read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6")
    throw FormatError("unsupported PNM magic '" + magic + "' in " + path);

  auto next_token = [&in, &path]() -> long {
    // Skips whitespace and '#' comments between header fields.
    while (true) {
      const int c = in.peek();
      if (c == EOF) throw IoError("truncated PNM header in " + path);
      if (std::isspace(c)) {
        in.get();
      } else if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else {
        break;
      }
    }
    long v = 0;
    in >> v;
    if (!in) throw FormatError("bad PNM header field in " + path);
    return v;
  };

  RawRaster out;
  out.width = static_cast<int>(next_token());
  out.height = static_cast<int>(next_token());
  out.max_value = static_cast<int>(next_token());
  out.channels = magic == "P6" ? 3 : 1;
  if (out.width < 1 || out.height < 1 || out.max_value < 1 ||
      out.max_value > 65535)
    throw FormatError("bad PNM dimensions in " + path);
  in.get();  // single whitespace after maxval

  const std::size_t n =
      static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.max_value > 255) {
    std::vector<std::uint8_t> buf(n * 2);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
      throw IoError("truncated PNM data in " + path);
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] =
          static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
  } else {
    std::vector<std::uint8_t> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
      throw IoError("truncated PNM data in " + path);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = buf[i];
  }
  return out;
}

void write_pnm(const std::string& path, int width, int height, int channels,
               int max_value, const std::vector<std::uint16_t>& samples) {
  if (channels != 1 && channels != 3)
    throw DomainError("PNM supports 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << (channels == 3 ? "P6" : "P5") << "\n"
      << width << " " << height << "\n"
      << max_value << "\n";
  if (max_value > 255) {
    std::vector<std::uint8_t> buf(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      buf[2 * i] = static_cast<std::uint8_t>(samples[i] >> 8);
      buf[2 * i + 1] = static_cast<std::uint8_t>(samples[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  } else {
    std::vector<std::uint8_t> buf(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      buf[i] = static_cast<std::uint8_t>(samples[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  }
  if (!out) throw IoError("failed writing " + path);
}

ImageGrid normalize(const RawRaster& raw) {
  ImageGrid img(raw.width, raw.height, raw.channels);
  const float maxval = static_cast<float>(raw.max_value);
  for (int c = 0; c < raw.channels; ++c) {
    auto& plane = img.plane(c);
    for (int y = 0; y < raw.height; ++y)
      for (int x = 0; x < raw.width; ++x)
        plane(y, x) = static_cast<float>(raw.at(x, y, c)) / maxval;
  }
  return img;
}

bool is_png(const std::string& ext) { return ext == "png"; }
bool is_pnm(const std::string& ext) {
  return ext == "pgm" || ext == "ppm" || ext == "pnm";
}

}  // namespace

ImageGrid::ImageGrid(int width, int height, int channels, float fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1 || channels < 1)
    throw DomainError("ImageGrid dimensions must be positive");
  planes_.assign(channels, Eigen::ArrayXXf::Constant(height, width, fill));
}

Eigen::ArrayXXf ImageGrid::luminance() const {
  if (channels() == 1) return planes_[0];
  if (channels() == 3)
    return 0.299f * planes_[0] + 0.587f * planes_[1] + 0.114f * planes_[2];
  Eigen::ArrayXXf acc = planes_[0];
  for (int c = 1; c < channels(); ++c) acc += planes_[c];
  return acc / static_cast<float>(channels());
}

std::uint64_t ImageGrid::content_hash() const {
  ContentHash h;
  h.update_value(width_).update_value(height_).update_value(channels());
  for (const auto& plane : planes_)
    h.update(plane.data(), sizeof(float) * plane.size());
  return h.digest();
}

int LabelMap::label_count() const {
  if (labels.size() == 0) return 0;
  return labels.maxCoeff() + 1;
}

ImageGrid load_image(const std::string& path) {
  const std::string ext = lower_extension(path);
  RawRaster raw;
  if (is_png(ext)) {
    raw = read_png(path);
  } else if (is_pnm(ext)) {
    raw = read_pnm(path);
  } else {
    throw FormatError("unsupported image format '." + ext + "' for " + path);
  }
  return normalize(raw);
}

void save_image(const ImageGrid& image, const std::string& path,
                int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw DomainError("bit depth must be 8 or 16");
  if (image.channels() != 1 && image.channels() != 3)
    throw DomainError("raster output supports 1 or 3 channels");

  const int maxval = bit_depth == 16 ? 65535 : 255;
  std::vector<std::uint16_t> samples(
      static_cast<std::size_t>(image.pixel_count()) * image.channels());
  std::size_t i = 0;
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < image.channels(); ++c)
        samples[i++] = static_cast<std::uint16_t>(
            std::lround(std::clamp(image(x, y, c), 0.0f, 1.0f) * maxval));

  const std::string ext = lower_extension(path);
  if (is_png(ext)) {
    write_png(path, image.width(), image.height(), image.channels(),
              bit_depth, samples);
  } else if (is_pnm(ext)) {
    write_pnm(path, image.width(), image.height(), image.channels(), maxval,
              samples);
  } else {
    throw FormatError("unsupported image format '." + ext + "' for " + path);
  }
}

ImageGrid load_channel_stack(const std::vector<std::string>& paths) {
  if (paths.empty()) throw DomainError("channel stack needs at least one file");
  ImageGrid first = load_image(paths[0]);
  if (first.channels() != 1)
    throw DomainError("channel stacks are built from single-channel files");
  ImageGrid out(first.width(), first.height(),
                static_cast<int>(paths.size()));
  out.plane(0) = first.plane(0);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    ImageGrid next = load_image(paths[i]);
    if (next.channels() != 1 || !next.same_size(out))
      throw DomainError("channel stack files must be aligned single-channel: " +
                        paths[i]);
    out.plane(static_cast<int>(i)) = next.plane(0);
  }
  return out;
}

namespace {

LabelMap labelmap_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<int> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      long v = 0;
      try {
        v = std::stol(cell, &pos);
      } catch (const std::exception&) {
        throw FormatError("non-integer label '" + cell + "' in " + path);
      }
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
        ++pos;
      if (pos != cell.size())
        throw FormatError("non-integer label '" + cell + "' in " + path);
      if (v < 0)
        throw DomainError("negative label " + std::to_string(v) + " in " + path);
      row.push_back(static_cast<int>(v));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty())
    throw FormatError("empty CSV label map " + path);

  LabelMap map(static_cast<int>(rows.front().size()),
               static_cast<int>(rows.size()));
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) map.at(x, y) = rows[y][x];
  return map;
}

}  // namespace

LabelMap load_labelmap_pixelwise(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == "csv") return labelmap_from_csv(path);
  if (is_png(ext) || is_pnm(ext)) {
    const RawRaster raw = is_png(ext) ? read_png(path) : read_pnm(path);
    if (raw.channels != 1)
      throw FormatError("label maps must be single-channel: " + path);
    LabelMap map(raw.width, raw.height);
    for (int y = 0; y < raw.height; ++y)
      for (int x = 0; x < raw.width; ++x) map.at(x, y) = raw.at(x, y, 0);
    return map;
  }
  throw FormatError("unsupported label map format '." + ext + "' for " + path);
}

void save_labelmap(const LabelMap& map, const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == "csv") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (int y = 0; y < map.height(); ++y) {
      for (int x = 0; x < map.width(); ++x) {
        if (x) out << ',';
        out << map.at(x, y);
      }
      out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
    return;
  }
  if (is_png(ext)) {
    const int maxv = map.labels.size() ? map.labels.maxCoeff() : 0;
    if (map.labels.size() && (map.labels.minCoeff() < 0 || maxv > 65535))
      throw DomainError("labels outside 16-bit range cannot be saved as PNG");
    std::vector<std::uint16_t> samples(
        static_cast<std::size_t>(map.width()) * map.height());
    std::size_t i = 0;
    for (int y = 0; y < map.height(); ++y)
      for (int x = 0; x < map.width(); ++x)
        samples[i++] = static_cast<std::uint16_t>(map.at(x, y));
    write_png(path, map.width(), map.height(), 1, 16, samples);
    return;
  }
  throw FormatError("unsupported label map format '." + ext + "' for " + path);
}

}  // namespace spm
