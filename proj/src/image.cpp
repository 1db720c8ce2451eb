#include "scssim/image.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "scssim/error.hpp"

namespace scssim {

namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::CorruptData, "image has zero width or height");
  }
  if (width > kMaxImageExtent || height > kMaxImageExtent) {
    throw Error(ErrorKind::UnsupportedFormat,
                "image larger than " + std::to_string(kMaxImageExtent) +
                    " pixels on a side");
  }
}

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

// Minimal PPM header tokenizer: whitespace separated, '#' comments to EOL.
class PpmHeader {
 public:
  explicit PpmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) {
      throw Error(ErrorKind::CorruptData, "truncated PPM header");
    }
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) {
        throw Error(ErrorKind::CorruptData, "PPM header value out of range");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      throw Error(ErrorKind::CorruptData, "malformed PPM header");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw Error(ErrorKind::CorruptData, "truncated PPM header");
    }
    return pos_ + 1;
  }

 private:
  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

struct PngSource {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

struct RawPng {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
  char message[256] = {};
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->pos + length > src->size) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, src->data + src->pos, length);
  src->pos += length;
}

void png_record_error(png_structp png, png_const_charp message) {
  auto* raw = static_cast<RawPng*>(png_get_error_ptr(png));
  std::snprintf(raw->message, sizeof(raw->message), "%s", message);
  png_longjmp(png, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

enum class PngStatus { Ok, Unsupported, Corrupt };

// libpng reports errors through longjmp, so this frame holds only trivially
// destructible locals; the output buffer lives in the caller's frame.
PngStatus png_decode_raw(PngSource* src, RawPng* raw) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, raw,
                                           png_record_error, png_ignore_warning);
  if (png == nullptr) return PngStatus::Corrupt;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return PngStatus::Corrupt;
  }
  png_bytepp rows = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    std::free(rows);
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::Corrupt;
  }
  png_set_read_fn(png, src, png_read_from_memory);
  png_read_info(png, info);
  raw->width = png_get_image_width(png, info);
  raw->height = png_get_image_height(png, info);
  raw->bit_depth = png_get_bit_depth(png, info);
  raw->color_type = png_get_color_type(png, info);
  const bool supported_type = raw->color_type == PNG_COLOR_TYPE_GRAY ||
                              raw->color_type == PNG_COLOR_TYPE_GRAY_ALPHA ||
                              raw->color_type == PNG_COLOR_TYPE_RGB ||
                              raw->color_type == PNG_COLOR_TYPE_RGB_ALPHA;
  if (raw->bit_depth != 8 || !supported_type ||
      raw->width > static_cast<png_uint_32>(kMaxImageExtent) ||
      raw->height > static_cast<png_uint_32>(kMaxImageExtent)) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::Unsupported;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  raw->channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  raw->pixels.resize(stride * raw->height);
  rows = static_cast<png_bytepp>(std::malloc(sizeof(png_bytep) * raw->height));
  if (rows == nullptr) png_error(png, "out of memory");
  for (png_uint_32 y = 0; y < raw->height; ++y) {
    rows[y] = raw->pixels.data() + stride * y;
  }
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  std::free(rows);
  png_destroy_read_struct(&png, &info, nullptr);
  return PngStatus::Ok;
}

struct PngSink {
  std::vector<std::uint8_t>* out;
};

void png_write_to_memory(png_structp png, png_bytep data, png_size_t length) {
  auto* sink = static_cast<PngSink*>(png_get_io_ptr(png));
  sink->out->insert(sink->out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

bool png_encode_raw(const RgbImage* img, std::vector<std::uint8_t>* out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, png_ignore_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  PngSink sink{out};
  png_set_write_fn(png, &sink, png_write_to_memory, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img->width()),
               static_cast<png_uint_32>(img->height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img->width()) * 3;
  for (int y = 0; y < img->height(); ++y) {
    // libpng takes a non-const row pointer but does not modify it.
    auto* row = const_cast<std::uint8_t*>(img->data().data() + stride * static_cast<std::size_t>(y));
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::FileNotFound, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::FileNotFound, "cannot open: " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dimensions(width, height);
  data_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dimensions(width, height);
  if (data_.size() != pixel_count() * 3) {
    throw Error(ErrorKind::InvalidParameter, "pixel buffer size does not match dimensions");
  }
}

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(ErrorKind::UnsupportedFormat, "not a PPM file");
  }
  if (bytes[1] != '6') {
    throw Error(ErrorKind::UnsupportedFormat, "only binary P6 PPM is supported");
  }
  PpmHeader header(bytes);
  const long width = header.next_number();
  const long height = header.next_number();
  const long maxval = header.next_number();
  if (maxval != 255) {
    throw Error(ErrorKind::UnsupportedFormat, "PPM maxval must be 255");
  }
  const std::size_t start = header.raster_start();
  check_dimensions(static_cast<int>(width), static_cast<int>(height));
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (bytes.size() - start < need) {
    throw Error(ErrorKind::CorruptData, "truncated PPM raster");
  }
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(start + need));
  return RgbImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  if (!is_png(bytes)) {
    throw Error(ErrorKind::UnsupportedFormat, "missing PNG signature");
  }
  PngSource src{bytes.data(), bytes.size(), 0};
  RawPng raw;
  switch (png_decode_raw(&src, &raw)) {
    case PngStatus::Unsupported:
      throw Error(ErrorKind::UnsupportedFormat,
                  "PNG must be 8-bit gray, gray+alpha, RGB or RGBA");
    case PngStatus::Corrupt:
      throw Error(ErrorKind::CorruptData,
                  std::string("corrupt PNG: ") + (raw.message[0] ? raw.message : "decode failed"));
    case PngStatus::Ok:
      break;
  }
  const int width = static_cast<int>(raw.width);
  const int height = static_cast<int>(raw.height);
  check_dimensions(width, height);
  const bool gray = raw.color_type == PNG_COLOR_TYPE_GRAY ||
                    raw.color_type == PNG_COLOR_TYPE_GRAY_ALPHA;
  const auto channels = static_cast<std::size_t>(raw.channels);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0, n = static_cast<std::size_t>(width) * height; i < n; ++i) {
    const std::uint8_t* p = &raw.pixels[i * channels];
    data[i * 3] = p[0];
    data[i * 3 + 1] = gray ? p[0] : p[1];
    data[i * 3 + 2] = gray ? p[0] : p[2];
  }
  return RgbImage(width, height, std::move(data));
}

RgbImage load_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_ppm(bytes);
  throw Error(ErrorKind::UnsupportedFormat, "unrecognized image format: " + path.string());
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  std::vector<std::uint8_t> out;
  if (!png_encode_raw(&img, &out)) {
    throw Error(ErrorKind::Io, "PNG encoding failed");
  }
  return out;
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::vector<std::uint8_t> bytes = ext == ".png" ? encode_png(img) : encode_ppm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::Io, "write failed: " + path.string());
  }
}

}  // namespace scssim
