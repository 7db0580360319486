#include "phasetv/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace phasetv {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

unsigned quantize(double v, unsigned maxval) {
  const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned>(std::floor(clamped * maxval + 0.5));
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

// ---- PGM ------------------------------------------------------------------

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  if (pgm_token(in) != "P5") throw UnsupportedFormat(path.string() + ": only binary PGM (P5) is supported");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(pgm_token(in));
    height = std::stoi(pgm_token(in));
    maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw UnsupportedFormat(path.string() + ": malformed PGM header");
  }
  if (width <= 0 || height <= 0) throw EmptyImage(path.string() + ": zero-dimension image");
  if (maxval <= 0 || maxval > 65535) throw UnsupportedFormat(path.string() + ": invalid PGM maxval");

  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw IoFailure(path.string() + ": truncated PGM data");

  Image img(width, height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const unsigned v = bytes == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
    img.data[i] = static_cast<double>(v) / maxval;
  }
  return img;
}

void write_pgm(const Image& img, const std::filesystem::path& path, int depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  const unsigned maxval = depth == 16 ? 65535u : 255u;
  out << "P5\n" << img.width << ' ' << img.height << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(img.size() * (depth == 16 ? 2 : 1));
  for (double v : img.data) {
    const unsigned q = quantize(v, maxval);
    if (depth == 16) raw.push_back(static_cast<unsigned char>(q >> 8));
    raw.push_back(static_cast<unsigned char>(q & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoFailure("failed writing " + path.string());
}

// ---- PNG ------------------------------------------------------------------

[[noreturn]] void png_error_handler(png_structp, png_const_charp msg) {
  throw IoFailure(std::string("libpng: ") + msg);
}

void png_warning_handler(png_structp, png_const_charp) {}

Image load_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoFailure("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                           png_warning_handler);
  if (!png) throw IoFailure("libpng: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};
  if (!info) throw IoFailure("libpng: out of memory");

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  if (width == 0 || height == 0) throw EmptyImage(path.string() + ": zero-dimension image");

  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> buffer(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);

  const double maxval = depth == 16 ? 65535.0 : 255.0;
  auto sample = [&](png_uint_32 r, png_uint_32 c, int ch) {
    const unsigned char* p = rows[r] + (static_cast<std::size_t>(c) * channels + ch) * (depth == 16 ? 2 : 1);
    const unsigned v = depth == 16 ? (static_cast<unsigned>(p[0]) << 8) | p[1] : p[0];
    return static_cast<double>(v) / maxval;
  };

  Image img(static_cast<int>(width), static_cast<int>(height));
  for (png_uint_32 r = 0; r < height; ++r)
    for (png_uint_32 c = 0; c < width; ++c)
      img.at(static_cast<int>(r), static_cast<int>(c)) =
          channels >= 3 ? luma(sample(r, c, 0), sample(r, c, 1), sample(r, c, 2)) : sample(r, c, 0);
  return img;
}

void write_png(const Image& img, const std::filesystem::path& path, int depth) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoFailure("cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                            png_warning_handler);
  if (!png) throw IoFailure("libpng: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  if (!info) throw IoFailure("libpng: out of memory");

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
               depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const unsigned maxval = depth == 16 ? 65535u : 255u;
  const std::size_t bytes = depth == 16 ? 2 : 1;
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * bytes);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const unsigned q = quantize(img.at(r, c), maxval);
      if (depth == 16) {
        row[2 * c] = static_cast<unsigned char>(q >> 8);
        row[2 * c + 1] = static_cast<unsigned char>(q & 0xFF);
      } else {
        row[c] = static_cast<unsigned char>(q);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
}

bool is_png_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png";
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw FileNotFound("no such file: " + path.string());

  std::array<unsigned char, 8> magic{};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());
    in.read(reinterpret_cast<char*>(magic.data()), magic.size());
    if (in.gcount() < 2) throw UnsupportedFormat(path.string() + ": file too short");
  }
  if (png_sig_cmp(magic.data(), 0, magic.size()) == 0) return load_png(path);
  if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
  throw UnsupportedFormat(path.string() + ": not a PNG or binary PGM file");
}

void write_image(const Image& img, const std::filesystem::path& path, int depth) {
  write_image(img, path, depth, is_png_extension(path) ? RasterFormat::Png : RasterFormat::Pgm);
}

void write_image(const Image& img, const std::filesystem::path& path, int depth, RasterFormat format) {
  if (depth != 8 && depth != 16) throw InvalidArgument("write_image: depth must be 8 or 16");
  if (img.empty()) throw InvalidArgument("write_image: empty image");
  if (!img.all_finite()) throw InvalidArgument("write_image: image has non-finite values");
  if (format == RasterFormat::Png) write_png(img, path, depth);
  else write_pgm(img, path, depth);
}

Image rescale_to_unit(const Image& img) {
  Image out = img;
  const double lo = img.min();
  const double span = img.max() - lo;
  for (auto& v : out.data) v = span > 0.0 ? (v - lo) / span : 0.0;
  return out;
}

}  // namespace phasetv
