#pragma once

#include <filesystem>
#include <stdexcept>

#include "phasetv/image.hpp"

namespace phasetv {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FileNotFound : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};

class UnsupportedFormat : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};

class EmptyImage : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};

/// Read or write failure on an otherwise valid request.
class IoFailure : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};

enum class RasterFormat { Png, Pgm };

/// Loads PNG (gray, gray+alpha, RGB, RGBA, palette; 1-16 bit) or binary PGM (P5) and maps
/// samples to [0, 1] by dividing by 2^depth - 1. Color is reduced with 0.299 R + 0.587 G +
/// 0.114 B; alpha is ignored.
Image load_image(const std::filesystem::path& path);

/// Writes a grayscale image at 8 or 16 bits. Values are clamped to [0, 1] and quantized with
/// round-half-up. The format follows the extension (.png, otherwise .pgm).
void write_image(const Image& img, const std::filesystem::path& path, int depth = 8);

void write_image(const Image& img, const std::filesystem::path& path, int depth, RasterFormat format);

/// Linear rescale of img to [0, 1] (constant images map to 0). Used for display outputs such
/// as phase-only images and kernels whose values are not intensities.
Image rescale_to_unit(const Image& img);

}  // namespace phasetv
