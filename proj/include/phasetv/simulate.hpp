#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "phasetv/image.hpp"

namespace phasetv {

/// Truncated Gaussian on a (2d+1) x (2d+1) grid, normalized to unit sum.
Kernel gaussian_kernel(int d, double sigma);

/// Equal taps on the disc n1^2 + n2^2 <= d^2, normalized to unit sum.
Kernel uniform_kernel(int d);

/// Circular convolution computed with DFT products. Output has the input's dimensions.
Image blur(const Image& x, const Kernel& h);

/// Adds i.i.d. N(0, sigma_noise^2) noise (normalized intensity scale), deterministic in seed.
Image add_noise(const Image& x, double sigma_noise, std::uint64_t seed);

/// 10 log10(1 / MSE) for images on [0, 1]; +inf when the images are identical.
double psnr(const Image& x, const Image& ref);

enum class PhantomKind { Cells, Step, Impulses };

PhantomKind parse_phantom_kind(std::string_view name);
std::string to_string(PhantomKind kind);

/// Intensities of the two halves of the Step phantom.
inline constexpr double kStepLow = 0.2;
inline constexpr double kStepHigh = 0.8;

/// Deterministic synthetic test image with values in [0, 1]:
///  - Cells: sparse bright Gaussian blobs on a dark background, fluorescence-like.
///  - Step: left half kStepLow, right half kStepHigh (the edge spans all rows).
///  - Impulses: sparse random bright pixels on zero.
Image make_phantom(PhantomKind kind, int width, int height, std::uint64_t seed);

}  // namespace phasetv
