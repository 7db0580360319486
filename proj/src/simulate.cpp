#include "phasetv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "phasetv/spectral.hpp"

namespace phasetv {

namespace {

void normalize(Kernel& k) {
  const double s = k.sum();
  for (auto& t : k.taps) t /= s;
}

}  // namespace

Kernel gaussian_kernel(int d, double sigma) {
  if (d < 1) throw InvalidArgument("gaussian_kernel: d must be >= 1");
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_kernel: sigma must be > 0");
  Kernel k(d, d);
  const double denom = 2.0 * sigma * sigma;
  for (int dy = -d; dy <= d; ++dy)
    for (int dx = -d; dx <= d; ++dx) k.at(dy, dx) = std::exp(-(dy * dy + dx * dx) / denom);
  normalize(k);
  return k;
}

Kernel uniform_kernel(int d) {
  if (d < 1) throw InvalidArgument("uniform_kernel: d must be >= 1");
  Kernel k(d, d);
  for (int dy = -d; dy <= d; ++dy)
    for (int dx = -d; dx <= d; ++dx) k.at(dy, dx) = (dy * dy + dx * dx <= d * d) ? 1.0 : 0.0;
  normalize(k);
  return k;
}

Image blur(const Image& x, const Kernel& h) {
  if (h.width() > x.width || h.height() > x.height)
    throw InvalidArgument("blur: kernel larger than image");
  Spectrum X = dft2(x);
  const Spectrum H = dft2(h.embed(x.width, x.height));
  for (std::size_t i = 0; i < X.size(); ++i) X.data[i] *= H.data[i];
  return idft2(X);
}

Image add_noise(const Image& x, double sigma_noise, std::uint64_t seed) {
  if (!(sigma_noise >= 0.0)) throw InvalidArgument("add_noise: sigma_noise must be >= 0");
  if (sigma_noise == 0.0) return x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma_noise);
  Image out = x;
  for (auto& v : out.data) v += noise(rng);
  return out;
}

double psnr(const Image& x, const Image& ref) {
  require_same_dims(x, ref, "psnr");
  if (x.empty()) throw InvalidArgument("psnr: empty image");
  double mse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.data[i] - ref.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

PhantomKind parse_phantom_kind(std::string_view name) {
  if (name == "cells") return PhantomKind::Cells;
  if (name == "step") return PhantomKind::Step;
  if (name == "impulses") return PhantomKind::Impulses;
  throw InvalidArgument("unknown phantom kind: " + std::string(name));
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::Cells: return "cells";
    case PhantomKind::Step: return "step";
    case PhantomKind::Impulses: return "impulses";
  }
  return "unknown";
}

Image make_phantom(PhantomKind kind, int width, int height, std::uint64_t seed) {
  if (width < 16 || height < 16) throw InvalidArgument("make_phantom: size must be at least 16x16");
  Image img(width, height, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  switch (kind) {
    case PhantomKind::Step: {
      for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) img.at(r, c) = c < width / 2 ? kStepLow : kStepHigh;
      break;
    }
    case PhantomKind::Impulses: {
      const std::size_t count = std::max<std::size_t>(4, img.size() / 100);
      for (std::size_t n = 0; n < count; ++n) {
        const auto idx = static_cast<std::size_t>(unit(rng) * static_cast<double>(img.size()));
        img.data[std::min(idx, img.size() - 1)] = 0.5 + 0.5 * unit(rng);
      }
      break;
    }
    case PhantomKind::Cells: {
      // Soft-edged discs with a little interior shading; roughly one cell per 300 pixels.
      const int count = std::max(3, static_cast<int>(img.size() / 300));
      const double scale = std::min(width, height) / 64.0;
      for (int n = 0; n < count; ++n) {
        const double cy = unit(rng) * height;
        const double cx = unit(rng) * width;
        const double radius = scale * (1.5 + 3.0 * unit(rng));
        const double amp = 0.5 + 0.5 * unit(rng);
        const double tilt_y = 0.3 * (unit(rng) - 0.5);
        const double tilt_x = 0.3 * (unit(rng) - 0.5);
        const int reach = static_cast<int>(std::ceil(radius + 4.0));
        for (int r = static_cast<int>(cy) - reach; r <= static_cast<int>(cy) + reach; ++r) {
          if (r < 0 || r >= height) continue;
          for (int c = static_cast<int>(cx) - reach; c <= static_cast<int>(cx) + reach; ++c) {
            if (c < 0 || c >= width) continue;
            const double dy = r - cy;
            const double dx = c - cx;
            const double dist = std::sqrt(dy * dy + dx * dx);
            const double edge = 1.0 / (1.0 + std::exp((dist - radius) / 0.6));
            const double shade = 1.0 + (tilt_y * dy + tilt_x * dx) / std::max(radius, 1.0);
            img.at(r, c) += amp * edge * shade;
          }
        }
      }
      for (auto& v : img.data) v = std::clamp(v, 0.0, 1.0);
      break;
    }
  }
  return img;
}

}  // namespace phasetv
