#include "phasetv/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phasetv {

namespace {

int positive_mod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Image::Image(int w, int h, double fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw InvalidArgument("Image: negative dimensions");
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

Image::Image(int w, int h, std::vector<double> values) : width(w), height(h), data(std::move(values)) {
  if (w < 0 || h < 0) throw InvalidArgument("Image: negative dimensions");
  if (data.size() != static_cast<std::size_t>(w) * h)
    throw InvalidArgument("Image: data length does not match width * height");
}

double Image::wrapped(int row, int col) const {
  return at(positive_mod(row, height), positive_mod(col, width));
}

bool Image::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

double Image::sum() const { return std::accumulate(data.begin(), data.end(), 0.0); }

double Image::mean() const { return data.empty() ? 0.0 : sum() / static_cast<double>(data.size()); }

double Image::min() const { return data.empty() ? 0.0 : *std::min_element(data.begin(), data.end()); }

double Image::max() const { return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end()); }

Spectrum::Spectrum(int w, int h, std::complex<double> fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw InvalidArgument("Spectrum: negative dimensions");
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

std::size_t Spectrum::mirror_index(std::size_t idx) const {
  const int row = static_cast<int>(idx / static_cast<std::size_t>(width));
  const int col = static_cast<int>(idx % static_cast<std::size_t>(width));
  const int mr = (height - row) % height;
  const int mc = (width - col) % width;
  return static_cast<std::size_t>(mr) * width + mc;
}

Mask::Mask(int w, int h, bool fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw InvalidArgument("Mask: negative dimensions");
  data.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), static_cast<unsigned char>(1)));
}

Kernel::Kernel(int radius_x, int radius_y) : rx(radius_x), ry(radius_y) {
  if (rx < 0 || ry < 0) throw InvalidArgument("Kernel: negative radius");
  taps.assign(static_cast<std::size_t>(width()) * height(), 0.0);
}

double Kernel::sum() const { return std::accumulate(taps.begin(), taps.end(), 0.0); }

Kernel Kernel::delta(int radius_x, int radius_y) {
  Kernel k(radius_x, radius_y);
  k.at(0, 0) = 1.0;
  return k;
}

Image Kernel::embed(int w, int h) const {
  if (width() > w || height() > h)
    throw InvalidArgument("Kernel::embed: kernel larger than target grid");
  Image out(w, h, 0.0);
  for (int dy = -ry; dy <= ry; ++dy)
    for (int dx = -rx; dx <= rx; ++dx)
      out.at(positive_mod(dy, h), positive_mod(dx, w)) += at(dy, dx);
  return out;
}

void require_same_dims(const Image& a, const Image& b, const char* what) {
  if (a.width != b.width || a.height != b.height)
    throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

void require_same_dims(const Image& a, const Spectrum& b, const char* what) {
  if (a.width != b.width || a.height != b.height)
    throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

void require_same_dims(const Spectrum& a, const Spectrum& b, const char* what) {
  if (a.width != b.width || a.height != b.height)
    throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

double distance(const Image& a, const Image& b) {
  require_same_dims(a, b, "distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double norm(const Image& a) {
  double acc = 0.0;
  for (double v : a.data) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace phasetv
