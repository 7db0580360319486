#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasetv {

/// Raised on precondition violations (bad dimensions, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real-valued 2D grid, row-major. Pixel (row, col) lives at data[row * width + col].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, double fill = 0.0);
  Image(int w, int h, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  double& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }

  /// Periodic access; row and col may be negative or past the edge.
  double wrapped(int row, int col) const;

  bool all_finite() const;
  double sum() const;
  double mean() const;
  double min() const;
  double max() const;
};

/// Complex 2D grid in DFT order: bin (0, 0) is DC.
struct Spectrum {
  int width = 0;
  int height = 0;
  std::vector<std::complex<double>> data;

  Spectrum() = default;
  Spectrum(int w, int h, std::complex<double> fill = {});

  std::size_t size() const { return data.size(); }

  std::complex<double>& at(int row, int col) {
    return data[static_cast<std::size_t>(row) * width + col];
  }
  const std::complex<double>& at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * width + col];
  }

  /// Index of the bin at (-row, -col) modulo the grid.
  std::size_t mirror_index(std::size_t idx) const;
};

/// Boolean pixel or frequency mask, row-major.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> data;

  Mask() = default;
  Mask(int w, int h, bool fill);

  bool at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool v) { data[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0; }
  std::size_t count() const;
};

/// Point-spread function stored as a (2*ry+1) x (2*rx+1) tap grid with tap (ry, rx) at the center.
struct Kernel {
  int rx = 0;
  int ry = 0;
  std::vector<double> taps;

  Kernel() = default;
  Kernel(int radius_x, int radius_y);

  int width() const { return 2 * rx + 1; }
  int height() const { return 2 * ry + 1; }

  /// Tap at offset (dy, dx) from the center, |dy| <= ry, |dx| <= rx.
  double& at(int dy, int dx) { return taps[static_cast<std::size_t>(dy + ry) * width() + dx + rx]; }
  double at(int dy, int dx) const { return taps[static_cast<std::size_t>(dy + ry) * width() + dx + rx]; }

  double sum() const;

  /// Centered unit impulse with the given radii.
  static Kernel delta(int radius_x = 0, int radius_y = 0);

  /// Kernel placed on a width x height grid with its center at the origin (periodic wrap),
  /// so a symmetric kernel has a real DFT.
  Image embed(int width, int height) const;
};

void require_same_dims(const Image& a, const Image& b, const char* what);
void require_same_dims(const Image& a, const Spectrum& b, const char* what);
void require_same_dims(const Spectrum& a, const Spectrum& b, const char* what);

/// Euclidean norm of a - b.
double distance(const Image& a, const Image& b);
double norm(const Image& a);

}  // namespace phasetv
