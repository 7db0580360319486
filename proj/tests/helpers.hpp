#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "phasetv/image.hpp"
#include "phasetv/spectral.hpp"

namespace testutil {

inline phasetv::Image random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  phasetv::Image img(w, h);
  for (auto& v : img.data) v = dist(rng);
  return img;
}

inline double max_abs_diff(const phasetv::Image& a, const phasetv::Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline double max_abs_diff(const phasetv::Spectrum& a, const phasetv::Spectrum& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

/// Pearson correlation of two equally sized images.
inline double correlation(const phasetv::Image& a, const phasetv::Image& b) {
  const double ma = a.mean(), mb = b.mean();
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.data[i] - ma, db = b.data[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

/// Per-test scratch directory, created fresh.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* base = std::getenv("PHASETV_TEST_TMP");
  std::filesystem::path dir = base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "phasetv_tests";
  dir /= name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
