#include "phasetv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <tuple>

namespace phasetv {

namespace {

// FFTW's planner is not reentrant; execution of an existing plan on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class PlanCache {
 public:
  PlanCache() = default;
  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int width, int height, int sign) {
    const auto key = std::make_tuple(width, height, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<std::complex<double>> in(static_cast<std::size_t>(width) * height);
    std::vector<std::complex<double>> out(in.size());
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      plan = fftw_plan_dft_2d(height, width, reinterpret_cast<fftw_complex*>(in.data()),
                              reinterpret_cast<fftw_complex*>(out.data()), sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (plan == nullptr) throw std::runtime_error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& thread_plans() {
  thread_local PlanCache cache;
  return cache;
}

void run_transform(const std::complex<double>* in, std::complex<double>* out, int width,
                   int height, int sign) {
  fftw_plan plan = thread_plans().get(width, height, sign);
  // fftw_execute_dft takes a non-const input pointer but leaves out-of-place input intact.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void require_nonempty(int width, int height, const char* what) {
  if (width <= 0 || height <= 0) throw InvalidArgument(std::string(what) + ": zero dimension");
}

}  // namespace

std::size_t PhaseConstraint::masked_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), static_cast<unsigned char>(1)));
}

Spectrum dft2(const Image& img) {
  require_nonempty(img.width, img.height, "dft2");
  std::vector<std::complex<double>> in(img.data.begin(), img.data.end());
  Spectrum out(img.width, img.height);
  run_transform(in.data(), out.data.data(), img.width, img.height, FFTW_FORWARD);
  return out;
}

Spectrum fft2(const Spectrum& in) {
  require_nonempty(in.width, in.height, "fft2");
  Spectrum out(in.width, in.height);
  run_transform(in.data.data(), out.data.data(), in.width, in.height, FFTW_FORWARD);
  return out;
}

Spectrum ifft2(const Spectrum& in) {
  require_nonempty(in.width, in.height, "ifft2");
  Spectrum out(in.width, in.height);
  run_transform(in.data.data(), out.data.data(), in.width, in.height, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (auto& v : out.data) v *= scale;
  return out;
}

Image idft2(const Spectrum& spec, RealCheck check) {
  const Spectrum full = ifft2(spec);
  Image out(spec.width, spec.height);
  double max_real = 0.0;
  double max_imag = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    out.data[i] = full.data[i].real();
    max_real = std::max(max_real, std::abs(full.data[i].real()));
    max_imag = std::max(max_imag, std::abs(full.data[i].imag()));
  }
  if (check == RealCheck::Enforce && max_imag > 1e-6 * max_real && max_imag > 1e-300)
    throw SymmetryViolation("idft2: imaginary residue " + std::to_string(max_imag) +
                            " exceeds tolerance; input spectrum is not conjugate-symmetric");
  return out;
}

PhaseConstraint extract_phase(const Spectrum& spec, double magnitude_floor) {
  require_nonempty(spec.width, spec.height, "extract_phase");
  if (!(magnitude_floor >= 0.0)) throw InvalidArgument("extract_phase: magnitude_floor must be >= 0");

  PhaseConstraint pc;
  pc.width = spec.width;
  pc.height = spec.height;
  pc.phase.resize(spec.size());
  pc.mask.resize(spec.size());

  double max_mag = 0.0;
  for (const auto& v : spec.data) max_mag = std::max(max_mag, std::abs(v));
  const double threshold = magnitude_floor * max_mag;

  for (std::size_t i = 0; i < spec.size(); ++i) {
    pc.phase[i] = std::arg(spec.data[i]);
    if (pc.phase[i] <= -M_PI) pc.phase[i] += 2.0 * M_PI;
    pc.mask[i] = (magnitude_floor == 0.0 || std::abs(spec.data[i]) >= threshold) ? 1 : 0;
  }
  // |S[k]| and |S[-k]| agree only up to round-off; tie the pair together so the mask stays
  // symmetric.
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const std::size_t j = spec.mirror_index(i);
    const unsigned char m = (pc.mask[i] && pc.mask[j]) ? 1 : 0;
    pc.mask[i] = m;
    pc.mask[j] = m;
  }
  pc.mask[0] = 1;
  return pc;
}

void impose_phase(Spectrum& spec, const PhaseConstraint& pc) {
  if (spec.width != pc.width || spec.height != pc.height)
    throw InvalidArgument("impose_phase: dimension mismatch");
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (!pc.masked(i)) continue;
    spec.data[i] = std::polar(std::abs(spec.data[i]), pc.phase[i]);
  }
}

Image project_phase(const Image& img, const PhaseConstraint& pc) {
  if (img.width != pc.width || img.height != pc.height)
    throw InvalidArgument("project_phase: dimension mismatch");
  Spectrum spec = dft2(img);
  impose_phase(spec, pc);
  return idft2(spec);
}

Image phase_only_image(const Image& img, double c) {
  if (!(c > 0.0)) throw InvalidArgument("phase_only_image: c must be > 0");
  Spectrum spec = dft2(img);
  for (auto& v : spec.data) v = std::polar(c, std::arg(v));
  return idft2(spec);
}

Image random_start(const Mask& support, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Image out(support.width, support.height, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double u = 1.0 - unit(rng);  // (0, 1]
    if (support.data[i]) out.data[i] = u;
  }
  return out;
}

PhaseReconstruction reconstruct_from_phase_traced(const PhaseConstraint& pc, const Mask& support,
                                                  int iters, std::uint64_t seed) {
  if (iters < 1) throw InvalidArgument("reconstruct_from_phase: iters must be >= 1");
  if (support.width != pc.width || support.height != pc.height)
    throw InvalidArgument("reconstruct_from_phase: support dimension mismatch");
  if (support.count() == 0) throw InvalidArgument("reconstruct_from_phase: empty support");

  PhaseReconstruction result;
  result.image = random_start(support, seed);
  result.distance_to_phase_set.reserve(static_cast<std::size_t>(iters));
  for (int it = 0; it < iters; ++it) {
    Image projected = project_phase(result.image, pc);
    result.distance_to_phase_set.push_back(distance(result.image, projected));
    for (std::size_t i = 0; i < projected.size(); ++i)
      projected.data[i] = support.data[i] ? std::max(0.0, projected.data[i]) : 0.0;
    result.image = std::move(projected);
  }
  return result;
}

Image reconstruct_from_phase(const PhaseConstraint& pc, const Mask& support, int iters,
                             std::uint64_t seed) {
  return reconstruct_from_phase_traced(pc, support, iters, seed).image;
}

}  // namespace phasetv
