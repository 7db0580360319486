#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "phasetv/image.hpp"
#include "phasetv/spectral.hpp"

namespace phasetv {

struct DeconvConfig {
  /// Wiener regularizer of the kernel and image updates.
  double alpha = 1e-3;
  int max_iters = 300;
  /// Stop once ||x_{i+1} - x_i|| / ||x_i|| drops below this.
  double rel_change_tol = 1e-6;

  /// Weight of tv in the epigraph projection step.
  double lambda = 0.01;
  int estv_max_iters = 10;
  double estv_tol = 1e-5;

  /// Relative magnitude floor selecting the bins whose observed phase is imposed.
  double phase_floor = 0.1;

  /// Image support; empty means the whole frame.
  std::optional<Mask> support;
  /// Odd kernel box (rows, cols).
  int kernel_rows = 3;
  int kernel_cols = 3;

  std::uint64_t seed = 0;
  bool use_phase = true;
  bool use_estv = true;

  void validate(int width, int height) const;
};

struct DeconvResult {
  Image image_estimate;
  Kernel kernel_estimate;
  int iterations_used = 0;
  /// ||x_{i+1} - x_i|| per iteration; a trailing +inf marks divergence.
  std::vector<double> per_iteration_change;
  bool diverged = false;
};

/// Snapshot handed to an IterationObserver after every completed iteration.
struct IterationView {
  int iteration = 0;
  /// Kernel after its constraint step.
  const Kernel& kernel;
  /// Image spectrum after the Wiener update (and the phase step when enabled).
  const Spectrum& image_spectrum;
  /// Spatial iterate after positivity and support, before the epigraph step.
  const Image& constrained;
  /// The next iterate x_{i+1}.
  const Image& next;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// Kernel update: Y conj(X) / (|X|^2 + alpha / |H_prev|^2) bin by bin.
Spectrum wiener_update_kernel(const Spectrum& Y, const Spectrum& Xhat, const Spectrum& Hprev,
                              double alpha);

/// Image update: Y conj(H) / (|H|^2 + alpha / |X_prev|^2) bin by bin.
Spectrum wiener_update_image(const Spectrum& Y, const Spectrum& Hhat, const Spectrum& Xprev,
                             double alpha);

/// Clamps negatives to zero and zeroes pixels outside the support (empty support = all).
Image impose_image_constraints(const Image& img, const std::optional<Mask>& support);

/// Crops the origin-centred kernel image to a rows x cols box, clamps negatives, averages the
/// four mirror images and normalizes to unit sum. Falls back to a centred delta when nothing
/// positive is left.
Kernel impose_kernel_constraints(const Image& h, int rows, int cols);

/// Ayers-Dainty alternating Wiener updates with spatial constraints.
DeconvResult ayers_dainty(const Image& y, const DeconvConfig& cfg,
                          const IterationObserver& observer = {});

/// Ayers-Dainty with the observed phase imposed after the image update (cfg.use_phase) and an
/// epigraph-of-tv projection closing every iteration (cfg.use_estv).
DeconvResult modified_blind_deconv(const Image& y, const DeconvConfig& cfg,
                                   const IterationObserver& observer = {});

/// Runs a single iteration of the modified loop from the given image and kernel estimates.
/// Used to check that a true (image, kernel) pair is a fixed point.
Image single_iteration(const Image& y, const Image& xhat, const Kernel& hhat,
                       const DeconvConfig& cfg);

}  // namespace phasetv
