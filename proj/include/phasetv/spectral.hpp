#pragma once

#include <cstdint>
#include <stdexcept>

#include "phasetv/image.hpp"

namespace phasetv {

/// Raised when an inverse transform that must be real carries a significant imaginary part.
class SymmetryViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Prescribed Fourier phase plus the set of bins it applies to.
///
/// The mask is symmetric under (k1, k2) -> (-k1, -k2) and always contains DC, and the
/// phase is antisymmetric on masked bins, so projecting a real image keeps it real.
struct PhaseConstraint {
  int width = 0;
  int height = 0;
  std::vector<double> phase;
  std::vector<unsigned char> mask;

  bool masked(std::size_t idx) const { return mask[idx] != 0; }
  std::size_t masked_count() const;
};

enum class RealCheck { Enforce, Skip };

/// Forward 2D DFT, unnormalized.
Spectrum dft2(const Image& img);

/// Inverse 2D DFT with 1/(N1*N2) normalization. The imaginary residue is discarded; with
/// RealCheck::Enforce a residue above 1e-6 * max|real| raises SymmetryViolation.
Image idft2(const Spectrum& spec, RealCheck check = RealCheck::Enforce);

/// Complex-to-complex transforms on spectra (inverse is normalized).
Spectrum fft2(const Spectrum& in);
Spectrum ifft2(const Spectrum& in);

/// Phase of every bin; bins with |S| >= floor * max|S| are masked (DC always).
PhaseConstraint extract_phase(const Spectrum& spec, double magnitude_floor = 0.0);

/// Replaces the phase of masked bins of `spec` in place, keeping their magnitude.
void impose_phase(Spectrum& spec, const PhaseConstraint& pc);

/// Projection onto the set of images whose DFT phase matches pc on masked bins.
Image project_phase(const Image& img, const PhaseConstraint& pc);

/// Inverse transform of c * exp(j * phase(dft2(img))).
Image phase_only_image(const Image& img, double c = 1.0);

/// Per-iteration trace of reconstruct_from_phase.
struct PhaseReconstruction {
  Image image;
  /// Distance from each iterate (before its phase projection) to the phase set.
  std::vector<double> distance_to_phase_set;
};

/// Alternates phase projection with support and positivity constraints, starting from a
/// seeded uniform random image in (0, 1].
PhaseReconstruction reconstruct_from_phase_traced(const PhaseConstraint& pc, const Mask& support,
                                                  int iters, std::uint64_t seed);

Image reconstruct_from_phase(const PhaseConstraint& pc, const Mask& support, int iters,
                             std::uint64_t seed);

/// Starting image used by reconstruct_from_phase for the given support and seed.
Image random_start(const Mask& support, std::uint64_t seed);

}  // namespace phasetv
