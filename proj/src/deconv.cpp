#include "phasetv/deconv.hpp"

#include <cmath>
#include <limits>

#include "phasetv/tv.hpp"

namespace phasetv {

namespace {

// Magnitudes below 1e-12 are treated as 1e-12 in the regularizer denominator.
constexpr double kMinSquaredMagnitude = 1e-24;

Spectrum wiener_update(const Spectrum& Y, const Spectrum& fixed, const Spectrum& previous,
                       double alpha, const char* what) {
  require_same_dims(Y, fixed, what);
  require_same_dims(Y, previous, what);
  if (!(alpha > 0.0)) throw InvalidArgument(std::string(what) + ": alpha must be > 0");
  Spectrum out(Y.width, Y.height);
  for (std::size_t i = 0; i < Y.size(); ++i) {
    const double prev2 = std::max(std::norm(previous.data[i]), kMinSquaredMagnitude);
    const double denom = std::norm(fixed.data[i]) + alpha / prev2;
    out.data[i] = Y.data[i] * std::conj(fixed.data[i]) / denom;
  }
  return out;
}

bool finite(const Kernel& k) {
  for (double t : k.taps)
    if (!std::isfinite(t)) return false;
  return true;
}

struct Step {
  Kernel kernel;
  Spectrum kernel_spectrum;
  Image next;
};

class BlindLoop {
 public:
  BlindLoop(const Image& y, const DeconvConfig& cfg)
      : cfg_(cfg), width_(y.width), height_(y.height), Y_(dft2(y)) {
    if (cfg_.use_phase) observed_phase_ = extract_phase(Y_, cfg_.phase_floor);
  }

  Step run(const Image& x, const Spectrum& H_prev, int iteration,
           const IterationObserver& observer) const {
    const Spectrum X = dft2(x);

    const Spectrum H_tilde = wiener_update_kernel(Y_, X, H_prev, cfg_.alpha);
    const Image h_tilde = idft2(H_tilde, RealCheck::Skip);
    Step out;
    out.kernel = impose_kernel_constraints(h_tilde, cfg_.kernel_rows, cfg_.kernel_cols);
    out.kernel_spectrum = dft2(out.kernel.embed(width_, height_));

    Spectrum X_tilde = wiener_update_image(Y_, out.kernel_spectrum, X, cfg_.alpha);
    if (cfg_.use_phase) impose_phase(X_tilde, observed_phase_);

    const Image x_tilde = idft2(X_tilde, RealCheck::Skip);
    const Image constrained = impose_image_constraints(x_tilde, cfg_.support);
    if (cfg_.use_estv && constrained.all_finite()) {
      const auto projection =
          project_epigraph(constrained, EpigraphOptions{cfg_.lambda, cfg_.estv_max_iters, cfg_.estv_tol});
      // The projection can nudge pixels just below zero or across the support border.
      out.next = impose_image_constraints(projection.projected, cfg_.support);
    } else {
      out.next = constrained;
    }

    if (observer)
      observer(IterationView{iteration, out.kernel, X_tilde, constrained, out.next});
    return out;
  }

  int width() const { return width_; }
  int height() const { return height_; }

 private:
  const DeconvConfig& cfg_;
  int width_;
  int height_;
  Spectrum Y_;
  PhaseConstraint observed_phase_;
};

DeconvResult run_blind_loop(const Image& y, const DeconvConfig& cfg, const IterationObserver& observer) {
  if (y.empty()) throw InvalidArgument("deconvolution: empty image");
  if (!y.all_finite()) throw InvalidArgument("deconvolution: input image has non-finite values");
  cfg.validate(y.width, y.height);

  const BlindLoop loop(y, cfg);
  const Mask support = cfg.support.value_or(Mask(y.width, y.height, true));

  DeconvResult result;
  // Never start from y: it is already a fixed point of the phase projection.
  Image x = random_start(support, cfg.seed);
  Kernel kernel = Kernel::delta(cfg.kernel_cols / 2, cfg.kernel_rows / 2);
  Spectrum H = dft2(kernel.embed(y.width, y.height));

  for (int it = 1; it <= cfg.max_iters; ++it) {
    Step step = loop.run(x, H, it, observer);
    if (!step.next.all_finite() || !finite(step.kernel)) {
      result.diverged = true;
      result.per_iteration_change.push_back(std::numeric_limits<double>::infinity());
      break;
    }
    const double change = distance(step.next, x);
    const double scale = norm(x);
    result.per_iteration_change.push_back(change);
    result.iterations_used = it;
    x = std::move(step.next);
    kernel = std::move(step.kernel);
    H = std::move(step.kernel_spectrum);
    if (change == 0.0 || (scale > 0.0 && change / scale < cfg.rel_change_tol)) break;
  }
  result.image_estimate = std::move(x);
  result.kernel_estimate = std::move(kernel);
  return result;
}

}  // namespace

void DeconvConfig::validate(int width, int height) const {
  if (!(alpha > 0.0)) throw InvalidArgument("DeconvConfig: alpha must be > 0");
  if (max_iters < 1) throw InvalidArgument("DeconvConfig: max_iters must be >= 1");
  if (!(rel_change_tol >= 0.0)) throw InvalidArgument("DeconvConfig: rel_change_tol must be >= 0");
  if (!(phase_floor >= 0.0)) throw InvalidArgument("DeconvConfig: phase_floor must be >= 0");
  if (use_estv) {
    if (!(lambda > 0.0)) throw InvalidArgument("DeconvConfig: lambda must be > 0");
    if (estv_max_iters < 1) throw InvalidArgument("DeconvConfig: estv_max_iters must be >= 1");
    if (!(estv_tol > 0.0)) throw InvalidArgument("DeconvConfig: estv_tol must be > 0");
  }
  if (kernel_rows < 1 || kernel_cols < 1 || kernel_rows % 2 == 0 || kernel_cols % 2 == 0)
    throw InvalidArgument("DeconvConfig: kernel support dimensions must be odd and positive");
  if (kernel_rows > height || kernel_cols > width)
    throw InvalidArgument("DeconvConfig: kernel support larger than the image");
  if (support && (support->width != width || support->height != height))
    throw InvalidArgument("DeconvConfig: support mask dimension mismatch");
  if (support && support->count() == 0) throw InvalidArgument("DeconvConfig: empty support");
}

Spectrum wiener_update_kernel(const Spectrum& Y, const Spectrum& Xhat, const Spectrum& Hprev,
                              double alpha) {
  return wiener_update(Y, Xhat, Hprev, alpha, "wiener_update_kernel");
}

Spectrum wiener_update_image(const Spectrum& Y, const Spectrum& Hhat, const Spectrum& Xprev,
                             double alpha) {
  return wiener_update(Y, Hhat, Xprev, alpha, "wiener_update_image");
}

Image impose_image_constraints(const Image& img, const std::optional<Mask>& support) {
  if (support && (support->width != img.width || support->height != img.height))
    throw InvalidArgument("impose_image_constraints: support dimension mismatch");
  Image out = img;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool inside = !support || support->data[i] != 0;
    // Written as a comparison so NaN passes through to the divergence check.
    if (!inside) out.data[i] = 0.0;
    else if (out.data[i] < 0.0) out.data[i] = 0.0;
  }
  return out;
}

Kernel impose_kernel_constraints(const Image& h, int rows, int cols) {
  if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0)
    throw InvalidArgument("impose_kernel_constraints: support dimensions must be odd");
  if (rows > h.height || cols > h.width)
    throw InvalidArgument("impose_kernel_constraints: support larger than the kernel image");

  const int ry = rows / 2;
  const int rx = cols / 2;
  Kernel cropped(rx, ry);
  for (int dy = -ry; dy <= ry; ++dy)
    for (int dx = -rx; dx <= rx; ++dx) {
      const double v = h.wrapped(dy, dx);
      cropped.at(dy, dx) = v < 0.0 ? 0.0 : v;  // NaN passes through
    }

  // One average per symmetry orbit, written to all four taps so they match bit for bit.
  Kernel out(rx, ry);
  for (int dy = 0; dy <= ry; ++dy)
    for (int dx = 0; dx <= rx; ++dx) {
      const double avg = 0.25 * (cropped.at(dy, dx) + cropped.at(-dy, dx) + cropped.at(dy, -dx) +
                                 cropped.at(-dy, -dx));
      out.at(dy, dx) = out.at(-dy, dx) = out.at(dy, -dx) = out.at(-dy, -dx) = avg;
    }

  const double total = out.sum();
  if (!(total > 1e-12)) {
    if (std::isfinite(total)) return Kernel::delta(rx, ry);
    return out;  // non-finite; the caller flags divergence
  }
  for (auto& t : out.taps) t /= total;
  return out;
}

DeconvResult ayers_dainty(const Image& y, const DeconvConfig& cfg, const IterationObserver& observer) {
  DeconvConfig plain = cfg;
  plain.use_phase = false;
  plain.use_estv = false;
  return run_blind_loop(y, plain, observer);
}

DeconvResult modified_blind_deconv(const Image& y, const DeconvConfig& cfg,
                                   const IterationObserver& observer) {
  return run_blind_loop(y, cfg, observer);
}

Image single_iteration(const Image& y, const Image& xhat, const Kernel& hhat, const DeconvConfig& cfg) {
  require_same_dims(y, xhat, "single_iteration");
  cfg.validate(y.width, y.height);
  const BlindLoop loop(y, cfg);
  const Spectrum H = dft2(hhat.embed(y.width, y.height));
  return loop.run(xhat, H, 1, {}).next;
}

}  // namespace phasetv
