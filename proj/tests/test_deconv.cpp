#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "phasetv/deconv.hpp"
#include "phasetv/simulate.hpp"
#include "phasetv/spectral.hpp"
#include "phasetv/tv.hpp"

using namespace phasetv;
using testutil::max_abs_diff;
using testutil::random_image;

namespace {

Spectrum random_spectrum(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Spectrum s(w, h);
  for (auto& v : s.data) v = {n(rng), n(rng)};
  return s;
}

DeconvConfig small_config(int kernel_side) {
  DeconvConfig cfg;
  cfg.kernel_rows = cfg.kernel_cols = kernel_side;
  cfg.max_iters = 40;
  cfg.seed = 3;
  cfg.lambda = 0.01;
  cfg.estv_max_iters = 10;
  return cfg;
}

bool kernel_is_admissible(const Kernel& k) {
  if (std::abs(k.sum() - 1.0) > 1e-12) return false;
  for (int dy = -k.ry; dy <= k.ry; ++dy)
    for (int dx = -k.rx; dx <= k.rx; ++dx) {
      const double v = k.at(dy, dx);
      if (v < 0.0 || v != k.at(-dy, dx) || v != k.at(dy, -dx) || v != k.at(-dy, -dx)) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("wiener updates match the scalar formula") {
  const Spectrum Y = random_spectrum(8, 8, 1), X = random_spectrum(8, 8, 2), H = random_spectrum(8, 8, 3);
  const double alpha = 1e-3;
  const Spectrum Hn = wiener_update_kernel(Y, X, H, alpha);
  const Spectrum Xn = wiener_update_image(Y, H, X, alpha);
  for (std::size_t i = 0; i < Y.size(); ++i) {
    const auto y = Y.data[i], x = X.data[i], h = H.data[i];
    const auto h_ref = y * std::conj(x) / (std::norm(x) + alpha / std::norm(h));
    const auto x_ref = y * std::conj(h) / (std::norm(h) + alpha / std::norm(x));
    CHECK(std::abs(Hn.data[i] - h_ref) <= 1e-12 * std::max(1.0, std::abs(h_ref)));
    CHECK(std::abs(Xn.data[i] - x_ref) <= 1e-12 * std::max(1.0, std::abs(x_ref)));
  }
}

TEST_CASE("wiener updates: zero observation and vanishing regularizer") {
  const Spectrum X = random_spectrum(6, 5, 4), H = random_spectrum(6, 5, 5);
  Spectrum Y(6, 5);
  for (const auto& v : wiener_update_kernel(Y, X, H, 1e-3).data) CHECK(v == std::complex<double>(0.0));
  for (const auto& v : wiener_update_image(Y, H, X, 1e-3).data) CHECK(v == std::complex<double>(0.0));

  for (std::size_t i = 0; i < Y.size(); ++i) Y.data[i] = H.data[i] * X.data[i];
  CHECK(max_abs_diff(wiener_update_kernel(Y, X, H, 1e-14), H) < 1e-9);
  const Spectrum ones(6, 5, 1.0);
  CHECK(max_abs_diff(wiener_update_image(Y, ones, X, 1e-14), Y) < 1e-9);
}

TEST_CASE("wiener updates guard tiny previous magnitudes") {
  Spectrum Y(2, 1, 1.0), X(2, 1, 1.0), H(2, 1, 0.0);
  const Spectrum out = wiener_update_kernel(Y, X, H, 1e-3);
  // Denominator 1 + 1e-3 / 1e-24: effectively suppressed.
  CHECK(std::abs(out.data[0]) < 1e-18);
  CHECK(std::isfinite(out.data[0].real()));
}

TEST_CASE("wiener update argument checks") {
  const Spectrum a(4, 4, 1.0), b(4, 3, 1.0);
  CHECK_THROWS_AS(wiener_update_kernel(a, b, a, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(wiener_update_image(a, a, a, 0.0), InvalidArgument);
}

TEST_CASE("impose_image_constraints") {
  const Image pos = random_image(6, 6, 1);
  CHECK(impose_image_constraints(pos, std::nullopt).data == pos.data);
  for (double v : impose_image_constraints(Image(6, 6, -0.5), std::nullopt).data) CHECK(v == 0.0);

  const Image mixed = random_image(6, 6, 2, -1.0, 1.0);
  Mask half(6, 6, false);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 3; ++c) half.set(r, c, true);
  const Image out = impose_image_constraints(mixed, half);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) CHECK(out.at(r, c) == (half.at(r, c) ? std::max(0.0, mixed.at(r, c)) : 0.0));
  CHECK(impose_image_constraints(out, half).data == out.data);
  CHECK_THROWS_AS(impose_image_constraints(mixed, Mask(5, 6, true)), InvalidArgument);
}

TEST_CASE("impose_kernel_constraints") {
  SUBCASE("admissible kernels are fixed points") {
    const Kernel g = gaussian_kernel(2, 1.2);
    const Kernel out = impose_kernel_constraints(g.embed(16, 16), 5, 5);
    for (std::size_t i = 0; i < g.taps.size(); ++i) CHECK(std::abs(out.taps[i] - g.taps[i]) < 1e-12);
  }
  SUBCASE("arbitrary input becomes symmetric, nonnegative, unit sum") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Kernel out = impose_kernel_constraints(random_image(12, 10, seed, -0.3, 1.0), 5, 7);
      CHECK(out.height() == 5);
      CHECK(out.width() == 7);
      CHECK(kernel_is_admissible(out));
    }
  }
  SUBCASE("nonpositive input falls back to a delta") {
    const Kernel out = impose_kernel_constraints(Image(8, 8, -1.0), 3, 3);
    CHECK(out.taps == Kernel::delta(1, 1).taps);
  }
  SUBCASE("crop keeps the taps around the origin") {
    Image h(8, 8, 0.0);
    h.at(0, 0) = 2.0;
    h.at(0, 1) = 1.0;
    h.at(0, 7) = 1.0;
    h.at(4, 4) = 100.0;  // far from the origin, cropped away
    const Kernel out = impose_kernel_constraints(h, 3, 3);
    CHECK(out.at(0, 0) == doctest::Approx(0.5));
    CHECK(out.at(0, 1) == doctest::Approx(0.25));
    CHECK(out.at(0, -1) == doctest::Approx(0.25));
  }
  CHECK_THROWS_AS(impose_kernel_constraints(Image(8, 8, 1.0), 4, 3), InvalidArgument);
  CHECK_THROWS_AS(impose_kernel_constraints(Image(8, 8, 1.0), 9, 3), InvalidArgument);
}

TEST_CASE("config validation") {
  const Image y = random_image(16, 16, 1);
  DeconvConfig cfg = small_config(3);
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(ayers_dainty(y, cfg), InvalidArgument);
  cfg = small_config(4);
  CHECK_THROWS_AS(ayers_dainty(y, cfg), InvalidArgument);
  cfg = small_config(3);
  cfg.max_iters = 0;
  CHECK_THROWS_AS(modified_blind_deconv(y, cfg), InvalidArgument);
  cfg = small_config(3);
  cfg.support = Mask(16, 16, false);
  CHECK_THROWS_AS(modified_blind_deconv(y, cfg), InvalidArgument);

  Image bad = y;
  bad.data[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ayers_dainty(bad, small_config(3)), InvalidArgument);
}

TEST_CASE("ayers_dainty with a 1x1 kernel recovers a sharp input") {
  const Image y = make_phantom(PhantomKind::Cells, 32, 32, 2);
  DeconvConfig cfg = small_config(1);
  cfg.max_iters = 300;
  const DeconvResult r = ayers_dainty(y, cfg);
  CHECK_FALSE(r.diverged);
  CHECK(psnr(r.image_estimate, y) > 40.0);
}

TEST_CASE("zero observation gives a zero estimate") {
  const DeconvResult r = ayers_dainty(Image(16, 16, 0.0), small_config(3));
  for (double v : r.image_estimate.data) CHECK(v == 0.0);
  CHECK_FALSE(r.diverged);
}

TEST_CASE("modified loop with both insertions off equals ayers_dainty") {
  const Image y = blur(make_phantom(PhantomKind::Cells, 32, 32, 1), gaussian_kernel(2, 1.0));
  DeconvConfig cfg = small_config(5);
  const DeconvResult a = ayers_dainty(y, cfg);
  cfg.use_phase = false;
  cfg.use_estv = false;
  const DeconvResult m = modified_blind_deconv(y, cfg);
  CHECK(a.image_estimate.data == m.image_estimate.data);
  CHECK(a.kernel_estimate.taps == m.kernel_estimate.taps);
  CHECK(a.per_iteration_change == m.per_iteration_change);
}

TEST_CASE("per-iteration invariants of the modified loop") {
  const Image x = make_phantom(PhantomKind::Cells, 32, 32, 6);
  const Image y = blur(x, gaussian_kernel(2, 1.0));
  DeconvConfig cfg = small_config(5);
  cfg.phase_floor = 0.05;
  const PhaseConstraint observed = extract_phase(dft2(y), cfg.phase_floor);

  int calls = 0;
  const DeconvResult r = modified_blind_deconv(y, cfg, [&](const IterationView& view) {
    ++calls;
    CHECK(kernel_is_admissible(view.kernel));
    for (std::size_t i = 0; i < view.image_spectrum.size(); ++i) {
      const auto v = view.image_spectrum.data[i];
      if (observed.masked(i) && std::abs(v) > 1e-12)
        CHECK(std::abs(std::remainder(std::arg(v) - observed.phase[i], 2 * M_PI)) < 1e-6);
    }
    for (double v : view.next.data) CHECK(v >= 0.0);
    CHECK(tv(view.next) <= tv(view.constrained) + 1e-6);
  });
  CHECK(calls == r.iterations_used);
  CHECK(r.per_iteration_change.size() == static_cast<std::size_t>(r.iterations_used));
}

TEST_CASE("support is respected by every iterate") {
  const Image y = blur(make_phantom(PhantomKind::Cells, 32, 32, 7), gaussian_kernel(1, 1.0));
  DeconvConfig cfg = small_config(3);
  Mask support(32, 32, false);
  for (int r = 4; r < 28; ++r)
    for (int c = 2; c < 30; ++c) support.set(r, c, true);
  cfg.support = support;
  const DeconvResult r = modified_blind_deconv(y, cfg, [&](const IterationView& view) {
    for (std::size_t i = 0; i < view.next.size(); ++i)
      if (!support.data[i]) CHECK(view.next.data[i] == 0.0);
  });
  for (std::size_t i = 0; i < r.image_estimate.size(); ++i)
    if (!support.data[i]) CHECK(r.image_estimate.data[i] == 0.0);
}

TEST_CASE("runs are deterministic and seeds matter") {
  const Image y = blur(make_phantom(PhantomKind::Cells, 32, 32, 8), gaussian_kernel(2, 1.5));
  DeconvConfig cfg = small_config(5);
  const DeconvResult a = modified_blind_deconv(y, cfg);
  const DeconvResult b = modified_blind_deconv(y, cfg);
  CHECK(a.image_estimate.data == b.image_estimate.data);
  CHECK(a.kernel_estimate.taps == b.kernel_estimate.taps);
  cfg.seed = 4;
  CHECK(modified_blind_deconv(y, cfg).image_estimate.data != a.image_estimate.data);
}

TEST_CASE("stopping rule on relative change") {
  const Image y = make_phantom(PhantomKind::Cells, 32, 32, 2);
  DeconvConfig cfg = small_config(1);
  cfg.max_iters = 1000;
  cfg.rel_change_tol = 1e-3;
  const DeconvResult r = ayers_dainty(y, cfg);
  REQUIRE(r.iterations_used < 1000);
  const double last = r.per_iteration_change.back();
  CHECK(last / norm(r.image_estimate) < 1.1e-3);
}

TEST_CASE("non-finite iterates are flagged, not thrown") {
  // Squared magnitudes of this input overflow in the Wiener denominators.
  const Image y = random_image(16, 16, 1, 1e200, 2e200);
  DeconvResult r;
  CHECK_NOTHROW(r = ayers_dainty(y, small_config(3)));
  CHECK(r.diverged);
  REQUIRE_FALSE(r.per_iteration_change.empty());
  CHECK(std::isinf(r.per_iteration_change.back()));
  CHECK(r.image_estimate.all_finite());
}

TEST_CASE("single iteration at the true solution is a fixed point") {
  // A dense texture and a compact kernel keep |H|^2 |X|^2 well above alpha on every bin;
  // the residual of one pass scales with alpha / (|H|^2 |X|^2).
  const Image x = random_image(64, 64, 3, 0.2, 1.0);
  const Kernel h = gaussian_kernel(2, 0.5);
  const Image y = blur(x, h);
  DeconvConfig cfg;
  cfg.alpha = 1e-8;
  cfg.kernel_rows = cfg.kernel_cols = h.width();
  cfg.use_estv = false;
  const Image next = single_iteration(y, x, h, cfg);
  CHECK(distance(next, x) / norm(x) <= 1e-6);
}
