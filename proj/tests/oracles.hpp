#pragma once

// Independent reference implementations used only by the tests. Nothing here calls into the
// library's transform or projection code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "phasetv/image.hpp"

namespace oracle {

using phasetv::Image;
using phasetv::Kernel;
using phasetv::Spectrum;

/// Direct O(N^2) double sum, forward and unnormalized.
inline Spectrum naive_dft2(const Image& x) {
  Spectrum out(x.width, x.height);
  const double two_pi = 2.0 * M_PI;
  for (int k1 = 0; k1 < x.height; ++k1)
    for (int k2 = 0; k2 < x.width; ++k2) {
      std::complex<double> acc = 0.0;
      for (int n1 = 0; n1 < x.height; ++n1)
        for (int n2 = 0; n2 < x.width; ++n2) {
          const double angle = -two_pi * (static_cast<double>(k1) * n1 / x.height +
                                          static_cast<double>(k2) * n2 / x.width);
          acc += x.at(n1, n2) * std::complex<double>(std::cos(angle), std::sin(angle));
        }
      out.at(k1, k2) = acc;
    }
  return out;
}

/// y[n] = sum_m h[m] x[n - m] with indices taken modulo the image size.
inline Image naive_circular_convolution(const Image& x, const Kernel& h) {
  Image out(x.width, x.height, 0.0);
  for (int r = 0; r < x.height; ++r)
    for (int c = 0; c < x.width; ++c) {
      double acc = 0.0;
      for (int dy = -h.ry; dy <= h.ry; ++dy)
        for (int dx = -h.rx; dx <= h.rx; ++dx) acc += h.at(dy, dx) * x.wrapped(r - dy, c - dx);
      out.at(r, c) = acc;
    }
  return out;
}

/// Anisotropic TV recomputed from an explicit edge list.
struct Edges {
  std::vector<std::pair<int, int>> list;  // (from, to) pixel indices, difference = x[to] - x[from]

  explicit Edges(int width, int height) {
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        const int i = r * width + c;
        if (r + 1 < height) list.emplace_back(i, i + width);
        if (c + 1 < width) list.emplace_back(i, i + 1);
      }
  }

  double tv(const std::vector<double>& x) const {
    double acc = 0.0;
    for (auto [a, b] : list) acc += std::abs(x[b] - x[a]);
    return acc;
  }
};

/// Minimizes ||v - w||^2 + lambda^2 TV(w)^2 by exact line searches along the directions
/// +-1_A for every nonempty pixel subset A. The objective's directional derivative is a
/// linear term plus a graph-cut Lovasz extension, so whenever any descent direction exists
/// one of these indicator directions descends; sweeping all of them therefore cannot stall
/// at a kink the way single-pixel coordinate descent does. Intended for <= 12 pixels.
class SubsetDescent {
 public:
  SubsetDescent(const Image& v, double lambda)
      : v_(v.data), lambda_(lambda), edges_(v.width, v.height), n_(static_cast<int>(v.size())) {}

  double objective(const std::vector<double>& w) const {
    double d = 0.0;
    for (int i = 0; i < n_; ++i) d += (w[i] - v_[i]) * (w[i] - v_[i]);
    const double t = lambda_ * edges_.tv(w);
    return d + t * t;
  }

  /// Runs sweeps until one full sweep improves the objective by less than `stationarity`.
  std::vector<double> solve(double stationarity = 1e-8, int max_sweeps = 100000) const {
    std::vector<double> w = v_;
    double f = objective(w);
    const unsigned subsets = 1u << n_;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      const double before = f;
      for (unsigned a = 1; a < subsets; ++a) {
        const double t = line_minimum(w, a);
        if (t == 0.0) continue;
        std::vector<double> trial = w;
        for (int i = 0; i < n_; ++i)
          if (a & (1u << i)) trial[i] += t;
        const double ft = objective(trial);
        if (ft < f) {
          w = std::move(trial);
          f = ft;
        }
      }
      if (before - f < stationarity) break;
    }
    return w;
  }

 private:
  // Exact minimizer over t of the convex piecewise-quadratic objective(w + t * 1_A).
  double line_minimum(const std::vector<double>& w, unsigned a) const {
    // Distance part: sum_{i in A} (w_i + t - v_i)^2 = k t^2 + 2 b t + const.
    double k = 0.0, b = 0.0;
    for (int i = 0; i < n_; ++i)
      if (a & (1u << i)) {
        k += 1.0;
        b += w[i] - v_[i];
      }
    // TV part: sum_e |p_e + q_e t| with q_e in {-1, 0, 1}.
    std::vector<std::pair<double, double>> terms;
    std::vector<double> breaks;
    double tv_const = 0.0;
    for (auto [from, to] : edges_.list) {
      const double p = w[to] - w[from];
      const double q = ((a >> to) & 1u ? 1.0 : 0.0) - ((a >> from) & 1u ? 1.0 : 0.0);
      if (q == 0.0) {
        tv_const += std::abs(p);
      } else {
        terms.emplace_back(p, q);
        breaks.push_back(-p / q);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double l2 = lambda_ * lambda_;
    auto eval = [&](double t) {
      double tvt = tv_const;
      for (auto [p, q] : terms) tvt += std::abs(p + q * t);
      return k * t * t + 2.0 * b * t + l2 * tvt * tvt;
    };

    std::vector<double> candidates = breaks;
    candidates.push_back(0.0);
    // On each segment TV(t) = alpha + beta t; minimize the quadratic and clip.
    const std::size_t nb = breaks.size();
    for (std::size_t s = 0; s <= nb; ++s) {
      const double lo = s == 0 ? -std::numeric_limits<double>::infinity() : breaks[s - 1];
      const double hi = s == nb ? std::numeric_limits<double>::infinity() : breaks[s];
      double probe;
      if (nb == 0) probe = 0.0;
      else if (s == 0) probe = breaks[0] - 1.0;
      else if (s == nb) probe = breaks[nb - 1] + 1.0;
      else probe = 0.5 * (lo + hi);
      double alpha = tv_const, beta = 0.0;
      for (auto [p, q] : terms) {
        const double sg = (p + q * probe) >= 0.0 ? 1.0 : -1.0;
        alpha += sg * p;
        beta += sg * q;
      }
      const double quad = k + l2 * beta * beta;
      const double lin = 2.0 * b + 2.0 * l2 * alpha * beta;
      if (quad <= 0.0) continue;
      const double t = std::clamp(-lin / (2.0 * quad), lo, hi);
      if (std::isfinite(t)) candidates.push_back(t);
    }
    double best_t = 0.0;
    double best_f = eval(0.0);
    for (double t : candidates) {
      const double ft = eval(t);
      if (ft < best_f) {
        best_f = ft;
        best_t = t;
      }
    }
    return best_t;
  }

  std::vector<double> v_;
  double lambda_;
  Edges edges_;
  int n_;
};

}  // namespace oracle
