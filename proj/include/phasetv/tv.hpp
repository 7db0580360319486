#pragma once

#include "phasetv/image.hpp"

namespace phasetv {

/// Anisotropic total variation: sum of |vertical| and |horizontal| neighbour differences.
/// Differences that would cross the image border are skipped.
double tv(const Image& img);

/// Sign subgradient of tv with sign(0) = 0. Satisfies <g, img> == tv(img).
Image tv_subgradient(const Image& img);

/// A point [image, z] in the space lifted by one coordinate.
struct LiftedImage {
  Image image;
  double z = 0.0;

  /// True when tv(image) <= z, i.e. the point lies in the epigraph of tv.
  bool in_epigraph(double slack = 0.0) const;
};

struct EpigraphOptions {
  double lambda = 1.0;
  int max_iters = 100;
  double tol = 1e-5;
};

struct EpigraphProjectionResult {
  Image projected;
  /// tv(projected): the lifted coordinate of the returned boundary point, in tv units.
  double z = 0.0;
  int iterations_used = 0;
  /// lambda * tv(u) - z at the last hyperplane projection (u, z); <= 0 means the last
  /// iterate was already inside the epigraph.
  double residual = 0.0;
  /// ||v - projected||^2 + lambda^2 * tv(projected)^2.
  double objective = 0.0;
};

/// Projects [v, 0] onto the epigraph of lambda * tv, i.e. approximately minimizes
/// ||v - w||^2 + lambda^2 * tv(w)^2.
///
/// Every iteration linearizes lambda * tv at the current iterate, which gives a supporting
/// hyperplane of the epigraph through the origin, and projects [v, 0] onto the intersection
/// of all hyperplane half-spaces collected so far. Stops once the lifted point moves less than
/// tol or lands inside the epigraph. The best iterate by objective is returned, never worse
/// than v itself.
EpigraphProjectionResult project_epigraph(const Image& v, const EpigraphOptions& options = {});

EpigraphProjectionResult project_epigraph(const Image& v, double lambda, int max_iters, double tol);

/// Objective minimized by project_epigraph.
double epigraph_objective(const Image& v, const Image& w, double lambda);

/// Nearest image with tv <= epsilon, found by cutting planes on the tv level set.
Image project_tv_ball(const Image& v, double epsilon, int max_iters = 200, double tol = 1e-9);

}  // namespace phasetv
