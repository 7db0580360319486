#include "phasetv/tv.hpp"

#include <cmath>
#include <limits>

#include "phasetv/nnls.hpp"

namespace phasetv {

namespace {

double sign(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Growing set of cuts <g_i, w> <= rhs_i with their Gram matrix kept up to date.
class CutSet {
 public:
  explicit CutSet(double gram_shift) : gram_shift_(gram_shift) {}

  std::size_t size() const { return cuts_.size(); }
  const std::vector<double>& cut(std::size_t i) const { return cuts_[i]; }

  bool contains(const std::vector<double>& g) const {
    for (const auto& c : cuts_)
      if (c == g) return true;
    return false;
  }

  void add(std::vector<double> g) {
    const auto m = static_cast<Eigen::Index>(cuts_.size());
    Eigen::MatrixXd grown(m + 1, m + 1);
    grown.topLeftCorner(m, m) = gram_;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double q = dot(cuts_[i], g) + gram_shift_;
      grown(i, m) = q;
      grown(m, i) = q;
    }
    grown(m, m) = dot(g, g) + gram_shift_;
    gram_ = std::move(grown);
    cuts_.push_back(std::move(g));
  }

  const Eigen::MatrixXd& gram() const { return gram_; }

 private:
  double gram_shift_;
  std::vector<std::vector<double>> cuts_;
  Eigen::MatrixXd gram_;
};

Image subtract_combination(const Image& v, const CutSet& cuts, const Eigen::VectorXd& mu) {
  Image out = v;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double weight = mu(static_cast<Eigen::Index>(i));
    if (weight == 0.0) continue;
    const auto& g = cuts.cut(i);
    for (std::size_t p = 0; p < out.size(); ++p) out.data[p] -= weight * g[p];
  }
  return out;
}

}  // namespace

double tv(const Image& img) {
  double acc = 0.0;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double x = img.at(r, c);
      if (r + 1 < img.height) acc += std::abs(img.at(r + 1, c) - x);
      if (c + 1 < img.width) acc += std::abs(img.at(r, c + 1) - x);
    }
  }
  return acc;
}

Image tv_subgradient(const Image& img) {
  Image g(img.width, img.height, 0.0);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double x = img.at(r, c);
      if (r + 1 < img.height) {
        const double s = sign(img.at(r + 1, c) - x);
        g.at(r + 1, c) += s;
        g.at(r, c) -= s;
      }
      if (c + 1 < img.width) {
        const double s = sign(img.at(r, c + 1) - x);
        g.at(r, c + 1) += s;
        g.at(r, c) -= s;
      }
    }
  }
  return g;
}

bool LiftedImage::in_epigraph(double slack) const { return tv(image) <= z + slack; }

double epigraph_objective(const Image& v, const Image& w, double lambda) {
  const double d = distance(v, w);
  const double t = lambda * tv(w);
  return d * d + t * t;
}

EpigraphProjectionResult project_epigraph(const Image& v, double lambda, int max_iters, double tol) {
  return project_epigraph(v, EpigraphOptions{lambda, max_iters, tol});
}

EpigraphProjectionResult project_epigraph(const Image& v, const EpigraphOptions& options) {
  if (!(options.lambda > 0.0)) throw InvalidArgument("project_epigraph: lambda must be > 0");
  if (!(options.tol > 0.0)) throw InvalidArgument("project_epigraph: tol must be > 0");
  if (options.max_iters < 1) throw InvalidArgument("project_epigraph: max_iters must be >= 1");

  const double lambda = options.lambda;
  EpigraphProjectionResult result;
  result.projected = v;
  const double tv_v = tv(v);
  result.z = tv_v;
  result.objective = lambda * lambda * tv_v * tv_v;
  if (v.size() <= 1 || tv_v == 0.0) return result;

  // Cuts are lambda * s_i with s_i = tv_subgradient(w_i): the half-spaces {(u, z) :
  // lambda <s_i, u> <= z}. Projecting (v, 0) onto their intersection reduces, by Moreau
  // decomposition, to a nonnegative least-squares problem in the multipliers mu:
  //   u = v - sum mu_i g_i,  z = sum mu_i.
  CutSet cuts(1.0);
  std::vector<double> rhs;  // <g_i, v>
  Eigen::VectorXd mu;

  Image current = v;
  double current_z = 0.0;
  for (int it = 1; it <= options.max_iters; ++it) {
    Image s = tv_subgradient(current);
    std::vector<double> g(s.data.size());
    for (std::size_t p = 0; p < g.size(); ++p) g[p] = lambda * s.data[p];
    if (cuts.contains(g)) break;
    rhs.push_back(dot(g, v.data));
    cuts.add(std::move(g));

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cuts.size()));
    if (mu.size() > 0) warm.head(mu.size()) = mu;
    mu = std::move(warm);
    const Eigen::Map<const Eigen::VectorXd> c(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    solve_nonneg_qp(cuts.gram(), c, mu);

    Image next = subtract_combination(v, cuts, mu);
    const double next_z = mu.sum();
    const double dz = next_z - current_z;
    const double dw = distance(next, current);
    const double movement = std::sqrt(dw * dw + dz * dz);

    result.iterations_used = it;
    result.residual = lambda * tv(next) - next_z;
    const double obj = epigraph_objective(v, next, lambda);
    if (obj < result.objective) {
      result.objective = obj;
      result.projected = next;
    }
    current = std::move(next);
    current_z = next_z;
    if (movement < options.tol) break;
    if (result.residual <= 1e-12 * std::max(1.0, next_z)) break;
  }
  result.z = tv(result.projected);
  return result;
}

Image project_tv_ball(const Image& v, double epsilon, int max_iters, double tol) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("project_tv_ball: epsilon must be >= 0");
  const double tv_v = tv(v);
  if (tv_v <= epsilon) return v;
  const double mean = v.mean();
  // The zero level set is exactly the constant images.
  if (epsilon == 0.0) return Image(v.width, v.height, mean);

  // Cuts {w : <s_i, w> <= epsilon}; the projection is w = v - sum mu_i s_i with mu solving
  // min 0.5 mu' S'S mu - (S'v - epsilon)' mu over mu >= 0.
  CutSet cuts(0.0);
  std::vector<double> rhs;
  Eigen::VectorXd mu;
  Image current = v;
  for (int it = 0; it < max_iters; ++it) {
    const double tv_cur = tv(current);
    if (tv_cur <= epsilon * (1.0 + 1e-12)) break;
    Image s = tv_subgradient(current);
    if (cuts.contains(s.data)) break;
    rhs.push_back(dot(s.data, v.data) - epsilon);
    cuts.add(std::move(s.data));

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cuts.size()));
    if (mu.size() > 0) warm.head(mu.size()) = mu;
    mu = std::move(warm);
    const Eigen::Map<const Eigen::VectorXd> c(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    solve_nonneg_qp(cuts.gram(), c, mu);

    Image next = subtract_combination(v, cuts, mu);
    const double movement = distance(next, current);
    current = std::move(next);
    if (movement < tol) break;
  }

  // The cutting-plane iterate approaches the ball from outside; pull it onto the boundary
  // along the direction to the mean (tv is homogeneous and shift invariant).
  const double tv_cur = tv(current);
  if (tv_cur > epsilon) {
    const double shrink = epsilon / tv_cur;
    for (auto& x : current.data) x = mean + (x - mean) * shrink;
  }
  return current;
}

}  // namespace phasetv
