#include "phasetv/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "phasetv/image.hpp"

namespace phasetv {

namespace {

class ActiveSet {
 public:
  ActiveSet(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c, Eigen::VectorXd& mu)
      : Q_(Q), c_(c), mu_(mu), passive_(static_cast<std::size_t>(c.size()), 0) {
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (mu_(i) > 0.0) passive_[i] = 1;
      else mu_(i) = 0.0;
    }
  }

  // Moves mu to the optimum restricted to the passive set, dropping variables that would go
  // negative.
  void restore() {
    for (std::size_t guard = 0; guard <= passive_.size(); ++guard) {
      const std::vector<int> p = passive_list();
      if (p.empty()) return;
      const Eigen::VectorXd s = sub_solve(p);
      double step = 1.0;
      int blocking = -1;
      for (std::size_t a = 0; a < p.size(); ++a) {
        const auto sa = s(static_cast<Eigen::Index>(a));
        if (sa > 0.0) continue;
        const double cur = mu_(p[a]);
        const double t = cur > 0.0 ? cur / (cur - sa) : 0.0;
        if (blocking < 0 || t < step) {
          step = t;
          blocking = p[a];
        }
      }
      if (blocking < 0) {
        for (std::size_t a = 0; a < p.size(); ++a) mu_(p[a]) = s(static_cast<Eigen::Index>(a));
        return;
      }
      for (std::size_t a = 0; a < p.size(); ++a)
        mu_(p[a]) += step * (s(static_cast<Eigen::Index>(a)) - mu_(p[a]));
      mu_(blocking) = 0.0;
      passive_[blocking] = 0;
      for (int i : p) {
        if (passive_[i] && mu_(i) <= 0.0) {
          mu_(i) = 0.0;
          passive_[i] = 0;
        }
      }
    }
  }

  // Adds the most promising variable; returns false at optimality.
  bool grow(double tol) {
    const Eigen::VectorXd w = c_ - Q_ * mu_;
    int best = -1;
    double best_w = tol;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (!passive_[i] && !is_excluded(i) && w(i) > best_w) {
        best_w = w(i);
        best = static_cast<int>(i);
      }
    }
    if (best < 0) return false;
    passive_[best] = 1;
    const std::vector<int> p = passive_list();
    const Eigen::VectorXd s = sub_solve(p);
    const auto pos = std::find(p.begin(), p.end(), best) - p.begin();
    if (!(s(pos) > 0.0)) {
      // Round-off made the entering column look improving while it is dependent on the
      // passive set; exclude it instead of cycling.
      passive_[best] = 0;
      excluded_.push_back(best);
      return true;
    }
    excluded_.clear();
    restore();
    return true;
  }

 private:
  bool is_excluded(Eigen::Index i) const {
    return std::find(excluded_.begin(), excluded_.end(), static_cast<int>(i)) != excluded_.end();
  }

  std::vector<int> passive_list() const {
    std::vector<int> p;
    for (std::size_t i = 0; i < passive_.size(); ++i)
      if (passive_[i]) p.push_back(static_cast<int>(i));
    return p;
  }

  Eigen::VectorXd sub_solve(const std::vector<int>& p) const {
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd qpp(n, n);
    Eigen::VectorXd cp(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      cp(a) = c_(p[a]);
      for (Eigen::Index b = 0; b < n; ++b) qpp(a, b) = Q_(p[a], p[b]);
    }
    return Eigen::LDLT<Eigen::MatrixXd>(qpp).solve(cp);
  }

  const Eigen::MatrixXd& Q_;
  const Eigen::VectorXd& c_;
  Eigen::VectorXd& mu_;
  std::vector<char> passive_;
  std::vector<int> excluded_;
};

}  // namespace

void solve_nonneg_qp(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c, Eigen::VectorXd& mu,
                     int max_iters) {
  const Eigen::Index m = c.size();
  if (Q.rows() != m || Q.cols() != m) throw InvalidArgument("solve_nonneg_qp: shape mismatch");
  if (mu.size() != m) mu = Eigen::VectorXd::Zero(m);
  if (m == 0) return;
  if (max_iters <= 0) max_iters = 3 * static_cast<int>(m) + 30;

  const double scale = std::max({Q.diagonal().cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff(), 1.0});
  const double tol = 1e-13 * scale;

  ActiveSet solver(Q, c, mu);
  solver.restore();
  for (int it = 0; it < max_iters; ++it)
    if (!solver.grow(tol)) break;
}

}  // namespace phasetv
