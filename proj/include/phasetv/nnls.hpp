#pragma once

#include <Eigen/Dense>

namespace phasetv {

/// Solves  min 0.5 * mu' Q mu - c' mu  subject to mu >= 0  using the Lawson-Hanson
/// active-set scheme in Gram form. Q must be positive semidefinite and the problem bounded
/// below, as it is for least-squares data Q = A'A, c = A'b.
///
/// `mu` is used as a warm start: its strictly positive entries seed the passive set and must
/// be the optimum of the problem restricted to that set (e.g. the previous solution after
/// appending zeros for new variables). Pass a zero vector for a cold start.
void solve_nonneg_qp(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c, Eigen::VectorXd& mu,
                     int max_iters = 0);

}  // namespace phasetv
