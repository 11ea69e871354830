#pragma once

// Joint covariance of two processes Y1, Y2 on a shared 1-D grid, built
// conditionally: E(Y2 | Y1) = B Y1, Var(Y2 | Y1) = C_{2|1}. Then
//
//   C11,  C12 = C11 B^T,  C21 = B C11,  C22 = B C11 B^T + C_{2|1},
//
// which is positive definite whenever C11 and C_{2|1} are, because the joint
// matrix factors as [I 0; B I] diag(C11, C_{2|1}) [I B^T; 0 I].

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "matern/covariance.hpp"
#include "matern/error.hpp"
#include "matern/kernel.hpp"

namespace matern {

/// Discretised tent kernel b(s, v) = beta * max(0, 1 - |s - v| / h), with the
/// Riemann cell width folded in: B(i, j) = b(s_i, v_j) * cell_width.
struct TentOperator {
  Eigen::MatrixXd matrix;
  double bandwidth = 0.4;
  double amplitude = 1.0;
  double cell_width = 0.0;
};

inline constexpr double kDefaultTentBandwidth = 0.4;
inline constexpr double kDefaultTentAmplitude = 1.0;

namespace detail {

// Uniform spacing of a 1-D grid; throws on anything else.
inline double uniform_spacing(const PointSet& grid) {
  if (grid.metric != Metric::Euclidean || grid.dim != 1) {
    throw DomainError("conditional construction needs a 1-D Euclidean grid");
  }
  const std::size_t n = grid.size();
  if (n < 2) return 0.0;
  const double step = grid.coords[1][0] - grid.coords[0][0];
  if (!(step > 0.0)) throw DomainError("grid must be strictly increasing");
  const double span = grid.coords[n - 1][0] - grid.coords[0][0];
  for (std::size_t i = 1; i < n; ++i) {
    const double s = grid.coords[i][0] - grid.coords[i - 1][0];
    if (std::abs(s - step) > 1e-9 * span) throw DomainError("grid is not uniform");
  }
  return step;
}

}  // namespace detail

/// `cell_width` is required only for a single-point grid.
inline TentOperator build_tent(const PointSet& grid, double h, double beta,
                               std::optional<double> cell_width = std::nullopt) {
  grid.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("tent bandwidth must be > 0");
  if (!std::isfinite(beta)) throw DomainError("tent amplitude must be finite");
  double delta = detail::uniform_spacing(grid);
  if (cell_width) delta = *cell_width;
  if (!(delta > 0.0)) throw DomainError("cell width must be > 0 (pass it explicitly for a one-point grid)");

  const auto n = static_cast<Eigen::Index>(grid.size());
  TentOperator t{Eigen::MatrixXd::Zero(n, n), h, beta, delta};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lag = std::abs(grid.coords[static_cast<std::size_t>(i)][0] - grid.coords[static_cast<std::size_t>(j)][0]);
      const double w = 1.0 - lag / h;
      if (w > 0.0) t.matrix(i, j) = beta * w * delta;
    }
  }
  return t;
}

struct JointCovariance {
  Eigen::MatrixXd c11;
  Eigen::MatrixXd c12;
  Eigen::MatrixXd c21;
  Eigen::MatrixXd c22;
  Eigen::MatrixXd c2given1;
  PointSet grid;
  MaternParams params11;
  MaternParams params2given1;
  TentOperator tent;

  /// [[C11, C12], [C21, C22]]
  Eigen::MatrixXd assemble() const {
    const Eigen::Index n = c11.rows();
    Eigen::MatrixXd m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = c11;
    m.topRightCorner(n, n) = c12;
    m.bottomLeftCorner(n, n) = c21;
    m.bottomRightCorner(n, n) = c22;
    return m;
  }
};

/// Default parameters of the two marginal kernels: nu = 3/2, unit variance.
inline MaternParams joint_block_params(double kappa) { return MaternParams::decay(1.5, kappa, 1.0); }

inline JointCovariance build_joint(const PointSet& grid, const MaternParams& params11,
                                   const MaternParams& params2given1, const TentOperator& tent) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (tent.matrix.rows() != n || tent.matrix.cols() != n) {
    throw DomainError("tent operator does not match the grid size");
  }
  JointCovariance jc;
  jc.grid = grid;
  jc.params11 = params11;
  jc.params2given1 = params2given1;
  jc.tent = tent;
  jc.c11 = covariance_matrix(params11, grid).values;
  jc.c2given1 = covariance_matrix(params2given1, grid).values;

  const Eigen::MatrixXd& b = tent.matrix;
  jc.c21 = b * jc.c11;
  jc.c12 = jc.c21.transpose();
  Eigen::MatrixXd bcb = jc.c21 * b.transpose();
  bcb = 0.5 * (bcb + bcb.transpose()).eval();
  jc.c22 = bcb + jc.c2given1;

  const Eigen::MatrixXd full = jc.assemble();
  const double lambda_min = min_eigenvalue(full);
  if (lambda_min < -1e-8 * full.trace()) {
    throw InternalError("joint covariance failed its positive-definiteness check (min eigenvalue " +
                        std::to_string(lambda_min) + ")");
  }
  return jc;
}

/// Convenience for the common setting: nu = 3/2 blocks with decay parameters
/// kappa11, kappa21 on `grid`, tent (h, beta).
inline JointCovariance build_joint(const PointSet& grid, double kappa11, double kappa21,
                                   double h = kDefaultTentBandwidth, double beta = kDefaultTentAmplitude) {
  return build_joint(grid, joint_block_params(kappa11), joint_block_params(kappa21), build_tent(grid, h, beta));
}

/// 101 points on [-1, 1].
inline PointSet default_joint_grid() { return uniform_line(-1.0, 1.0, 101); }

/// The full 2n x 2n block matrix laid out for a heat map.
struct BlockMatrixView {
  Eigen::MatrixXd values;
  std::vector<double> axis;  ///< grid locations repeated once per block
  Eigen::Index block_size = 0;
};

inline BlockMatrixView render_blocks(const JointCovariance& jc) {
  BlockMatrixView v;
  v.values = jc.assemble();
  v.block_size = jc.c11.rows();
  v.axis.reserve(static_cast<std::size_t>(2 * v.block_size));
  for (int rep = 0; rep < 2; ++rep) {
    for (const auto& c : jc.grid.coords) v.axis.push_back(c[0]);
  }
  return v;
}

}  // namespace matern
