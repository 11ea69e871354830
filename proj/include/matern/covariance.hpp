#pragma once

// Point sets, distance metrics, dense correlation/covariance assembly,
// jittered Cholesky, seeded Gaussian-process sampling and correlation surfaces.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "matern/error.hpp"
#include "matern/kernel.hpp"

namespace matern {

enum class Metric { Euclidean, GreatCircle, Chordal };

/// Locations on a line, in the plane, or on a sphere of radius `radius`.
/// Sphere points are stored as (latitude, longitude) in degrees.
struct PointSet {
  Metric metric = Metric::Euclidean;
  int dim = 1;  ///< 1 or 2 for Euclidean sets; 2 (lat, lon) on the sphere
  std::vector<std::array<double, 2>> coords;
  double radius = 1.0;

  std::size_t size() const noexcept { return coords.size(); }

  static PointSet line(const std::vector<double>& xs) {
    PointSet p;
    p.dim = 1;
    p.coords.reserve(xs.size());
    for (double x : xs) p.coords.push_back({x, 0.0});
    return p;
  }

  static PointSet plane(std::vector<std::array<double, 2>> xy) {
    PointSet p;
    p.dim = 2;
    p.coords = std::move(xy);
    return p;
  }

  static PointSet sphere(std::vector<std::array<double, 2>> lat_lon, double radius, Metric metric) {
    PointSet p;
    p.metric = metric;
    p.dim = 2;
    p.coords = std::move(lat_lon);
    p.radius = radius;
    return p;
  }

  void validate() const {
    for (const auto& c : coords) {
      if (!std::isfinite(c[0]) || !std::isfinite(c[1])) throw DomainError("non-finite coordinate");
    }
    if (metric == Metric::Euclidean) {
      if (dim != 1 && dim != 2) throw DomainError("Euclidean point sets must be 1-D or 2-D");
      return;
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("sphere radius must be > 0");
    for (const auto& c : coords) {
      if (c[0] < -90.0 || c[0] > 90.0) throw DomainError("latitude outside [-90, 90]");
      if (c[1] < -180.0 || c[1] > 180.0) throw DomainError("longitude outside [-180, 180]");
    }
  }
};

/// n equally spaced points on [a, b] (endpoints included).
inline PointSet uniform_line(double a, double b, std::size_t n) {
  std::vector<double> xs(n);
  if (n == 1) {
    xs[0] = a;
  } else {
    for (std::size_t i = 0; i < n; ++i) xs[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  return PointSet::line(xs);
}

namespace detail {

inline constexpr double kDegree = std::numbers::pi / 180.0;

// haversine of the central angle; clamped against rounding above 1
inline double haversine(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const double s_lat = std::sin(0.5 * (b[0] - a[0]) * kDegree);
  const double s_lon = std::sin(0.5 * (b[1] - a[1]) * kDegree);
  const double h = s_lat * s_lat + std::cos(a[0] * kDegree) * std::cos(b[0] * kDegree) * s_lon * s_lon;
  return std::min(1.0, std::max(0.0, h));
}

inline double point_distance(const PointSet& ps, std::size_t i, std::size_t j) {
  const auto& a = ps.coords[i];
  const auto& b = ps.coords[j];
  switch (ps.metric) {
    case Metric::Euclidean:
      return ps.dim == 1 ? std::abs(a[0] - b[0]) : std::hypot(a[0] - b[0], a[1] - b[1]);
    case Metric::GreatCircle:
      return ps.radius * 2.0 * std::asin(std::sqrt(haversine(a, b)));
    case Metric::Chordal:
      // 2 R sin(central_angle / 2)
      return ps.radius * 2.0 * std::sqrt(haversine(a, b));
  }
  return 0.0;
}

}  // namespace detail

inline Eigen::MatrixXd pairwise_distances(const PointSet& ps) {
  ps.validate();
  const auto n = static_cast<Eigen::Index>(ps.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = detail::point_distance(ps, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

enum class MatrixKind { Correlation, Covariance };

struct CovarianceMatrix {
  Eigen::MatrixXd values;
  MatrixKind kind = MatrixKind::Correlation;
  MaternParams params;
};

/// Opt-in for great-circle distance with nu > 1/2, which is not positive definite in general.
enum class SphereValidity { Enforce, AllowUnsafe };

/// Correlation matrix over a point set. Great-circle distances are only valid
/// for nu <= 1/2; use chordal distance for smoother kernels on the sphere.
inline CovarianceMatrix correlation_matrix(const MaternParams& params, const PointSet& points,
                                           SphereValidity validity = SphereValidity::Enforce) {
  params.validate();
  if (points.metric == Metric::GreatCircle && params.nu > 0.5 && validity == SphereValidity::Enforce) {
    throw ValidityError("Matern with great-circle distance is positive definite only for nu <= 1/2 (got nu = " +
                        std::to_string(params.nu) + "); use the chordal metric or an explicit unsafe override");
  }
  const MaternKernel corr(params);
  const Eigen::MatrixXd dist = pairwise_distances(points);
  const Eigen::Index n = dist.rows();
  CovarianceMatrix out{Eigen::MatrixXd::Identity(n, n), MatrixKind::Correlation, params};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = corr(dist(i, j));
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

inline CovarianceMatrix covariance_matrix(const MaternParams& params, const PointSet& points,
                                          SphereValidity validity = SphereValidity::Enforce) {
  CovarianceMatrix c = correlation_matrix(params, points, validity);
  c.values *= params.sigma2;
  c.kind = MatrixKind::Covariance;
  return c;
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-14) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};

struct JitterSchedule {
  double start;
  double max;
};

/// Defaults relative to the mean diagonal: start 1e-10, cap 1e-4.
inline JitterSchedule default_jitter(const Eigen::MatrixXd& m) {
  const double mean_diag = m.rows() > 0 ? m.diagonal().mean() : 1.0;
  return {1e-10 * mean_diag, 1e-4 * mean_diag};
}

/// L L^T = M + jitter I with jitter the first success in {0, start, 10 start, ...} <= max.
inline CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& m, double jitter_start, double jitter_max) {
  if (!is_symmetric(m)) throw DomainError("Cholesky input must be symmetric");
  if (!(jitter_start > 0.0) || jitter_max < jitter_start) {
    throw DomainError("jitter schedule requires 0 < jitter_start <= jitter_max");
  }
  const Eigen::Index n = m.rows();
  double jitter = 0.0;
  while (true) {
    Eigen::LLT<Eigen::MatrixXd> llt(m + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
    const double next = jitter == 0.0 ? jitter_start : jitter * 10.0;
    if (next > jitter_max * (1.0 + 1e-12)) break;
    jitter = next;
  }
  throw NotPositiveDefiniteError("matrix is not positive definite even with jitter " + std::to_string(jitter_max));
}

inline CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& m) {
  const JitterSchedule s = default_jitter(m);
  return cholesky_with_jitter(m, s.start, s.max);
}

/// Standard normals in column-major order (column j = draw j), from mt19937_64(seed).
inline Eigen::MatrixXd standard_normals(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = normal(rng);
  }
  return z;
}

/// n_draws independent zero-mean draws L z; one draw per column.
inline Eigen::MatrixXd sample_gaussian_process(const Eigen::MatrixXd& lower, std::uint64_t seed, int n_draws) {
  if (n_draws < 1) throw DomainError("n_draws must be >= 1");
  const Eigen::MatrixXd z = standard_normals(lower.cols(), n_draws, seed);
  return lower.triangularView<Eigen::Lower>() * z;
}

inline Eigen::MatrixXd sample_gaussian_process(const CholeskyFactor& factor, std::uint64_t seed, int n_draws) {
  return sample_gaussian_process(factor.lower, seed, n_draws);
}

/// z(i, j) = Corr(sqrt(x_i^2 + y_j^2)) on a uniform square grid.
struct CorrelationSurface {
  std::vector<double> x;
  std::vector<double> y;
  Eigen::MatrixXd z;  ///< rows follow x, columns follow y
  MaternParams params;
  double half_width = 5.0;
};

inline constexpr double kDefaultHalfWidth = 5.0;
inline constexpr int kDefaultResolution = 101;

inline CorrelationSurface surface_grid(const MaternParams& params, double half_width = kDefaultHalfWidth,
                                       int resolution = kDefaultResolution) {
  params.validate();
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("half_width must be > 0");
  if (resolution < 2) throw DomainError("resolution must be >= 2");
  CorrelationSurface s;
  s.params = params;
  s.half_width = half_width;
  s.x.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    s.x[static_cast<std::size_t>(i)] = -half_width + 2.0 * half_width * i / (resolution - 1);
  }
  // exact zero at the centre for odd resolutions
  if (resolution % 2 == 1) s.x[static_cast<std::size_t>(resolution / 2)] = 0.0;
  s.y = s.x;
  s.z.resize(resolution, resolution);
  const MaternKernel corr(params);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      s.z(i, j) = corr(std::hypot(s.x[static_cast<std::size_t>(i)], s.y[static_cast<std::size_t>(j)]));
    }
  }
  return s;
}

}  // namespace matern
