#pragma once

// Quantitative studies on the Matern family: linearity of the power part,
// (nu, rho) swap differences, the microergodic quantity sigma2 kappa^{2 nu},
// Gaussian KL divergence, likelihood profiles along the microergodic ridge and
// a Nelder-Mead maximum-likelihood fit.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matern/covariance.hpp"
#include "matern/error.hpp"
#include "matern/kernel.hpp"

namespace matern {

/// {step, 2 step, ..., count * step}
inline std::vector<double> stepped_grid(double step, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = step * static_cast<double>(i + 1);
  return g;
}

/// (0, 10] step 0.01
inline std::vector<double> default_mse_grid() { return stepped_grid(0.01, 1000); }

/// Radial distances (0, 10] step 0.05.
inline std::vector<double> default_swap_grid() { return stepped_grid(0.05, 200); }

/// Mean over the grid of ((d / rho)^nu - slope d)^2, evaluated as
/// (x^nu - slope rho x)^2 with x = d / rho so that nu = 1, slope = 1 / rho is exactly 0.
inline double power_curve_mse(double nu, double rho, double slope, std::span<const double> d_grid) {
  if (d_grid.empty()) throw DomainError("power_curve_mse needs a non-empty grid");
  if (!(rho > 0.0)) throw DomainError("rho must be > 0");
  const double line = slope * rho;
  double acc = 0.0;
  for (double d : d_grid) {
    const double x = d / rho;
    const double r = power_part(nu, x) - line * x;
    acc += r * r;
  }
  return acc / static_cast<double>(d_grid.size());
}

inline double power_curve_mse(double nu, double rho = 10.0, double slope = 0.1) {
  const auto g = default_mse_grid();
  return power_curve_mse(nu, rho, slope, g);
}

struct SwapDiffRow {
  double nu = 0.0;
  double rho = 0.0;
  double min_diff = 0.0;
  double max_diff = 0.0;
};

/// Extremes of Corr_{nu, rho}(d) - Corr_{rho, nu}(d) over the grid (range parametrization).
inline SwapDiffRow swap_difference(double nu, double rho, std::span<const double> d_grid) {
  const MaternKernel a(MaternParams::range(nu, rho));
  const MaternKernel b(MaternParams::range(rho, nu));
  SwapDiffRow row{nu, rho, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  if (d_grid.empty()) throw DomainError("swap_difference needs a non-empty grid");
  for (double d : d_grid) {
    const double diff = a(d) - b(d);
    row.min_diff = std::min(row.min_diff, diff);
    row.max_diff = std::max(row.max_diff, diff);
  }
  return row;
}

inline SwapDiffRow swap_difference(double nu, double rho) {
  const auto g = default_swap_grid();
  return swap_difference(nu, rho, g);
}

/// nu in {0.1, 0.5, 1.5, 2.5} x rho in {1, 5, 20, 75}.
inline std::vector<std::pair<double, double>> swap_table_pairs() {
  std::vector<std::pair<double, double>> out;
  for (double nu : {0.1, 0.5, 1.5, 2.5}) {
    for (double rho : {1.0, 5.0, 20.0, 75.0}) out.emplace_back(nu, rho);
  }
  return out;
}

/// sigma2 kappa^{2 nu}, kappa taken from the decay parametrization.
inline double microergodic(const MaternParams& p) {
  const MaternParams d = convert_params(p, Parametrization::Decay);
  return d.sigma2 * std::pow(d.scale, 2.0 * d.nu);
}

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError(std::string(what) + " is not positive definite");
  }
  return llt;
}

inline double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace detail

/// KL(N(0, sigma1) || N(0, sigma2)) = (tr(S2^-1 S1) - n + ln det S2 - ln det S1) / 2.
inline double gaussian_kl(const Eigen::MatrixXd& sigma1, const Eigen::MatrixXd& sigma2) {
  if (sigma1.rows() != sigma2.rows() || sigma1.cols() != sigma2.cols() || sigma1.rows() != sigma1.cols()) {
    throw DomainError("gaussian_kl needs two square matrices of the same size");
  }
  const auto llt1 = detail::checked_llt(sigma1, "first covariance");
  const auto llt2 = detail::checked_llt(sigma2, "second covariance");
  const Eigen::MatrixXd l1 = llt1.matrixL();
  const Eigen::MatrixXd m = llt2.matrixL().solve(l1);
  const double trace = m.squaredNorm();
  return 0.5 * (trace - static_cast<double>(sigma1.rows()) + detail::log_det(llt2) - detail::log_det(llt1));
}

inline double gaussian_kl(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  return gaussian_kl(a.values, b.values);
}

/// In-fill design on (a, b]: a + (b - a) i / n, i = 1..n. Grids for n and 2n are nested.
inline PointSet infill_points(std::size_t n, double a = 0.0, double b = 1.0) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(n);
  return PointSet::line(xs);
}

/// KL between the two Matern covariances on in-fill grids of increasing size.
inline std::vector<double> equivalence_growth(const MaternParams& a, const MaternParams& b,
                                              std::span<const std::size_t> sizes, double lo = 0.0,
                                              double hi = 1.0) {
  std::vector<double> out;
  out.reserve(sizes.size());
  for (std::size_t n : sizes) {
    const PointSet pts = infill_points(n, lo, hi);
    out.push_back(gaussian_kl(covariance_matrix(a, pts), covariance_matrix(b, pts)));
  }
  return out;
}

/// sigma2 * Corr(D) for a precomputed distance matrix.
inline Eigen::MatrixXd covariance_from_distances(const MaternParams& p, const Eigen::MatrixXd& dist) {
  const MaternKernel corr(p);
  const Eigen::Index n = dist.rows();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = p.sigma2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = p.sigma2 * corr(dist(i, j));
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

inline double neg_log_likelihood_from_distances(const MaternParams& p, const Eigen::VectorXd& y,
                                                const Eigen::MatrixXd& dist) {
  if (y.size() != dist.rows()) throw DomainError("observation vector does not match the point set");
  const auto llt = detail::checked_llt(covariance_from_distances(p, dist), "covariance");
  const Eigen::VectorXd alpha = llt.matrixL().solve(y);
  const double n = static_cast<double>(y.size());
  return 0.5 * (alpha.squaredNorm() + detail::log_det(llt) + n * std::log(2.0 * std::numbers::pi));
}

/// (y^T S^-1 y + ln det S + n ln 2 pi) / 2 with S = sigma2 * Corr.
inline double neg_log_likelihood(const MaternParams& p, const Eigen::VectorXd& y, const PointSet& points) {
  return neg_log_likelihood_from_distances(p, y, pairwise_distances(points));
}

struct RidgePoint {
  double sigma2 = 0.0;
  double kappa = 0.0;
  double nll = 0.0;
  double factor = 1.0;  ///< multiple of c this point sits on (1 along the ridge)
};

struct RidgeSettings {
  double nu_fixed = 0.5;
  double c = 1.0;             ///< microergodic value sigma2 kappa^{2 nu} defining the ridge
  double kappa_center = 1.0;  ///< sweep is log-spaced over [0.1, 10] * kappa_center
  int n_steps = 21;
  std::vector<double> across_factors{0.5, 2.0};
};

struct RidgeProfile {
  double nu_fixed = 0.0;
  double c = 0.0;
  std::vector<RidgePoint> along;
  std::vector<RidgePoint> across;

  double along_variation() const {
    if (along.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(along.begin(), along.end(),
                                              [](const RidgePoint& a, const RidgePoint& b) { return a.nll < b.nll; });
    return hi->nll - lo->nll;
  }

  /// Mean |d nll| per unit log-parameter distance along the ridge, divided by
  /// the same quantity across it (moving c by the across factors).
  double flatness_ratio() const {
    if (along.size() < 2 || across.empty()) return 0.0;
    double total_change = 0.0;
    double path = 0.0;
    for (std::size_t i = 1; i < along.size(); ++i) {
      total_change += std::abs(along[i].nll - along[i - 1].nll);
      path += std::hypot(std::log(along[i].kappa / along[i - 1].kappa),
                         std::log(along[i].sigma2 / along[i - 1].sigma2));
    }
    const double along_slope = total_change / path;
    double across_slope = 0.0;
    for (std::size_t i = 0; i < across.size(); ++i) {
      const RidgePoint& base = along[i % along.size()];
      across_slope += std::abs(across[i].nll - base.nll) / std::abs(std::log(across[i].factor));
    }
    across_slope /= static_cast<double>(across.size());
    return along_slope / across_slope;
  }
};

/// Negative log-likelihood along sigma2 kappa^{2 nu} = c and on the parallel
/// ridges c * factor. `across` is ordered factor-major, kappa-minor, so
/// across[k * n_steps + i] pairs with along[i].
inline RidgeProfile profile_ridge(const RidgeSettings& s, const Eigen::VectorXd& y, const PointSet& points) {
  if (!(s.c > 0.0)) throw DomainError("ridge constant c must be > 0");
  if (!(s.kappa_center > 0.0)) throw DomainError("kappa_center must be > 0");
  if (s.n_steps < 1) throw DomainError("n_steps must be >= 1");
  const Eigen::MatrixXd dist = pairwise_distances(points);
  std::vector<double> kappas(static_cast<std::size_t>(s.n_steps));
  for (int i = 0; i < s.n_steps; ++i) {
    const double t = s.n_steps == 1 ? 0.0 : -1.0 + 2.0 * i / (s.n_steps - 1);
    kappas[static_cast<std::size_t>(i)] = s.kappa_center * std::pow(10.0, t);
  }
  auto point_at = [&](double kappa, double factor) {
    const double sigma2 = factor * s.c / std::pow(kappa, 2.0 * s.nu_fixed);
    const MaternParams p = MaternParams::decay(s.nu_fixed, kappa, sigma2);
    return RidgePoint{sigma2, kappa, neg_log_likelihood_from_distances(p, y, dist), factor};
  };
  RidgeProfile prof;
  prof.nu_fixed = s.nu_fixed;
  prof.c = s.c;
  for (double k : kappas) prof.along.push_back(point_at(k, 1.0));
  for (double f : s.across_factors) {
    for (double k : kappas) prof.across.push_back(point_at(k, f));
  }
  return prof;
}

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// Converged when the simplex diameter drops below `tolerance`.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                    double initial_step, double tolerance, int max_evaluations) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> values(static_cast<std::size_t>(n + 1));
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)](i) += initial_step;
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  bool converged = false;
  while (evals < max_evaluations) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[best]).norm());
    if (diameter < tolerance) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  const auto b = static_cast<std::size_t>(best_it - values.begin());
  return {simplex[b], values[b], evals, converged};
}

struct FitOptions {
  int max_evaluations = 4000;
  int restarts = 2;
  double tolerance = 1e-6;
  double initial_step = 0.5;
};

struct FitResult {
  MaternParams params_hat;
  double nll = 0.0;
  double microergodic_hat = 0.0;
  bool converged = false;
  int evaluations = 0;
};

/// Maximum likelihood over (log sigma2, log kappa) and, when nu_fixed is empty,
/// log nu. The returned parameters use the decay parametrization.
inline FitResult fit_mle(const Eigen::VectorXd& y, const PointSet& points, std::optional<double> nu_fixed,
                         const MaternParams& init, const FitOptions& options = {}) {
  init.validate();
  const MaternParams start = convert_params(init, Parametrization::Decay);
  const double nu0 = nu_fixed.value_or(start.nu);
  if (!(nu0 > 0.0)) throw DomainError("nu must be > 0");
  const Eigen::MatrixXd dist = pairwise_distances(points);
  if (y.size() != dist.rows()) throw DomainError("observation vector does not match the point set");

  const bool free_nu = !nu_fixed.has_value();
  auto unpack = [&](const Eigen::VectorXd& x) {
    return MaternParams::decay(free_nu ? std::exp(x(2)) : nu0, std::exp(x(1)), std::exp(x(0)));
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 50.0) return std::numeric_limits<double>::infinity();
    try {
      return neg_log_likelihood_from_distances(unpack(x), y, dist);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Eigen::VectorXd x(free_nu ? 3 : 2);
  x(0) = std::log(start.sigma2);
  x(1) = std::log(start.scale);
  if (free_nu) x(2) = std::log(nu0);

  NelderMeadResult r = nelder_mead(objective, x, options.initial_step, options.tolerance, options.max_evaluations);
  int evaluations = r.evaluations;
  for (int k = 0; k < options.restarts && evaluations < options.max_evaluations; ++k) {
    NelderMeadResult again = nelder_mead(objective, r.x, 0.5 * options.initial_step, options.tolerance,
                                         options.max_evaluations - evaluations);
    evaluations += again.evaluations;
    if (again.value <= r.value) {
      r = std::move(again);
    } else {
      r.converged = again.converged && r.converged;
    }
  }

  FitResult out;
  out.params_hat = unpack(r.x);
  out.nll = r.value;
  out.microergodic_hat = microergodic(out.params_hat);
  out.converged = r.converged && std::isfinite(r.value);
  out.evaluations = evaluations;
  return out;
}

}  // namespace matern
