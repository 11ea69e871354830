#pragma once

// The Matern correlation: parametrizations, point evaluation, the three-part
// decomposition, half-integer closed forms, the Gaussian limit and the
// spectral density.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "matern/error.hpp"
#include "matern/special_functions.hpp"

namespace matern {

/// How `MaternParams::scale` enters the Bessel argument x(d):
///   Range          x = d / rho
///   Decay          x = kappa d
///   MlLengthScale  x = sqrt(2 nu) d / l
///   HandcockStein  x = 2 sqrt(nu) d / rho
enum class Parametrization { Range, Decay, MlLengthScale, HandcockStein };

inline std::string_view to_string(Parametrization p) {
  switch (p) {
    case Parametrization::Range: return "range";
    case Parametrization::Decay: return "decay";
    case Parametrization::MlLengthScale: return "ml";
    case Parametrization::HandcockStein: return "handcock-stein";
  }
  return "range";
}

inline std::optional<Parametrization> parse_parametrization(std::string_view s) {
  if (s == "range" || s == "rho") return Parametrization::Range;
  if (s == "decay" || s == "kappa") return Parametrization::Decay;
  if (s == "ml" || s == "length-scale" || s == "lengthscale") return Parametrization::MlLengthScale;
  if (s == "handcock-stein" || s == "hs") return Parametrization::HandcockStein;
  return std::nullopt;
}

struct MaternParams {
  double nu = 0.5;     ///< small-scale smoothing parameter
  double scale = 1.0;  ///< rho, kappa, l or rho(HS) depending on `parametrization`
  double sigma2 = 1.0;
  Parametrization parametrization = Parametrization::Range;
  int dim = 2;  ///< ambient dimension n, used by the spectral density

  void validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw DomainError("nu must be finite and > 0, got " + std::to_string(nu));
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw DomainError("scale must be finite and > 0, got " + std::to_string(scale));
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
      throw DomainError("sigma2 must be finite and > 0, got " + std::to_string(sigma2));
    }
    if (dim < 1) throw DomainError("dimension must be >= 1");
  }

  static MaternParams range(double nu, double rho, double sigma2 = 1.0) {
    return {nu, rho, sigma2, Parametrization::Range};
  }
  static MaternParams decay(double nu, double kappa, double sigma2 = 1.0) {
    return {nu, kappa, sigma2, Parametrization::Decay};
  }
  static MaternParams length_scale(double nu, double l, double sigma2 = 1.0) {
    return {nu, l, sigma2, Parametrization::MlLengthScale};
  }
  static MaternParams handcock_stein(double nu, double rho, double sigma2 = 1.0) {
    return {nu, rho, sigma2, Parametrization::HandcockStein};
  }
};

/// Effective inverse length: the factor multiplying d inside the Bessel argument.
inline double inverse_length(const MaternParams& p) {
  switch (p.parametrization) {
    case Parametrization::Range: return 1.0 / p.scale;
    case Parametrization::Decay: return p.scale;
    case Parametrization::MlLengthScale: return std::sqrt(2.0 * p.nu) / p.scale;
    case Parametrization::HandcockStein: return 2.0 * std::sqrt(p.nu) / p.scale;
  }
  return 1.0 / p.scale;
}

/// alpha = 2 sqrt(nu) kappa, the Handcock-Stein rescaling of the decay parameter.
inline double handcock_stein_alpha(double nu, double kappa) { return 2.0 * std::sqrt(nu) * kappa; }

/// Same correlation function, expressed under `target`.
inline MaternParams convert_params(const MaternParams& p, Parametrization target) {
  p.validate();
  if (p.parametrization == target) return p;
  const double k = inverse_length(p);
  MaternParams out = p;
  out.parametrization = target;
  switch (target) {
    case Parametrization::Range: out.scale = 1.0 / k; break;
    case Parametrization::Decay: out.scale = k; break;
    case Parametrization::MlLengthScale: out.scale = std::sqrt(2.0 * p.nu) / k; break;
    case Parametrization::HandcockStein: out.scale = 2.0 * std::sqrt(p.nu) / k; break;
  }
  return out;
}

/// Above this order the correlation is evaluated in the log domain.
inline constexpr double kLogDomainNu = 10.0;

namespace detail {

inline void check_distance(double d) {
  if (!(d >= 0.0) || std::isnan(d)) {
    throw DomainError("distance must be >= 0, got " + std::to_string(d));
  }
}

}  // namespace detail

/// Correlation evaluator with the parameter-only work (validation, Gamma
/// function, effective inverse length) done once.
class MaternKernel {
 public:
  explicit MaternKernel(const MaternParams& p)
      : params_((p.validate(), p)),
        order_(p.nu),
        inverse_length_(inverse_length(p)),
        log_domain_(p.nu > kLogDomainNu),
        constant_(log_domain_ ? 0.0 : constant_part(p.nu)),
        log_constant_(log_constant_part(p.nu)) {}

  const MaternParams& params() const noexcept { return params_; }

  /// Correlation at distance d >= 0; exactly 1 at d = 0.
  double operator()(double d) const {
    detail::check_distance(d);
    return at_argument(inverse_length_ * d);
  }

  /// Correlation as a function of the Bessel argument x = d * inverse_length.
  double at_argument(double x) const {
    if (x == 0.0) return 1.0;
    double v = 0.0;
    if (log_domain_ || x > 500.0 || x < 1e-100) {
      v = std::exp(log_constant_ + params_.nu * std::log(x) + log_bessel_k(order_, x));
    } else {
      v = constant_ * std::pow(x, params_.nu) * bessel_k(order_, x);
    }
    return v > 1.0 ? 1.0 : v;
  }

 private:
  MaternParams params_;
  BesselOrder order_;
  double inverse_length_;
  bool log_domain_;
  double constant_;
  double log_constant_;
};

/// Matern correlation at distance d (sigma2 is not applied). Exactly 1 at d = 0.
inline double matern_corr(const MaternParams& p, double d) { return MaternKernel(p)(d); }

/// sigma2 * correlation.
inline double matern_cov(const MaternParams& p, double d) { return p.sigma2 * matern_corr(p, d); }

/// The three factors of the correlation at d > 0. For nu > 10 the power and
/// Bessel parts are returned as logarithms (log_scale = true).
inline PartValues matern_corr_parts(const MaternParams& p, double d) {
  p.validate();
  detail::check_distance(d);
  if (d == 0.0) {
    throw DomainError("three-part decomposition is undefined at d = 0 (0 * inf); use matern_corr");
  }
  const double x = inverse_length(p) * d;
  const BesselOrder order(p.nu);
  PartValues parts;
  parts.constant = constant_part(p.nu);
  if (p.nu > kLogDomainNu) {
    parts.log_scale = true;
    parts.power = p.nu * std::log(x);
    parts.bessel = log_bessel_k(order, x);
  } else {
    parts.power = power_part(p.nu, x);
    parts.bessel = bessel_k(order, x);
  }
  return parts;
}

/// Half-integer closed form nu = p + 1/2: a degree-p polynomial in x times e^{-x},
///   sum_{r=0}^{p} p! (p+r)! / ((2p)! r! (p-r)!) (2x)^{p-r} e^{-x}.
inline double closed_form_corr(int p, const MaternParams& params, double d) {
  params.validate();
  detail::check_distance(d);
  if (p < 0 || std::abs(params.nu - (p + 0.5)) >= BesselOrder::kHalfIntegerTolerance) {
    throw DomainError("closed form requires nu = p + 1/2 (p = " + std::to_string(p) +
                      ", nu = " + std::to_string(params.nu) + ")");
  }
  if (d == 0.0) return 1.0;
  const double x = inverse_length(params) * d;
  // Horner in 2x from the highest power (r = 0) down; coeff(0) = p! / (2p)!.
  double coeff = 1.0;
  for (int k = p + 1; k <= 2 * p; ++k) coeff /= k;
  double poly = 0.0;
  for (int r = 0; r <= p; ++r) {
    poly = poly * 2.0 * x + coeff;
    coeff *= static_cast<double>(p + r + 1) * (p - r) / (r + 1);
  }
  if (x > 500.0) return std::exp(std::log(poly) - x);
  return poly * std::exp(-x);
}

/// Limit of the correlation as nu -> infinity under the scaled parametrizations,
/// where the Bessel argument grows like sqrt(nu):
///   MlLengthScale  exp(-d^2 / (2 l^2))
///   HandcockStein  exp(-d^2 / rho^2)       (l = rho / sqrt(2))
inline double gaussian_limit_corr(const MaternParams& p, double d) {
  detail::check_distance(d);
  if (!(p.scale > 0.0)) throw DomainError("scale must be > 0");
  double l = 0.0;
  switch (p.parametrization) {
    case Parametrization::MlLengthScale: l = p.scale; break;
    case Parametrization::HandcockStein: l = p.scale / std::numbers::sqrt2; break;
    default:
      throw DomainError(
          "Gaussian limit is defined only under the length-scale or Handcock-Stein parametrizations");
  }
  return std::exp(-d * d / (2.0 * l * l));
}

/// Spectral density in R^n, normalised so that it integrates to sigma2:
///   f(w) = sigma2 Gamma(nu + n/2) / (Gamma(nu) pi^{n/2}) kappa^{2 nu} (kappa^2 + w^2)^{-(nu + n/2)}
/// with kappa the effective inverse length and C(h) = int e^{i w.h} f(w) dw.
inline double log_spectral_density(const MaternParams& p, double omega) {
  p.validate();
  if (!(omega >= 0.0)) throw DomainError("frequency must be >= 0");
  const double k = inverse_length(p);
  const double half_n = 0.5 * p.dim;
  const double s = p.nu + half_n;
  return std::log(p.sigma2) + std::lgamma(s) - std::lgamma(p.nu) - half_n * std::log(std::numbers::pi) -
         p.dim * std::log(k) - s * std::log1p((omega / k) * (omega / k));
}

inline double spectral_density(const MaternParams& p, double omega) {
  return std::exp(log_spectral_density(p, omega));
}

}  // namespace matern
