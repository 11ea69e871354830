#pragma once

// Modified Bessel function of the second kind K_nu and the three constituent
// parts of the Matern correlation: 2^(1-nu)/Gamma(nu), (x)^nu and K_nu(x).

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "matern/error.hpp"

namespace matern {

/// Order of K_nu. Only strictly positive orders are accepted; nu = 0 makes the
/// Matern constant 1/Gamma(nu) degenerate.
class BesselOrder {
 public:
  static constexpr double kHalfIntegerTolerance = 1e-12;

  explicit BesselOrder(double nu) : nu_(nu) {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw DomainError("Bessel order must be finite and > 0, got " + std::to_string(nu));
    }
    const double p = std::round(nu - 0.5);
    if (p >= 0.0 && std::abs(nu - (p + 0.5)) < kHalfIntegerTolerance) {
      half_integer_ = true;
      half_index_ = static_cast<int>(p);
    }
  }

  double value() const noexcept { return nu_; }
  bool is_half_integer() const noexcept { return half_integer_; }
  /// p such that nu = p + 1/2; meaningful only when is_half_integer().
  int half_integer_index() const noexcept { return half_index_; }

 private:
  double nu_;
  bool half_integer_ = false;
  int half_index_ = -1;
};

/// Three-part decomposition constant * power * bessel of a Matern correlation.
/// With log_scale set, `power` and `bessel` hold natural logarithms.
struct PartValues {
  double constant = 0.0;
  double power = 0.0;
  double bessel = 0.0;
  bool log_scale = false;

  double product() const {
    return log_scale ? std::exp(std::log(constant) + power + bessel) : constant * power * bessel;
  }
};

namespace detail {

// value = mantissa * 2^exponent2 * exp(log_offset)
struct ScaledValue {
  double mantissa = 0.0;
  std::int64_t exponent2 = 0;
  double log_offset = 0.0;

  double log() const {
    return std::log(mantissa) + static_cast<double>(exponent2) * std::numbers::ln2 + log_offset;
  }
};

inline constexpr double kRescaleThreshold = 0x1p600;

// Taylor coefficients of 1/Gamma(1 + x) around 0.
inline constexpr std::array<double, 29> kInvGamma1pTaylor = {
    +1.00000000000000000e+00, +5.77215664901532866e-01, -6.55878071520253902e-01,
    -4.20026350340952370e-02, +1.66538611382291479e-01, -4.21977345555443334e-02,
    -9.62197152787697303e-03, +7.21894324666309990e-03, -1.16516759185906517e-03,
    -2.15241674114950975e-04, +1.28050282388116196e-04, -2.01348547807882387e-05,
    -1.25049348214267063e-06, +1.13302723198169593e-06, -2.05633841697760707e-07,
    +6.11609510448141609e-09, +5.00200764446922295e-09, -1.18127457048702004e-09,
    +1.04342671169110054e-10, +7.78226343990507081e-12, -3.69680561864220598e-12,
    +5.10037028745447575e-13, -2.05832605356650664e-14, -5.34812253942301782e-15,
    +1.22677862823826084e-15, -1.18125930169745883e-16, +1.18669225475160037e-18,
    +1.41238065531803186e-18, -2.29874568443537022e-19,
};

struct TemmeGammas {
  double gam1;   // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
  double gam2;   // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
  double gampl;  // 1/Gamma(1+mu)
  double gammi;  // 1/Gamma(1-mu)
};

// Even/odd split of the Taylor series: no cancellation as mu -> 0.
inline TemmeGammas temme_gammas(double mu) {
  const double mu2 = mu * mu;
  double even = 0.0;
  double odd = 0.0;
  for (std::size_t k = kInvGamma1pTaylor.size(); k-- > 0;) {
    if (k % 2 == 0) {
      even = even * mu2 + kInvGamma1pTaylor[k];
    } else {
      odd = odd * mu2 + kInvGamma1pTaylor[k];
    }
  }
  return {-odd, even, even + mu * odd, even - mu * odd};
}

inline constexpr double kSeriesEps = 1e-17;
inline constexpr int kMaxIterations = 100000;

// K_mu(x), K_{mu+1}(x) for |mu| <= 1/2 and 0 < x < 2 (Temme's series).
inline void temme_series(double mu, double x, double& k_mu, double& k_mu1) {
  const double half_x = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < 1e-300 ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(half_x);
  double e = mu * d;
  const double fact2 = std::abs(e) < 1e-300 ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = half_x * half_x;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double di = i;
    ff = (di * ff + p + q) / (di * di - mu2);
    c *= d / di;
    p /= di - mu;
    q /= di + mu;
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - di * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * kSeriesEps && std::abs(del1) < std::abs(sum1) * kSeriesEps) {
      break;
    }
  }
  k_mu = sum;
  k_mu1 = sum1 * 2.0 / x;
}

// exp(x) K_mu(x), exp(x) K_{mu+1}(x) for |mu| <= 1/2 and x >= 2 (Steed's
// continued fraction CF2 with Temme's normalisation).
inline void steed_scaled(double mu, double x, double& k_mu, double& k_mu1) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIterations; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kSeriesEps) break;
  }
  h *= a1;
  k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
}

inline void rescale(ScaledValue& lo, double& hi) {
  int e = 0;
  std::frexp(hi, &e);
  lo.mantissa = std::ldexp(lo.mantissa, -e);
  hi = std::ldexp(hi, -e);
  lo.exponent2 += e;
}

// General order: base pair at |mu| <= 1/2, then upward recurrence
// K_{v+1} = (2v/x) K_v + K_{v-1}, which is stable for K.
inline ScaledValue bessel_k_general(double nu, double x) {
  const int steps = static_cast<int>(nu + 0.5);
  const double mu = nu - steps;
  ScaledValue out;
  double k_mu = 0.0;
  double k_mu1 = 0.0;
  if (x < 2.0) {
    temme_series(mu, x, k_mu, k_mu1);
  } else {
    steed_scaled(mu, x, k_mu, k_mu1);
    out.log_offset = -x;
  }
  out.mantissa = k_mu;
  double next = k_mu1;
  const double two_over_x = 2.0 / x;
  for (int i = 1; i <= steps; ++i) {
    const double t = (mu + i) * two_over_x * next + out.mantissa;
    out.mantissa = next;
    next = t;
    if (std::abs(next) > kRescaleThreshold) rescale(out, next);
  }
  return out;
}

// K_{p+1/2}(x) = sqrt(pi/(2x)) e^{-x} sum_{r=0}^{p} (p+r)! / (r! (p-r)! (2x)^r)
inline ScaledValue bessel_k_half_integer(int p, double x) {
  ScaledValue out;
  out.log_offset = -x;
  double sum = 1.0;
  double term = 1.0;
  for (int r = 1; r <= p; ++r) {
    term *= static_cast<double>(p + r) * static_cast<double>(p - r + 1) / (r * 2.0 * x);
    sum += term;
    if (sum > kRescaleThreshold) {
      int e = 0;
      std::frexp(sum, &e);
      sum = std::ldexp(sum, -e);
      term = std::ldexp(term, -e);
      out.exponent2 += e;
    }
  }
  out.mantissa = sum * std::sqrt(std::numbers::pi / (2.0 * x));
  return out;
}

inline ScaledValue bessel_k_scaled(const BesselOrder& order, double z) {
  if (!(z > 0.0) || std::isnan(z)) {
    throw DomainError("K_nu(z) requires z > 0, got " + std::to_string(z));
  }
  if (std::isinf(z)) return ScaledValue{0.0, 0, 0.0};
  if (order.is_half_integer()) return bessel_k_half_integer(order.half_integer_index(), z);
  return bessel_k_general(order.value(), z);
}

}  // namespace detail

/// ln K_nu(z). Finite wherever K_nu(z) is, including orders and arguments
/// where the value itself overflows a double.
inline double log_bessel_k(const BesselOrder& order, double z) {
  const detail::ScaledValue s = detail::bessel_k_scaled(order, z);
  if (s.mantissa == 0.0) return -std::numeric_limits<double>::infinity();
  return s.log();
}

/// K_nu(z) for z > 0. Throws OverflowError when the value exceeds the double
/// range (use log_bessel_k there). Underflows to 0 for very large z.
inline double bessel_k(const BesselOrder& order, double z) {
  const detail::ScaledValue s = detail::bessel_k_scaled(order, z);
  if (s.mantissa == 0.0) return 0.0;
  if (s.exponent2 == 0 && s.log_offset >= -700.0) {
    const double v = s.mantissa * std::exp(s.log_offset);
    if (std::isfinite(v)) return v;
  }
  const double log_value = s.log();
  if (log_value > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("K_nu(z) overflows for nu = " + std::to_string(order.value()) +
                        ", z = " + std::to_string(z) + "; use log_bessel_k");
  }
  if (s.log_offset < -700.0) return std::exp(log_value);
  return std::ldexp(s.mantissa * std::exp(s.log_offset), static_cast<int>(s.exponent2));
}

inline double bessel_k(double nu, double z) { return bessel_k(BesselOrder(nu), z); }
inline double log_bessel_k(double nu, double z) { return log_bessel_k(BesselOrder(nu), z); }

/// ln(2^(1-nu) / Gamma(nu)).
inline double log_constant_part(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("constant part requires nu > 0, got " + std::to_string(nu));
  }
  return (1.0 - nu) * std::numbers::ln2 - std::lgamma(nu);
}

/// 2^(1-nu) / Gamma(nu). Note the value slightly exceeds 1 for nu in
/// (0.865, 1), peaking at about 1.00396 near nu = 0.933.
inline double constant_part(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("constant part requires nu > 0, got " + std::to_string(nu));
  }
  if (nu < 170.0) return std::exp2(1.0 - nu) / std::tgamma(nu);
  return std::exp(log_constant_part(nu));
}

/// (scaled_distance)^nu with scaled_distance = d / rho = kappa d.
inline double power_part(double nu, double scaled_distance) {
  if (scaled_distance < 0.0 || std::isnan(scaled_distance)) {
    throw DomainError("power part requires a nonnegative scaled distance");
  }
  if (scaled_distance == 0.0) return 0.0;
  return std::pow(scaled_distance, nu);
}

}  // namespace matern
