#pragma once

// Stateless request handlers for the explorer backend. Transport-agnostic:
// a request is a path plus decoded query parameters, a response is a status
// code and a JSON body. Equal queries produce byte-identical bodies.
//
//   GET /health
//   GET /surface?nu=&scale=&param=&half_width=&resolution=
//   GET /swapdiff?nu=&rho=[&half_width=&resolution=]
//   GET /parts?nu=&scale=&d=[&param=]
//
// 400 for malformed or out-of-domain parameters, 422 for numeric failures.

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "matern/analysis.hpp"
#include "matern/covariance.hpp"
#include "matern/error.hpp"
#include "matern/io.hpp"
#include "matern/kernel.hpp"

namespace matern::service {

using Query = std::map<std::string, std::string, std::less<>>;

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

inline constexpr int kMaxResolution = 401;

namespace detail {

struct BadRequest {
  std::string message;
};

inline Response error_response(int status, std::string_view code, const std::string& message) {
  io::Json body{{"error", {{"code", std::string(code)}, {"message", message}}}};
  return {status, body.dump()};
}

inline std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline double required(const Query& q, std::string_view key) {
  const auto it = q.find(key);
  if (it == q.end()) throw BadRequest{"missing query parameter '" + std::string(key) + "'"};
  const auto v = parse_number(it->second);
  if (!v) throw BadRequest{"query parameter '" + std::string(key) + "' is not a finite number"};
  return *v;
}

inline double optional_number(const Query& q, std::string_view key, double fallback) {
  return q.contains(key) ? required(q, key) : fallback;
}

inline int resolution_of(const Query& q) {
  const double r = optional_number(q, "resolution", kDefaultResolution);
  if (r != std::floor(r) || r < 2 || r > kMaxResolution) {
    throw BadRequest{"resolution must be an integer in [2, " + std::to_string(kMaxResolution) + "]"};
  }
  return static_cast<int>(r);
}

inline Parametrization parametrization_of(const Query& q) {
  const auto it = q.find("param");
  if (it == q.end()) return Parametrization::Range;
  const auto p = parse_parametrization(it->second);
  if (!p) throw BadRequest{"unknown parametrization '" + it->second + "'"};
  return *p;
}

inline MaternParams params_of(const Query& q, std::string_view scale_key) {
  MaternParams p{required(q, "nu"), required(q, scale_key), 1.0, parametrization_of(q)};
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw BadRequest{e.what()};
  }
  return p;
}

inline Response surface(const Query& q) {
  const MaternParams p = params_of(q, "scale");
  const double hw = optional_number(q, "half_width", kDefaultHalfWidth);
  if (!(hw > 0.0)) throw BadRequest{"half_width must be > 0"};
  return {200, io::surface_json(surface_grid(p, hw, resolution_of(q))).dump()};
}

inline Response swapdiff(const Query& q) {
  const MaternParams a = params_of(q, "rho");
  const MaternParams b = MaternParams::range(a.scale, a.nu);
  const double hw = optional_number(q, "half_width", kDefaultHalfWidth);
  if (!(hw > 0.0)) throw BadRequest{"half_width must be > 0"};
  const int res = resolution_of(q);
  const CorrelationSurface sa = surface_grid(MaternParams::range(a.nu, a.scale), hw, res);
  const CorrelationSurface sb = surface_grid(b, hw, res);
  const Eigen::MatrixXd diff = sa.z - sb.z;
  io::Json body = io::swap_row_json(swap_difference(a.nu, a.scale));
  body["surface"] = io::surface_json(sa);
  body["swapped_surface"] = io::surface_json(sb);
  body["surface_diff"] = {{"min", diff.minCoeff()}, {"max", diff.maxCoeff()}};
  return {200, body.dump()};
}

inline Response parts(const Query& q) {
  const MaternParams p = params_of(q, "scale");
  const double d = required(q, "d");
  if (!(d > 0.0)) throw BadRequest{"d must be > 0 for the decomposition"};
  return {200, io::parts_json(matern_corr_parts(p, d), matern_corr(p, d)).dump()};
}

}  // namespace detail

inline Response handle(std::string_view path, const Query& query) {
  try {
    if (path == "/health") return {200, io::Json{{"status", "ok"}}.dump()};
    if (path == "/surface") return detail::surface(query);
    if (path == "/swapdiff") return detail::swapdiff(query);
    if (path == "/parts") return detail::parts(query);
    return detail::error_response(404, "not_found", "unknown endpoint " + std::string(path));
  } catch (const detail::BadRequest& e) {
    return detail::error_response(400, "invalid_parameter", e.message);
  } catch (const DomainError& e) {
    return detail::error_response(400, "invalid_parameter", e.what());
  } catch (const std::exception& e) {
    return detail::error_response(422, "numeric_failure", e.what());
  }
}

}  // namespace matern::service
