#pragma once

// CSV and JSON export of surfaces, block matrices, tables and ridge profiles.
// JSON objects use the fixed field names {x, y, z, params}; every CSV starts
// with `# key=value` metadata lines that pin down how it was produced.

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "matern/analysis.hpp"
#include "matern/conditional_joint.hpp"
#include "matern/covariance.hpp"
#include "matern/kernel.hpp"

namespace matern::io {

using Json = nlohmann::json;

/// Shortest round-trip representation.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json params_json(const MaternParams& p) {
  return Json{{"nu", p.nu},
              {"scale", p.scale},
              {"sigma2", p.sigma2},
              {"parametrization", std::string(to_string(p.parametrization))},
              {"dim", p.dim}};
}

inline Json matrix_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// z[i][j] is the value at (x[i], y[j]).
inline Json surface_json(const CorrelationSurface& s) {
  Json params = params_json(s.params);
  params["half_width"] = s.half_width;
  params["resolution"] = s.x.size();
  return Json{{"x", s.x}, {"y", s.y}, {"z", matrix_rows(s.z)}, {"params", params}};
}

inline void write_surface_csv(std::ostream& out, const CorrelationSurface& s) {
  out << "# nu=" << format_double(s.params.nu) << "\n";
  out << "# scale=" << format_double(s.params.scale) << "\n";
  out << "# parametrization=" << to_string(s.params.parametrization) << "\n";
  out << "# half_width=" << format_double(s.half_width) << "\n";
  out << "# resolution=" << s.x.size() << "\n";
  out << "x,y,z\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    for (std::size_t j = 0; j < s.y.size(); ++j) {
      out << format_double(s.x[i]) << ',' << format_double(s.y[j]) << ','
          << format_double(s.z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << "\n";
    }
  }
}

inline Json joint_params_json(const JointCovariance& jc) {
  return Json{{"params11", params_json(jc.params11)},
              {"params2given1", params_json(jc.params2given1)},
              {"tent", {{"bandwidth", jc.tent.bandwidth},
                        {"amplitude", jc.tent.amplitude},
                        {"cell_width", jc.tent.cell_width}}},
              {"grid_size", jc.grid.size()}};
}

/// Block matrix in surface form: x and y are the 2n row/column indices, `axis`
/// gives the grid location of each index and `blocks` the index ranges.
inline Json blocks_json(const JointCovariance& jc) {
  const BlockMatrixView v = render_blocks(jc);
  const auto n = static_cast<long>(v.block_size);
  std::vector<long> idx(static_cast<std::size_t>(2 * n));
  for (long i = 0; i < 2 * n; ++i) idx[static_cast<std::size_t>(i)] = i;
  Json params = joint_params_json(jc);
  params["axis"] = v.axis;
  params["blocks"] = {{"C11", {{"rows", {0, n - 1}}, {"cols", {0, n - 1}}}},
                      {"C12", {{"rows", {0, n - 1}}, {"cols", {n, 2 * n - 1}}}},
                      {"C21", {{"rows", {n, 2 * n - 1}}, {"cols", {0, n - 1}}}},
                      {"C22", {{"rows", {n, 2 * n - 1}}, {"cols", {n, 2 * n - 1}}}}};
  return Json{{"x", idx}, {"y", idx}, {"z", matrix_rows(v.values)}, {"params", params}};
}

inline void write_blocks_csv(std::ostream& out, const JointCovariance& jc) {
  const BlockMatrixView v = render_blocks(jc);
  const Eigen::Index n = v.block_size;
  out << "# kappa11=" << format_double(inverse_length(jc.params11)) << "\n";
  out << "# kappa21=" << format_double(inverse_length(jc.params2given1)) << "\n";
  out << "# nu11=" << format_double(jc.params11.nu) << "\n";
  out << "# nu21=" << format_double(jc.params2given1.nu) << "\n";
  out << "# tent_bandwidth=" << format_double(jc.tent.bandwidth) << "\n";
  out << "# tent_amplitude=" << format_double(jc.tent.amplitude) << "\n";
  out << "# grid_size=" << n << "\n";
  out << "# blocks: C11 rows/cols [0," << n << "), C12 rows [0," << n << ") cols [" << n << "," << 2 * n
      << "), C21 rows [" << n << "," << 2 * n << ") cols [0," << n << "), C22 rows/cols [" << n << "," << 2 * n
      << ")\n";
  out << "x,y,z\n";
  for (Eigen::Index i = 0; i < v.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.values.cols(); ++j) {
      out << i << ',' << j << ',' << format_double(v.values(i, j)) << "\n";
    }
  }
}

inline Json swap_row_json(const SwapDiffRow& r) {
  return Json{{"nu", r.nu}, {"rho", r.rho}, {"min_diff", r.min_diff}, {"max_diff", r.max_diff}};
}

inline void write_swap_table_csv(std::ostream& out, std::span<const SwapDiffRow> rows, double step,
                                 std::size_t count) {
  out << "# grid=radial distance step " << format_double(step) << " count " << count << "\n";
  out << "nu,rho,min_diff,max_diff\n";
  for (const auto& r : rows) {
    out << format_double(r.nu) << ',' << format_double(r.rho) << ',' << format_double(r.min_diff) << ','
        << format_double(r.max_diff) << "\n";
  }
}

inline Json parts_json(const PartValues& p, double correlation) {
  return Json{{"constant", p.constant},
              {"power", p.power},
              {"bessel", p.bessel},
              {"log_scale", p.log_scale},
              {"correlation", correlation}};
}

inline void write_ridge_csv(std::ostream& out, const RidgeProfile& r) {
  out << "# nu_fixed=" << format_double(r.nu_fixed) << "\n";
  out << "# c=" << format_double(r.c) << "\n";
  out << "sigma2,kappa,nll,leg\n";
  for (const auto& p : r.along) {
    out << format_double(p.sigma2) << ',' << format_double(p.kappa) << ',' << format_double(p.nll) << ",along\n";
  }
  for (const auto& p : r.across) {
    out << format_double(p.sigma2) << ',' << format_double(p.kappa) << ',' << format_double(p.nll) << ",across_x"
        << format_double(p.factor) << "\n";
  }
}

}  // namespace matern::io
