#pragma once

// matern command-line front end. `run` is separated from main() so the test
// suite can drive it in-process.
//
// Exit status: 0 success, 2 flag/usage errors, 1 numeric failures.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "matern/analysis.hpp"
#include "matern/conditional_joint.hpp"
#include "matern/covariance.hpp"
#include "matern/io.hpp"
#include "matern/kernel.hpp"
#include "serve.hpp"

namespace matern::tools {

inline const std::map<std::string, Parametrization>& parametrization_names() {
  static const std::map<std::string, Parametrization> names{{"range", Parametrization::Range},
                                                            {"decay", Parametrization::Decay},
                                                            {"ml", Parametrization::MlLengthScale},
                                                            {"hs", Parametrization::HandcockStein}};
  return names;
}

struct ParamFlags {
  double nu = 0.5;
  double scale = 1.0;
  double sigma2 = 1.0;
  std::string param = "range";

  MaternParams get() const { return {nu, scale, sigma2, parametrization_names().at(param)}; }
};

inline void add_param_flags(CLI::App* cmd, ParamFlags& f, bool with_sigma2 = false) {
  cmd->add_option("--nu", f.nu, "smoothness nu (> 0)")->check(CLI::PositiveNumber);
  cmd->add_option("--scale,--rho", f.scale, "scale: rho, kappa, l or HS rho depending on --param")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--param", f.param, "parametrization: range|decay|ml|hs")
      ->check(CLI::IsMember({"range", "decay", "ml", "hs"}, CLI::ignore_case));
  if (with_sigma2) cmd->add_option("--sigma2", f.sigma2, "marginal variance")->check(CLI::PositiveNumber);
}

struct OutputFlags {
  std::string format = "json";
  std::string path;
};

inline void add_output_flags(CLI::App* cmd, OutputFlags& o, std::string default_format) {
  o.format = std::move(default_format);
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output,-o", o.path, "write to file instead of stdout");
}

// Emits to the --output file when given, else to `out`.
class Sink {
 public:
  Sink(const OutputFlags& o, std::ostream& out) : out_(&out) {
    if (!o.path.empty()) {
      file_ = std::make_unique<std::ofstream>(o.path);
      if (!*file_) throw std::runtime_error("cannot open " + o.path);
      out_ = file_.get();
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

inline std::vector<std::pair<double, double>> parse_pairs(const std::string& spec) {
  if (spec == "default") {
    auto pairs = swap_table_pairs();
    pairs.emplace_back(1.0, 1.0);  // symmetric control row
    return pairs;
  }
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--pairs", "expected nu:rho entries");
    try {
      out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--pairs", "cannot parse '" + item + "'");
    }
    if (!(out.back().first > 0.0) || !(out.back().second > 0.0)) {
      throw CLI::ValidationError("--pairs", "nu and rho must be > 0");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--pairs", "no pairs given");
  return out;
}

/// Reads a CSV with columns x,y (extra columns and '#' lines ignored).
inline std::pair<PointSet, Eigen::VectorXd> read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--data", "cannot open " + path);
  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ls(line);
    std::string a;
    std::string b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) continue;
    try {
      xs.push_back(std::stod(a));
      ys.push_back(std::stod(b));
    } catch (const std::exception&) {
      continue;  // header
    }
  }
  if (xs.empty()) throw CLI::ValidationError("--data", "no numeric x,y rows in " + path);
  return {PointSet::line(xs), Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()))};
}

struct SimFlags {
  std::string data;
  std::size_t n = 300;
  double true_nu = 0.5;
  double true_sigma2 = 1.0;
  double true_kappa = 4.0;
  std::uint64_t seed = 1;
};

inline void add_sim_flags(CLI::App* cmd, SimFlags& s) {
  cmd->add_option("--data", s.data, "CSV with x,y columns; if absent, data are simulated")
      ->check(CLI::ExistingFile);
  cmd->add_option("--n", s.n, "simulated in-fill points on (0, 1]")->check(CLI::Range(2, 5000));
  cmd->add_option("--true-nu", s.true_nu, "simulation truth nu")->check(CLI::PositiveNumber);
  cmd->add_option("--true-sigma2", s.true_sigma2, "simulation truth sigma2")->check(CLI::PositiveNumber);
  cmd->add_option("--true-kappa", s.true_kappa, "simulation truth kappa")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", s.seed, "random seed");
}

inline std::pair<PointSet, Eigen::VectorXd> load_or_simulate(const SimFlags& s) {
  if (!s.data.empty()) return read_xy_csv(s.data);
  const PointSet pts = infill_points(s.n);
  const CovarianceMatrix cov = covariance_matrix(MaternParams::decay(s.true_nu, s.true_kappa, s.true_sigma2), pts);
  const Eigen::MatrixXd y = sample_gaussian_process(cholesky_with_jitter(cov.values), s.seed, 1);
  return {pts, y.col(0)};
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matern correlation toolkit"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key=value file with option defaults");

  ParamFlags pf;
  OutputFlags of;

  // eval
  auto* eval = app.add_subcommand("eval", "correlation and its three parts at distance d");
  double d = 1.0;
  int precision = 7;
  add_param_flags(eval, pf, true);
  eval->add_option("--d", d, "distance")->check(CLI::NonNegativeNumber);
  eval->add_option("--precision", precision, "significant digits for text output")->check(CLI::Range(1, 17));
  eval->add_option("--format", of.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  of.format = "text";

  // surface
  auto* surf = app.add_subcommand("surface", "correlation surface Corr(sqrt(x^2 + y^2)) on a square grid");
  double half_width = kDefaultHalfWidth;
  int resolution = kDefaultResolution;
  add_param_flags(surf, pf);
  surf->add_option("--half-width", half_width, "grid spans [-w, w]^2")->check(CLI::PositiveNumber);
  surf->add_option("--resolution", resolution, "points per axis")->check(CLI::Range(2, 2001));
  OutputFlags surf_out;
  add_output_flags(surf, surf_out, "json");

  // table
  auto* table = app.add_subcommand("table", "analysis tables");
  table->require_subcommand(1, 1);
  auto* swap = table->add_subcommand("swap-diff", "min/max of Corr(nu,rho) - Corr(rho,nu)");
  std::string pairs = "default";
  double d_step = 0.05;
  std::size_t d_count = 200;
  swap->add_option("--pairs", pairs, "'default' or nu:rho,nu:rho,...");
  swap->add_option("--d-step", d_step, "radial grid step")->check(CLI::PositiveNumber);
  swap->add_option("--d-count", d_count, "radial grid points")->check(CLI::Range(1, 1000000));
  OutputFlags swap_out;
  add_output_flags(swap, swap_out, "csv");

  auto* mse = table->add_subcommand("mse", "MSE between the power part and a line through the origin");
  double mse_rho = 10.0;
  double slope = 0.1;
  mse->add_option("--rho", mse_rho, "range parameter")->check(CLI::PositiveNumber);
  mse->add_option("--slope", slope, "slope of the reference line");
  OutputFlags mse_out;
  add_output_flags(mse, mse_out, "csv");

  // jointcov
  auto* joint = app.add_subcommand("jointcov", "conditional joint covariance blocks of two processes");
  double kappa11 = 75.0;
  double kappa21 = 1.5;
  double tent_h = kDefaultTentBandwidth;
  double tent_beta = kDefaultTentAmplitude;
  std::size_t grid_n = 101;
  joint->add_option("--kappa11", kappa11, "decay of C11")->check(CLI::PositiveNumber);
  joint->add_option("--kappa21", kappa21, "decay of C2|1")->check(CLI::PositiveNumber);
  joint->add_option("--bandwidth", tent_h, "tent bandwidth")->check(CLI::PositiveNumber);
  joint->add_option("--beta", tent_beta, "tent amplitude");
  joint->add_option("--grid-n", grid_n, "grid points on [-1, 1]")->check(CLI::Range(2, 2000));
  OutputFlags joint_out;
  add_output_flags(joint, joint_out, "json");

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw Gaussian-process samples on a 1-D grid");
  std::size_t sim_n = 100;
  double lo = 0.0;
  double hi = 1.0;
  int draws = 1;
  std::uint64_t seed = 1;
  add_param_flags(sim, pf, true);
  sim->add_option("--n", sim_n, "grid points")->check(CLI::Range(1, 5000));
  sim->add_option("--lo", lo, "grid start");
  sim->add_option("--hi", hi, "grid end");
  sim->add_option("--draws", draws, "number of draws")->check(CLI::Range(1, 100000));
  sim->add_option("--seed", seed, "random seed");
  OutputFlags sim_out;
  add_output_flags(sim, sim_out, "csv");

  // fit
  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit (Nelder-Mead in log parameters)");
  SimFlags fit_sim;
  std::optional<double> nu_fixed;
  double init_sigma2 = 1.0;
  double init_kappa = 1.0;
  double init_nu = 0.5;
  add_sim_flags(fit, fit_sim);
  fit->add_option("--nu-fixed", nu_fixed, "hold nu at this value")->check(CLI::PositiveNumber);
  fit->add_option("--init-sigma2", init_sigma2, "starting sigma2")->check(CLI::PositiveNumber);
  fit->add_option("--init-kappa", init_kappa, "starting kappa")->check(CLI::PositiveNumber);
  fit->add_option("--init-nu", init_nu, "starting nu when free")->check(CLI::PositiveNumber);

  // ridge
  auto* ridge = app.add_subcommand("ridge", "likelihood along and across sigma2 kappa^{2 nu} = c");
  SimFlags ridge_sim;
  RidgeSettings rs;
  std::optional<double> ridge_c;
  add_sim_flags(ridge, ridge_sim);
  ridge->add_option("--nu", rs.nu_fixed, "fixed nu")->check(CLI::PositiveNumber);
  ridge->add_option("--c", ridge_c, "ridge constant (default: truth sigma2 kappa^{2 nu})")
      ->check(CLI::PositiveNumber);
  ridge->add_option("--kappa-center", rs.kappa_center, "kappa sweep centre (default: truth kappa)")
      ->check(CLI::PositiveNumber);
  ridge->add_option("--steps", rs.n_steps, "points along the ridge")->check(CLI::Range(1, 10000));
  OutputFlags ridge_out;
  add_output_flags(ridge, ridge_out, "csv");

  // serve
  auto* serve = app.add_subcommand("serve", "JSON backend for the surface explorer");
  int port = 0;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "port (default $MATERN_PORT or 8080)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (eval->parsed()) {
      const MaternParams p = pf.get();
      const double corr = matern_corr(p, d);
      if (of.format == "json") {
        io::Json j{{"params", io::params_json(p)}, {"d", d}, {"correlation", corr}, {"covariance", p.sigma2 * corr}};
        if (d > 0.0) {
          const PartValues parts = matern_corr_parts(p, d);
          j["parts"] = io::parts_json(parts, corr);
        }
        out << j.dump() << "\n";
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", precision, corr);
        out << buf << "\n";
        if (d > 0.0) {
          const PartValues parts = matern_corr_parts(p, d);
          out << "constant=" << io::format_double(parts.constant) << "\n"
              << "power=" << io::format_double(parts.power) << "\n"
              << "bessel=" << io::format_double(parts.bessel) << "\n"
              << "log_scale=" << (parts.log_scale ? "true" : "false") << "\n";
        }
      }
      return 0;
    }
    if (surf->parsed()) {
      const CorrelationSurface s = surface_grid(pf.get(), half_width, resolution);
      Sink sink(surf_out, out);
      if (surf_out.format == "json") {
        sink.stream() << io::surface_json(s).dump() << "\n";
      } else {
        io::write_surface_csv(sink.stream(), s);
      }
      return 0;
    }
    if (swap->parsed()) {
      const auto pair_list = parse_pairs(pairs);
      const auto grid = stepped_grid(d_step, d_count);
      std::vector<SwapDiffRow> rows;
      for (const auto& [nu, rho] : pair_list) rows.push_back(swap_difference(nu, rho, grid));
      Sink sink(swap_out, out);
      if (swap_out.format == "json") {
        io::Json arr = io::Json::array();
        for (const auto& r : rows) arr.push_back(io::swap_row_json(r));
        sink.stream() << io::Json{{"rows", arr}, {"grid", {{"step", d_step}, {"count", d_count}}}}.dump() << "\n";
      } else {
        io::write_swap_table_csv(sink.stream(), rows, d_step, d_count);
      }
      return 0;
    }
    if (mse->parsed()) {
      const auto grid = default_mse_grid();
      Sink sink(mse_out, out);
      io::Json arr = io::Json::array();
      if (mse_out.format == "csv") {
        sink.stream() << "# rho=" << io::format_double(mse_rho) << "\n# slope=" << io::format_double(slope)
                      << "\n# grid=(0,10] step 0.01\nnu,mse\n";
      }
      for (int k = 1; k <= 20; ++k) {
        const double nu = 0.1 * k;
        const double v = power_curve_mse(nu, mse_rho, slope, grid);
        if (mse_out.format == "csv") {
          sink.stream() << io::format_double(nu) << ',' << io::format_double(v) << "\n";
        } else {
          arr.push_back({{"nu", nu}, {"mse", v}});
        }
      }
      if (mse_out.format == "json") {
        sink.stream() << io::Json{{"rows", arr}, {"rho", mse_rho}, {"slope", slope}}.dump() << "\n";
      }
      return 0;
    }
    if (joint->parsed()) {
      const JointCovariance jc = build_joint(uniform_line(-1.0, 1.0, grid_n), kappa11, kappa21, tent_h, tent_beta);
      Sink sink(joint_out, out);
      if (joint_out.format == "json") {
        sink.stream() << io::blocks_json(jc).dump() << "\n";
      } else {
        io::write_blocks_csv(sink.stream(), jc);
      }
      return 0;
    }
    if (sim->parsed()) {
      const MaternParams p = pf.get();
      const PointSet pts = uniform_line(lo, hi, sim_n);
      const CholeskyFactor f = cholesky_with_jitter(covariance_matrix(p, pts).values);
      const Eigen::MatrixXd y = sample_gaussian_process(f, seed, draws);
      Sink sink(sim_out, out);
      auto& o = sink.stream();
      if (sim_out.format == "json") {
        io::Json j{{"x", std::vector<double>()}, {"draws", io::matrix_rows(y.transpose())},
                   {"params", io::params_json(p)}, {"seed", seed}, {"jitter", f.jitter}};
        for (const auto& c : pts.coords) j["x"].push_back(c[0]);
        o << j.dump() << "\n";
      } else {
        o << "# nu=" << io::format_double(p.nu) << "\n# scale=" << io::format_double(p.scale)
          << "\n# parametrization=" << to_string(p.parametrization) << "\n# sigma2=" << io::format_double(p.sigma2)
          << "\n# seed=" << seed << "\n# jitter=" << io::format_double(f.jitter) << "\nx";
        for (int k = 0; k < draws; ++k) o << ",y" << k;
        o << "\n";
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
          o << io::format_double(pts.coords[static_cast<std::size_t>(i)][0]);
          for (Eigen::Index k = 0; k < y.cols(); ++k) o << ',' << io::format_double(y(i, k));
          o << "\n";
        }
      }
      return 0;
    }
    if (fit->parsed()) {
      const auto [pts, y] = load_or_simulate(fit_sim);
      const MaternParams init = MaternParams::decay(nu_fixed.value_or(init_nu), init_kappa, init_sigma2);
      const FitResult r = fit_mle(y, pts, nu_fixed, init);
      io::Json j{{"params_hat", io::params_json(r.params_hat)},
                 {"nll", r.nll},
                 {"microergodic_hat", r.microergodic_hat},
                 {"converged", r.converged},
                 {"evaluations", r.evaluations},
                 {"n", y.size()}};
      if (fit_sim.data.empty()) j["seed"] = fit_sim.seed;
      out << j.dump() << "\n";
      return r.converged ? 0 : 1;
    }
    if (ridge->parsed()) {
      const auto [pts, y] = load_or_simulate(ridge_sim);
      if (ridge->count("--kappa-center") == 0) rs.kappa_center = ridge_sim.true_kappa;
      rs.c = ridge_c.value_or(ridge_sim.true_sigma2 * std::pow(ridge_sim.true_kappa, 2.0 * rs.nu_fixed));
      const RidgeProfile prof = profile_ridge(rs, y, pts);
      Sink sink(ridge_out, out);
      if (ridge_out.format == "json") {
        io::Json along = io::Json::array();
        io::Json across = io::Json::array();
        for (const auto& p : prof.along) along.push_back({{"sigma2", p.sigma2}, {"kappa", p.kappa}, {"nll", p.nll}});
        for (const auto& p : prof.across) {
          across.push_back({{"sigma2", p.sigma2}, {"kappa", p.kappa}, {"nll", p.nll}, {"factor", p.factor}});
        }
        sink.stream() << io::Json{{"nu_fixed", prof.nu_fixed}, {"c", prof.c}, {"along", along}, {"across", across},
                                  {"flatness_ratio", prof.flatness_ratio()}}
                             .dump()
                      << "\n";
      } else {
        io::write_ridge_csv(sink.stream(), prof);
      }
      return 0;
    }
    if (serve->parsed()) {
      return serve_forever(host, port == 0 ? default_port() : port, err);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace matern::tools
