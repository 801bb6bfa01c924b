#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cssball/driver.hpp"
#include "cssball/errors.hpp"
#include "cssball/io.hpp"
#include "cssball/limit.hpp"
#include "cssball/linearized.hpp"
#include "cssball/params.hpp"
#include "cssball/radial.hpp"
#include "cssball/soliton.hpp"

namespace cssball::cli {

using io::json;

enum ExitCode : int { kSuccess = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"thresholds", "roots", "soliton", "spectrum",
                                          "scan",       "solve", "sweep"};
  return c;
}

struct RunConfig {
  std::string command;
  Params params;
  bool omega_given = false;
  // Sweep lists; single-valued commands use the first entry.
  std::vector<double> p_list{2.0};
  std::vector<double> omega_list{0.05};
  std::vector<double> radius_list{80.0};
  double radius = 80.0;
  std::optional<std::size_t> nodes;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::map<std::string, double> tolerances;
  int max_iter = 20000;
  std::string branch = "k2";
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  double p_min = 1.05;
  double p_max = 2.95;
  std::optional<std::size_t> samples;  // thresholds: 50, scan: 64
  std::string svg;
  bool with_solve = false;

  double tol() const { return tolerances.at("tol"); }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& cell : io::detail::split(text, ',')) {
    char* end = nullptr;
    const double x = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
      throw UsageError(flag + ": not a number: '" + cell + "'");
    }
    out.push_back(x);
  }
  return out;
}

inline double default_tol(const std::string& command) {
  return command == "spectrum" ? 1e-9 : 1e-8;
}

inline std::string default_format(const std::string& command) {
  if (command == "roots" || command == "spectrum" || command == "solve") return "json";
  return "csv";
}

}  // namespace detail

/// Parses argv; `--config FILE` supplies flat key=value defaults that
/// command-line flags override. Every value is validated here, so invalid
/// configurations fail before any computation. Throws UsageError.
inline RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Radial gauged Schroedinger solver on a ball", "cssball"};
  RunConfig cfg;
  std::string p_text = "2";
  std::string omega_text;
  std::string radius_text = "80";
  std::size_t nodes = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double tol = 0.0;
  std::size_t samples = 0;

  app.add_option("command", cfg.command, "thresholds|roots|soliton|spectrum|scan|solve|sweep")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--p", p_text, "exponent p in (1,3); comma list for sweep");
  auto* omega_opt = app.add_option("--omega", omega_text, "frequency omega > 0; comma list for sweep");
  app.add_option("--radius", radius_text, "ball radius R; comma list for sweep");
  auto* nodes_opt = app.add_option("--nodes", nodes, "interior grid nodes");
  auto* alpha_opt = app.add_option("--alpha", alpha, "inner exponent of the scan interval");
  auto* beta_opt = app.add_option("--beta", beta, "outer exponent of the scan interval");
  auto* tol_opt = app.add_option("--tol", tol, "solver tolerance");
  app.add_option("--max-iter", cfg.max_iter, "iteration cap");
  app.add_option("--branch", cfg.branch, "limit root: k1|k2|k0")
      ->check(CLI::IsMember({"k1", "k2", "k0"}));
  app.add_option("--out", cfg.out, "output path (stdout when omitted)");
  app.add_option("--format", cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", cfg.seed, "seed for randomized starts");
  app.add_option("--p-min", cfg.p_min, "thresholds: smallest p");
  app.add_option("--p-max", cfg.p_max, "thresholds: largest p");
  auto* samples_opt = app.add_option("--samples", samples, "thresholds: number of p values; scan: rho samples");
  app.add_option("--svg", cfg.svg, "thresholds/scan: also write an SVG plot");
  app.add_flag("--with-solve", cfg.with_solve, "sweep: also run the full solve");
  app.set_config("--config", "", "flat key=value file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const bool sweep = cfg.command == "sweep";
  cfg.p_list = detail::parse_list(p_text, "--p");
  cfg.omega_given = omega_opt->count() > 0;
  cfg.omega_list = cfg.omega_given ? detail::parse_list(omega_text, "--omega")
                                   : std::vector<double>{0.05};
  cfg.radius_list = detail::parse_list(radius_text, "--radius");
  if (!sweep && (cfg.p_list.size() != 1 || cfg.omega_list.size() != 1 ||
                 cfg.radius_list.size() != 1)) {
    throw UsageError("lists for --p/--omega/--radius are only accepted by sweep");
  }
  cfg.params = {cfg.p_list.front(), cfg.omega_list.front()};
  cfg.radius = cfg.radius_list.front();
  if (nodes_opt->count()) cfg.nodes = nodes;
  if (alpha_opt->count()) cfg.alpha = alpha;
  if (beta_opt->count()) cfg.beta = beta;
  if (samples_opt->count()) cfg.samples = samples;
  cfg.tolerances["tol"] = tol_opt->count() ? tol : detail::default_tol(cfg.command);
  if (cfg.format.empty()) cfg.format = detail::default_format(cfg.command);

  try {
    for (double p : cfg.p_list) require_exponent(p);
    for (double w : cfg.omega_list) require_positive(w, "omega");
    for (double R : cfg.radius_list) require_positive(R, "radius");
    require_positive(cfg.tol(), "tol");
    if (cfg.max_iter <= 0) throw UsageError("--max-iter must be positive");
    if (cfg.nodes && *cfg.nodes < radial::Grid::kMinNodes) {
      throw UsageError("--nodes must be at least " + std::to_string(radial::Grid::kMinNodes));
    }
    if (cfg.command == "thresholds") {
      require_exponent(cfg.p_min);
      require_exponent(cfg.p_max);
      if (!(cfg.p_min < cfg.p_max)) throw UsageError("--p-min must be below --p-max");
      if (cfg.samples && *cfg.samples < 2) throw UsageError("--samples must be at least 2");
    }
    if (cfg.command == "scan" && cfg.samples && *cfg.samples < 3) throw UsageError("--samples must be at least 3");
    if (cfg.alpha || cfg.beta) {
      for (double p : cfg.p_list) {
        const double a = cfg.alpha.value_or(driver::default_alpha(p));
        driver::validate_exponents(p, a, cfg.beta.value_or(driver::default_beta(p, a)));
      }
    }
    const bool needs_pair = cfg.command == "scan" || cfg.command == "solve" ||
                            (cfg.command == "spectrum" && cfg.branch != "k0");
    if (needs_pair) {
      const double m = soliton::compute_m(cfg.params.p).m;
      const double omega1 = limit::thresholds(cfg.params.p, m).omega1;
      if (!(cfg.params.omega < omega1)) {
        throw UsageError("omega must be below omega1 = " + io::format_double(omega1) +
                         " for two limit roots");
      }
    }
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

/// Main artifact plus companions (extension, text) written next to --out.
struct Artifact {
  std::string text;
  std::vector<std::pair<std::string, std::string>> companions;
  int exit_code = kSuccess;
};

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

inline Artifact run_thresholds(const RunConfig& cfg) {
  io::Table t{{"p", "m", "omega0", "omega1"}, {}};
  json rows = json::array();
  io::Series s0{"omega0", {}, {}};
  io::Series s1{"omega1", {}, {}};
  const std::size_t samples = cfg.samples.value_or(50);
  for (std::size_t i = 0; i < samples; ++i) {
    const double p = i + 1 == samples
                         ? cfg.p_max
                         : cfg.p_min + (cfg.p_max - cfg.p_min) * static_cast<double>(i) /
                                           static_cast<double>(samples - 1);
    const double m = soliton::compute_m(p).m;
    const auto th = limit::thresholds(p, m);
    t.add_numbers({p, m, th.omega0, th.omega1});
    rows.push_back({{"p", p}, {"m", m}, {"omega0", th.omega0}, {"omega1", th.omega1}});
    s0.x.push_back(p);
    s0.y.push_back(th.omega0);
    s1.x.push_back(p);
    s1.y.push_back(th.omega1);
  }
  Artifact a;
  a.text = cfg.format == "csv" ? io::to_csv(t) : io::to_json_text(json{{"rows", rows}});
  if (!cfg.svg.empty()) io::write_file(cfg.svg, io::svg_plot("thresholds", "p", {s0, s1}));
  return a;
}

inline Artifact run_roots(const RunConfig& cfg) {
  const double p = cfg.params.p;
  const double m = soliton::compute_m(p).m;
  const auto th = limit::thresholds(p, m);
  const auto r = limit::solve_k(cfg.params, m);
  Artifact a;
  if (cfg.format == "json") {
    a.text = io::to_json_text({{"p", p},
                               {"omega", cfg.params.omega},
                               {"m", m},
                               {"omega0", th.omega0},
                               {"omega1", th.omega1},
                               {"kind", std::string(limit::to_string(r.kind))},
                               {"k1", io::number(r.k1)},
                               {"k2", io::number(r.k2)},
                               {"residual", r.residual}});
  } else {
    io::Table t{{"p", "omega", "m", "omega0", "omega1", "kind", "k1", "k2", "residual"}, {}};
    t.add({io::format_double(p), io::format_double(cfg.params.omega), io::format_double(m),
           io::format_double(th.omega0), io::format_double(th.omega1),
           std::string(limit::to_string(r.kind)), io::format_double(r.k1),
           io::format_double(r.k2), io::format_double(r.residual)});
    a.text = io::to_csv(t);
  }
  return a;
}

// k of the requested branch; k0 ignores omega and sits at omega1.
inline std::pair<double, double> branch_k(const RunConfig& cfg, double m) {
  const double p = cfg.params.p;
  if (cfg.branch == "k0") {
    const double omega1 = limit::thresholds(p, m).omega1;
    return {limit::critical_k(p, m), omega1};
  }
  const auto r = limit::solve_k(cfg.params, m);
  if (r.kind == limit::LimitRoots::Kind::none) {
    throw UsageError("omega above omega1: no limit roots");
  }
  return {cfg.branch == "k1" ? r.k1 : r.k2, cfg.params.omega};
}

inline Artifact run_soliton(const RunConfig& cfg) {
  const double p = cfg.params.p;
  const auto c = soliton::compute_m(p);
  double k = 1.0;
  double omega = cfg.params.omega;
  if (cfg.omega_given || cfg.branch == "k0") std::tie(k, omega) = branch_k(cfg, c.m);
  const auto s = soliton::soliton_integrals(p, k, c);
  const double X = 20.0 / std::sqrt(k);
  const std::size_t count = cfg.nodes.value_or(801);
  Artifact a;
  if (cfg.format == "json") {
    json j{{"p", p},
           {"k", k},
           {"m", c.m},
           {"kinetic_ratio", c.kinetic_ratio},
           {"potential_ratio", c.potential_ratio},
           {"mass", s.mass},
           {"kinetic", s.kinetic},
           {"potential", s.potential},
           {"tail_amplitude", soliton::tail_amplitude(p, k)}};
    if (cfg.omega_given || cfg.branch == "k0") {
      j["omega"] = omega;
      j["branch"] = cfg.branch;
      j["J"] = limit::J_closed(p, omega, k, c);
    }
    a.text = io::to_json_text(j);
  } else {
    io::Table t{{"x", "w", "w_prime"}, {}};
    const double h = 2.0 * X / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
      const double x = -X + h * static_cast<double>(i);
      t.add_numbers({x, soliton::wk(p, k, x), soliton::wk_prime(p, k, x)});
    }
    a.text = io::to_csv(t);
  }
  return a;
}

inline Artifact run_spectrum(const RunConfig& cfg) {
  const double p = cfg.params.p;
  const double m = soliton::compute_m(p).m;
  const auto [k, omega] = branch_k(cfg, m);
  const auto grid = linearized::LineGrid::for_soliton(k, cfg.nodes.value_or(2000));
  const auto op = linearized::assemble_L(p, omega, k, grid);
  linearized::SpectrumOptions opt;
  opt.tol = cfg.tol();
  opt.seed = cfg.seed;
  opt.max_iter = cfg.max_iter;
  const auto rep = linearized::coercivity_constant(op, opt);
  const auto phi = linearized::degenerate_direction(p, k, grid);
  const double cosine = linearized::mesh_cosine(grid, phi, rep.lowest_vector);
  Artifact a;
  if (cfg.format == "json") {
    a.text = io::to_json_text({{"p", p},
                               {"omega", omega},
                               {"branch", cfg.branch},
                               {"k", k},
                               {"nodes", grid.n},
                               {"half_width", grid.half_width},
                               {"eigenvalues", io::numbers(rep.eigenvalues)},
                               {"coercivity", rep.coercivity},
                               {"degenerate", rep.degenerate},
                               {"threshold", rep.threshold},
                               {"method", rep.method},
                               {"translation_residual", op.translation_residual},
                               {"coarse_grid_warning", op.coarse_warning},
                               {"degenerate_direction_cosine", cosine}});
  } else {
    io::Table t{{"index", "eigenvalue"}, {}};
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
      t.add({std::to_string(i), io::format_double(rep.eigenvalues[i])});
    }
    a.text = io::to_csv(t);
  }
  if (op.coarse_warning) {
    std::fprintf(stderr, "warning: grid too coarse, translation residual %.3g\n",
                 op.translation_residual);
  }
  return a;
}

inline radial::Grid radial_grid(const RunConfig& cfg, double R) {
  return cfg.nodes ? radial::Grid(R, *cfg.nodes) : radial::default_grid(R);
}

inline driver::ScanConfig scan_config(const RunConfig& cfg) {
  driver::ScanConfig sc;
  sc.alpha = cfg.alpha;
  sc.beta = cfg.beta;
  if (cfg.samples) sc.samples = *cfg.samples;
  return sc;
}

inline json scan_summary(const driver::ScanResult& s) {
  return {{"R", s.R},
          {"k2", s.k2},
          {"J", s.J},
          {"alpha", s.alpha},
          {"beta", s.beta},
          {"interval", {s.interval.lo, s.interval.hi}},
          {"rho_star", s.rho_star},
          {"phi_star", s.phi_star},
          {"on_boundary", s.on_boundary},
          {"model_rho_star", io::number(s.model_rho_star)},
          {"max_relative_error", s.max_relative_error}};
}

inline io::Table scan_table(const driver::ScanResult& s) {
  io::Table t{{"rho", "phi", "model_phi"}, {}};
  for (std::size_t i = 0; i < s.rho_grid.size(); ++i) {
    t.add_numbers({s.rho_grid[i], s.phi[i], s.model_phi[i]});
  }
  return t;
}

inline Artifact run_scan(const RunConfig& cfg) {
  const auto grid = radial_grid(cfg, cfg.radius);
  const auto s = driver::reduced_scan(cfg.params, grid, scan_config(cfg));
  json summary = scan_summary(s);
  summary["p"] = cfg.params.p;
  summary["omega"] = cfg.params.omega;
  summary["nodes"] = grid.n();
  Artifact a;
  if (cfg.format == "csv") {
    a.text = io::to_csv(scan_table(s));
    a.companions.push_back({".json", io::to_json_text(summary)});
  } else {
    summary["rho"] = io::numbers(s.rho_grid);
    summary["phi"] = io::numbers(s.phi);
    summary["model_phi"] = io::numbers(s.model_phi);
    a.text = io::to_json_text(summary);
  }
  if (s.on_boundary) {
    std::fprintf(stderr, "warning: reduced-energy minimum on the boundary of the scan interval\n");
  }
  if (!cfg.svg.empty()) {
    io::write_file(cfg.svg, io::svg_plot("reduced energy", "rho",
                                         {{"phi", s.rho_grid, s.phi},
                                          {"model", s.rho_grid, s.model_phi}}));
  }
  return a;
}

inline json solve_summary(const driver::SolveReport& r) {
  return {{"converged", r.converged},
          {"status", r.status},
          {"grad_norm", r.grad_norm},
          {"iterations", r.iterations},
          {"newton_iterations", r.newton_iterations},
          {"positive", r.positive},
          {"min_u", r.min_u},
          {"max_u", r.max_u},
          {"rho_fit", r.rho_fit},
          {"profile_error", io::number(r.profile_error)},
          {"energy",
           {{"total", r.energy.total},
            {"kinetic", r.energy.kinetic},
            {"mass", r.energy.mass},
            {"nonlocal", r.energy.nonlocal},
            {"potential", r.energy.potential}}}};
}

inline driver::SolveOptions solve_options(const RunConfig& cfg) {
  driver::SolveOptions opt;
  opt.tol = cfg.tol();
  opt.max_iter = cfg.max_iter;
  return opt;
}

inline Artifact run_solve(const RunConfig& cfg) {
  const auto grid = radial_grid(cfg, cfg.radius);
  const auto res = driver::scan_and_solve(cfg.params, grid, scan_config(cfg), solve_options(cfg));
  const auto& r = res.solve;
  json j = solve_summary(r);
  j["p"] = cfg.params.p;
  j["omega"] = cfg.params.omega;
  j["R"] = grid.R();
  j["nodes"] = grid.n();
  j["rho_predicted"] = grid.R() - std::log(grid.R()) / (2.0 * std::sqrt(res.scan.k2));
  j["scan"] = scan_summary(res.scan);
  const std::string field = io::to_csv(io::field_table(r.field));
  Artifact a;
  if (cfg.format == "json") {
    a.text = io::to_json_text(j);
    a.companions.push_back({".csv", field});
  } else {
    a.text = field;
    a.companions.push_back({".json", io::to_json_text(j)});
  }
  if (!r.converged) {
    std::fprintf(stderr, "solve did not converge (%s): weighted gradient norm %.3g\n",
                 r.status.c_str(), r.grad_norm);
    a.exit_code = kNumerical;
  }
  return a;
}

inline Artifact run_sweep(const RunConfig& cfg) {
  driver::SweepSpec spec;
  spec.p = cfg.p_list;
  spec.omega = cfg.omega_list;
  spec.radius = cfg.radius_list;
  spec.run_solve = cfg.with_solve;
  spec.scan = scan_config(cfg);
  spec.solve = solve_options(cfg);
  const auto cells = driver::sweep(spec);
  Artifact a;
  if (cfg.format == "json") {
    json rows = json::array();
    for (const auto& c : cells) {
      json j{{"p", c.p}, {"omega", c.omega}, {"R", c.R}, {"ok", c.ok}, {"error", c.error}};
      if (c.scan) j["scan"] = scan_summary(*c.scan);
      if (c.solve) j["solve"] = solve_summary(*c.solve);
      rows.push_back(std::move(j));
    }
    a.text = io::to_json_text(json{{"cells", rows}});
    return a;
  }
  io::Table t{{"p", "omega", "R", "ok", "k2", "J", "rho_star", "on_boundary", "model_rho_star",
               "max_relative_error", "converged", "grad_norm", "energy", "rho_fit",
               "profile_error", "positive", "error"},
              {}};
  const double nan = std::nan("");
  for (const auto& c : cells) {
    auto f = io::format_double;
    std::vector<std::string> row{f(c.p), f(c.omega), f(c.R), c.ok ? "1" : "0"};
    if (c.scan) {
      const auto& s = *c.scan;
      for (double x : {s.k2, s.J, s.rho_star}) row.push_back(f(x));
      row.push_back(s.on_boundary ? "1" : "0");
      row.push_back(f(s.model_rho_star));
      row.push_back(f(s.max_relative_error));
    } else {
      for (int i = 0; i < 6; ++i) row.push_back(f(nan));
    }
    if (c.solve) {
      const auto& r = *c.solve;
      row.push_back(r.converged ? "1" : "0");
      for (double x : {r.grad_norm, r.energy.total, r.rho_fit, r.profile_error}) row.push_back(f(x));
      row.push_back(r.positive ? "1" : "0");
    } else {
      row.push_back("");
      for (int i = 0; i < 4; ++i) row.push_back(f(nan));
      row.push_back("");
    }
    row.push_back(csv_quote(c.error));
    t.add(std::move(row));
  }
  a.text = io::to_csv(t);
  return a;
}

}  // namespace detail

inline Artifact dispatch(const RunConfig& cfg) {
  if (cfg.command == "thresholds") return detail::run_thresholds(cfg);
  if (cfg.command == "roots") return detail::run_roots(cfg);
  if (cfg.command == "soliton") return detail::run_soliton(cfg);
  if (cfg.command == "spectrum") return detail::run_spectrum(cfg);
  if (cfg.command == "scan") return detail::run_scan(cfg);
  if (cfg.command == "solve") return detail::run_solve(cfg);
  if (cfg.command == "sweep") return detail::run_sweep(cfg);
  throw UsageError("unknown command " + cfg.command);
}

inline void emit(const Artifact& a, const std::string& out, std::ostream& stdout_stream) {
  if (out.empty()) {
    stdout_stream << a.text;
    return;
  }
  io::write_file(out, a.text);
  for (const auto& [ext, text] : a.companions) io::write_file(io::companion(out, ext), text);
}

/// Full command-line entry point; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  try {
    const RunConfig cfg = parse_config(argc, argv);
    const Artifact a = dispatch(cfg);
    emit(a, cfg.out, out);
    return a.exit_code;
  } catch (const CLI::CallForHelp&) {
    out << "usage: cssball <command> [--p P] [--omega W] [--radius R] [--nodes N]\n"
           "               [--alpha A] [--beta B] [--tol T] [--max-iter K] [--branch k1|k2|k0]\n"
           "               [--out PATH] [--format csv|json] [--seed S] [--config FILE]\n"
           "               [--p-min P] [--p-max P] [--samples N] [--svg PATH] [--with-solve]\n"
           "commands: thresholds roots soliton spectrum scan solve sweep\n";
    return kSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace cssball::cli
