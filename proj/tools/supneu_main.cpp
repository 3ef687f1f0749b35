// Batch front end: reads a single JSON config, assembles the problem, runs
// one of the subcommands, and emits CSV/JSON artifacts. Reruns with the same
// config produce byte-identical files (timings go to the console only).

#include <cstdio>
#include <cstdlib>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "supneu/cone.hpp"
#include "supneu/convex.hpp"
#include "supneu/domain.hpp"
#include "supneu/elliptic.hpp"
#include "supneu/energy.hpp"
#include "supneu/json_io.hpp"
#include "supneu/solver.hpp"
#include "supneu/verify.hpp"
#include "supneu/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace supneu;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON (" + path + "): " + e.what());
  }
  return cfg;
}

// Apply one "dotted.path=value" override; the value is parsed as JSON when
// possible and kept as a string otherwise.
void apply_override(json& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like path.to.key=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &cfg;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty()) throw ConfigError("empty key in override path: " + spec);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

template <class T>
T require(const json& j, const std::string& section, const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("config section '" + section + "' is missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + section + "." + key + "': " + e.what());
  }
}

template <class T>
T optional_or(const json& j, const std::string& section, const std::string& key,
              T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + section + "." + key + "': " + e.what());
  }
}

RevolutionSpec spec_from(const json& cfg) {
  if (!cfg.contains("domain")) throw ConfigError("config is missing 'domain'");
  const auto n = require<std::vector<int>>(cfg.at("domain"), "domain", "n");
  try {
    return make_spec(n);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("domain.n: ") + e.what());
  }
}

GridPtr grid_from(const json& cfg, const RevolutionSpec& spec) {
  if (!cfg.contains("grid")) throw ConfigError("config is missing 'grid'");
  const auto cells = require<std::vector<int>>(cfg.at("grid"), "grid", "cells");
  try {
    return make_grid(spec, cells);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid.cells: ") + e.what());
  }
}

double eps_from(const json& cfg) {
  const double eps = optional_or(cfg.at("grid"), "grid", "eps", 0.0);
  if (eps < 0) throw ConfigError("grid.eps must be >= 0");
  return eps;
}

Nonlinearity nonlinearity_from(const json& cfg) {
  if (!cfg.contains("nonlinearity"))
    throw ConfigError("config is missing 'nonlinearity'");
  const json& nj = cfg.at("nonlinearity");
  const auto type = require<std::string>(nj, "nonlinearity", "type");
  try {
    if (type == "power") {
      return make_power(require<double>(nj, "nonlinearity", "p"));
    }
    if (type == "tabulated") {
      return load_tabulated(require<std::string>(nj, "nonlinearity", "table_path"),
                            require<double>(nj, "nonlinearity", "p"),
                            require<double>(nj, "nonlinearity", "mu"),
                            require<double>(nj, "nonlinearity", "ell"),
                            require<double>(nj, "nonlinearity", "growth_C"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("nonlinearity: ") + e.what());
  }
  throw ConfigError("nonlinearity.type must be 'power' or 'tabulated', got '" +
                    type + "'");
}

GridFunction weight_from(const json& cfg, GridPtr grid) {
  if (!cfg.contains("weight_a")) throw ConfigError("config is missing 'weight_a'");
  const json& wj = cfg.at("weight_a");
  const auto type = require<std::string>(wj, "weight_a", "type");
  if (type == "constant") {
    const double v = require<double>(wj, "weight_a", "value");
    return make_constant(grid, v);
  }
  if (type == "radial_power") {
    const double alpha = require<double>(wj, "weight_a", "alpha");
    if (alpha < 0) throw ConfigError("weight_a.alpha must be >= 0");
    return sample(grid, [alpha](std::span<const double> t) {
      double r2 = 0.0;
      for (double x : t) r2 += x * x;
      return std::pow(r2, 0.5 * alpha);
    });
  }
  if (type == "separable") {
    const auto factors =
        require<std::vector<std::vector<double>>>(wj, "weight_a", "factors");
    if (static_cast<int>(factors.size()) != grid->m())
      throw ConfigError("weight_a.factors needs one coefficient list per axis");
    for (const auto& f : factors)
      if (f.empty())
        throw ConfigError("weight_a.factors entries must be non-empty");
    return sample(grid, [&factors](std::span<const double> t) {
      double prod = 1.0;
      for (std::size_t k = 0; k < factors.size(); ++k) {
        double acc = 0.0;
        for (std::size_t d = factors[k].size(); d-- > 0;)
          acc = acc * t[k] + factors[k][d];
        prod *= acc;
      }
      return prod;
    });
  }
  if (type == "csv") {
    const auto path = require<std::string>(wj, "weight_a", "path");
    try {
      return read_csv(grid, path);
    } catch (const std::exception& e) {
      throw ConfigError("weight_a.path: " + std::string(e.what()));
    }
  }
  throw ConfigError(
      "weight_a.type must be one of constant|radial_power|separable|csv, got '" +
      type + "'");
}

SolverConfig solver_from(const json& cfg) {
  SolverConfig sc;
  if (!cfg.contains("solver")) return sc;
  const json& sj = cfg.at("solver");
  const auto method = optional_or<std::string>(sj, "solver", "method", "fixed_point");
  if (method == "fixed_point") {
    sc.method = SolveMethod::FixedPoint;
  } else if (method == "mountain_pass") {
    sc.method = SolveMethod::MountainPass;
  } else {
    throw ConfigError("solver.method must be fixed_point or mountain_pass, got '" +
                      method + "'");
  }
  sc.tol_residual = optional_or(sj, "solver", "tol_residual", sc.tol_residual);
  sc.tol_step = optional_or(sj, "solver", "tol_step", sc.tol_step);
  sc.max_outer = optional_or(sj, "solver", "max_outer", sc.max_outer);
  sc.linear_tol = optional_or(sj, "solver", "linear_tol", sc.linear_tol);
  sc.linear_max_iter = optional_or(sj, "solver", "linear_max_iter", sc.linear_max_iter);
  sc.path_samples = optional_or(sj, "solver", "path_samples", sc.path_samples);
  sc.descent_step = optional_or(sj, "solver", "descent_step", sc.descent_step);
  sc.seed = optional_or(sj, "solver", "seed", sc.seed);
  return sc;
}

fs::path output_dir_from(const json& cfg, const std::string& flag_override) {
  std::string dir = "out";
  if (cfg.contains("output"))
    dir = optional_or<std::string>(cfg.at("output"), "output", "dir", dir);
  if (const char* env = std::getenv("SUPNEU_OUTPUT_DIR"); env && *env) dir = env;
  if (!flag_override.empty()) dir = flag_override;
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory " + p.string() +
                            ": " + ec.message());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json base_report(const json& cfg) {
  return json{{"version", kVersion}, {"config", cfg}};
}

void write_history_csv(const fs::path& path, const SolveReport& rep) {
  std::ostringstream out;
  out << "iteration,residual,energy,cone_violation\n";
  const std::size_t n = rep.residual_history.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double e =
        i < rep.energy_history.size() ? rep.energy_history[i]
                                      : std::numeric_limits<double>::quiet_NaN();
    const double c = i < rep.cone_violation_history.size()
                         ? rep.cone_violation_history[i]
                         : std::numeric_limits<double>::quiet_NaN();
    out << i << ',' << num(rep.residual_history[i]) << ',' << num(e) << ','
        << num(c) << '\n';
  }
  write_text(path, out.str());
}

// Axis-aligned slices through the center of the other axes, for plotting.
void write_slices(const fs::path& dir, const GridFunction& u) {
  const Grid& g = *u.grid;
  if (g.m() < 2) return;
  for (int k = 0; k < g.m(); ++k) {
    std::ostringstream out;
    out << "t" << (k + 1) << ",value\n";
    std::vector<int> idx(g.m());
    for (int j = 0; j < g.m(); ++j) idx[j] = g.cells[j] / 2;
    for (int i = 0; i < g.cells[k]; ++i) {
      idx[k] = i;
      out << num(g.center(k, i)) << ','
          << num(u[g.index_of(std::span<const int>(idx.data(), idx.size()))])
          << '\n';
    }
    write_text(dir / ("slice_axis" + std::to_string(k + 1) + ".csv"), out.str());
  }
}

int run_solve(const json& cfg, const fs::path& outdir) {
  const RevolutionSpec spec = spec_from(cfg);
  GridPtr grid = grid_from(cfg, spec);
  const double eps = eps_from(cfg);
  const Nonlinearity nl = nonlinearity_from(cfg);
  const GridFunction a = weight_from(cfg, grid);
  const bool allow_super =
      optional_or(cfg.contains("solver") ? cfg.at("solver") : json::object(),
                  "solver", "allow_supercritical", true);
  Problem pb;
  try {
    pb = make_problem(grid, a, nl, eps, allow_super);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("problem assembly: ") + e.what());
  }
  const SolverConfig sc = solver_from(cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport rep = sc.method == SolveMethod::FixedPoint
                              ? fixed_point_solve(pb, sc)
                              : mountain_pass_solve(pb, sc);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_csv(rep.u, (outdir / "solution.csv").string());
  write_history_csv(outdir / "history.csv", rep);
  write_slices(outdir, rep.u);

  json out = base_report(cfg);
  out["solve"] = rep;
  out["solve"]["norm_Ym_eps0"] = norm_Ym(rep.u, 0.0);
  if (eps > 0.0) out["solve"]["norm_Ym_eps"] = norm_Ym(rep.u, eps);
  out["solve"]["sup_norm"] = max_abs(rep.u);
  const EnergyReport er = eval_I(pb, rep.u);
  out["energy"] = er;
  write_json(outdir / "report.json", out);

  std::printf("solve: %s after %d iterations, residual %.3e, %.2fs; wrote %s\n",
              rep.converged ? "converged" : "NOT converged",
              rep.outer_iterations, rep.final_residual, elapsed,
              outdir.string().c_str());
  if (!rep.converged && !rep.message.empty())
    std::printf("  %s\n", rep.message.c_str());
  return rep.converged ? 0 : 1;
}

int run_verify(const json& cfg, const fs::path& outdir) {
  const RevolutionSpec spec = spec_from(cfg);
  GridPtr grid = grid_from(cfg, spec);
  const Nonlinearity nl = nonlinearity_from(cfg);
  const std::uint64_t seed =
      optional_or(cfg.contains("verify") ? cfg.at("verify") : json::object(),
                  "verify", "seed", std::uint64_t{12345});
  const VerificationSuiteReport rep = run_suite(nl, spec, grid->cells, seed);
  json out = base_report(cfg);
  out["verify"] = rep;
  write_json(outdir / "verify_report.json", out);
  for (const auto& c : rep.checks)
    std::printf("%-28s %s  slack %.3e  (%s)\n", c.name.c_str(),
                c.pass ? "pass" : "FAIL", c.slack, c.detail.c_str());
  std::printf("verify: %s; wrote %s\n", rep.overall() ? "all checks pass" : "FAILED",
              (outdir / "verify_report.json").string().c_str());
  return rep.overall() ? 0 : 1;
}

int run_conjugate(const json& cfg, const fs::path& outdir) {
  const Nonlinearity nl = nonlinearity_from(cfg);
  const json cj = cfg.contains("conjugate") ? cfg.at("conjugate") : json::object();
  const double t_max = optional_or(
      cj, "conjugate", "t_max",
      nl.kind == NonlinKind::Power ? 10.0 : nl.t_nodes.back());
  const int rows = optional_or(cj, "conjugate", "rows", 257);
  if (!(t_max > 0) || rows < 2)
    throw ConfigError("conjugate.t_max must be > 0 and conjugate.rows >= 2");
  const double s_max = eval_f(nl, t_max);
  std::ostringstream out;
  out << "t,F,s,Fstar,Fstar_prime\n";
  for (int i = 0; i < rows; ++i) {
    const double t = t_max * i / (rows - 1);
    const double s = s_max * i / (rows - 1);
    out << num(t) << ',' << num(eval_F(nl, t)) << ',' << num(s) << ','
        << num(eval_Fstar(nl, s)) << ',' << num(eval_Fstar_prime(nl, s)) << '\n';
  }
  write_text(outdir / "conjugate.csv", out.str());
  std::printf("conjugate: wrote %s (%d rows)\n",
              (outdir / "conjugate.csv").string().c_str(), rows);
  return 0;
}

int run_embed_check(const json& cfg, const fs::path& outdir) {
  const RevolutionSpec spec = spec_from(cfg);
  GridPtr grid = grid_from(cfg, spec);
  const json ej = cfg.contains("embed") ? cfg.at("embed") : json::object();
  const double q = optional_or(ej, "embed", "q", 4.0);
  const int samples = optional_or(ej, "embed", "samples", 32);
  const std::uint64_t seed = optional_or(ej, "embed", "seed", std::uint64_t{12345});
  if (!(q >= 1.0) || samples < 1)
    throw ConfigError("embed.q must be >= 1 and embed.samples >= 1");
  const double qcrit = spec.critical_exponent();
  if (q >= qcrit)
    std::printf("note: q = %g is at or beyond the critical exponent %g\n", q, qcrit);
  const CheckResult res = embedding_ratio_scan(grid, q, samples, seed);
  json out = base_report(cfg);
  out["embed"] = res;
  write_json(outdir / "embed_report.json", out);
  std::printf("embed-check: %s, slack %.3e (%s); wrote %s\n",
              res.pass ? "pass" : "FAIL", res.slack, res.detail.c_str(),
              (outdir / "embed_report.json").string().c_str());
  return res.pass ? 0 : 1;
}

int run_manufactured(const json& cfg, const fs::path& outdir) {
  const json mj =
      cfg.contains("manufactured") ? cfg.at("manufactured") : json::object();
  const auto resolutions = optional_or(mj, "manufactured", "resolutions",
                                       std::vector<int>{64, 128, 256});
  if (resolutions.size() < 2)
    throw ConfigError("manufactured.resolutions needs at least two entries");
  for (int s : resolutions)
    if (s < 2) throw ConfigError("manufactured.resolutions entries must be >= 2");
  const ManufacturedStudy st = manufactured_convergence_study(resolutions);
  json out = base_report(cfg);
  out["manufactured"] = st;
  write_json(outdir / "manufactured.json", out);
  for (std::size_t i = 0; i < st.resolutions.size(); ++i) {
    std::printf("cells %6d  sup error %.6e", st.resolutions[i], st.sup_errors[i]);
    if (i > 0) std::printf("  order %.3f", st.orders[i - 1]);
    std::printf("\n");
  }
  std::printf("manufactured: observed orders %s the second-order window; wrote %s\n",
              st.pass ? "inside" : "OUTSIDE",
              (outdir / "manufactured.json").string().c_str());
  return st.pass ? 0 : 1;
}

int dispatch(const std::string& sub, const json& cfg, const fs::path& outdir) {
  if (sub == "solve") return run_solve(cfg, outdir);
  if (sub == "verify") return run_verify(cfg, outdir);
  if (sub == "conjugate") return run_conjugate(cfg, outdir);
  if (sub == "embed-check") return run_embed_check(cfg, outdir);
  if (sub == "manufactured") return run_manufactured(cfg, outdir);
  throw ConfigError("unknown subcommand: " + sub);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) +
               " — monotone positive solutions of a weighted Neumann problem "
               "on the unit cube"};
  app.require_subcommand(1);
  std::string config_path, outdir_flag;
  std::vector<std::string> overrides;

  const std::vector<std::string> names = {"solve", "verify", "conjugate",
                                          "embed-check", "manufactured"};
  const std::vector<std::string> descs = {
      "run the configured solver and write solution.csv / report.json",
      "run the verification suite and write verify_report.json",
      "tabulate F, its conjugate, and the conjugate's derivative to CSV",
      "scan the norm-ratio boundedness across two grid refinements",
      "run the built-in manufactured-solution convergence study"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("config", config_path, "path to the JSON config")->required();
    sub->add_option("--set", overrides,
                    "override a config value by dotted path, e.g. "
                    "--set solver.tol_residual=1e-8");
    sub->add_option("--output-dir", outdir_flag,
                    "output directory (overrides config and environment)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    json cfg = load_config(config_path);
    if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& o : overrides) apply_override(cfg, o);
    const fs::path outdir = output_dir_from(cfg, outdir_flag);
    return dispatch(app.get_subcommands().front()->get_name(), cfg, outdir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
