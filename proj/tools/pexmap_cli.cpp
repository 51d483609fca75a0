// Command-line front end: every pipeline as a subcommand with text I/O.

#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "pexmap/config.hpp"
#include "pexmap/errors.hpp"
#include "pexmap/response.hpp"

namespace {

using namespace pexmap;

std::string g_out_dir = ".";

void write_file(const std::string& name, const std::string& body) {
  std::string path = g_out_dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << body;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// '#' header block echoing every setting (explicit or default) so the
/// artifact is self-describing.
std::string csv_header(const std::map<std::string, std::string>& settings) {
  std::string h;
  for (const auto& [k, v] : settings) h += "# " + k + "=" + v + "\n";
  return h;
}

const std::set<std::string> kMapKeys = {"family",     "slope",  "code",
                                        "base_slope", "X_poly", "t"};

std::unique_ptr<UnimodalMap> map_from_config(const JobConfig& cfg) {
  return parse_map_spec(cfg.subset(kMapKeys));
}

/// Tent map plus its orbit and saltus decomposition.  A nearly-preperiodic
/// slope (closure residual below snap_tol) is snapped to the exact code
/// parameter so 8-digit inputs like 1.41421356 reach the closed-form path.
struct TentPipeline {
  TentMap g{2.0};
  CriticalOrbitInfo orbit;
  SaltusDecomposition dec;
  std::optional<PiecewiseConstantDensity> rho;  // Markov path only
  bool snapped = false;
};

TentPipeline tent_pipeline(const JobConfig& cfg, int depth, bool allow_snap) {
  std::unique_ptr<UnimodalMap> m = map_from_config(cfg);
  const TentMap* tent = dynamic_cast<const TentMap*>(m.get());
  if (!tent) throw UnsupportedInput("this subcommand needs a tent map");
  TentPipeline p;
  p.g = *tent;
  p.orbit = critical_orbit(p.g, depth);
  double snap_tol = cfg.get_double("snap_tol", 1e-6);
  if (!p.orbit.preperiodic && allow_snap) {
    CriticalOrbitInfo loose = critical_orbit(p.g, depth, snap_tol);
    if (loose.preperiodic) {
      KneadingCode code;
      code.stem.assign(loose.code.begin(), loose.code.begin() + loose.n0 - 1);
      code.tail.assign(loose.code.begin() + loose.n0 - 1,
                       loose.code.begin() + loose.n0 - 1 + loose.n1);
      p.g = TentMap(solve_code_parameter(code));
      p.orbit = critical_orbit(p.g, depth);
      p.snapped = true;
    }
  }
  if (p.orbit.preperiodic) {
    p.rho = invariant_density_exact_tent(p.g, p.orbit);
    p.dec = saltus_decompose(*p.rho, p.orbit);
  } else {
    p.dec = tent_saltus_truncated(p.g, p.orbit);
  }
  return p;
}

Observable phi_from_config(const JobConfig& cfg) {
  return parse_observable(cfg.get("phi", "bump6"));
}

Perturbation x_from_config(const JobConfig& cfg) {
  return parse_perturbation(cfg.get("X", "0,1"));
}

double rho0_phi(const TentPipeline& p, const Observable& phi,
                std::size_t bins) {
  if (p.rho) return integrate_observable(*p.rho, phi);
  return p.dec.combined.integral_against([&phi](double x) { return phi(x); });
  (void)bins;
}

std::map<std::string, std::string> base_settings(const JobConfig& cfg) {
  std::map<std::string, std::string> s = cfg.entries();
  return s;
}

// ------------------------------------------------------------- subcommands

int cmd_orbit(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t",
                   "depth", "orbit_tol"});
  std::unique_ptr<UnimodalMap> m = map_from_config(cfg);
  int depth = cfg.get_int("depth", 64);
  double tol = cfg.get_double("orbit_tol", 1e-10);
  CriticalOrbitInfo orbit = critical_orbit(*m, depth, tol);
  auto settings = base_settings(cfg);
  settings["depth"] = std::to_string(depth);
  settings["orbit_tol"] = fmt(tol);
  std::string csv = csv_header(settings) + "j,c_j,symbol\n";
  for (std::size_t j = 0; j < orbit.points.size(); ++j) {
    csv += std::to_string(j + 1) + "," + fmt(orbit.points[j]) + "," +
           static_cast<char>(orbit.code[j]) + "\n";
  }
  write_file("orbit.csv", csv);
  std::printf("orbit: points=%zu preperiodic=%d n0=%d n1=%d residual=%s\n",
              orbit.points.size(), orbit.preperiodic ? 1 : 0, orbit.n0,
              orbit.n1, fmt(orbit.closure_residual).c_str());
  return 0;
}

int cmd_density(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t",
                   "bins", "method", "max_iters", "tol"});
  std::unique_ptr<UnimodalMap> m = map_from_config(cfg);
  std::size_t bins = static_cast<std::size_t>(cfg.get_int("bins", 1 << 14));
  std::string method = cfg.get("method", "ulam");
  auto settings = base_settings(cfg);
  settings["bins"] = std::to_string(bins);
  settings["method"] = method;
  std::string csv = csv_header(settings) + "x,value\n";
  double summary = 0.0;
  if (method == "exact") {
    const TentMap* tent = dynamic_cast<const TentMap*>(m.get());
    if (!tent) throw UnsupportedInput("exact density needs a tent map");
    PiecewiseConstantDensity rho = invariant_density_exact_tent(*tent);
    for (std::size_t i = 0; i < bins; ++i) {
      double x = (static_cast<double>(i) + 0.5) / static_cast<double>(bins);
      csv += fmt(x) + "," + fmt(rho.eval(x)) + "\n";
    }
    write_file("density_exact.json", rho.to_json());
    summary = rho.integral();
  } else if (method == "ulam") {
    UlamDensity rho = invariant_density_ulam(
        *m, bins, cfg.get_int("max_iters", 10000), cfg.get_double("tol", 1e-10));
    for (std::size_t i = 0; i < bins; ++i) {
      double x = rho.lo + rho.bin_width() * (static_cast<double>(i) + 0.5);
      csv += fmt(x) + "," + fmt(rho.values[i]) + "\n";
    }
    summary = rho.integral();
  } else {
    throw ConfigError("density: method must be 'ulam' or 'exact'");
  }
  write_file("density.csv", csv);
  std::printf("density: method=%s bins=%zu integral=%s\n", method.c_str(),
              bins, fmt(summary).c_str());
  return 0;
}

int cmd_decompose(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t", "X",
                   "depth", "snap_tol", "cells"});
  TentPipeline p = tent_pipeline(cfg, cfg.get_int("depth", 64), true);
  Perturbation X = x_from_config(cfg);
  write_file("decompose.json", saltus_to_json(p.dec, X));
  auto settings = base_settings(cfg);
  settings["snapped_slope"] = fmt(p.g.slope());
  write_file("rho_r.csv", csv_header(settings) + p.dec.regular.to_csv());
  std::printf("decompose: jumps=%zu J_of_X=%s J_of_1=%s snapped=%d\n",
              p.dec.count(), fmt(weighted_jump(p.dec, X)).c_str(),
              fmt(weighted_jump(p.dec, Perturbation::one())).c_str(),
              p.snapped ? 1 : 0);
  return 0;
}

int cmd_susceptibility(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t", "X",
                   "phi", "N", "depth", "snap_tol", "bins"});
  TentPipeline p = tent_pipeline(cfg, cfg.get_int("depth", 64), true);
  Perturbation X = x_from_config(cfg);
  Observable phi = phi_from_config(cfg);
  int N = cfg.get_int("N", 256);
  SusceptibilitySeries series =
      coefficients_split(p.g, p.dec, p.orbit, X, phi, N);
  std::optional<double> psi1;
  const MarkovJumpSystem* sys_ptr = nullptr;
  MarkovJumpSystem sys;
  if (p.orbit.preperiodic) {
    sys = markov_extension(p.g, p.dec, p.orbit, X, phi,
                           rho0_phi(p, phi, 1 << 14));
    sys_ptr = &sys;
  }
  write_file("susceptibility.json",
             susceptibility_to_json(series, sys_ptr, psi1));
  std::printf("susceptibility: N=%d a0=%s markov=%d\n", N,
              fmt(series.coefficients.front()).c_str(),
              p.orbit.preperiodic ? 1 : 0);
  return 0;
}

int cmd_residues(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t", "X",
                   "phi", "N", "depth", "snap_tol"});
  TentPipeline p = tent_pipeline(cfg, cfg.get_int("depth", 64), true);
  if (!p.orbit.preperiodic)
    throw NotMarkov("residues: orbit is not preperiodic");
  Perturbation X = x_from_config(cfg);
  Observable phi = phi_from_config(cfg);
  int N = cfg.get_int("N", 1 << 12);
  MarkovJumpSystem sys =
      markov_extension(p.g, p.dec, p.orbit, X, phi, rho0_phi(p, phi, 1 << 14));
  SusceptibilitySeries series =
      coefficients_split(p.g, p.dec, p.orbit, X, phi, N);
  double fitted = residue_fit(series);
  write_file("residues.json",
             susceptibility_to_json(series, &sys, std::nullopt));
  std::printf("residues: residue_at_1=%s fit=%s holomorphic_at_1=%d "
              "fully_holomorphic=%d\n",
              fmt(sys.residue_at_1).c_str(), fmt(fitted).c_str(),
              sys.holomorphic_at_1 ? 1 : 0, sys.fully_holomorphic ? 1 : 0);
  return 0;
}

int cmd_psi1(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t", "X",
                   "phi", "depth", "tol"});
  TentPipeline p = tent_pipeline(cfg, cfg.get_int("depth", 64), false);
  Perturbation X = x_from_config(cfg);
  Observable phi = phi_from_config(cfg);
  double tol = cfg.get_double("tol", 1e-10);
  double v = psi1_nonmarkov(p.g, p.dec, p.orbit, X, phi, tol);
  write_file("psi1.json", "{\"psi1\":" + fmt(v) + "}");
  std::printf("psi1: value=%s\n", fmt(v).c_str());
  return 0;
}

int cmd_regularized(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t",
                   "phi", "depth", "N", "tol", "z"});
  TentPipeline p = tent_pipeline(cfg, cfg.get_int("depth", 64), false);
  Observable phi = phi_from_config(cfg);
  double z = cfg.get_double("z", 1.0);
  RegularizedReport rep = regularized_psi(p.g, p.dec, p.orbit, phi, z,
                                          cfg.get_int("N", 256),
                                          cfg.get_double("tol", 1e-10));
  std::string json = "{\"psi_tilde_re\":" + fmt(rep.value.real()) +
                     ",\"psi_tilde_im\":" + fmt(rep.value.imag()) +
                     ",\"J\":" + fmt(rep.J) + ",\"psi1\":" +
                     (rep.psi1 ? fmt(*rep.psi1) : "null") + ",\"abel\":[";
  for (std::size_t i = 0; i < rep.abel_nodes.size(); ++i) {
    if (i) json += ",";
    json += "{\"z\":" + fmt(rep.abel_nodes[i]) + ",\"value\":" +
            fmt(rep.abel_values[i]) + "}";
  }
  json += "]}";
  write_file("regularized.json", json);
  std::printf("regularized: psi_tilde=%s J=%s psi1=%s\n",
              fmt(rep.value.real()).c_str(), fmt(rep.J).c_str(),
              rep.psi1 ? fmt(*rep.psi1).c_str() : "n/a");
  return 0;
}

int cmd_counterexample1(const JobConfig& cfg) {
  cfg.check_known({"k_lo", "k_hi"});
  CounterexampleTable t =
      counterexample_one(cfg.get_int("k_lo", 4), cfg.get_int("k_hi", 16));
  auto settings = base_settings(cfg);
  settings["fitted_constant"] = fmt(t.fitted_constant);
  settings["relative_spread"] = fmt(t.relative_spread);
  write_file("counterexample1.csv",
             csv_header(settings) + t.to_csv("k", "lambda_k"));
  std::printf("counterexample1: rows=%zu fitted_constant=%s spread=%s\n",
              t.rows.size(), fmt(t.fitted_constant).c_str(),
              fmt(t.relative_spread).c_str());
  return 0;
}

int cmd_counterexample2(const JobConfig& cfg) {
  cfg.check_known({"ell_lo", "ell_hi"});
  CounterexampleTable t =
      counterexample_two(cfg.get_int("ell_lo", 6), cfg.get_int("ell_hi", 20));
  auto settings = base_settings(cfg);
  settings["fitted_constant"] = fmt(t.fitted_constant);
  settings["relative_spread"] = fmt(t.relative_spread);
  write_file("counterexample2.csv",
             csv_header(settings) + t.to_csv("ell", "nu_ell"));
  std::printf("counterexample2: rows=%zu fitted_constant=%s spread=%s\n",
              t.rows.size(), fmt(t.fitted_constant).c_str(),
              fmt(t.relative_spread).c_str());
  return 0;
}

std::vector<double> dyadic_schedule(int m_lo, int m_hi, bool two_sided) {
  std::vector<double> ts;
  for (int m = m_lo; m <= m_hi; ++m) {
    ts.push_back(std::pow(2.0, -m));
    if (two_sided) ts.push_back(-std::pow(2.0, -m));
  }
  return ts;
}

int cmd_response_scan(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t", "X",
                   "phi", "bins", "m_lo", "m_hi", "two_sided"});
  std::unique_ptr<UnimodalMap> m = map_from_config(cfg);
  const TentMap* tent = dynamic_cast<const TentMap*>(m.get());
  if (!tent) throw UnsupportedInput("response-scan needs a tent base map");
  Perturbation X = x_from_config(cfg);
  Observable phi = phi_from_config(cfg);
  std::size_t bins = static_cast<std::size_t>(cfg.get_int("bins", 1 << 12));
  ResponseScan scan = response_scan(
      *tent, X, phi,
      dyadic_schedule(cfg.get_int("m_lo", 6), cfg.get_int("m_hi", 12),
                      cfg.get_int("two_sided", 0) != 0),
      bins);
  auto settings = base_settings(cfg);
  settings["bins"] = std::to_string(bins);
  settings["R0"] = fmt(scan.R0);
  settings["modulus_exponent"] = fmt(scan.modulus_exponent);
  write_file("response_scan.csv", csv_header(settings) + scan.to_csv());
  std::printf("response-scan: rows=%zu R0=%s modulus_exponent=%s\n",
              scan.t.size(), fmt(scan.R0).c_str(),
              fmt(scan.modulus_exponent).c_str());
  return 0;
}

int cmd_fd_experiment(const JobConfig& cfg) {
  cfg.check_known({"family", "slope", "code", "base_slope", "X_poly", "t", "X",
                   "phi", "bins", "N", "m_lo", "m_hi"});
  std::unique_ptr<UnimodalMap> m = map_from_config(cfg);
  const TentMap* tent = dynamic_cast<const TentMap*>(m.get());
  if (!tent) throw UnsupportedInput("fd-experiment needs a tent base map");
  Perturbation X = x_from_config(cfg);
  Observable phi = phi_from_config(cfg);
  FdExperiment rep = fd_experiment(
      *tent, X, phi,
      dyadic_schedule(cfg.get_int("m_lo", 6), cfg.get_int("m_hi", 14), true),
      static_cast<std::size_t>(cfg.get_int("bins", 1 << 12)),
      cfg.get_int("N", 256));
  write_file("fd_experiment.json", rep.to_json());
  std::printf("fd-experiment: rows=%zu psi_limit=%s R0=%s\n", rep.t.size(),
              fmt(rep.psi_limit).c_str(), fmt(rep.R0).c_str());
  return 0;
}

int classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const NonzeroJump*>(&e) ||
      dynamic_cast<const NonZeroMean*>(&e) ||
      dynamic_cast<const ResidueNonzero*>(&e) ||
      dynamic_cast<const NotMarkov*>(&e) ||
      dynamic_cast<const ObservableNotC1*>(&e) ||
      dynamic_cast<const UnsupportedInput*>(&e))
    return 2;  // precondition violations
  return 1;    // numeric failures
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transfer-operator and susceptibility toolkit for piecewise "
               "expanding unimodal maps"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  int jobs = 1;
  long seed = 0;
  app.add_option("--config", config_path, "key=value job file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "parallel row jobs (reserved)");
  app.add_option("--seed", seed, "seed for randomized helpers");

  std::map<std::string, int (*)(const JobConfig&)> dispatch = {
      {"orbit", cmd_orbit},
      {"density", cmd_density},
      {"decompose", cmd_decompose},
      {"susceptibility", cmd_susceptibility},
      {"residues", cmd_residues},
      {"psi1", cmd_psi1},
      {"regularized", cmd_regularized},
      {"counterexample1", cmd_counterexample1},
      {"counterexample2", cmd_counterexample2},
      {"response-scan", cmd_response_scan},
      {"fd-experiment", cmd_fd_experiment},
  };
  for (const auto& [name, _] : dispatch) app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);
  g_out_dir = out_dir;

  try {
    JobConfig cfg = JobConfig::parse_file(config_path);
    for (const auto& [name, fn] : dispatch)
      if (app.got_subcommand(name)) return fn(cfg);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return classify(e);
  }
}
