#include "pexmap/response.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pexmap/errors.hpp"

namespace pexmap {

double integrate_observable(const UlamDensity& rho, const Observable& phi) {
  // Midpoint rule per bin with 4 sub-samples; the density is constant on bins.
  double w = rho.bin_width(), s = 0.0;
  for (std::size_t i = 0; i < rho.bins; ++i) {
    double x0 = rho.lo + w * static_cast<double>(i);
    double p = 0.0;
    for (int q = 0; q < 4; ++q) p += phi(x0 + w * (2 * q + 1) / 8.0);
    s += rho.values[i] * p * w / 4.0;
  }
  return s;
}

double integrate_observable(const PiecewiseConstantDensity& rho,
                            const Observable& phi) {
  // Composite Simpson per cell; phi is smooth inside each cell.
  double s = 0.0;
  for (std::size_t i = 0; i < rho.cells(); ++i) {
    double a = rho.breakpoints[i], b = rho.breakpoints[i + 1];
    const int n = 64;
    double acc = 0.0;
    for (int q = 0; q < n; ++q) {
      double x0 = a + (b - a) * q / n, x1 = a + (b - a) * (q + 1) / n;
      acc += (phi(x0) + 4.0 * phi(0.5 * (x0 + x1)) + phi(x1)) * (x1 - x0) / 6.0;
    }
    s += rho.plateaus[i] * acc;
  }
  return s;
}

double response_value(const TentMap& f, const Perturbation& X, double t,
                      const Observable& phi, std::size_t bins) {
  if (t == 0.0) return integrate_observable(invariant_density_ulam(f, bins), phi);
  PerturbedTentMap ft(f, X, t);
  return integrate_observable(invariant_density_ulam(ft, bins), phi);
}

double response_value_exact(const TentMap& g, const Observable& phi) {
  return integrate_observable(invariant_density_exact_tent(g), phi);
}

std::string ResponseScan::to_csv() const {
  char buf[160];
  std::string out = "t,R,l1_distance\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t[i], R[i],
                  l1_distance[i]);
    out += buf;
  }
  return out;
}

ResponseScan response_scan(const TentMap& f, const Perturbation& X,
                           const Observable& phi,
                           const std::vector<double>& ts, std::size_t bins) {
  UlamDensity rho0 = invariant_density_ulam(f, bins);
  ResponseScan scan;
  scan.R0 = integrate_observable(rho0, phi);
  for (double t : ts) {
    UlamDensity rho =
        t == 0.0 ? rho0 : invariant_density_ulam(PerturbedTentMap(f, X, t), bins);
    scan.t.push_back(t);
    scan.R.push_back(integrate_observable(rho, phi));
    // Densities may live on slightly different supports; compare on [0,1].
    double l1 = 0.0;
    const int n = 1 << 14;
    for (int i = 0; i < n; ++i) {
      double x = (i + 0.5) / n;
      l1 += std::abs(rho.eval(x) - rho0.eval(x)) / n;
    }
    scan.l1_distance.push_back(l1);
  }
  // Modulus exponent: slope of log distance against log |t| over t != 0.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < scan.t.size(); ++i) {
    if (scan.t[i] == 0.0 || scan.l1_distance[i] <= 0.0) continue;
    double x = std::log(std::abs(scan.t[i])), y = std::log(scan.l1_distance[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; ++m;
  }
  if (m >= 2)
    scan.modulus_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return scan;
}

std::string CounterexampleTable::to_csv(const std::string& index_name,
                                        const std::string& param_name) const {
  char buf[200];
  std::string out = index_name + "," + param_name + ",gap,bound,ratio\n";
  for (const CounterexampleRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", r.index,
                  r.param, r.gap, r.bound, r.ratio);
    out += buf;
  }
  return out;
}

namespace {

void fit_table(CounterexampleTable& table) {
  double sum_log = 0.0, lo = 1e300, hi = -1e300;
  int m = 0;
  for (const CounterexampleRow& r : table.rows) {
    if (r.ratio <= 0.0) continue;
    sum_log += std::log(r.ratio);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    ++m;
  }
  if (m == 0) throw FitUnstable("counterexample table: no positive ratios");
  table.fitted_constant = std::exp(sum_log / m);
  table.relative_spread = (hi - lo) / table.fitted_constant;
}

}  // namespace

CounterexampleTable counterexample_one(int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi > 20 || k_lo > k_hi)
    throw UnsupportedInput("counterexample_one: need 1 <= k_lo <= k_hi <= 20");
  CounterexampleTable table;
  for (int k = k_lo; k <= k_hi; ++k) {
    LambdaK lk = lambda_k_family(k);
    TentMap g = TentMap::from_two_minus_slope(lk.two_minus_lambda);
    const double lam = g.slope();

    // Closed fixed-point system on the k+1 cells of the orbit partition:
    // lambda v_1 = v_{k+1}; v_j + v_{k+1} = lambda v_{j+1}; 2 v_k =
    // lambda v_{k+1}; plus normalisation over the exact cell lengths.
    KneadingCode code = KneadingCode::parse("RL^" + std::to_string(k) + "R*");
    CriticalOrbitInfo orbit = orbit_from_code(g, code);
    std::vector<double> bp = orbit.points;
    std::sort(bp.begin(), bp.end());
    const int n = k + 1;
    if (static_cast<int>(bp.size()) != n + 1)
      throw SingularSystem("counterexample_one: unexpected partition size");

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    M(0, 0) = lam;
    M(0, n - 1) = -1.0;
    for (int j = 1; j <= k - 1; ++j) {
      M(j, j - 1) += 1.0;
      M(j, n - 1) += 1.0;
      M(j, j) -= lam;
    }
    M(k, k - 1) = 2.0;
    M(k, n - 1) -= lam;
    for (int j = 0; j < n; ++j) M(n, j) = bp[j + 1] - bp[j];
    rhs(n) = 1.0;
    Eigen::VectorXd v =
        M.colPivHouseholderQr().solve(rhs);
    if ((M * v - rhs).cwiseAbs().maxCoeff() > 1e-10)
      throw SingularSystem("counterexample_one: system residual too large");

    CounterexampleRow row;
    row.index = k;
    row.param = lam;
    row.plateaus.assign(v.data(), v.data() + n);
    row.gap = row.plateaus.back() - 1.0;
    row.bound = static_cast<double>(k) * lk.two_minus_lambda;
    row.ratio = row.gap / row.bound;
    table.rows.push_back(std::move(row));
  }
  fit_table(table);
  return table;
}

CounterexampleTable counterexample_two(int ell_lo, int ell_hi) {
  if (ell_lo < 6 || ell_hi > 24 || ell_lo % 2 || ell_hi % 2 || ell_lo > ell_hi)
    throw UnsupportedInput("counterexample_two: need even 6 <= ell <= 24");
  const double u = 1.0 / (6.0 - 4.0 * std::sqrt(2.0));
  CounterexampleTable table;
  for (int ell = ell_lo; ell <= ell_hi; ell += 2) {
    std::string text = "RL";
    if (ell > 4) text += "R^" + std::to_string(ell - 4);
    text += "LR*";
    KneadingCode code = KneadingCode::parse(text);
    double nu = solve_code_parameter(code);
    TentMap g(nu);
    CriticalOrbitInfo orbit = orbit_from_code(g, code);
    PiecewiseConstantDensity rho = invariant_density_exact_tent(g, orbit);
    if (static_cast<int>(rho.cells()) != ell - 1)
      throw SingularSystem("counterexample_two: unexpected partition size");

    CounterexampleRow row;
    row.index = ell;
    row.param = nu;
    row.plateaus = rho.plateaus;  // u_1..u_{ell-1}, cells left to right
    row.gap = u - row.plateaus[1];
    row.bound = ell * std::abs(nu - std::sqrt(2.0));
    row.ratio = row.gap / row.bound;
    table.rows.push_back(std::move(row));
  }
  fit_table(table);
  return table;
}

std::string FdExperiment::to_json() const {
  char buf[96];
  std::string out = "{\"R0\":";
  std::snprintf(buf, sizeof(buf), "%.17g", R0);
  out += buf;
  out += ",\"psi_limit\":";
  std::snprintf(buf, sizeof(buf), "%.17g", psi_limit);
  out += buf;
  out += ",\"rows\":[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s{\"t\":%.17g,\"fd\":%.17g}",
                  i ? "," : "", t[i], fd[i]);
    out += buf;
  }
  out += "]}";
  return out;
}

FdExperiment fd_experiment(const TentMap& f, const Perturbation& X,
                           const Observable& phi,
                           const std::vector<double>& t_schedule,
                           std::size_t bins, int N) {
  CriticalOrbitInfo orbit = critical_orbit(f, 4096);
  PiecewiseConstantDensity rho = invariant_density_exact_tent(f, orbit);
  SaltusDecomposition dec = saltus_decompose(rho, orbit);
  MarkovJumpSystem sys =
      markov_extension(f, dec, orbit, X, phi, integrate_observable(rho, phi));
  if (std::abs(sys.residue_at_1) > 1e-10)
    throw ResidueNonzero("fd_experiment: Psi has a pole at z=1, residue " +
                         std::to_string(sys.residue_at_1));

  SusceptibilitySeries series = coefficients_split(f, dec, orbit, X, phi, N);
  FdExperiment rep;
  rep.psi_limit = series.psi_partial(1.0).real();
  rep.R0 = integrate_observable(invariant_density_ulam(f, bins), phi);
  for (double t : t_schedule) {
    double r = response_value(f, X, t, phi, bins);
    rep.t.push_back(t);
    rep.fd.push_back((r - rep.R0) / t);
  }
  return rep;
}

}  // namespace pexmap
