#ifndef PEXMAP_RESPONSE_HPP
#define PEXMAP_RESPONSE_HPP

#include <string>
#include <vector>

#include "pexmap/observable.hpp"
#include "pexmap/susceptibility.hpp"

namespace pexmap {

/// R(t) = int phi rho_t dx via the Ulam density of the perturbed map.
double response_value(const TentMap& f, const Perturbation& X, double t,
                      const Observable& phi, std::size_t bins);

/// Exact path for preperiodic tent maps.
double response_value_exact(const TentMap& g, const Observable& phi);

double integrate_observable(const UlamDensity& rho, const Observable& phi);
double integrate_observable(const PiecewiseConstantDensity& rho,
                            const Observable& phi);

struct ResponseScan {
  std::vector<double> t;
  std::vector<double> R;
  double R0 = 0.0;
  std::vector<double> l1_distance;  // |rho_t - rho_0|_1
  double modulus_exponent = 0.0;    // slope of log|rho_t-rho_0|_1 vs log|t|

  std::string to_csv() const;
};

ResponseScan response_scan(const TentMap& f, const Perturbation& X,
                           const Observable& phi,
                           const std::vector<double>& ts, std::size_t bins);

struct CounterexampleRow {
  int index = 0;       // k or ell
  double param = 0.0;  // lambda_k or nu_ell
  double gap = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  std::vector<double> plateaus;  // v_1..v_{k+1} or u_1..u_{ell-1}
};

struct CounterexampleTable {
  std::vector<CounterexampleRow> rows;
  double fitted_constant = 0.0;  // exp(mean log ratio)
  double relative_spread = 0.0;  // (max-min)/fitted over the rows

  std::string to_csv(const std::string& index_name,
                     const std::string& param_name) const;
};

/// lambda_k family: gap v_{k+1}-1 against the bound k(2-lambda_k); plateaus
/// from the closed linear system over the orbit partition.
CounterexampleTable counterexample_one(int k_lo, int k_hi);

/// nu_ell family (even ell, code R L R^(ell-4) L R*): gap u - u_2(nu_ell)
/// against ell*|nu_ell - sqrt(2)|, u = 1/(6-4 sqrt 2).
CounterexampleTable counterexample_two(int ell_lo, int ell_hi);

struct FdExperiment {
  std::vector<double> t;
  std::vector<double> fd;        // (R(t)-R(0))/t
  double psi_limit = 0.0;        // truncated sum of a_n at z=1
  double R0 = 0.0;

  std::string to_json() const;
};

/// Finite-difference comparison against the susceptibility partial sum;
/// refuses (ResidueNonzero) when Psi has a pole at z=1.
FdExperiment fd_experiment(const TentMap& f, const Perturbation& X,
                           const Observable& phi,
                           const std::vector<double>& t_schedule,
                           std::size_t bins, int N);

}  // namespace pexmap

#endif
