#ifndef PEXMAP_SUSCEPTIBILITY_HPP
#define PEXMAP_SUSCEPTIBILITY_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pexmap/observable.hpp"
#include "pexmap/saltus.hpp"

namespace pexmap {

/// Coefficients a_n = int L0^n(rho X) phi' dx, computed through the stable
/// split a_n = orbit_term(n) + bv_term(n) with
///   orbit_term(n) = -sum_k s_k X(c_k) phi(c_{k+n})
///   bv_term(n)    = -int L1^n(X' rho_s + (X rho_r)') phi dx.
struct SusceptibilitySeries {
  std::vector<double> coefficients;
  std::vector<double> orbit_terms;
  std::vector<double> bv_terms;
  int N = 0;
  double tail_estimate = 0.0;  // orbit-term truncation tail (non-Markov only)

  std::complex<double> psi_partial(std::complex<double> z) const;
};

SusceptibilitySeries coefficients_split(const UnimodalMap& f,
                                        const SaltusDecomposition& dec,
                                        const CriticalOrbitInfo& orbit,
                                        const Perturbation& X,
                                        const Observable& phi, int N);

/// Direct L0 iteration of rho*X; derivative growth ~ lambda^n restricts this
/// to small n.  Cross-check path only.
std::vector<double> coefficients_naive(const UnimodalMap& f,
                                       const HybridBVFunction& rho,
                                       const Perturbation& X,
                                       const Observable& phi, int N);

/// Finite-dimensional action of L0 on the jump basis H_{c_1}..H_{c_{n0+n1-1}}
/// in the preperiodic case, with pole/residue data for Psi(z).
///
/// Residue convention: residues[i] = lim_{z->w} (1 - z/w) Psi(z) at the pole
/// w = poles[i]; at w = 1 this is J(f,X) (int phi rho_0 - (1/n1) sum_{j=n0}
/// ^{n0+n1-1} phi(c_j)), and at the other n1-th roots of unity it equals
/// -(1/n1) B(1/w) T(w) with B(w) = sum_k w^k s_k X(c_k) and
/// T(w) = sum_{j=n0}^{n0+n1-1} w^j phi(c_j).
struct MarkovJumpSystem {
  int n0 = 0, n1 = 0;
  int dimension = 0;
  std::vector<std::vector<int>> matrix;  // matrix[i][j]: coefficient of
                                         // H_{c_{i+1}} in L0 H_{c_{j+1}}
  std::vector<std::complex<double>> poles;     // n1-th roots of unity
  std::vector<std::complex<double>> residues;  // same order as poles
  double residue_at_1 = 0.0;
  std::vector<double> jump_sums;  // J^{n1,n0}_m, m = n0..n0+n1-1
  bool holomorphic_at_1 = false;
  bool fully_holomorphic = false;
};

MarkovJumpSystem markov_extension(const UnimodalMap& f,
                                  const SaltusDecomposition& dec,
                                  const CriticalOrbitInfo& orbit,
                                  const Perturbation& X, const Observable& phi,
                                  double quad_rho0_phi,  // int phi rho_0 dx
                                  double tol = 1e-10);

/// Evaluates A(z) = (1-z) * psi_partial(z) at z = 1 - 2^-m, m = 4..10, and
/// Richardson-extrapolates to z = 1.  Directly comparable to residue_at_1.
double residue_fit(const SusceptibilitySeries& series);

/// Psi_1 = -sum_j phi(c_j) sigma_j - int (id - L1)^{-1}(X' rho_s +
/// (X rho_r)') phi dx with sigma_j = sum_{k<=j} s_k X(c_k); requires
/// J(f,X) = 0 (NonzeroJump otherwise) and a zero-mean resolvent argument.
double psi1_nonmarkov(const UnimodalMap& f, const SaltusDecomposition& dec,
                      const CriticalOrbitInfo& orbit, const Perturbation& X,
                      const Observable& phi, double tol = 1e-10);

struct RegularizedReport {
  std::complex<double> value;       // Psi~(z)
  double J = 0.0;                   // J(f) = J(f,1)
  std::optional<double> psi1;       // filled when J = 0 within tol
  std::vector<double> abel_nodes;   // z = 1 - 2^-m schedule
  std::vector<double> abel_values;  // sum_j z^j phi(c_j) at those nodes
};

/// Regularized series Psi~(z) = -sum_j z^j sigma_j phi(c_j)
/// - sum_n z^n int L1^n(rho_r') phi dx, for X == 1.
RegularizedReport regularized_psi(const UnimodalMap& f,
                                  const SaltusDecomposition& dec,
                                  const CriticalOrbitInfo& orbit,
                                  const Observable& phi,
                                  std::complex<double> z, int N,
                                  double tol = 1e-10);

struct CandidateReport {
  double grid_residual = 0.0;     // sup |(id-L0) rho~_s - rho_s| off jumps
  double tail_bound = 0.0;        // truncation allowance for the grid test
  double pointmass_error = 0.0;   // max coefficient mismatch in the mu_s law
  bool ok = false;
};

/// Checks the candidate solutions rho~_s = sum_j sigma_j H_{c_j} of
/// (id - L0) rho~_s = rho_s, and mu_s = sum_j sigma_j^X delta_{c_j} of
/// (id - f_*) mu_s = X rho_s' (coefficient identities at orbit points).
CandidateReport candidate_check(const UnimodalMap& f,
                                const SaltusDecomposition& dec,
                                const CriticalOrbitInfo& orbit,
                                const Perturbation& X, int depth,
                                double tol = 1e-10);

std::string susceptibility_to_json(const SusceptibilitySeries& series,
                                   const MarkovJumpSystem* markov,
                                   const std::optional<double>& psi1);

}  // namespace pexmap

#endif
