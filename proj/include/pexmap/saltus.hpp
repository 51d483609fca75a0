#ifndef PEXMAP_SALTUS_HPP
#define PEXMAP_SALTUS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "pexmap/hybrid.hpp"
#include "pexmap/transfer.hpp"
#include "pexmap/unimodal.hpp"

namespace pexmap {

/// rho = rho_s + rho_r with rho_s = sum_k s_k H_{c_k}, H_u = -1 below u,
/// 0 above. locations/amplitudes are in orbit order (k = 1..N).
struct SaltusDecomposition {
  std::vector<double> locations;
  std::vector<double> amplitudes;
  std::vector<bool> below_noise;  // Ulam estimates smaller than the noise floor
  double noise_floor = 0.0;
  HybridBVFunction regular{0.0, 1.0, 2};   // rho_r, jump-free
  HybridBVFunction combined{0.0, 1.0, 2};  // rho_s + rho_r as one hybrid

  std::size_t count() const { return locations.size(); }
  double jump_variation() const;  // sum |s_k|
  /// Sum_{k > j} |s_k|, the tail of the jump series.
  double tail(std::size_t j) const;
};

SaltusDecomposition saltus_decompose(const PiecewiseConstantDensity& rho,
                                     const CriticalOrbitInfo& orbit,
                                     std::size_t cells = 4096);
SaltusDecomposition saltus_decompose(const UlamDensity& rho,
                                     const CriticalOrbitInfo& orbit);

/// Non-Markov tent path: the density is pure saltus, so the decomposition
/// follows from s_{k+1} = s_k / f'(c_k) on the truncated orbit plus the
/// normalisation -sum_k s_k c_k = 1.  rho_r is identically zero.
SaltusDecomposition tent_saltus_truncated(const TentMap& g,
                                          const CriticalOrbitInfo& orbit,
                                          std::size_t cells = 4096);

/// J(f, X) = sum_k s_k X(c_k).
double weighted_jump(const SaltusDecomposition& dec, const Perturbation& X);

/// Least-squares fit of tail(j) <= C xi^j over the decaying range.
struct JumpTailFit {
  double C = 0.0;
  double xi = 0.0;
  double bound(std::size_t j) const;
};
JumpTailFit fit_jump_tail(const SaltusDecomposition& dec);

/// J^{n1,n0}_m for m = n0..n0+n1-1: sums of s_k X(c_k) over the orbit
/// positions that land on the cycle point with residue class m.
std::vector<double> jump_sums_markov(const SaltusDecomposition& dec,
                                     const Perturbation& X, int n0, int n1);

/// alpha(c_k) = -sum_{j>=0} X(c_{k+1+j}) / (f^{j+1})'(c_k), k = 1..depth.
std::vector<double> twisted_alpha(const CriticalOrbitInfo& orbit,
                                  const UnimodalMap& f, const Perturbation& X,
                                  int depth);

std::string saltus_to_json(const SaltusDecomposition& dec,
                           const Perturbation& X);

}  // namespace pexmap

#endif
