#ifndef PEXMAP_TRANSFER_HPP
#define PEXMAP_TRANSFER_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "pexmap/hybrid.hpp"
#include "pexmap/unimodal.hpp"

namespace pexmap {

/// Perron-Frobenius operator: chi(x) [psi_+' phi(psi_+) + |psi_-'| phi(psi_-)].
/// Jumps of phi at u push forward to f(u) with amplitude s/f'(u); the support
/// truncation at f(c) contributes one additional jump there.
HybridBVFunction apply_L1(const UnimodalMap& f, const HybridBVFunction& phi);

/// Signed pullback-on-primitives operator: chi(x) [phi(psi_+) - phi(psi_-)].
/// No jump appears at f(c) when phi is continuous at c.
HybridBVFunction apply_L0(const UnimodalMap& f, const HybridBVFunction& phi);

struct UlamDensity {
  double lo = 0.0, hi = 1.0;
  std::size_t bins = 0;
  std::vector<double> values;  // one per bin
  int iterations = 0;
  double residual = 0.0;        // |L1 rho - rho|_1 at the last iteration
  double residual_ratio = 0.0;  // estimated geometric decay of the residual

  double bin_width() const { return (hi - lo) / static_cast<double>(bins); }
  double eval(double x) const;
  double integral() const;
  /// Mean of values over bins in [x0, x1].
  double window_mean(double x0, double x1) const;
};

UlamDensity invariant_density_ulam(const UnimodalMap& f, std::size_t bins,
                                   int max_iters = 10000, double tol = 1e-10);

/// Piecewise constant density on the ordered critical-orbit partition of
/// [c_2, c_1]; exact representation for preperiodic tent maps.
struct PiecewiseConstantDensity {
  std::vector<double> breakpoints;  // sorted, cells+1 of them
  std::vector<double> plateaus;     // one per cell

  std::size_t cells() const { return plateaus.size(); }
  double support_lo() const { return breakpoints.front(); }
  double support_hi() const { return breakpoints.back(); }
  double eval(double x) const;  // midpoint convention at breakpoints
  double integral() const;
  std::string to_json() const;
};

PiecewiseConstantDensity invariant_density_exact_tent(
    const TentMap& g, const CriticalOrbitInfo& orbit);
PiecewiseConstantDensity invariant_density_exact_tent(const TentMap& g);

/// Embeddings into the hybrid representation (jumps split out exactly for
/// the piecewise-constant case; the Ulam embedding is all-regular).
HybridBVFunction to_hybrid(const PiecewiseConstantDensity& d, double lo,
                           double hi, std::size_t cells);
HybridBVFunction to_hybrid(const UlamDensity& d, std::size_t cells);

}  // namespace pexmap

#endif
