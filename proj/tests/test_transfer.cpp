#include <doctest.h>

#include <cmath>
#include <random>

#include "pexmap/errors.hpp"
#include "pexmap/transfer.hpp"

using namespace pexmap;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kU = 1.0 / (6.0 - 4.0 * kSqrt2);  // gamma_sqrt2 low plateau
}

TEST_CASE("L1 fixes the flat density of the full tent map") {
  TentMap g(2.0);
  // gamma_2 = 1 as pure saltus: -H_1 + H_0 (regular part zero).
  HybridBVFunction rho(0.0, 1.0, 2048);
  rho.add_jump(1.0, -1.0);
  rho.add_jump(0.0, 1.0);
  HybridBVFunction out = apply_L1(g, rho);
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
    CHECK(out.eval(x) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(out.integral() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("L1 preserves integrals") {
  TentMap g(1.7);
  auto f = [](double x) { return 1.0 + 0.3 * std::cos(5.0 * x); };
  HybridBVFunction phi = HybridBVFunction::from_function(0.0, 1.0, 8192, f);
  HybridBVFunction out = apply_L1(g, phi);
  CHECK(out.integral() == doctest::Approx(phi.integral()).epsilon(1e-6));
  // Duality: int (L1 phi) w = int phi (w o f) for continuous w.
  auto w = [](double x) { return x * x; };
  double lhs = out.integral_against(w);
  double rhs = phi.integral_against([&](double x) { return w(g.eval(x)); });
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("L1 transports a jump to its image with divided amplitude") {
  TentMap g(1.7);
  HybridBVFunction phi(0.0, 1.0, 4096);
  phi.add_jump(0.2, 1.0);  // on the increasing branch
  for (std::size_t i = 0; i <= phi.cells(); ++i) phi.regular()[i] = 1.0;
  HybridBVFunction out = apply_L1(g, phi);
  bool found = false;
  for (const Jump& j : out.jumps())
    if (std::abs(j.location - g.eval(0.2)) < 1e-10) {
      CHECK(j.amplitude == doctest::Approx(1.0 / 1.7).epsilon(1e-12));
      found = true;
    }
  CHECK(found);
  // Truncation jump at f(c) kills the pushed-forward mass beyond the image.
  bool trunc = false;
  for (const Jump& j : out.jumps())
    if (std::abs(j.location - g.critical_value()) < 1e-10) trunc = true;
  CHECK(trunc);
}

TEST_CASE("L0 preserves jump amplitudes along the orbit") {
  TentMap g(1.7);
  HybridBVFunction phi(0.0, 1.0, 4096);
  phi.add_jump(0.8, 0.7);  // decreasing branch: image f(0.8)
  HybridBVFunction out = apply_L0(g, phi);
  REQUIRE(out.jumps().size() == 1);  // no truncation jump: phi continuous at c
  CHECK(out.jumps()[0].location == doctest::Approx(g.eval(0.8)).epsilon(1e-12));
  CHECK(out.jumps()[0].amplitude == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("conjugacy (L0 phi)' = L1 phi' away from the kink") {
  TentMap g(1.6);
  auto f = [](double x) { return std::sin(2.0 * x) + 0.5 * x * x; };
  auto fp = [](double x) { return 2.0 * std::cos(2.0 * x) + x; };
  const double c1 = g.critical_value();

  auto sup_gap = [&](std::size_t cells) {
    HybridBVFunction phi = HybridBVFunction::from_function(0.0, 1.0, cells, f);
    HybridBVFunction dphi = HybridBVFunction::from_function(0.0, 1.0, cells, fp);
    HybridBVFunction lhs = apply_L0(g, phi).regular_derivative();
    HybridBVFunction rhs = apply_L1(g, dphi);
    double h = 1.0 / static_cast<double>(cells);
    double sup = 0.0;
    for (std::size_t i = 0; i <= cells; ++i) {
      double x = lhs.node(i);
      if (std::abs(x - c1) < 3.0 * h) continue;  // FD is O(1) across the kink
      if (x > c1 + 3.0 * h) continue;            // both vanish beyond f(c)
      sup = std::max(sup, std::abs(lhs.eval(x) - rhs.eval(x)));
    }
    return sup;
  };
  double coarse = sup_gap(1 << 10), fine = sup_gap(1 << 12);
  CHECK(fine < coarse);
  CHECK(fine < 1e-2);
}

TEST_CASE("Ulam density of the full tent map is flat") {
  TentMap g(2.0);
  UlamDensity rho = invariant_density_ulam(g, 1 << 12);
  CHECK(rho.integral() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i + 1 < rho.bins; ++i)
    CHECK(rho.values[i] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rho.residual <= 1e-10);
  CHECK(rho.iterations > 0);
}

TEST_CASE("Ulam density matches the exact plateaus of g_sqrt2") {
  TentMap g(kSqrt2);
  UlamDensity rho = invariant_density_ulam(g, 1 << 13);
  CHECK(rho.window_mean(kSqrt2 - 1 + 0.01, 2 - kSqrt2 - 0.01) ==
        doctest::Approx(kU).epsilon(5e-3));
  CHECK(rho.window_mean(2 - kSqrt2 + 0.01, kSqrt2 / 2 - 0.01) ==
        doctest::Approx(kSqrt2 * kU).epsilon(5e-3));
  // Density vanishes off the support [c_2, c_1].
  CHECK(rho.window_mean(0.05, kSqrt2 - 1 - 0.05) ==
        doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("Ulam handles a genuinely nonlinear perturbed map") {
  TentMap g(1.8);
  PerturbedTentMap f(g, Perturbation({0.0, 1.0, -1.0}), 0.05);
  UlamDensity rho = invariant_density_ulam(f, 1 << 12);
  CHECK(rho.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.residual <= 1e-10);
  // Push the density through the analytic operator once: stays put.
  HybridBVFunction h = to_hybrid(rho, 1 << 12);
  HybridBVFunction out = apply_L1(f, h);
  double l1 = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    double x = f.a0() + (f.b() - f.a0()) * (i + 0.5) / n;
    l1 += std::abs(out.eval(x) - h.eval(x)) * (f.b() - f.a0()) / n;
  }
  CHECK(l1 < 0.05);
}

TEST_CASE("exact solver reproduces gamma_2 and gamma_sqrt2") {
  PiecewiseConstantDensity d2 = invariant_density_exact_tent(TentMap(2.0));
  REQUIRE(d2.cells() == 1);
  CHECK(d2.plateaus[0] == doctest::Approx(1.0).epsilon(1e-13));

  PiecewiseConstantDensity ds = invariant_density_exact_tent(TentMap(kSqrt2));
  REQUIRE(ds.cells() == 2);
  CHECK(ds.breakpoints[0] == doctest::Approx(kSqrt2 - 1).epsilon(1e-13));
  CHECK(ds.breakpoints[1] == doctest::Approx(2 - kSqrt2).epsilon(1e-13));
  CHECK(ds.breakpoints[2] == doctest::Approx(kSqrt2 / 2).epsilon(1e-13));
  CHECK(ds.plateaus[0] == doctest::Approx(kU).epsilon(1e-12));
  CHECK(ds.plateaus[1] == doctest::Approx(kSqrt2 * kU).epsilon(1e-12));
  CHECK(ds.integral() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("exact solver requires a preperiodic orbit") {
  TentMap g(1.9);
  CHECK_THROWS_AS(invariant_density_exact_tent(g), NotMarkov);
}

TEST_CASE("piecewise constant density JSON and eval conventions") {
  PiecewiseConstantDensity d = invariant_density_exact_tent(TentMap(kSqrt2));
  std::string json = d.to_json();
  CHECK(json.find("\"breakpoints\"") != std::string::npos);
  CHECK(json.find("\"plateaus\"") != std::string::npos);
  // Midpoint convention at an interior breakpoint.
  CHECK(d.eval(2 - kSqrt2) ==
        doctest::Approx(0.5 * (1 + kSqrt2) * kU).epsilon(1e-12));
  CHECK(d.eval(0.1) == 0.0);
}

TEST_CASE("hybrid embedding of the exact density is pure saltus") {
  PiecewiseConstantDensity d = invariant_density_exact_tent(TentMap(kSqrt2));
  HybridBVFunction h = to_hybrid(d, 0.0, 1.0, 2048);
  CHECK(h.jumps().size() == 3);
  CHECK(h.regular_sup_norm() < 1e-11);
  CHECK(h.eval(0.5) == doctest::Approx(kU).epsilon(1e-11));
  CHECK(h.eval(0.65) == doctest::Approx(kSqrt2 * kU).epsilon(1e-11));
}
