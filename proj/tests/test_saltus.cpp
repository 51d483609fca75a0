#include <doctest.h>

#include <cmath>

#include "pexmap/errors.hpp"
#include "pexmap/saltus.hpp"

using namespace pexmap;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kU = 1.0 / (6.0 - 4.0 * kSqrt2);

SaltusDecomposition exact_dec(double slope) {
  TentMap g(slope);
  CriticalOrbitInfo orbit = critical_orbit(g, 64);
  PiecewiseConstantDensity rho = invariant_density_exact_tent(g, orbit);
  return saltus_decompose(rho, orbit);
}
}  // namespace

TEST_CASE("gamma_sqrt2 jump amplitudes in closed form") {
  SaltusDecomposition dec = exact_dec(kSqrt2);
  REQUIRE(dec.count() == 3);
  CHECK(dec.amplitudes[0] == doctest::Approx(-kSqrt2 * kU).epsilon(1e-12));
  CHECK(dec.amplitudes[1] == doctest::Approx(kU).epsilon(1e-12));
  CHECK(dec.amplitudes[2] == doctest::Approx((kSqrt2 - 1) * kU).epsilon(1e-12));
  CHECK(dec.regular.regular_sup_norm() < 1e-11);  // pure saltus
  CHECK(dec.jump_variation() <= dec.combined.variation() + 1e-9);
}

TEST_CASE("gamma_2 jump amplitudes") {
  SaltusDecomposition dec = exact_dec(2.0);
  REQUIRE(dec.count() == 2);
  CHECK(dec.locations[0] == doctest::Approx(1.0));
  CHECK(dec.locations[1] == doctest::Approx(0.0));
  CHECK(dec.amplitudes[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(dec.amplitudes[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec.regular.regular_sup_norm() < 1e-11);
}

TEST_CASE("weighted jump closed forms") {
  Perturbation id = Perturbation::identity();
  Perturbation one = Perturbation::one();
  SaltusDecomposition d2 = exact_dec(2.0);
  SaltusDecomposition ds = exact_dec(kSqrt2);
  CHECK(weighted_jump(d2, id) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(weighted_jump(ds, id) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(weighted_jump(d2, one) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(weighted_jump(ds, one) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("J(f,1) = 0 and rho_r(a0) identity across preperiodic slopes") {
  Perturbation one = Perturbation::one();
  for (const char* code : {"RLR*", "RL^2R*", "RL^3R*", "RL(LR)*", "RLR^2LR*"}) {
    TentMap g(solve_code_parameter(KneadingCode::parse(code)));
    CriticalOrbitInfo orbit = critical_orbit(g, 64);
    REQUIRE(orbit.preperiodic);
    PiecewiseConstantDensity rho = invariant_density_exact_tent(g, orbit);
    SaltusDecomposition dec = saltus_decompose(rho, orbit);
    double J1 = weighted_jump(dec, one);
    CHECK(std::abs(J1) < 1e-10);
    // J(f) = rho_r(a0); both vanish for tent maps.
    CHECK(std::abs(dec.regular.eval(g.a0())) < 1e-9);
  }
}

TEST_CASE("jump propagation s_{k+1} = s_k / f'(c_k) off merge points") {
  TentMap g(solve_code_parameter(KneadingCode::parse("RL^3R*")));
  CriticalOrbitInfo orbit = critical_orbit(g, 64);
  SaltusDecomposition dec = saltus_decompose(
      invariant_density_exact_tent(g, orbit), orbit);
  // Cycle entry is the last orbit point; propagation holds strictly before it.
  for (std::size_t k = 0; k + 2 < dec.count(); ++k) {
    double expect = dec.amplitudes[k] / g.deriv(dec.locations[k]);
    CHECK(dec.amplitudes[k + 1] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("summed jump law at the cycle entry of g_sqrt2") {
  SaltusDecomposition dec = exact_dec(kSqrt2);
  TentMap g(kSqrt2);
  // c_3 is fixed: s_3 (1 - 1/f'(c_3)) = s_2 / f'(c_2).
  double lhs = dec.amplitudes[2] * (1.0 - 1.0 / g.deriv(dec.locations[2]));
  double rhs = dec.amplitudes[1] / g.deriv(dec.locations[1]);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("Ulam jump estimates agree with the closed form") {
  TentMap g(kSqrt2);
  CriticalOrbitInfo orbit = critical_orbit(g, 64);
  UlamDensity rho = invariant_density_ulam(g, 1 << 13);
  SaltusDecomposition dec = saltus_decompose(rho, orbit);
  REQUIRE(dec.count() == 3);
  CHECK(dec.amplitudes[0] == doctest::Approx(-kSqrt2 * kU).epsilon(1e-2));
  CHECK(dec.amplitudes[1] == doctest::Approx(kU).epsilon(1e-2));
  CHECK(dec.amplitudes[2] == doctest::Approx((kSqrt2 - 1) * kU).epsilon(1e-2));
  CHECK(weighted_jump(dec, Perturbation::identity()) ==
        doctest::Approx(-1.0).epsilon(1e-2));
  for (bool flag : dec.below_noise) CHECK_FALSE(flag);
  // Regular part has no O(1) jumps: grid gaps stay far below the amplitudes.
  CHECK(dec.regular.max_regular_gap() < 0.2);
}

TEST_CASE("Ulam decomposition flags sub-noise jumps") {
  TentMap g(1.9);  // non-Markov; deep orbit points carry tiny jumps
  CriticalOrbitInfo orbit = critical_orbit(g, 40);
  UlamDensity rho = invariant_density_ulam(g, 1 << 12);
  SaltusDecomposition dec = saltus_decompose(rho, orbit);
  CHECK(dec.noise_floor > 0.0);
  int below = 0;
  for (bool flag : dec.below_noise) below += flag ? 1 : 0;
  CHECK(below > 0);            // tail jumps < noise
  CHECK_FALSE(dec.below_noise[0]);  // the leading jump is well resolved
}

TEST_CASE("truncated tent decomposition matches gamma_sqrt2 analogue") {
  // Non-Markov slope: reconstruction, normalisation, geometric tails.
  TentMap g(1.92);
  CriticalOrbitInfo orbit = critical_orbit(g, 64);
  REQUIRE_FALSE(orbit.preperiodic);
  SaltusDecomposition dec = tent_saltus_truncated(g, orbit);
  CHECK(dec.combined.integral() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(dec.regular.regular_sup_norm() == 0.0);
  // |s_{k+1}| = |s_k| / lambda.
  for (std::size_t k = 0; k + 1 < dec.count(); ++k)
    CHECK(std::abs(dec.amplitudes[k + 1]) ==
          doctest::Approx(std::abs(dec.amplitudes[k]) / 1.92).epsilon(1e-12));
  JumpTailFit fit = fit_jump_tail(dec);
  CHECK(fit.xi == doctest::Approx(1.0 / 1.92).epsilon(1e-2));
  for (std::size_t j = 0; j < dec.count(); j += 7)
    CHECK(dec.tail(j) <= fit.bound(j) * (1.0 + 1e-9));
  // Ulam cross-check of the leading amplitude.
  UlamDensity ud = invariant_density_ulam(g, 1 << 13);
  SaltusDecomposition ulam_dec = saltus_decompose(ud, orbit);
  CHECK(ulam_dec.amplitudes[0] ==
        doctest::Approx(dec.amplitudes[0]).epsilon(2e-2));
}

TEST_CASE("markov jump sums") {
  Perturbation id = Perturbation::identity();
  SaltusDecomposition ds = exact_dec(kSqrt2);
  std::vector<double> sums = jump_sums_markov(ds, id, 3, 1);
  REQUIRE(sums.size() == 1);
  CHECK(sums[0] == doctest::Approx(-1.0).epsilon(1e-12));  // equals J(f,X)

  SaltusDecomposition d2 = exact_dec(2.0);
  std::vector<double> zero = jump_sums_markov(d2, Perturbation::zero(), 2, 1);
  CHECK(zero[0] == doctest::Approx(0.0));
  // X = x(1-x) vanishes on the orbit {1, 0}.
  std::vector<double> vanish =
      jump_sums_markov(d2, Perturbation({0.0, 1.0, -1.0}), 2, 1);
  CHECK(vanish[0] == doctest::Approx(0.0).epsilon(1e-14));

  // Period-2 tail: m-classes partition the jumps.
  TentMap g(solve_code_parameter(KneadingCode::parse("RL(LR)*")));
  CriticalOrbitInfo orbit = critical_orbit(g, 64);
  SaltusDecomposition dp =
      saltus_decompose(invariant_density_exact_tent(g, orbit), orbit);
  std::vector<double> two = jump_sums_markov(dp, id, orbit.n0, orbit.n1);
  REQUIRE(two.size() == 2);
  CHECK(two[0] + two[1] == doctest::Approx(weighted_jump(dp, id)).epsilon(1e-12));

  CHECK_THROWS_AS(jump_sums_markov(ds, id, 2, 3), NotMarkov);
}

TEST_CASE("twisted cohomology identity") {
  Perturbation id = Perturbation::identity();
  TentMap g(1.9);
  CriticalOrbitInfo orbit = critical_orbit(g, 96);
  const int depth = 20;
  std::vector<double> alpha = twisted_alpha(orbit, g, id, depth);
  for (int k = 1; k + 1 <= depth; ++k) {
    double lhs = id(orbit.point(static_cast<std::size_t>(k + 1)));
    double rhs = alpha[static_cast<std::size_t>(k)] -
                 g.deriv(orbit.point(static_cast<std::size_t>(k))) *
                     alpha[static_cast<std::size_t>(k - 1)];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
  // X(c_1) - alpha(c_1) != 0: the obstruction behind J = -1.
  CHECK(std::abs(id(orbit.points[0]) - alpha[0]) > 0.1);

  // X vanishing on the orbit: alpha is identically zero.
  TentMap g2(2.0);
  CriticalOrbitInfo orbit2 = critical_orbit(g2, 64);
  std::vector<double> alpha0 =
      twisted_alpha(orbit2, g2, Perturbation({0.0, 1.0, -1.0}), 2);
  for (double a : alpha0) CHECK(std::abs(a) < 1e-13);
}

TEST_CASE("saltus JSON record") {
  SaltusDecomposition dec = exact_dec(kSqrt2);
  std::string json = saltus_to_json(dec, Perturbation::identity());
  CHECK(json.find("\"orbit\"") != std::string::npos);
  CHECK(json.find("\"jumps\"") != std::string::npos);
  CHECK(json.find("\"J_of_X\":-1") != std::string::npos);
  CHECK(json.find("\"J_of_1\":") != std::string::npos);
}
