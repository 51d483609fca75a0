#include "pexmap/susceptibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pexmap/errors.hpp"

namespace pexmap {

namespace {

HybridBVFunction hybrid_add(const HybridBVFunction& a,
                            const HybridBVFunction& b) {
  HybridBVFunction out(a.lo(), a.hi(), a.cells());
  for (const Jump& j : a.jumps()) out.add_jump(j.location, j.amplitude);
  for (const Jump& j : b.jumps()) out.add_jump(j.location, j.amplitude);
  for (std::size_t i = 0; i <= a.cells(); ++i) {
    double x = out.node(i);
    out.regular()[i] = a.eval(x) + b.eval(x) - out.jump_part(x);
  }
  return out;
}

HybridBVFunction pure_saltus(const SaltusDecomposition& dec) {
  HybridBVFunction out(dec.combined.lo(), dec.combined.hi(),
                       dec.combined.cells());
  for (std::size_t k = 0; k < dec.count(); ++k)
    out.add_jump(dec.locations[k], dec.amplitudes[k]);
  return out;  // regular part identically zero
}

/// X' rho_s + (X rho_r)', the resolvent/iteration argument of Eq.-Leib type
/// splits.  Mean is -J(f, X).
HybridBVFunction split_argument(const SaltusDecomposition& dec,
                                const Perturbation& X) {
  HybridBVFunction xprs = pure_saltus(dec).multiply_smooth(
      [&X](double x) { return X.deriv(x); });
  HybridBVFunction xrr_d =
      dec.regular.multiply_smooth([&X](double x) { return X(x); })
          .regular_derivative();
  return hybrid_add(xprs, xrr_d);
}

double orbit_sup(const CriticalOrbitInfo& orbit, const Observable& phi) {
  double s = 0.0;
  for (double c : orbit.points) s = std::max(s, std::abs(phi(c)));
  return s;
}

}  // namespace

std::complex<double> SusceptibilitySeries::psi_partial(
    std::complex<double> z) const {
  std::complex<double> v = 0.0;
  for (std::size_t n = coefficients.size(); n-- > 0;)
    v = v * z + coefficients[n];
  return v;
}

SusceptibilitySeries coefficients_split(const UnimodalMap& f,
                                        const SaltusDecomposition& dec,
                                        const CriticalOrbitInfo& orbit,
                                        const Perturbation& X,
                                        const Observable& phi, int N) {
  if (!phi.deriv) throw ObservableNotC1("observable has no derivative");
  SusceptibilitySeries out;
  out.N = N;
  const std::size_t K = dec.count();

  for (int n = 0; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
      std::size_t idx = k + static_cast<std::size_t>(n);
      if (!orbit.preperiodic && idx > orbit.points.size()) break;
      s -= dec.amplitudes[k - 1] * X(dec.locations[k - 1]) * phi(orbit.point(idx));
    }
    out.orbit_terms.push_back(s);
  }
  if (!orbit.preperiodic) {
    // Dropped terms are bounded by the jump tail times sup |phi| on the orbit.
    try {
      JumpTailFit fit = fit_jump_tail(dec);
      out.tail_estimate = orbit_sup(orbit, phi) * fit.bound(K > 8 ? K - 8 : 0);
    } catch (const FitUnstable&) {
      out.tail_estimate = orbit_sup(orbit, phi) * dec.tail(K / 2);
    }
  }

  HybridBVFunction g = split_argument(dec, X);
  for (int n = 0; n <= N; ++n) {
    out.bv_terms.push_back(
        -g.integral_against([&phi](double x) { return phi(x); }));
    if (n < N) g = apply_L1(f, g);
  }

  for (int n = 0; n <= N; ++n)
    out.coefficients.push_back(out.orbit_terms[static_cast<std::size_t>(n)] +
                               out.bv_terms[static_cast<std::size_t>(n)]);
  return out;
}

std::vector<double> coefficients_naive(const UnimodalMap& f,
                                       const HybridBVFunction& rho,
                                       const Perturbation& X,
                                       const Observable& phi, int N) {
  if (!phi.deriv) throw ObservableNotC1("observable has no derivative");
  HybridBVFunction g = rho.multiply_smooth([&X](double x) { return X(x); });
  std::vector<double> a;
  for (int n = 0; n <= N; ++n) {
    a.push_back(g.integral_against([&phi](double x) { return phi.deriv(x); }));
    if (n < N) g = apply_L0(f, g);
  }
  return a;
}

MarkovJumpSystem markov_extension(const UnimodalMap& f,
                                  const SaltusDecomposition& dec,
                                  const CriticalOrbitInfo& orbit,
                                  const Perturbation& X, const Observable& phi,
                                  double quad_rho0_phi, double tol) {
  (void)f;
  if (!orbit.preperiodic)
    throw NotMarkov("markov_extension: orbit not preperiodic");
  const int n0 = orbit.n0, n1 = orbit.n1, dim = n0 + n1 - 1;
  if (dec.count() != static_cast<std::size_t>(dim))
    throw NotMarkov("markov_extension: decomposition size != n0+n1-1");

  MarkovJumpSystem sys;
  sys.n0 = n0;
  sys.n1 = n1;
  sys.dimension = dim;
  sys.matrix.assign(static_cast<std::size_t>(dim),
                    std::vector<int>(static_cast<std::size_t>(dim), 0));
  for (int j = 0; j < dim - 1; ++j)
    sys.matrix[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(j)] = 1;
  sys.matrix[static_cast<std::size_t>(n0 - 1)][static_cast<std::size_t>(dim - 1)] = 1;

  // L^{n1} must be nilpotent-shift on the first n0-1 basis vectors and the
  // identity on the cycle block.
  std::vector<std::vector<int>> p(static_cast<std::size_t>(dim),
                                  std::vector<int>(static_cast<std::size_t>(dim), 0));
  for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  for (int r = 0; r < n1; ++r) {
    std::vector<std::vector<int>> q(static_cast<std::size_t>(dim),
                                    std::vector<int>(static_cast<std::size_t>(dim), 0));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
              sys.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
              p[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    p = q;
  }
  for (int j = n0 - 1; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      if (p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != (i == j ? 1 : 0))
        throw NotMarkov("markov_extension: L^n1 cycle block not identity");

  sys.jump_sums = jump_sums_markov(dec, X, n0, n1);
  const double J = weighted_jump(dec, X);

  double cycle_phi = 0.0;
  for (int j = n0; j <= n0 + n1 - 1; ++j)
    cycle_phi += phi(orbit.point(static_cast<std::size_t>(j)));
  sys.residue_at_1 = J * (quad_rho0_phi - cycle_phi / n1);

  for (int r = 0; r < n1; ++r) {
    double theta = 2.0 * M_PI * r / n1;
    std::complex<double> w(std::cos(theta), std::sin(theta));
    sys.poles.push_back(w);
    if (r == 0) {
      sys.residues.emplace_back(sys.residue_at_1, 0.0);
      continue;
    }
    std::complex<double> B = 0.0, T = 0.0;
    for (std::size_t k = 1; k <= dec.count(); ++k)
      B += std::pow(1.0 / w, static_cast<double>(k)) * dec.amplitudes[k - 1] *
           X(dec.locations[k - 1]);
    for (int j = n0; j <= n0 + n1 - 1; ++j)
      T += std::pow(w, static_cast<double>(j)) *
           phi(orbit.point(static_cast<std::size_t>(j)));
    sys.residues.push_back(-(1.0 / n1) * B * T);
  }

  sys.holomorphic_at_1 = std::abs(J) <= tol;
  sys.fully_holomorphic = true;
  for (double s : sys.jump_sums)
    if (std::abs(s) > tol) sys.fully_holomorphic = false;
  return sys;
}

double residue_fit(const SusceptibilitySeries& series) {
  // Neville table on the nodes h_m = 2^-m; the diagonal is a sequence of
  // extrapolants of increasing order.  Truncation error e^{-N h} pollutes the
  // small-h rows, so the returned value is the diagonal entry at the most
  // stable consecutive pair rather than the last row.
  std::vector<double> h, A;
  double scale = 0.0;
  for (int m = 4; m <= 10; ++m) {
    double hm = std::pow(2.0, -m);
    double a = hm * series.psi_partial(1.0 - hm).real();
    h.push_back(hm);
    A.push_back(a);
    scale = std::max(scale, std::abs(a));
  }
  scale = std::max(scale, 1e-12);

  std::size_t n = h.size();
  std::vector<std::vector<double>> T(n);
  std::vector<double> diag;
  for (std::size_t i = 0; i < n; ++i) {
    T[i].resize(i + 1);
    T[i][0] = A[i];
    for (std::size_t j = 1; j <= i; ++j)
      T[i][j] = (h[i - j] * T[i][j - 1] - h[i] * T[i - 1][j - 1]) /
                (h[i - j] - h[i]);
    diag.push_back(T[i][i]);
  }

  double best = 1e300, value = diag.back();
  for (std::size_t i = 1; i < diag.size(); ++i) {
    double d = std::abs(diag[i] - diag[i - 1]);
    if (d < best) {
      best = d;
      value = diag[i];
    }
  }
  if (best > 0.05 * scale)
    throw FitUnstable("residue fit: extrapolants disagree beyond 5%");
  return value;
}

namespace {

std::vector<double> partial_inner_sums(const SaltusDecomposition& dec,
                                       const Perturbation& X) {
  std::vector<double> sigma;
  double s = 0.0;
  for (std::size_t k = 0; k < dec.count(); ++k) {
    s += dec.amplitudes[k] * X(dec.locations[k]);
    sigma.push_back(s);
  }
  return sigma;
}

double neumann_integral(const UnimodalMap& f, HybridBVFunction g,
                        const Observable& phi, double tol) {
  double total = 0.0;
  for (int m = 0; m < 100000; ++m) {
    double inc = g.integral_against([&phi](double x) { return phi(x); });
    total += inc;
    if (std::abs(inc) < tol && m > 2) return total;
    g = apply_L1(f, g);
  }
  throw NoConvergence("resolvent Neumann series did not settle");
}

}  // namespace

double psi1_nonmarkov(const UnimodalMap& f, const SaltusDecomposition& dec,
                      const CriticalOrbitInfo& orbit, const Perturbation& X,
                      const Observable& phi, double tol) {
  const double J = weighted_jump(dec, X);
  if (std::abs(J) > tol)
    throw NonzeroJump("psi1: J(f,X) = " + std::to_string(J) + " != 0");

  std::vector<double> sigma = partial_inner_sums(dec, X);
  double outer = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j)
    outer -= phi(orbit.points[j]) * sigma[j];

  HybridBVFunction g = split_argument(dec, X);
  double mean = g.integral();
  if (std::abs(mean) > std::max(tol, 1e-6))
    throw NonZeroMean("psi1: resolvent argument has mean " +
                      std::to_string(mean));
  return outer - neumann_integral(f, g, phi, tol);
}

RegularizedReport regularized_psi(const UnimodalMap& f,
                                  const SaltusDecomposition& dec,
                                  const CriticalOrbitInfo& orbit,
                                  const Observable& phi, std::complex<double> z,
                                  int N, double tol) {
  Perturbation one = Perturbation::one();
  std::vector<double> sigma = partial_inner_sums(dec, one);

  RegularizedReport rep;
  rep.J = weighted_jump(dec, one);

  std::complex<double> outer = 0.0, zp = z;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    outer -= zp * sigma[j] * phi(orbit.points[j]);
    zp *= z;
  }

  // Regular-part series; identically zero for tent maps (rho_r == 0).
  std::complex<double> reg_series = 0.0;
  if (dec.regular.regular_sup_norm() > 1e-12) {
    HybridBVFunction g = dec.regular.regular_derivative();
    std::complex<double> zn = 1.0;
    for (int n = 0; n <= N; ++n) {
      double inc = g.integral_against([&phi](double x) { return phi(x); });
      reg_series += zn * inc;
      if (std::abs(inc) < tol && n > 2) break;
      zn *= z;
      if (n < N) g = apply_L1(f, g);
    }
  }
  rep.value = outer - reg_series;

  for (int m = 4; m <= 10; ++m) {
    double node = 1.0 - std::pow(2.0, -m);
    double s = 0.0, p = node;
    for (double c : orbit.points) {
      s += p * phi(c);
      p *= node;
    }
    rep.abel_nodes.push_back(node);
    rep.abel_values.push_back(s);
  }

  if (std::abs(rep.J) <= tol)
    rep.psi1 = psi1_nonmarkov(f, dec, orbit, one, phi, tol);
  return rep;
}

CandidateReport candidate_check(const UnimodalMap& f,
                                const SaltusDecomposition& dec,
                                const CriticalOrbitInfo& orbit,
                                const Perturbation& X, int depth,
                                double tol) {
  Perturbation one = Perturbation::one();
  const double J = weighted_jump(dec, one);
  if (std::abs(J) > tol)
    throw NonzeroJump("candidate_check: J(f) = " + std::to_string(J));

  std::size_t K = std::min<std::size_t>(dec.count(),
                                        static_cast<std::size_t>(depth));
  std::vector<double> sigma = partial_inner_sums(dec, one);
  std::vector<double> sigmaX = partial_inner_sums(dec, X);

  CandidateReport rep;
  {
    HybridBVFunction tilde(dec.combined.lo(), dec.combined.hi(),
                           dec.combined.cells());
    for (std::size_t j = 0; j < K; ++j)
      tilde.add_jump(dec.locations[j], sigma[j]);
    HybridBVFunction l0t = apply_L0(f, tilde);
    double res = 0.0;
    for (std::size_t i = 0; i <= tilde.cells(); ++i) {
      double x = tilde.node(i) + 0.37 * tilde.h();  // stay off jump locations
      if (x >= tilde.hi()) break;
      bool near = false;
      for (std::size_t j = 0; j < K; ++j)
        if (std::abs(x - dec.locations[j]) < 2.0 * tilde.h()) near = true;
      if (near) continue;
      double lhs = tilde.eval(x) - l0t.eval(x);
      double rhs = dec.combined.jump_part(x);  // rho_s(x)
      res = std::max(res, std::abs(lhs - rhs));
    }
    rep.grid_residual = res;
    double sK = K > 0 ? std::abs(sigma[K - 1]) : 0.0;
    rep.tail_bound = sK + dec.tail(K);
  }

  // (id - f_*) mu_s = X rho_s' as coefficient identities at the distinct
  // orbit points; f(c_i) = c_{i+1} along the orbit.
  {
    std::vector<double> pts;
    for (std::size_t j = 0; j < K; ++j) pts.push_back(dec.locations[j]);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-11; }),
              pts.end());
    double err = 0.0;
    for (double y : pts) {
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t j = 0; j < K; ++j) {
        if (std::abs(dec.locations[j] - y) < 1e-11) {
          lhs += sigmaX[j];
          rhs += dec.amplitudes[j] * X(dec.locations[j]);
        }
        if (j + 1 < K &&
            std::abs(orbit.point(j + 2) - y) < 1e-11)  // f(c_{j+1}) = c_{j+2}
          lhs -= sigmaX[j];
      }
      err = std::max(err, std::abs(lhs - rhs));
    }
    rep.pointmass_error = err;
  }

  rep.ok = rep.grid_residual <= rep.tail_bound + tol &&
           rep.pointmass_error <= rep.tail_bound + tol;
  return rep;
}

std::string susceptibility_to_json(const SusceptibilitySeries& series,
                                   const MarkovJumpSystem* markov,
                                   const std::optional<double>& psi1) {
  char buf[192];
  auto arr = [&buf](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.17g", i ? "," : "", v[i]);
      s += buf;
    }
    return s + "]";
  };
  std::string out = "{\"coefficients\":" + arr(series.coefficients) +
                    ",\"orbit_terms\":" + arr(series.orbit_terms) +
                    ",\"bv_terms\":" + arr(series.bv_terms) + ",\"poles\":[";
  if (markov) {
    for (std::size_t i = 0; i < markov->poles.size(); ++i) {
      std::snprintf(buf, sizeof(buf),
                    "%s{\"z_re\":%.17g,\"z_im\":%.17g,\"residue_re\":%.17g,"
                    "\"residue_im\":%.17g}",
                    i ? "," : "", markov->poles[i].real(),
                    markov->poles[i].imag(), markov->residues[i].real(),
                    markov->residues[i].imag());
      out += buf;
    }
  }
  out += "],\"psi1\":";
  if (psi1) {
    std::snprintf(buf, sizeof(buf), "%.17g", *psi1);
    out += buf;
  } else {
    out += "null";
  }
  out += ",\"flags\":{\"holomorphic_at_1\":";
  out += markov && markov->holomorphic_at_1 ? "true" : "false";
  out += ",\"fully_holomorphic\":";
  out += markov && markov->fully_holomorphic ? "true" : "false";
  out += "}}";
  return out;
}

}  // namespace pexmap
