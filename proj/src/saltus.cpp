#include "pexmap/saltus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pexmap/errors.hpp"

namespace pexmap {

double SaltusDecomposition::jump_variation() const {
  double s = 0.0;
  for (double a : amplitudes) s += std::abs(a);
  return s;
}

double SaltusDecomposition::tail(std::size_t j) const {
  double s = 0.0;
  for (std::size_t k = j; k < amplitudes.size(); ++k) s += std::abs(amplitudes[k]);
  return s;
}

namespace {

SaltusDecomposition assemble(const std::vector<double>& locations,
                             const std::vector<double>& amplitudes,
                             const std::function<double(double)>& rho,
                             double lo, double hi, std::size_t cells) {
  SaltusDecomposition dec;
  dec.locations = locations;
  dec.amplitudes = amplitudes;
  dec.below_noise.assign(locations.size(), false);

  HybridBVFunction full(lo, hi, cells);
  for (std::size_t k = 0; k < locations.size(); ++k)
    full.add_jump(locations[k], amplitudes[k]);
  HybridBVFunction reg(lo, hi, cells);
  for (std::size_t i = 0; i <= cells; ++i) {
    double x = full.node(i);
    double r = rho(x) - full.jump_part(x);
    reg.regular()[i] = r;
    full.regular()[i] = r;
  }
  dec.regular = std::move(reg);
  dec.combined = std::move(full);
  return dec;
}

}  // namespace

SaltusDecomposition saltus_decompose(const PiecewiseConstantDensity& rho,
                                     const CriticalOrbitInfo& orbit,
                                     std::size_t cells) {
  std::vector<double> loc, amp;
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    double c = orbit.points[k];
    double s = 0.0;
    // Plateau gap: right limit minus left limit at c, zero off breakpoints.
    auto it = std::find_if(rho.breakpoints.begin(), rho.breakpoints.end(),
                           [c](double b) { return std::abs(b - c) < 1e-11; });
    if (it != rho.breakpoints.end()) {
      std::size_t i = static_cast<std::size_t>(it - rho.breakpoints.begin());
      double left = i == 0 ? 0.0 : rho.plateaus[i - 1];
      double right = i == rho.plateaus.size() ? 0.0 : rho.plateaus[i];
      s = right - left;
    }
    loc.push_back(c);
    amp.push_back(s);
  }
  double lo = std::min(0.0, rho.support_lo());
  double hi = std::max(1.0, rho.support_hi());
  return assemble(loc, amp, [&rho](double x) { return rho.eval(x); }, lo, hi,
                  cells);
}

SaltusDecomposition saltus_decompose(const UlamDensity& rho,
                                     const CriticalOrbitInfo& orbit) {
  const double h = rho.bin_width();
  std::vector<double> loc, amp;
  for (double c : orbit.points) {
    // One-sided limits as 8-bin window means two bins away from c: the mass
    // spread across the bin pair straddling the discontinuity is skipped.
    double left = rho.window_mean(c - 10.0 * h, c - 2.0 * h);
    double right = rho.window_mean(c + 2.0 * h, c + 10.0 * h);
    if (c + 2.0 * h > rho.hi) right = 0.0;  // truncated support beyond c_1
    if (c - 2.0 * h < rho.lo) left = 0.0;
    loc.push_back(c);
    amp.push_back(right - left);
  }

  // Noise floor: median absolute neighbor difference away from orbit points,
  // scaled by the window length.
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < rho.values.size(); ++i) {
    double x = rho.lo + h * (static_cast<double>(i) + 1.0);
    bool near = false;
    for (double c : orbit.points)
      if (std::abs(x - c) < 6.0 * h) near = true;
    if (!near) diffs.push_back(std::abs(rho.values[i + 1] - rho.values[i]));
  }
  double floor = 0.0;
  if (!diffs.empty()) {
    std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2,
                     diffs.end());
    floor = 4.0 * diffs[diffs.size() / 2];
  }

  SaltusDecomposition dec = assemble(
      loc, amp, [&rho](double x) { return rho.eval(x); }, rho.lo, rho.hi,
      rho.bins);
  // The regular part inherits O(amplitude) spikes from the smeared bins at
  // each discontinuity; bridge those neighbourhoods linearly so rho_r stays
  // grid-continuous.
  {
    const std::size_t cells = dec.regular.cells();
    std::vector<bool> masked(cells + 1, false);
    for (std::size_t i = 0; i <= cells; ++i) {
      double x = dec.regular.node(i);
      for (double c : loc)
        if (std::abs(x - c) <= 3.0 * h) masked[i] = true;
    }
    std::size_t i = 0;
    while (i <= cells) {
      if (!masked[i]) { ++i; continue; }
      std::size_t j = i;
      while (j <= cells && masked[j]) ++j;
      double vl = i > 0 ? dec.regular.regular()[i - 1]
                        : dec.regular.regular()[j < cells ? j : cells];
      double vr = j <= cells ? dec.regular.regular()[j] : vl;
      for (std::size_t q = i; q < j; ++q) {
        double w = static_cast<double>(q - i + 1) /
                   static_cast<double>(j - i + 1);
        double v = (1.0 - w) * vl + w * vr;
        dec.regular.regular()[q] = v;
        dec.combined.regular()[q] = v;
      }
      i = j;
    }
  }
  dec.noise_floor = floor;
  for (std::size_t k = 0; k < amp.size(); ++k)
    dec.below_noise[k] = std::abs(amp[k]) < floor;
  return dec;
}

SaltusDecomposition tent_saltus_truncated(const TentMap& g,
                                          const CriticalOrbitInfo& orbit,
                                          std::size_t cells) {
  std::vector<double> amp(orbit.points.size());
  double a = 1.0, dot = 0.0;
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    amp[k] = a;
    dot += a * orbit.points[k];
    a /= g.deriv(orbit.points[k]);
  }
  if (std::abs(dot) < 1e-300)
    throw SingularSystem("tent_saltus_truncated: degenerate normalisation");
  const double scale = -1.0 / dot;
  for (double& s : amp) s *= scale;
  SaltusDecomposition dec;
  dec.locations = orbit.points;
  dec.amplitudes = amp;
  dec.below_noise.assign(amp.size(), false);
  HybridBVFunction full(0.0, 1.0, cells);  // regular part identically zero
  for (std::size_t k = 0; k < amp.size(); ++k)
    full.add_jump(orbit.points[k], amp[k]);
  dec.regular = HybridBVFunction(0.0, 1.0, cells);
  dec.combined = std::move(full);
  return dec;
}

double weighted_jump(const SaltusDecomposition& dec, const Perturbation& X) {
  double s = 0.0;
  for (std::size_t k = 0; k < dec.count(); ++k)
    s += dec.amplitudes[k] * X(dec.locations[k]);
  return s;
}

double JumpTailFit::bound(std::size_t j) const {
  return C * std::pow(xi, static_cast<double>(j));
}

JumpTailFit fit_jump_tail(const SaltusDecomposition& dec) {
  // log tail(j) = log C + j log xi, least squares over decaying tails.
  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < dec.count(); ++j) {
    double t = dec.tail(j);
    if (t > 1e-300) pts.emplace_back(static_cast<double>(j), std::log(t));
  }
  if (pts.size() < 2) throw FitUnstable("jump tail fit: too few nonzero tails");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(pts.size());
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icpt = (sy - slope * sx) / n;
  JumpTailFit fit;
  fit.xi = std::exp(slope);
  fit.C = std::exp(icpt);
  // Inflate C so the fit dominates every observed tail.
  double worst = 1.0;
  for (auto& [x, y] : pts)
    worst = std::max(worst, std::exp(y) / fit.bound(static_cast<std::size_t>(x)));
  fit.C *= worst;
  return fit;
}

std::vector<double> jump_sums_markov(const SaltusDecomposition& dec,
                                     const Perturbation& X, int n0, int n1) {
  if (n0 < 1 || n1 < 1 ||
      dec.count() != static_cast<std::size_t>(n0 + n1 - 1))
    throw NotMarkov("jump_sums_markov: decomposition size != n0+n1-1");
  std::vector<double> sums(static_cast<std::size_t>(n1), 0.0);
  for (int m = n0; m <= n0 + n1 - 1; ++m) {
    double s = 0.0;
    // k + n0 - 1 - l*n1 = m for some l >= 0.
    for (int k = m - n0 + 1; k <= n0 + n1 - 1; k += n1)
      if (k >= 1)
        s += dec.amplitudes[static_cast<std::size_t>(k - 1)] *
             X(dec.locations[static_cast<std::size_t>(k - 1)]);
    sums[static_cast<std::size_t>(m - n0)] = s;
  }
  return sums;
}

std::vector<double> twisted_alpha(const CriticalOrbitInfo& orbit,
                                  const UnimodalMap& f, const Perturbation& X,
                                  int depth) {
  double xsup = 0.0;
  for (int i = 0; i <= 256; ++i)
    xsup = std::max(xsup, std::abs(X(f.a0() + (f.b() - f.a0()) * i / 256.0)));
  const double contraction = 1.0 / f.min_abs_slope();

  std::vector<double> alpha(static_cast<std::size_t>(depth), 0.0);
  for (int k = 1; k <= depth; ++k) {
    double a = 0.0, weight = 1.0;
    for (int j = 0;; ++j) {
      weight /= f.deriv(orbit.point(static_cast<std::size_t>(k + j)));
      a -= X(orbit.point(static_cast<std::size_t>(k + 1 + j))) * weight;
      if (xsup * std::pow(contraction, j + 1) < 1e-14) break;
      if (j > 4096) throw NoConvergence("twisted_alpha: series did not settle");
    }
    alpha[static_cast<std::size_t>(k - 1)] = a;
  }
  return alpha;
}

std::string saltus_to_json(const SaltusDecomposition& dec,
                           const Perturbation& X) {
  char buf[128];
  std::string out = "{\"orbit\":[";
  for (std::size_t k = 0; k < dec.count(); ++k) {
    std::snprintf(buf, sizeof(buf), "%s%.17g", k ? "," : "", dec.locations[k]);
    out += buf;
  }
  out += "],\"jumps\":[";
  for (std::size_t k = 0; k < dec.count(); ++k) {
    std::snprintf(buf, sizeof(buf), "%s%.17g", k ? "," : "", dec.amplitudes[k]);
    out += buf;
  }
  Perturbation one = Perturbation::one();
  std::snprintf(buf, sizeof(buf), "],\"J_of_X\":%.17g,\"J_of_1\":%.17g}",
                weighted_jump(dec, X), weighted_jump(dec, one));
  out += buf;
  return out;
}

}  // namespace pexmap
