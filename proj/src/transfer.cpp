#include "pexmap/transfer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pexmap/errors.hpp"

namespace pexmap {

namespace {

void check_support(const UnimodalMap& f, const HybridBVFunction& phi) {
  for (const Jump& j : phi.jumps())
    if (j.location < f.a0() - 1e-12 || j.location > f.b() + 1e-12)
      throw UnsupportedInput("operator input has jumps outside [a0, b]");
}

double chi(double x, double c1) {
  if (x < c1) return 1.0;
  if (x > c1) return 0.0;
  return 0.5;
}

}  // namespace

HybridBVFunction apply_L1(const UnimodalMap& f, const HybridBVFunction& phi) {
  check_support(f, phi);
  const double c = f.c(), c1 = f.critical_value();
  HybridBVFunction out(phi.lo(), phi.hi(), phi.cells());

  for (const Jump& j : phi.jumps()) {
    if (std::abs(j.location - c) <= 1e-13) continue;  // folded into the c1 jump
    double image, slope;
    if (j.location < c) {
      image = f.branch_plus(j.location);
      slope = f.branch_plus_deriv(j.location);
    } else {
      image = f.branch_minus(j.location);
      slope = f.branch_minus_deriv(j.location);
    }
    if (image > c1 + 1e-12)
      throw UnsupportedInput("apply_L1: jump image beyond f(c)");
    out.add_jump(std::min(image, phi.hi()), j.amplitude / slope);
  }

  // Support truncation at c_1: the pushed-forward left limit drops to zero.
  double left = f.inv_plus_deriv(c1) * phi.eval_left(c) +
                std::abs(f.inv_minus_deriv(c1)) * phi.eval_right(c);
  out.add_jump(std::min(c1, phi.hi()), -left);

  for (std::size_t i = 0; i <= phi.cells(); ++i) {
    double x = out.node(i);
    double w = chi(x, c1);
    double raw = 0.0;
    if (w > 0.0)
      raw = w * (f.inv_plus_deriv(x) * phi.eval(f.inv_plus(x)) +
                 std::abs(f.inv_minus_deriv(x)) * phi.eval(f.inv_minus(x)));
    out.regular()[i] = raw - out.jump_part(x);
  }
  return out;
}

HybridBVFunction apply_L0(const UnimodalMap& f, const HybridBVFunction& phi) {
  check_support(f, phi);
  const double c = f.c(), c1 = f.critical_value();
  HybridBVFunction out(phi.lo(), phi.hi(), phi.cells());

  for (const Jump& j : phi.jumps()) {
    if (std::abs(j.location - c) <= 1e-13) continue;
    double image = j.location < c ? f.branch_plus(j.location)
                                  : f.branch_minus(j.location);
    if (image > c1 + 1e-12)
      throw UnsupportedInput("apply_L0: jump image beyond f(c)");
    out.add_jump(std::min(image, phi.hi()), j.amplitude);
  }

  // Vanishes when phi is continuous at c (psi_+(c1) = psi_-(c1) = c).
  double left = phi.eval_left(c) - phi.eval_right(c);
  out.add_jump(std::min(c1, phi.hi()), -left);

  for (std::size_t i = 0; i <= phi.cells(); ++i) {
    double x = out.node(i);
    double w = chi(x, c1);
    double raw = 0.0;
    if (w > 0.0)
      raw = w * (phi.eval(f.inv_plus(x)) - phi.eval(f.inv_minus(x)));
    out.regular()[i] = raw - out.jump_part(x);
  }
  return out;
}

// ----------------------------------------------------------------- UlamDensity

double UlamDensity::eval(double x) const {
  if (x < lo || x > hi) return 0.0;
  double s = (x - lo) / bin_width();
  std::size_t i = std::min(static_cast<std::size_t>(s), bins - 1);
  return values[i];
}

double UlamDensity::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * bin_width();
}

double UlamDensity::window_mean(double x0, double x1) const {
  double w = bin_width();
  long i0 = std::lround(std::ceil((x0 - lo) / w - 0.5));
  long i1 = std::lround(std::floor((x1 - lo) / w - 0.5));
  i0 = std::max(i0, 0L);
  i1 = std::min(i1, static_cast<long>(bins) - 1);
  if (i1 < i0) return 0.0;
  double s = 0.0;
  for (long i = i0; i <= i1; ++i) s += values[static_cast<std::size_t>(i)];
  return s / static_cast<double>(i1 - i0 + 1);
}

namespace {

struct SparseRows {
  std::vector<std::vector<std::pair<int, double>>> rows;
};

// Spread mass m over the bins covered by the image interval [p, q].
void spread(std::vector<std::pair<int, double>>& row, double p, double q,
            double m, double lo, double w, int bins) {
  if (q < p) std::swap(p, q);
  if (q - p < 1e-300) {
    int i = std::clamp(static_cast<int>((p - lo) / w), 0, bins - 1);
    row.emplace_back(i, m);
    return;
  }
  int i0 = std::clamp(static_cast<int>((p - lo) / w), 0, bins - 1);
  int i1 = std::clamp(static_cast<int>((q - lo) / w), 0, bins - 1);
  for (int i = i0; i <= i1; ++i) {
    double blo = lo + w * i, bhi = blo + w;
    double ov = std::min(q, bhi) - std::max(p, blo);
    if (ov > 0.0) row.emplace_back(i, m * ov / (q - p));
  }
}

SparseRows build_ulam_matrix(const UnimodalMap& f, std::size_t bins) {
  const double lo = f.a0(), hi = f.b();
  const double w = (hi - lo) / static_cast<double>(bins);
  const double c = f.c();
  SparseRows mat;
  mat.rows.resize(bins);
  // Piecewise-linear maps: one exact image interval per branch piece.
  // Generic maps: 64 sub-intervals per bin so branch curvature is resolved
  // well below the bin scale.
  const int sub = f.piecewise_linear() ? 1 : 64;
  for (std::size_t j = 0; j < bins; ++j) {
    double x0 = lo + w * j, x1 = x0 + w;
    auto& row = mat.rows[j];
    auto push_branch = [&](double s0, double s1, bool plus) {
      if (s1 <= s0) return;
      double frac = (s1 - s0) / w;
      for (int q = 0; q < sub; ++q) {
        double u0 = s0 + (s1 - s0) * q / sub;
        double u1 = s0 + (s1 - s0) * (q + 1) / sub;
        double p0 = plus ? f.branch_plus(u0) : f.branch_minus(u0);
        double p1 = plus ? f.branch_plus(u1) : f.branch_minus(u1);
        spread(row, p0, p1, frac / sub, lo, w, static_cast<int>(bins));
      }
    };
    push_branch(x0, std::min(x1, c), true);
    push_branch(std::max(x0, c), x1, false);
  }
  return mat;
}

}  // namespace

UlamDensity invariant_density_ulam(const UnimodalMap& f, std::size_t bins,
                                   int max_iters, double tol) {
  if (bins < 64) throw UnsupportedInput("invariant_density_ulam: bins >= 64");
  if (!(f.min_abs_slope() > 1.0))
    throw UnsupportedInput("invariant_density_ulam: map not expanding");
  SparseRows mat = build_ulam_matrix(f, bins);

  std::vector<double> mass(bins, 1.0 / static_cast<double>(bins));
  std::vector<double> next(bins);
  double residual = 0.0, prev_residual = 0.0;
  std::vector<double> ratios;
  int iters = 0;
  for (iters = 1; iters <= max_iters; ++iters) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j < bins; ++j) {
      double m = mass[j];
      if (m == 0.0) continue;
      for (const auto& [i, p] : mat.rows[j]) next[i] += m * p;
    }
    residual = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
      residual += std::abs(next[i] - mass[i]);
      // Lazy step (P+I)/2: renormalizable slopes (e.g. sqrt 2) put an
      // eigenvalue at -1, under which the plain iteration oscillates.
      next[i] = 0.5 * (next[i] + mass[i]);
      total += next[i];
    }
    for (std::size_t i = 0; i < bins; ++i) mass[i] = next[i] / total;
    if (prev_residual > 0.0 && residual > 0.0)
      ratios.push_back(residual / prev_residual);
    prev_residual = residual;
    if (residual <= tol) break;
  }
  if (residual > tol)
    throw NoConvergence("Ulam power iteration: residual " +
                        std::to_string(residual) + " after " +
                        std::to_string(max_iters) + " iterations");

  UlamDensity out;
  out.lo = f.a0();
  out.hi = f.b();
  out.bins = bins;
  out.iterations = iters;
  out.residual = residual;
  if (ratios.size() >= 3) {
    double g = 1.0;
    std::size_t n = std::min<std::size_t>(5, ratios.size());
    for (std::size_t i = ratios.size() - n; i < ratios.size(); ++i) g *= ratios[i];
    out.residual_ratio = std::pow(g, 1.0 / static_cast<double>(n));
  }
  out.values.resize(bins);
  double w = out.bin_width();
  for (std::size_t i = 0; i < bins; ++i) out.values[i] = mass[i] / w;
  return out;
}

// --------------------------------------------------- PiecewiseConstantDensity

double PiecewiseConstantDensity::eval(double x) const {
  if (x < support_lo() || x > support_hi()) return 0.0;
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
  std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin());
  if (it != breakpoints.end() && *it == x) {
    // Midpoint of the one-sided limits (0 outside the support).
    double left = idx == 0 ? 0.0 : plateaus[idx - 1];
    double right = idx == plateaus.size() ? 0.0 : plateaus[idx];
    return 0.5 * (left + right);
  }
  return plateaus[idx - 1];
}

double PiecewiseConstantDensity::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < plateaus.size(); ++i)
    s += plateaus[i] * (breakpoints[i + 1] - breakpoints[i]);
  return s;
}

std::string PiecewiseConstantDensity::to_json() const {
  std::string out = "{\"breakpoints\":[";
  char buf[48];
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.17g", i ? "," : "", breakpoints[i]);
    out += buf;
  }
  out += "],\"plateaus\":[";
  for (std::size_t i = 0; i < plateaus.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.17g", i ? "," : "", plateaus[i]);
    out += buf;
  }
  out += "]}";
  return out;
}

PiecewiseConstantDensity invariant_density_exact_tent(
    const TentMap& g, const CriticalOrbitInfo& orbit) {
  if (!orbit.preperiodic)
    throw NotMarkov("exact solver requires a preperiodic critical orbit");
  const double lambda = g.slope();

  std::vector<double> bp = orbit.points;
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(),
                       [](double x, double y) { return std::abs(x - y) < 1e-12; }),
           bp.end());
  const std::size_t n = bp.size() - 1;  // cells
  if (n < 1) {
    // Slope-2 tent: orbit {1, 0}, single cell, density 1.
    throw SingularSystem("exact solver: degenerate partition");
  }

  auto cell_of = [&](double x) -> long {
    if (x < bp.front() || x > bp.back()) return -1;
    auto it = std::upper_bound(bp.begin(), bp.end(), x);
    long idx = static_cast<long>(it - bp.begin()) - 1;
    return std::min(idx, static_cast<long>(n) - 1);
  };

  // rho(x) = [rho(psi_+ x) + rho(psi_- x)] / lambda at cell midpoints,
  // plus the normalisation row; solved least squares.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double mid = 0.5 * (bp[i] + bp[i + 1]);
    M(i, i) -= 1.0;
    for (double pre : {g.inv_plus(mid), g.inv_minus(mid)}) {
      long j = cell_of(pre);
      if (j >= 0) M(i, static_cast<std::size_t>(j)) += 1.0 / lambda;
    }
  }
  for (std::size_t j = 0; j < n; ++j) M(n, j) = bp[j + 1] - bp[j];
  rhs(n) = 1.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < static_cast<Eigen::Index>(n))
    throw SingularSystem("exact solver: rank-deficient fixed-point system");
  Eigen::VectorXd v = qr.solve(rhs);

  PiecewiseConstantDensity d;
  d.breakpoints = bp;
  d.plateaus.assign(v.data(), v.data() + n);
  for (double p : d.plateaus)
    if (p < -1e-10) throw SingularSystem("exact solver: negative plateau");

  // Residual of the fixed-point equations at three points per cell.
  for (std::size_t i = 0; i < n; ++i) {
    for (double frac : {0.25, 0.5, 0.75}) {
      double x = bp[i] + frac * (bp[i + 1] - bp[i]);
      double lhs = d.plateaus[i];
      double pf = (d.eval(g.inv_plus(x)) + d.eval(g.inv_minus(x))) / lambda;
      if (std::abs(lhs - pf) > 1e-12 * std::max(1.0, std::abs(lhs)))
        throw SingularSystem("exact solver: fixed-point residual too large");
    }
  }
  return d;
}

PiecewiseConstantDensity invariant_density_exact_tent(const TentMap& g) {
  CriticalOrbitInfo orbit = critical_orbit(g, 4096);
  return invariant_density_exact_tent(g, orbit);
}

// ------------------------------------------------------------------ embeddings

HybridBVFunction to_hybrid(const PiecewiseConstantDensity& d, double lo,
                           double hi, std::size_t cells) {
  HybridBVFunction out(lo, hi, cells);
  double prev = 0.0;
  for (std::size_t i = 0; i < d.breakpoints.size(); ++i) {
    double next = i < d.plateaus.size() ? d.plateaus[i] : 0.0;
    out.add_jump(d.breakpoints[i], next - prev);
    prev = next;
  }
  for (std::size_t i = 0; i <= cells; ++i) {
    double x = out.node(i);
    out.regular()[i] = d.eval(x) - out.jump_part(x);
  }
  return out;
}

HybridBVFunction to_hybrid(const UlamDensity& d, std::size_t cells) {
  HybridBVFunction out(d.lo, d.hi, cells);
  for (std::size_t i = 0; i <= cells; ++i) out.regular()[i] = d.eval(out.node(i));
  return out;
}

}  // namespace pexmap
