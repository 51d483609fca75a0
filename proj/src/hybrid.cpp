#include "pexmap/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pexmap/errors.hpp"

namespace pexmap {

HybridBVFunction::HybridBVFunction(double lo, double hi, std::size_t cells)
    : lo_(lo), hi_(hi), cells_(cells), reg_(cells + 1, 0.0) {
  if (!(hi > lo) || cells < 2)
    throw UnsupportedInput("hybrid: need hi > lo and at least 2 cells");
  rebuild_suffix();
}

HybridBVFunction HybridBVFunction::from_function(
    double lo, double hi, std::size_t cells,
    const std::function<double(double)>& f) {
  HybridBVFunction out(lo, hi, cells);
  for (std::size_t i = 0; i <= cells; ++i) out.reg_[i] = f(out.node(i));
  return out;
}

void HybridBVFunction::rebuild_suffix() {
  suffix_.assign(jumps_.size() + 1, 0.0);
  for (std::size_t i = jumps_.size(); i-- > 0;)
    suffix_[i] = suffix_[i + 1] + jumps_[i].amplitude;
}

void HybridBVFunction::add_jump(double location, double amplitude) {
  if (location < lo_ - kMergeTol || location > hi_ + kMergeTol)
    throw UnsupportedInput("hybrid: jump location outside [lo, hi]");
  auto it = std::lower_bound(
      jumps_.begin(), jumps_.end(), location,
      [](const Jump& j, double x) { return j.location < x; });
  // Merge into an existing jump within tolerance (either neighbour).
  if (it != jumps_.end() && std::abs(it->location - location) <= kMergeTol) {
    it->amplitude += amplitude;
    if (std::abs(it->amplitude) < kPruneTol) jumps_.erase(it);
  } else if (it != jumps_.begin() &&
             std::abs(std::prev(it)->location - location) <= kMergeTol) {
    auto p = std::prev(it);
    p->amplitude += amplitude;
    if (std::abs(p->amplitude) < kPruneTol) jumps_.erase(p);
  } else if (std::abs(amplitude) >= kPruneTol) {
    jumps_.insert(it, Jump{location, amplitude});
  }
  rebuild_suffix();
}

double HybridBVFunction::jump_part(double x) const {
  if (jumps_.empty()) return 0.0;
  // sum_u s_u H_u(x): -1 for u > x, -1/2 for u == x, 0 for u < x.
  auto it = std::lower_bound(
      jumps_.begin(), jumps_.end(), x,
      [](const Jump& j, double v) { return j.location < v; });
  std::size_t i = static_cast<std::size_t>(it - jumps_.begin());
  double v = 0.0;
  if (it != jumps_.end() && it->location == x) {
    v += -0.5 * it->amplitude;
    ++i;
  }
  return v - suffix_[i];
}

double HybridBVFunction::eval_regular(double x) const {
  if (x <= lo_) return reg_.front();
  if (x >= hi_) return reg_.back();
  double s = (x - lo_) / h();
  std::size_t i = std::min(static_cast<std::size_t>(s), cells_ - 1);
  double w = s - static_cast<double>(i);
  return (1.0 - w) * reg_[i] + w * reg_[i + 1];
}

double HybridBVFunction::eval(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  return eval_regular(x) + jump_part(x);
}

double HybridBVFunction::eval_left(double x) const {
  if (x <= lo_ || x > hi_) return 0.0;
  auto it = std::lower_bound(
      jumps_.begin(), jumps_.end(), x,
      [](const Jump& j, double v) { return j.location < v; });
  // All jumps at locations >= x count fully as H = -1.
  std::size_t i = static_cast<std::size_t>(it - jumps_.begin());
  return eval_regular(x) - suffix_[std::min(i, jumps_.size())];
}

double HybridBVFunction::eval_right(double x) const {
  if (x < lo_ || x >= hi_) return 0.0;
  auto it = std::upper_bound(
      jumps_.begin(), jumps_.end(), x,
      [](double v, const Jump& j) { return v < j.location; });
  std::size_t i = static_cast<std::size_t>(it - jumps_.begin());
  return eval_regular(x) - suffix_[std::min(i, jumps_.size())];
}

double HybridBVFunction::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < cells_; ++i) s += 0.5 * (reg_[i] + reg_[i + 1]);
  s *= h();
  for (const Jump& j : jumps_) s -= j.amplitude * (j.location - lo_);
  return s;
}

double HybridBVFunction::integral_against(
    const std::function<double(double)>& w) const {
  double s = 0.0;
  for (std::size_t i = 0; i < cells_; ++i) {
    double x0 = node(i), x1 = node(i + 1);
    s += 0.5 * (reg_[i] * w(x0) + reg_[i + 1] * w(x1));
  }
  s *= h();
  // int_{lo}^{hi} H_u w dx = -int_{lo}^{u} w dx, computed on the same grid.
  if (!jumps_.empty()) {
    std::vector<double> cumw(cells_ + 1, 0.0);
    std::vector<double> wn(cells_ + 1);
    for (std::size_t i = 0; i <= cells_; ++i) wn[i] = w(node(i));
    for (std::size_t i = 1; i <= cells_; ++i)
      cumw[i] = cumw[i - 1] + 0.5 * (wn[i - 1] + wn[i]) * h();
    for (const Jump& j : jumps_) {
      double s4 = (j.location - lo_) / h();
      std::size_t i = std::min(static_cast<std::size_t>(s4), cells_ - 1);
      double frac = s4 - static_cast<double>(i);
      double wl = wn[i] + frac * (wn[i + 1] - wn[i]);
      double cw = cumw[i] + 0.5 * (wn[i] + wl) * frac * h();
      s -= j.amplitude * cw;
    }
  }
  return s;
}

double HybridBVFunction::variation() const {
  double v = jump_variation();
  for (std::size_t i = 0; i < cells_; ++i) v += std::abs(reg_[i + 1] - reg_[i]);
  return v;
}

double HybridBVFunction::jump_variation() const {
  double v = 0.0;
  for (const Jump& j : jumps_) v += std::abs(j.amplitude);
  return v;
}

double HybridBVFunction::regular_sup_norm() const {
  double v = 0.0;
  for (double r : reg_) v = std::max(v, std::abs(r));
  return v;
}

double HybridBVFunction::max_regular_gap() const {
  double v = 0.0;
  for (std::size_t i = 0; i < cells_; ++i)
    v = std::max(v, std::abs(reg_[i + 1] - reg_[i]));
  return v;
}

HybridBVFunction HybridBVFunction::multiply_smooth(
    const std::function<double(double)>& w) const {
  HybridBVFunction out(lo_, hi_, cells_);
  for (const Jump& j : jumps_) out.add_jump(j.location, j.amplitude * w(j.location));
  for (std::size_t i = 0; i <= cells_; ++i) {
    double x = out.node(i);
    out.reg_[i] = eval(x) * w(x) - out.jump_part(x);
  }
  return out;
}

HybridBVFunction HybridBVFunction::regular_derivative() const {
  HybridBVFunction out(lo_, hi_, cells_);
  double step = h();
  for (std::size_t i = 0; i <= cells_; ++i) {
    if (i == 0) {
      out.reg_[i] = (reg_[1] - reg_[0]) / step;
    } else if (i == cells_) {
      out.reg_[i] = (reg_[cells_] - reg_[cells_ - 1]) / step;
    } else {
      out.reg_[i] = (reg_[i + 1] - reg_[i - 1]) / (2.0 * step);
    }
  }
  return out;
}

std::string HybridBVFunction::to_csv() const {
  std::string out = "x,value\n";
  char buf[80];
  for (std::size_t i = 0; i <= cells_; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", node(i), reg_[i]);
    out += buf;
  }
  out += "location,amplitude\n";
  for (const Jump& j : jumps_) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", j.location, j.amplitude);
    out += buf;
  }
  return out;
}

}  // namespace pexmap
