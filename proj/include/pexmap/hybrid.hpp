#ifndef PEXMAP_HYBRID_HPP
#define PEXMAP_HYBRID_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace pexmap {

struct Jump {
  double location;
  double amplitude;
};

/// Function of bounded variation stored as a sorted jump list plus a
/// grid-sampled regular part on [lo, hi].  The full value at x is
/// regular(x) + sum_u s_u H_u(x), with H_u = -1 below u, 0 above u and
/// -1/2 at u, so point evaluation at a stored jump location returns the
/// midpoint of the one-sided limits.  Zero outside [lo, hi].
class HybridBVFunction {
 public:
  static constexpr double kPruneTol = 1e-13;
  static constexpr double kMergeTol = 1e-11;

  HybridBVFunction(double lo, double hi, std::size_t cells);

  static HybridBVFunction from_function(double lo, double hi, std::size_t cells,
                                        const std::function<double(double)>& f);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t cells() const { return cells_; }
  double h() const { return (hi_ - lo_) / static_cast<double>(cells_); }
  double node(std::size_t i) const { return lo_ + h() * static_cast<double>(i); }

  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::vector<double>& regular() const { return reg_; }
  std::vector<double>& regular() { return reg_; }

  /// Insert (or merge within kMergeTol) a jump; amplitudes below kPruneTol
  /// after merging are dropped.
  void add_jump(double location, double amplitude);

  double eval(double x) const;
  double eval_left(double x) const;   // lim_{y up x}
  double eval_right(double x) const;  // lim_{y down x}
  double eval_regular(double x) const;
  double jump_part(double x) const;

  double integral() const;
  double variation() const;
  double jump_variation() const;
  double regular_sup_norm() const;
  double max_regular_gap() const;  // largest adjacent-sample difference

  /// Integral of (this * w) for a continuous weight w, trapezoid on the
  /// regular grid plus exact jump contributions.
  double integral_against(const std::function<double(double)>& w) const;

  HybridBVFunction multiply_smooth(const std::function<double(double)>& w) const;

  /// Regular-part finite-difference derivative (jumps are discarded); used
  /// for building (X rho_r)' style inputs.
  HybridBVFunction regular_derivative() const;

  std::string to_csv() const;

 private:
  double lo_, hi_;
  std::size_t cells_;
  std::vector<double> reg_;     // cells_+1 node samples
  std::vector<Jump> jumps_;     // sorted by location
  std::vector<double> suffix_;  // suffix sums of amplitudes (suffix_[i] = sum_{j>=i})

  void rebuild_suffix();
};

}  // namespace pexmap

#endif
