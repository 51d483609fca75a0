#ifndef PEXMAP_OBSERVABLE_HPP
#define PEXMAP_OBSERVABLE_HPP

#include <functional>
#include <string>
#include <vector>

namespace pexmap {

/// C^1 test function with an explicit derivative.
struct Observable {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> deriv;

  double operator()(double x) const { return value(x); }
};

/// Polynomial sum c_i x^i.
Observable polynomial_observable(const std::vector<double>& coeffs);

/// Normalized C^2 bump supported in (a, b): square of the quintic smoothstep
/// tent, scaled so the integral is 1.
Observable bump_observable(double a, double b);

/// "bump6" -> 6x(1-x); "bump:a,b" -> bump_observable(a,b);
/// "poly:c0,c1,..." -> polynomial. Throws ConfigError otherwise.
Observable parse_observable(const std::string& spec);

}  // namespace pexmap

#endif
