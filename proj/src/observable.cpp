#include "pexmap/observable.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pexmap/errors.hpp"

namespace pexmap {

Observable polynomial_observable(const std::vector<double>& coeffs) {
  std::string name = "poly:";
  char buf[40];
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.17g", i ? "," : "", coeffs[i]);
    name += buf;
  }
  return Observable{
      name,
      [coeffs](double x) {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
        return v;
      },
      [coeffs](double x) {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 1;)
          v = v * x + coeffs[i] * static_cast<double>(i);
        return v;
      }};
}

namespace {

double smoothstep5(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep5_d(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }

}  // namespace

Observable bump_observable(double a, double b) {
  if (!(b > a)) throw ConfigError("bump observable: need a < b");
  const double w = b - a;
  // s(u)s(1-u) squared; its integral over (0,1) fixes the normalisation.
  auto core = [](double u) {
    double t = smoothstep5(u) * smoothstep5(1.0 - u);
    return t * t;
  };
  auto core_d = [](double u) {
    double t = smoothstep5(u) * smoothstep5(1.0 - u);
    double td = smoothstep5_d(u) * smoothstep5(1.0 - u) -
                smoothstep5(u) * smoothstep5_d(1.0 - u);
    return 2.0 * t * td;
  };
  // core is a fixed degree-20 polynomial on (0,1); its integral is computed
  // once by composite Simpson (exact to machine precision at this resolution).
  static const double kCoreIntegral = [] {
    const int n = 1 << 14;
    double s = 0.0;
    auto c = [](double u) {
      double t = smoothstep5(u) * smoothstep5(1.0 - u);
      return t * t;
    };
    for (int i = 0; i < n; ++i) {
      double u0 = static_cast<double>(i) / n, u1 = static_cast<double>(i + 1) / n;
      s += (c(u0) + 4.0 * c(0.5 * (u0 + u1)) + c(u1)) * (u1 - u0) / 6.0;
    }
    return s;
  }();
  const double norm = 1.0 / (w * kCoreIntegral);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "bump:%.17g,%.17g", a, b);
  return Observable{buf,
                    [=](double x) {
                      if (x <= a || x >= b) return 0.0;
                      return norm * core((x - a) / w);
                    },
                    [=](double x) {
                      if (x <= a || x >= b) return 0.0;
                      return norm * core_d((x - a) / w) / w;
                    }};
}

Observable parse_observable(const std::string& spec) {
  if (spec == "bump6") {
    Observable o = polynomial_observable({0.0, 6.0, -6.0});
    o.name = "bump6";
    return o;
  }
  auto parse_list = [&](const std::string& body) {
    std::vector<double> vals;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        throw ConfigError("observable: bad number '" + tok + "'");
      }
      if (pos != tok.size())
        throw ConfigError("observable: bad number '" + tok + "'");
      vals.push_back(v);
    }
    return vals;
  };
  if (spec.rfind("bump:", 0) == 0) {
    auto vals = parse_list(spec.substr(5));
    if (vals.size() != 2)
      throw ConfigError("observable: bump takes two endpoints");
    return bump_observable(vals[0], vals[1]);
  }
  if (spec.rfind("poly:", 0) == 0) {
    auto vals = parse_list(spec.substr(5));
    if (vals.empty()) throw ConfigError("observable: empty polynomial");
    return polynomial_observable(vals);
  }
  throw ConfigError("unknown observable spec '" + spec + "'");
}

}  // namespace pexmap
