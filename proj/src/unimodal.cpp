#include "pexmap/unimodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pexmap/errors.hpp"

namespace pexmap {

// ---------------------------------------------------------------- Perturbation

Perturbation::Perturbation(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double Perturbation::operator()(double x) const {
  double v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * x + *it;
  return v;
}

double Perturbation::deriv(double x) const {
  double v = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 1;)
    v = v * x + static_cast<double>(i) * coeffs_[i];
  return v;
}

double Perturbation::deriv2(double x) const {
  double v = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 2;)
    v = v * x + static_cast<double>(i * (i - 1)) * coeffs_[i];
  return v;
}

// ---------------------------------------------------------------- KneadingCode

namespace {

int parse_repeat(const std::string& s, std::size_t& i) {
  if (i >= s.size() || s[i] != '^') return 1;
  ++i;
  std::size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == start) throw ConfigError("code: '^' must be followed by an integer");
  return std::atoi(s.substr(start, i - start).c_str());
}

}  // namespace

KneadingCode KneadingCode::parse(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);

  KneadingCode code;
  std::vector<Symbol> flat;
  std::size_t i = 0;
  bool saw_tail = false;
  while (i < s.size()) {
    std::vector<Symbol> group;
    if (s[i] == 'R' || s[i] == 'L') {
      group.push_back(s[i] == 'R' ? Symbol::R : Symbol::L);
      ++i;
    } else if (s[i] == '(') {
      std::size_t close = s.find(')', i);
      if (close == std::string::npos) throw ConfigError("code: unmatched '('");
      for (std::size_t j = i + 1; j < close; ++j) {
        if (s[j] != 'R' && s[j] != 'L')
          throw ConfigError("code: groups may contain only R and L");
        group.push_back(s[j] == 'R' ? Symbol::R : Symbol::L);
      }
      if (group.empty()) throw ConfigError("code: empty group");
      i = close + 1;
    } else {
      throw ConfigError(std::string("code: unexpected character '") + s[i] + "'");
    }
    int rep = parse_repeat(s, i);
    bool star = (i < s.size() && s[i] == '*');
    if (star) {
      if (i + 1 != s.size()) throw ConfigError("code: '*' must terminate the code");
      ++i;
      code.stem = flat;
      code.tail.clear();
      for (int r = 0; r < rep; ++r)
        code.tail.insert(code.tail.end(), group.begin(), group.end());
      saw_tail = true;
    } else {
      for (int r = 0; r < rep; ++r)
        flat.insert(flat.end(), group.begin(), group.end());
    }
  }
  if (!saw_tail) throw ConfigError("code: missing '*' tail");
  if (code.stem.empty() || code.stem.front() != Symbol::R)
    throw ConfigError("code: must begin with R");
  return code;
}

std::string KneadingCode::str() const {
  std::string out = symbols_to_string(stem);
  if (tail.size() == 1) {
    out += static_cast<char>(tail.front());
  } else {
    out += "(" + symbols_to_string(tail) + ")";
  }
  out += "*";
  return out;
}

Symbol KneadingCode::at(std::size_t j) const {
  // 1-based
  if (j == 0) throw ConfigError("code index is 1-based");
  std::size_t idx = j - 1;
  if (idx < stem.size()) return stem[idx];
  return tail[(idx - stem.size()) % tail.size()];
}

std::vector<Symbol> KneadingCode::prefix(std::size_t n) const {
  std::vector<Symbol> out;
  out.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) out.push_back(at(j));
  return out;
}

bool operator==(const KneadingCode& lhs, const KneadingCode& rhs) {
  std::size_t n = std::max(lhs.stem.size() + 2 * lhs.tail.size(),
                           rhs.stem.size() + 2 * rhs.tail.size());
  // Equality as infinite sequences on a prefix long enough to cover both.
  std::size_t period = lhs.tail.size() * rhs.tail.size();
  for (std::size_t j = 1; j <= n + period; ++j)
    if (lhs.at(j) != rhs.at(j)) return false;
  return true;
}

std::string symbols_to_string(const std::vector<Symbol>& symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) out.push_back(static_cast<char>(s));
  return out;
}

// --------------------------------------------------------------------- TentMap

TentMap::TentMap(double slope) : TentMap(slope, 2.0 - slope) {}

TentMap TentMap::from_two_minus_slope(double t) { return TentMap(2.0 - t, t); }

TentMap::TentMap(double slope, double two_minus_slope)
    : lambda_(slope), two_minus_lambda_(two_minus_slope) {
  if (!(slope > 1.0) || !(slope <= 2.0))
    throw UnsupportedInput("tent slope must lie in (1,2]");
  a_ = 0.0;
  b_ = 1.0;
  c_ = 0.5;
  a0_ = 0.0;  // psi_+(0) = 0
  b0_ = 1.0;  // psi_-(0) = 1
}

double TentMap::eval(double x) const {
  return x <= c_ ? lambda_ * x : lambda_ - lambda_ * x;
}

double TentMap::deriv(double x) const { return x < c_ ? lambda_ : -lambda_; }

// ----------------------------------------------------------- PerturbedTentMap

PerturbedTentMap::PerturbedTentMap(TentMap base, Perturbation X, double t)
    : base_(base), X_(std::move(X)), t_(t) {
  a_ = base_.a();
  b_ = base_.b();
  c_ = base_.c();

  // Invariance of [a,b] under f_t (admissible range of t).
  double fc = h(base_.critical_value());
  double fa = h(base_.eval(a_));
  double fb = h(base_.eval(b_));
  if (fc > b_ + 1e-14 || std::min(fa, fb) < a_ - 1e-14)
    throw DomainEscape("f_t does not map [a,b] into itself");

  // Expansion: |f_t'| = lambda * h'(f(x)) over the reachable values.
  double lo = std::min({fa, fb, a_}), hi = std::max(fc, b_);
  double minh = 1e300;
  const int samples = 512;
  for (int i = 0; i <= samples; ++i) {
    double y = lo + (hi - lo) * i / samples;
    minh = std::min(minh, h_deriv(y));
  }
  min_slope_ = base_.slope() * minh;
  if (!(min_slope_ > 1.0))
    throw DomainEscape("perturbed map is not uniformly expanding");

  // a0: fixed point of psi_+ (contraction), b0 = psi_-(a0).
  double x = 0.0;
  for (int it = 0; it < 200; ++it) {
    double next = inv_plus(x);
    if (std::abs(next - x) < 1e-16) {
      x = next;
      break;
    }
    x = next;
  }
  a0_ = x;
  b0_ = inv_minus(a0_);
}

double PerturbedTentMap::eval(double x) const { return h(base_.eval(x)); }

double PerturbedTentMap::deriv(double x) const {
  return h_deriv(base_.eval(x)) * base_.deriv(x);
}

double PerturbedTentMap::deriv2(double x) const {
  double g = base_.eval(x), gp = base_.deriv(x);
  return t_ * X_.deriv2(g) * gp * gp;
}

double PerturbedTentMap::h_inv(double y) const {
  // h is strictly increasing on the range of interest; Newton with a
  // bisection fallback.
  double x = y;
  for (int it = 0; it < 64; ++it) {
    double fx = h(x) - y;
    double dfx = h_deriv(x);
    double step = fx / dfx;
    x -= step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) return x;
  }
  // Fallback: bracket around y.
  double lo = y - 2.0 * std::abs(t_) - 1e-9, hi = y + 2.0 * std::abs(t_) + 1e-9;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (h(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double PerturbedTentMap::inv_plus(double y) const { return base_.inv_plus(h_inv(y)); }
double PerturbedTentMap::inv_minus(double y) const { return base_.inv_minus(h_inv(y)); }

double PerturbedTentMap::inv_plus_deriv(double y) const {
  return 1.0 / (base_.slope() * h_deriv(h_inv(y)));
}

double PerturbedTentMap::inv_minus_deriv(double y) const {
  return -1.0 / (base_.slope() * h_deriv(h_inv(y)));
}

double PerturbedTentMap::branch_plus(double x) const { return h(base_.branch_plus(x)); }
double PerturbedTentMap::branch_minus(double x) const { return h(base_.branch_minus(x)); }

double PerturbedTentMap::branch_plus_deriv(double x) const {
  return h_deriv(base_.branch_plus(x)) * base_.slope();
}

double PerturbedTentMap::branch_minus_deriv(double x) const {
  return -h_deriv(base_.branch_minus(x)) * base_.slope();
}

// ------------------------------------------------------------------ operations

double eval_perturbed(const TentMap& f, const Perturbation& X, double t, double x) {
  if (x < f.a() - 1e-14 || x > f.b() + 1e-14)
    throw UnsupportedInput("eval_perturbed: x outside [a,b]");
  auto ft = [&](double u) { double y = f.eval(u); return y + t * X(y); };
  if (ft(f.c()) > f.b() + 1e-14 ||
      std::min(ft(f.a()), ft(f.b())) < f.a() - 1e-14)
    throw DomainEscape("f_t leaves [a,b]");
  double y = f.eval(x);
  return y + t * X(y);
}

double CriticalOrbitInfo::point(std::size_t j) const {
  if (j == 0) throw UnsupportedInput("orbit index is 1-based");
  if (j <= points.size()) return points[j - 1];
  if (!preperiodic)
    throw UnsupportedInput("orbit index beyond truncation depth");
  std::size_t idx = static_cast<std::size_t>(n0) +
                    (j - static_cast<std::size_t>(n0)) % static_cast<std::size_t>(n1);
  return points[idx - 1];
}

CriticalOrbitInfo critical_orbit(const UnimodalMap& f, int n_max, double tol,
                                 double near_tol) {
  if (n_max < 2) throw UnsupportedInput("critical_orbit: n_max must be >= 2");
  CriticalOrbitInfo info;
  double x = f.critical_value();
  for (int k = 1; k <= n_max; ++k) {
    if (k > 1 && std::abs(x - f.c()) < near_tol)
      throw NearCriticalOrbit("orbit point c_" + std::to_string(k) +
                              " within near-critical guard of c");
    info.points.push_back(x);
    info.code.push_back(x > f.c() ? Symbol::R : Symbol::L);

    // Revisit scan: smallest k, then smallest i, gives minimal (n0, n1).
    for (int i = 1; i < k && !info.preperiodic; ++i) {
      if (std::abs(info.points[i - 1] - x) <= tol) {
        info.preperiodic = true;
        info.n0 = i;
        info.n1 = k - i;
        info.closure_residual = std::abs(info.points[i - 1] - x);
      }
    }
    if (info.preperiodic) {
      info.points.pop_back();  // c_{n0+n1} duplicates c_{n0}
      info.code.pop_back();
      break;
    }
    x = f.eval(x);
  }
  if (info.preperiodic) {
    // Keep exactly c_1 .. c_{n0+n1-1}.
    info.points.resize(info.n0 + info.n1 - 1);
    info.code.resize(info.n0 + info.n1 - 1);
  }
  return info;
}

std::vector<Symbol> kneading_code(const UnimodalMap& f, int n, double near_tol) {
  std::vector<Symbol> code;
  double x = f.critical_value();
  for (int k = 1; k <= n; ++k) {
    if (k > 1 && std::abs(x - f.c()) < near_tol)
      throw NearCriticalOrbit("kneading code: orbit re-enters the critical gap");
    code.push_back(x > f.c() ? Symbol::R : Symbol::L);
    x = f.eval(x);
  }
  return code;
}

namespace {

// Orbit iteration that follows prescribed symbols (smooth in lambda).
double prescribed_orbit_point(double lambda, const KneadingCode& code,
                              std::size_t j) {
  double x = lambda / 2.0;
  for (std::size_t m = 1; m < j; ++m)
    x = (code.at(m) == Symbol::L) ? lambda * x : lambda - lambda * x;
  return x;
}

// Closure residual c_{n0+n1}(lambda) - c_{n0}(lambda) along the prescribed code.
double closure_residual(double lambda, const KneadingCode& code) {
  std::size_t n0 = code.stem.size() + 1;
  double entry = prescribed_orbit_point(lambda, code, n0);
  double x = entry;
  for (std::size_t m = 0; m < code.tail.size(); ++m) {
    Symbol s = code.at(n0 + m);
    x = (s == Symbol::L) ? lambda * x : lambda - lambda * x;
  }
  return x - entry;
}

bool code_realized(double lambda, const KneadingCode& code, std::size_t depth) {
  TentMap g(lambda);
  double x = g.critical_value();
  for (std::size_t j = 1; j <= depth; ++j) {
    if (std::abs(x - g.c()) < 1e-9) {
      // Near-critical points arise only from closure round-off at the cycle;
      // treat the prescribed symbol as realized.
      x = g.eval(x);
      continue;
    }
    Symbol s = x > g.c() ? Symbol::R : Symbol::L;
    if (s != code.at(j)) return false;
    x = g.eval(x);
  }
  return true;
}

bool is_lambda_k_code(const KneadingCode& code, int& k_out) {
  if (code.tail.size() != 1 || code.tail[0] != Symbol::R) return false;
  if (code.stem.empty() || code.stem[0] != Symbol::R) return false;
  for (std::size_t i = 1; i < code.stem.size(); ++i)
    if (code.stem[i] != Symbol::L) return false;
  k_out = static_cast<int>(code.stem.size()) - 1;
  return k_out >= 1;
}

}  // namespace

LambdaK lambda_k_family(int k) {
  if (k < 1) throw UnsupportedInput("lambda_k_family: k >= 1 required");
  // Closure c_{k+1} = y_lambda  <=>  lambda^k (2-lambda)(1+lambda) = 2.
  // Solved in t = 2-lambda to keep full relative precision near lambda = 2:
  //   F(t) = (2-t)^k t (3-t) - 2.
  auto F = [k](double t) {
    return std::pow(2.0 - t, static_cast<double>(k)) * t * (3.0 - t) - 2.0;
  };
  double lo = 1e-300, hi = 0.8;
  if (F(hi) <= 0.0) throw NoConvergence("lambda_k_family: bracket failed");
  double t = 0.0;
  for (int it = 0; it < 200; ++it) {
    t = 0.5 * (lo + hi);
    double v = F(t);
    if (v == 0.0) break;
    (v < 0.0 ? lo : hi) = t;
    if ((hi - lo) < 1e-16 * t) break;
  }
  t = 0.5 * (lo + hi);
  // Post-check of the closure identity 2-lambda = [2/(1+lambda)] lambda^{-k}.
  double lambda = 2.0 - t;
  double rhs = 2.0 / ((1.0 + lambda) * std::pow(lambda, static_cast<double>(k)));
  if (std::abs(t - rhs) > 1e-10 * std::abs(t))
    throw NoConvergence("lambda_k_family: closure identity post-check failed");
  return LambdaK{lambda, t, k};
}

double solve_code_parameter(const KneadingCode& code) {
  int k = 0;
  if (is_lambda_k_code(code, k)) {
    // R L^k R^inf: the closure is ill-conditioned in lambda near 2; use the
    // t-space solver.
    return lambda_k_family(k).lambda;
  }
  if (code.tail.size() == 1 && code.tail[0] == Symbol::L && code.stem.size() == 1) {
    // R L^inf is the full tent map.
    return 2.0;
  }

  std::size_t depth = code.stem.size() + 2 * code.tail.size() + 8;
  const double lo_all = 1.0 + 1e-6, hi_all = 2.0;
  const int scan = 8192;
  double prev_lambda = lo_all;
  double prev_res = closure_residual(prev_lambda, code);
  for (int i = 1; i <= scan; ++i) {
    double lam = lo_all + (hi_all - lo_all) * i / scan;
    double res = closure_residual(lam, code);
    if (prev_res == 0.0 && code_realized(prev_lambda, code, depth))
      return prev_lambda;
    if (prev_res * res < 0.0) {
      double lo = prev_lambda, hi = lam, flo = prev_res;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = closure_residual(mid, code);
        if (fmid == 0.0) { lo = hi = mid; break; }
        if (flo * fmid < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fmid;
        }
        if (hi - lo < 1e-15) break;
      }
      double root = 0.5 * (lo + hi);
      if (std::abs(closure_residual(root, code)) <= 1e-12 &&
          code_realized(root, code, depth))
        return root;
    }
    prev_lambda = lam;
    prev_res = res;
  }
  if (std::abs(closure_residual(2.0, code)) <= 1e-12 &&
      code_realized(2.0, code, depth))
    return 2.0;
  throw CodeNotRealizable("no slope in (1,2] realizes code " + code.str());
}

CriticalOrbitInfo orbit_from_code(const TentMap& g, const KneadingCode& code) {
  const double lambda = g.slope();
  CriticalOrbitInfo info;
  info.preperiodic = true;
  info.n0 = static_cast<int>(code.stem.size()) + 1;
  info.n1 = static_cast<int>(code.tail.size());

  // Stem points by forward iteration; c_2 built from 2-lambda to keep
  // precision when lambda is close to 2.
  std::vector<double> pts;
  double x = lambda / 2.0;
  for (std::size_t j = 1; j < code.stem.size() + 1 && j <= code.stem.size(); ++j) {
    pts.push_back(x);
    if (j == 1 && code.at(1) == Symbol::R) {
      x = lambda * g.two_minus_slope() / 2.0;  // c_2 = lambda(2-lambda)/2
    } else {
      x = (code.at(j) == Symbol::L) ? lambda * x : lambda - lambda * x;
    }
  }

  // Cycle points: fixed point of the affine composition along the tail.
  double alpha = 0.0, beta = 1.0;  // composition y -> alpha + beta*y
  for (std::size_t m = 0; m < code.tail.size(); ++m) {
    Symbol s = code.tail[m];
    if (s == Symbol::L) {
      alpha = lambda * alpha;
      beta = lambda * beta;
    } else {
      alpha = lambda - lambda * alpha;
      beta = -lambda * beta;
    }
  }
  if (std::abs(1.0 - beta) < 1e-14)
    throw SingularSystem("orbit_from_code: degenerate tail composition");
  double entry = alpha / (1.0 - beta);
  info.closure_residual = std::abs(x - entry);
  double y = entry;
  for (std::size_t m = 0; m < code.tail.size(); ++m) {
    pts.push_back(y);
    y = (code.tail[m] == Symbol::L) ? lambda * y : lambda - lambda * y;
  }
  info.points = std::move(pts);
  info.code = code.prefix(info.points.size());
  // Consistency: symbols of the constructed points must match the code.
  for (std::size_t j = 0; j < info.points.size(); ++j) {
    Symbol s = info.points[j] > g.c() ? Symbol::R : Symbol::L;
    if (std::abs(info.points[j] - g.c()) > 1e-9 && s != info.code[j])
      throw CodeNotRealizable("orbit_from_code: slope does not realize code " +
                              code.str());
  }
  return info;
}

// ------------------------------------------------------------------ map specs

Perturbation parse_perturbation(const std::string& spec) {
  std::vector<double> coeffs;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError("perturbation: bad coefficient '" + tok + "'");
    coeffs.push_back(v);
  }
  if (coeffs.empty()) throw ConfigError("perturbation: empty coefficient list");
  return Perturbation(coeffs);
}

std::unique_ptr<UnimodalMap> parse_map_spec(
    const std::map<std::string, std::string>& spec) {
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = spec.find(key);
    if (it == spec.end()) throw ConfigError("map spec: missing key '" + key + "'");
    return it->second;
  };
  auto get_num = [&](const std::string& key) {
    const std::string& text = get(key);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
      throw ConfigError("map spec: key '" + key + "' is not a number");
    return v;
  };
  const std::string& family = get("family");
  std::vector<std::string> known;
  if (family == "tent") {
    known = {"family", "slope"};
    for (const auto& [key, _] : spec)
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("map spec: unknown key '" + key + "'");
    return std::make_unique<TentMap>(get_num("slope"));
  }
  if (family == "tent_code") {
    known = {"family", "code"};
    for (const auto& [key, _] : spec)
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("map spec: unknown key '" + key + "'");
    double lambda = solve_code_parameter(KneadingCode::parse(get("code")));
    return std::make_unique<TentMap>(lambda);
  }
  if (family == "perturbed") {
    known = {"family", "base_slope", "X_poly", "t"};
    for (const auto& [key, _] : spec)
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("map spec: unknown key '" + key + "'");
    TentMap base(get_num("base_slope"));
    Perturbation X = parse_perturbation(get("X_poly"));
    double t = get_num("t");
    return std::make_unique<PerturbedTentMap>(base, X, t);
  }
  throw ConfigError("map spec: unknown family '" + family + "'");
}

}  // namespace pexmap
