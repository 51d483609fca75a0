#ifndef PEXMAP_UNIMODAL_HPP
#define PEXMAP_UNIMODAL_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pexmap {

/// Polynomial perturbation direction X (coefficients, constant term first).
/// Normalised so that sup|X| <= 1 on [0,1] is the caller's responsibility;
/// the admissibility check lives in PerturbedTentMap.
class Perturbation {
 public:
  explicit Perturbation(std::vector<double> coeffs);

  static Perturbation identity() { return Perturbation({0.0, 1.0}); }
  static Perturbation zero() { return Perturbation({0.0}); }
  static Perturbation one() { return Perturbation({1.0}); }

  double operator()(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

enum class Symbol : char { L = 'L', R = 'R' };

/// Eventually periodic itinerary: a finite stem followed by a tail that
/// repeats forever.  Text form "RL^2R*" means stem RLL, tail R; grouped
/// tails are written "RL(RL)*".
struct KneadingCode {
  std::vector<Symbol> stem;
  std::vector<Symbol> tail;  // nonempty; repeats forever

  static KneadingCode parse(const std::string& text);
  std::string str() const;

  // 1-based symbol lookup with periodic extension.
  Symbol at(std::size_t j) const;
  std::vector<Symbol> prefix(std::size_t n) const;
};

bool operator==(const KneadingCode& lhs, const KneadingCode& rhs);

std::string symbols_to_string(const std::vector<Symbol>& symbols);

/// Piecewise expanding unimodal map on [a,b] with increasing branch on
/// [a,c], decreasing branch on [c,b].  Inverse branches psi_+/psi_- are
/// defined on (-inf, f(c)]; a0 is the fixed point of psi_+, b0 = psi_-(a0).
class UnimodalMap {
 public:
  virtual ~UnimodalMap() = default;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double a0() const { return a0_; }
  double b0() const { return b0_; }
  double critical_value() const { return eval(c_); }

  virtual double eval(double x) const = 0;
  virtual double deriv(double x) const = 0;   // x != c
  virtual double deriv2(double x) const = 0;

  virtual double inv_plus(double y) const = 0;
  virtual double inv_minus(double y) const = 0;
  virtual double inv_plus_deriv(double y) const = 0;
  virtual double inv_minus_deriv(double y) const = 0;

  // Extensions of the two branches to [a0, c] and [c, b0].
  virtual double branch_plus(double x) const = 0;
  virtual double branch_minus(double x) const = 0;
  virtual double branch_plus_deriv(double x) const = 0;
  virtual double branch_minus_deriv(double x) const = 0;

  virtual double min_abs_slope() const = 0;
  virtual bool piecewise_linear() const { return false; }

 protected:
  double a_ = 0.0, b_ = 0.0, c_ = 0.0, a0_ = 0.0, b0_ = 0.0;
};

/// Tent map g_lambda on [0,1]: lambda*x on [0,1/2], lambda-lambda*x on
/// [1/2,1], slope lambda in (1,2].
class TentMap : public UnimodalMap {
 public:
  explicit TentMap(double slope);

  /// Construct from t = 2-lambda kept to full relative precision; needed for
  /// slopes within ~1e-6 of 2 where 2-lambda underflows in the slope itself.
  static TentMap from_two_minus_slope(double t);

  double slope() const { return lambda_; }
  double two_minus_slope() const { return two_minus_lambda_; }

  double fixed_point() const { return lambda_ / (1.0 + lambda_); }      // x_lambda
  double fixed_point_preimage() const { return 1.0 / (1.0 + lambda_); }  // y_lambda
  double second_preimage() const { return fixed_point_preimage() / lambda_; }  // z_lambda

  double eval(double x) const override;
  double deriv(double x) const override;
  double deriv2(double) const override { return 0.0; }
  double inv_plus(double y) const override { return y / lambda_; }
  double inv_minus(double y) const override { return 1.0 - y / lambda_; }
  double inv_plus_deriv(double) const override { return 1.0 / lambda_; }
  double inv_minus_deriv(double) const override { return -1.0 / lambda_; }
  double branch_plus(double x) const override { return lambda_ * x; }
  double branch_minus(double x) const override { return lambda_ - lambda_ * x; }
  double branch_plus_deriv(double) const override { return lambda_; }
  double branch_minus_deriv(double) const override { return -lambda_; }
  double min_abs_slope() const override { return lambda_; }
  bool piecewise_linear() const override { return true; }

 private:
  TentMap(double slope, double two_minus_slope);
  double lambda_;
  double two_minus_lambda_;
};

/// f_t = f + t X(f) for a tent base f; equals h o f with h(y) = y + t X(y).
class PerturbedTentMap : public UnimodalMap {
 public:
  PerturbedTentMap(TentMap base, Perturbation X, double t);

  const TentMap& base() const { return base_; }
  const Perturbation& perturbation() const { return X_; }
  double t() const { return t_; }

  double eval(double x) const override;
  double deriv(double x) const override;
  double deriv2(double x) const override;
  double inv_plus(double y) const override;
  double inv_minus(double y) const override;
  double inv_plus_deriv(double y) const override;
  double inv_minus_deriv(double y) const override;
  double branch_plus(double x) const override;
  double branch_minus(double x) const override;
  double branch_plus_deriv(double x) const override;
  double branch_minus_deriv(double x) const override;
  double min_abs_slope() const override { return min_slope_; }

 private:
  double h(double y) const { return y + t_ * X_(y); }
  double h_deriv(double y) const { return 1.0 + t_ * X_.deriv(y); }
  double h_inv(double y) const;

  TentMap base_;
  Perturbation X_;
  double t_;
  double min_slope_;
};

/// Critical orbit c_k = f^k(c), its L/R code, and preperiodicity data.
struct CriticalOrbitInfo {
  std::vector<double> points;   // c_1 .. c_K
  std::vector<Symbol> code;
  bool preperiodic = false;
  int n0 = 0;                   // preperiod (>= 2), valid when preperiodic
  int n1 = 0;                   // minimal eventual period
  double closure_residual = 0.0;

  // N = n0+n1-1 in the Markov case, truncation depth otherwise.
  int N() const {
    return preperiodic ? n0 + n1 - 1 : static_cast<int>(points.size());
  }

  // 1-based c_j, with periodic extension past N in the Markov case.
  double point(std::size_t j) const;
};

double eval_perturbed(const TentMap& f, const Perturbation& X, double t, double x);

CriticalOrbitInfo critical_orbit(const UnimodalMap& f, int n_max,
                                 double tol = 1e-10, double near_tol = 1e-9);

std::vector<Symbol> kneading_code(const UnimodalMap& f, int n,
                                  double near_tol = 1e-9);

struct LambdaK {
  double lambda;
  double two_minus_lambda;  // full relative precision
  int k;
};

/// lambda_k: the slope with code R L^k R^inf, i.e. c_{k+1} = y_lambda.
LambdaK lambda_k_family(int k);

/// Slope realizing an eventually periodic code, |closure residual| <= 1e-12.
double solve_code_parameter(const KneadingCode& code);

/// Build the orbit of a preperiodic tent map directly from its code:
/// the cycle points are solved exactly from the affine tail composition.
CriticalOrbitInfo orbit_from_code(const TentMap& g, const KneadingCode& code);

/// Parse a line-oriented key=value map block (family=tent / tent_code /
/// perturbed).  Unknown keys are rejected.
std::unique_ptr<UnimodalMap> parse_map_spec(
    const std::map<std::string, std::string>& spec);

Perturbation parse_perturbation(const std::string& spec);

}  // namespace pexmap

#endif
