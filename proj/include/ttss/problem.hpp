#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ttss {

enum class UniKind { Const, SinPiK, Poly, Exp, Step };

// Built-in univariate function.  Parameters:
//   const    [c]                 c
//   sin_pi_k [k, amp=1, phase=0] amp*sin(k*pi*x + phase)
//   poly     [c0, c1, ...]       c0 + c1*x + ...
//   exp      [a, amp=1]          amp*exp(a*x)
//   step     [x0, left, right]   left for x <= x0, right otherwise
// With a support [lo, hi) the function is zero outside it.
struct Univariate {
  UniKind kind = UniKind::Const;
  std::vector<double> params{0.0};
  bool has_support = false;
  double lo = 0.0, hi = 0.0;

  double eval(double x, int deriv = 0) const;

  static Univariate constant(double c);
  static Univariate sin_pi_k(double k, double amp = 1.0, double phase = 0.0);
  static Univariate poly(std::vector<double> coeffs);
  static Univariate exp(double a, double amp = 1.0);
  static Univariate step(double x0, double left, double right);
  Univariate& support(double lo_, double hi_);
};

std::string to_string(UniKind k);

// Sum of built-ins.
struct Factor {
  std::vector<Univariate> parts;

  Factor() = default;
  Factor(Univariate u) : parts{std::move(u)} {}  // NOLINT(google-explicit-constructor)
  Factor(std::vector<Univariate> p) : parts(std::move(p)) {}  // NOLINT

  double eval(double x, int deriv = 0) const;
};

struct Term {
  double scale = 1.0;
  std::vector<Factor> factors;
};

// Sum of products of univariate factors.
struct SeparableFunction {
  std::vector<Term> terms;

  bool empty() const { return terms.empty(); }
  int arity() const { return terms.empty() ? 0 : static_cast<int>(terms.front().factors.size()); }
  double eval(std::span<const double> x) const;
  bool is_constant() const;

  static SeparableFunction constant(double c, int arity);
  static SeparableFunction product(std::vector<Factor> factors, double scale = 1.0);
  SeparableFunction& operator+=(const SeparableFunction& o);
};

// Drops the trailing (time) argument by evaluating it at t; the deriv-th
// time derivative is taken.
SeparableFunction freeze_time(const SeparableFunction& f, double t, int deriv = 0);

enum class TimeScheme { SpaceTime, BackwardEuler, CrankNicolson };
enum class Stabilization { Plain, Superconsistent };

// Factors paired with a 1-D derivative block in the other dimensions:
// Identity evaluates those dimensions at the representation nodes, Collocated
// at the collocation nodes (c0 rows).
enum class Companions { Identity, Collocated };

struct TimeSpec {
  double t_end = 1.0;
  TimeScheme scheme = TimeScheme::SpaceTime;
  int degree = 0;  // space-time degree in time; 0 means the first spatial degree
  double dt = 0.0;
  double step_rounding_tol = 1e-8;
  int stride = 1;
};

// Per-dimension collocation placement.  Auto derives (eps*, beta*) from the
// coefficients on the axis line through the domain center.
struct Placement {
  enum class Kind { Auto, Fixed, Gauss, Gll };
  Kind kind = Kind::Auto;
  double epsilon = 1.0;
  double beta = 0.0;
};

struct ProblemSpec {
  int dims = 1;
  std::vector<int> degrees;
  SeparableFunction epsilon;
  std::vector<SeparableFunction> beta;
  SeparableFunction rho;
  SeparableFunction rhs;                     // arity dims or dims+1 (time last)
  SeparableFunction dirichlet;               // arity dims or dims+1
  SeparableFunction initial;                 // arity dims
  std::optional<SeparableFunction> exact;    // manufactured solution, arity dims or dims+1
  std::optional<TimeSpec> time;
  Stabilization stabilization = Stabilization::Superconsistent;
  Companions companions = Companions::Identity;
  std::vector<Placement> placement;          // empty: Auto everywhere

  // Throws InvalidArgument / ConfigError.
  void validate() const;
};

}  // namespace ttss
