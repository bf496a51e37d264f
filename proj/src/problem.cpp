#include "ttss/problem.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ttss/errors.hpp"
#include "ttss/spectral1d.hpp"

namespace ttss {

namespace {

double param(const std::vector<double>& p, std::size_t i, double dflt) {
  return i < p.size() ? p[i] : dflt;
}

}  // namespace

std::string to_string(UniKind k) {
  switch (k) {
    case UniKind::Const: return "const";
    case UniKind::SinPiK: return "sin_pi_k";
    case UniKind::Poly: return "poly";
    case UniKind::Exp: return "exp";
    case UniKind::Step: return "step";
  }
  return "?";
}

double Univariate::eval(double x, int deriv) const {
  if (deriv < 0) throw InvalidArgument("Univariate::eval: negative derivative order");
  if (has_support && !(x >= lo && x < hi)) return 0.0;
  switch (kind) {
    case UniKind::Const:
      return deriv == 0 ? param(params, 0, 0.0) : 0.0;
    case UniKind::SinPiK: {
      const double w = param(params, 0, 1.0) * std::numbers::pi;
      const double amp = param(params, 1, 1.0);
      const double arg = w * x + param(params, 2, 0.0);
      const double scale = amp * std::pow(w, deriv);
      switch (deriv % 4) {
        case 0: return scale * std::sin(arg);
        case 1: return scale * std::cos(arg);
        case 2: return -scale * std::sin(arg);
        default: return -scale * std::cos(arg);
      }
    }
    case UniKind::Poly: {
      std::vector<double> c = params;
      for (int m = 0; m < deriv && !c.empty(); ++m) {
        for (std::size_t j = 1; j < c.size(); ++j) c[j - 1] = double(j) * c[j];
        c.pop_back();
      }
      double v = 0.0;
      for (std::size_t j = c.size(); j-- > 0;) v = v * x + c[j];
      return v;
    }
    case UniKind::Exp: {
      const double a = param(params, 0, 1.0);
      return param(params, 1, 1.0) * std::pow(a, deriv) * std::exp(a * x);
    }
    case UniKind::Step:
      if (deriv > 0) return 0.0;
      return x <= param(params, 0, 0.0) ? param(params, 1, 1.0) : param(params, 2, 0.0);
  }
  return 0.0;
}

Univariate Univariate::constant(double c) { return {UniKind::Const, {c}}; }
Univariate Univariate::sin_pi_k(double k, double amp, double phase) {
  return {UniKind::SinPiK, {k, amp, phase}};
}
Univariate Univariate::poly(std::vector<double> coeffs) { return {UniKind::Poly, std::move(coeffs)}; }
Univariate Univariate::exp(double a, double amp) { return {UniKind::Exp, {a, amp}}; }
Univariate Univariate::step(double x0, double left, double right) {
  return {UniKind::Step, {x0, left, right}};
}
Univariate& Univariate::support(double lo_, double hi_) {
  has_support = true;
  lo = lo_;
  hi = hi_;
  return *this;
}

double Factor::eval(double x, int deriv) const {
  double v = 0.0;
  for (const auto& p : parts) v += p.eval(x, deriv);
  return v;
}

double SeparableFunction::eval(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& t : terms) {
    double v = t.scale;
    for (std::size_t k = 0; k < t.factors.size(); ++k) v *= t.factors[k].eval(x[k]);
    total += v;
  }
  return total;
}

bool SeparableFunction::is_constant() const {
  for (const auto& t : terms)
    for (const auto& f : t.factors)
      for (const auto& p : f.parts)
        if (p.kind != UniKind::Const || p.has_support) return false;
  return true;
}

SeparableFunction SeparableFunction::constant(double c, int arity) {
  Term t;
  t.scale = c;
  t.factors.assign(arity, Factor(Univariate::constant(1.0)));
  return {{t}};
}

SeparableFunction SeparableFunction::product(std::vector<Factor> factors, double scale) {
  return {{Term{scale, std::move(factors)}}};
}

SeparableFunction& SeparableFunction::operator+=(const SeparableFunction& o) {
  if (!empty() && !o.empty() && arity() != o.arity())
    throw InvalidArgument("SeparableFunction: arity mismatch in sum");
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

void ProblemSpec::validate() const {
  if (dims < 1) throw InvalidArgument("problem: dims must be >= 1");
  if (static_cast<int>(degrees.size()) != dims)
    throw InvalidArgument("problem: need one degree per dimension");
  for (int n : degrees)
    if (n < 2) throw InvalidArgument("problem: degrees must be >= 2");
  if (epsilon.arity() != dims) throw InvalidArgument("problem: epsilon must be a function of the space variables");
  if (static_cast<int>(beta.size()) != dims) throw InvalidArgument("problem: need one beta component per dimension");
  for (const auto& b : beta)
    if (b.arity() != dims) throw InvalidArgument("problem: beta components must be functions of space");
  if (rho.arity() != dims) throw InvalidArgument("problem: rho must be a function of space");
  auto space_or_time = [&](const SeparableFunction& f, const char* what) {
    if (f.empty()) return;
    if (f.arity() != dims && !(time && f.arity() == dims + 1))
      throw InvalidArgument(std::string("problem: ") + what + " has wrong arity");
  };
  space_or_time(rhs, "rhs");
  space_or_time(dirichlet, "bc");
  if (exact) space_or_time(*exact, "exact");
  if (!initial.empty() && initial.arity() != dims) throw InvalidArgument("problem: initial has wrong arity");
  if (time) {
    if (!(time->t_end > 0)) throw InvalidArgument("problem: time horizon must be positive");
    if (time->scheme != TimeScheme::SpaceTime) {
      if (!(time->dt > 0)) throw InvalidArgument("problem: dt must be positive");
      if (time->dt > time->t_end) throw InvalidArgument("problem: dt exceeds the time horizon");
    }
    if (time->degree < 0 || time->degree == 1) throw InvalidArgument("problem: bad time degree");
    if (initial.empty() && !exact) throw InvalidArgument("problem: time-dependent problem needs initial data");
  }
  if (!placement.empty() && static_cast<int>(placement.size()) != dims)
    throw InvalidArgument("problem: placement must list every dimension");

  // Positivity checks on a deterministic sample of the representation grid.
  std::vector<std::vector<double>> nodes;
  for (int n : degrees) nodes.push_back(gll_nodes(n));
  std::mt19937_64 rng(7);
  std::vector<double> pt(dims);
  for (int s = 0; s < 2000; ++s) {
    for (int k = 0; k < dims; ++k) {
      std::uniform_int_distribution<int> u(0, degrees[k]);
      pt[k] = nodes[k][u(rng)];
    }
    if (!(epsilon.eval(pt) > 0)) throw InvalidArgument("problem: epsilon must be positive on the grid");
    if (rho.eval(pt) < 0) throw InvalidArgument("problem: rho must be non-negative on the grid");
  }
}

SeparableFunction freeze_time(const SeparableFunction& f, double t, int deriv) {
  SeparableFunction out;
  for (const auto& term : f.terms) {
    if (term.factors.empty()) throw InvalidArgument("freeze_time: function has no arguments");
    Term s = term;
    s.scale *= s.factors.back().eval(t, deriv);
    s.factors.pop_back();
    out.terms.push_back(std::move(s));
  }
  return out;
}

}  // namespace ttss
