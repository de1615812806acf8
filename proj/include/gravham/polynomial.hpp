#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gravham/common.hpp"
#include "gravham/field_point.hpp"

namespace gravham {

// Exact rational coefficient, gcd-reduced, denominator > 0.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n) {}
  Rational(long long n, long long d);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator-() const { return {-num, den}; }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool zero() const { return num == 0; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

// Polynomial variable: a metric component g_ab, an inverse component g^ab, or
// a first spatial derivative g_ab,k.  Component indices stored with a <= b.
struct PolyVar {
  enum Kind : std::uint8_t { Lower, Upper, DerivLower };
  Kind kind = Lower;
  std::int8_t a = 0, b = 0, k = 0;

  auto operator<=>(const PolyVar&) const = default;
  std::string str() const;
};

PolyVar var_lower(int a, int b);
PolyVar var_upper(int a, int b);
PolyVar var_deriv(int a, int b, int k);

// variable -> exponent; empty map is the constant monomial
using PolyMonomial = std::map<PolyVar, int>;

// Sparse polynomial over metric symbols with exact coefficients, plus a set
// of markers for non-polynomial factors carried alongside (the polynomial
// part stays well-defined; flags record what was factored out).
class MetricPolynomial {
 public:
  static MetricPolynomial constant(const Rational& c);
  static MetricPolynomial variable(const PolyVar& v);

  void add_term(const Rational& c, const PolyMonomial& m);
  void flag(const std::string& marker) { flags_.insert(marker); }

  MetricPolynomial operator+(const MetricPolynomial& o) const;
  MetricPolynomial operator-(const MetricPolynomial& o) const;
  MetricPolynomial operator*(const MetricPolynomial& o) const;

  // max total degree over monomials; 0 for the zero polynomial
  int degree() const;
  bool is_polynomial() const { return flags_.empty(); }
  const std::set<std::string>& nonpoly_flags() const { return flags_; }
  const std::map<PolyMonomial, Rational>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  double eval(const std::function<double(const PolyVar&)>& value_of) const;
  double eval_at(const FieldPoint<double>& p) const;

 private:
  std::map<PolyMonomial, Rational> terms_;
  std::set<std::string> flags_;
};

// Leibniz expansion of det g over the d(d+1)/2 independent symmetric
// components; total degree d.
MetricPolynomial poly_det(int d);

// Symbolic B^{abc|mno} contraction-kernel representative: four triple
// products of inverse-metric components, degree 3, flagged "inverse_metric".
MetricPolynomial poly_B_representative(int d);

struct TermReport {
  std::string name;
  int degree = 0;                  // degree of the polynomial part
  std::vector<int> degree_parts;   // factor degrees whose sum is `degree`
  std::set<std::string> flags;     // non-polynomial markers
  std::string summary;             // e.g. "10 = 4 + 3 + 3"
};

struct DegreeReport {
  int d = 0;
  std::vector<TermReport> terms;
  bool reducible_to_quadratic = false;
  std::string conclusion;
};

// Degree/flag classification of the three non-kinetic Hamiltonian terms
// (the S part of the tensor Hamiltonian): momentum cross term, the
// derivative-derivative potential, and the reordering correction.
DegreeReport classify_S_terms(int d);

struct WeakFieldData {
  std::vector<double> eps;        // full schedule, decreasing
  std::vector<double> values;     // functional at each eps
  std::vector<double> fit_eps;    // points used for the slope
  std::vector<double> residuals;  // |value - quadratic model| at fit_eps
  double c0 = 0, c1 = 0, c2 = 0;  // quadratic model from the 3 smallest eps
  double exponent = 0;
};

// Perturbs flat space as g = eta + eps*h (with derivatives and momenta
// scaled by eps), removes the quadratic model anchored at the smallest
// scales, and returns the log-log slope of the remainder.  A remainder at
// the floating-point noise floor throws DegenerateFit ("quadratic to
// machine precision").
double weak_field_expand(const std::function<double(const FieldPoint<double>&)>& functional,
                         const std::vector<double>& eps_schedule, int d, Rng& rng,
                         WeakFieldData* data = nullptr);

// Geometric default schedule for weak_field_expand.
std::vector<double> default_eps_schedule();

}  // namespace gravham
