#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gravham/field_point.hpp"

// Polynomial algebra over the canonical symbols
//   g_ab (covariant metric), g^ab (contravariant), sqrt(-g), 1/g^00,
//   g_ab,k (spatial derivative), pi^ab (momentum)
// with the fundamental bracket {g_ab, pi^mn} = Delta^mn_ab and the raised
// variant {g^ab, pi^mn} = +Delta^mn;ab built from contravariant symbols.
// Spatial-derivative symbols commute with everything (classical reading).
// Monomials keep momenta rightmost; everything commutes, the order is
// canonical form only.

namespace gravham {

enum class SymbolKind : uint8_t { GLower, GUpper, SqrtNegG, InvG00, Deriv, Momentum };

struct Symbol {
  SymbolKind kind;
  std::array<int8_t, 3> idx{{0, 0, 0}};  // pair indices normalized a <= b; idx[2] = deriv axis

  static Symbol g_lower(int a, int b);
  static Symbol g_upper(int a, int b);
  static Symbol sqrt_neg_g();
  static Symbol inv_g00();
  static Symbol deriv(int a, int b, int k);
  static Symbol momentum(int a, int b);

  bool operator==(const Symbol& o) const { return kind == o.kind && idx == o.idx; }
  bool operator<(const Symbol& o) const;
};

struct Monomial {
  double coeff = 0.0;
  std::vector<Symbol> factors;  // sorted, momenta rightmost
};

class CanonicalExpr {
public:
  CanonicalExpr() = default;
  explicit CanonicalExpr(double constant);
  explicit CanonicalExpr(Symbol s, double coeff = 1.0);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool zero() const { return terms_.empty(); }
  int degree() const;  // max factor count over monomials

  CanonicalExpr& operator+=(const CanonicalExpr& o);
  CanonicalExpr& operator-=(const CanonicalExpr& o);
  CanonicalExpr& operator*=(double s);
  friend CanonicalExpr operator+(CanonicalExpr a, const CanonicalExpr& b) { return a += b; }
  friend CanonicalExpr operator-(CanonicalExpr a, const CanonicalExpr& b) { return a -= b; }
  friend CanonicalExpr operator*(CanonicalExpr a, double s) { return a *= s; }
  friend CanonicalExpr operator*(double s, CanonicalExpr a) { return a *= s; }
  friend CanonicalExpr operator*(const CanonicalExpr& a, const CanonicalExpr& b);

  std::string str() const;

  // Removes vanished terms and merges duplicates; called by all mutators.
  void normalize();

  static CanonicalExpr from_monomial(Monomial m);

private:
  std::vector<Monomial> terms_;
};

// Bilinear antisymmetric Leibniz extension of the fundamental brackets.
// Throws UnsupportedSymbol only if a symbol kind escapes the table.
CanonicalExpr poisson_bracket(const CanonicalExpr& a, const CanonicalExpr& b);

// Numeric value of an expression at a field point.
double eval(const CanonicalExpr& e, const FieldPoint<double>& p);

// Symbolic B^(pq0|abk) g_ab,k summed over a, b and spatial k, as an
// expression in contravariant-metric and derivative symbols.
CanonicalExpr bg_contraction_expr(int d, int p, int q);

// {pi^mn, B^(pq0|abk) g_ab,k} for every (m,n), evaluated at the point by
// direct Leibniz expansion over the triple products of the B terms, with
// the derivative symbols treated as bracket-inert. Independent of the
// generic engine; the two routes are compared in the verification suite.
DenseTensor<double> bracket_pi_with_Bg(const FieldPoint<double>& p, int pp, int q);

// Engine route for the same object: poisson_bracket(pi^mn, expr) evaluated.
DenseTensor<double> bracket_pi_with_Bg_engine(const FieldPoint<double>& p, int pp, int q);

// Uniformly random expression with all factor degrees <= max_degree, for
// axiom tests.
CanonicalExpr random_expr(Rng& rng, int d, int max_degree);

}  // namespace gravham
