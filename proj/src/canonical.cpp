#include "gravham/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gravham {

namespace {

void sort_pair(int& a, int& b) {
  if (a > b) std::swap(a, b);
}

bool is_momentum(const Symbol& s) { return s.kind == SymbolKind::Momentum; }

}  // namespace

Symbol Symbol::g_lower(int a, int b) {
  sort_pair(a, b);
  return {SymbolKind::GLower, {{int8_t(a), int8_t(b), 0}}};
}
Symbol Symbol::g_upper(int a, int b) {
  sort_pair(a, b);
  return {SymbolKind::GUpper, {{int8_t(a), int8_t(b), 0}}};
}
Symbol Symbol::sqrt_neg_g() { return {SymbolKind::SqrtNegG, {{0, 0, 0}}}; }
Symbol Symbol::inv_g00() { return {SymbolKind::InvG00, {{0, 0, 0}}}; }
Symbol Symbol::deriv(int a, int b, int k) {
  sort_pair(a, b);
  return {SymbolKind::Deriv, {{int8_t(a), int8_t(b), int8_t(k)}}};
}
Symbol Symbol::momentum(int a, int b) {
  sort_pair(a, b);
  return {SymbolKind::Momentum, {{int8_t(a), int8_t(b), 0}}};
}

bool Symbol::operator<(const Symbol& o) const {
  // Momenta sort after every coordinate-type symbol.
  if (is_momentum(*this) != is_momentum(o)) return !is_momentum(*this);
  if (kind != o.kind) return kind < o.kind;
  return idx < o.idx;
}

CanonicalExpr::CanonicalExpr(double constant) {
  if (constant != 0.0) terms_.push_back({constant, {}});
}

CanonicalExpr::CanonicalExpr(Symbol s, double coeff) {
  if (coeff != 0.0) terms_.push_back({coeff, {s}});
}

CanonicalExpr CanonicalExpr::from_monomial(Monomial m) {
  CanonicalExpr e;
  if (m.coeff != 0.0) {
    std::sort(m.factors.begin(), m.factors.end());
    e.terms_.push_back(std::move(m));
  }
  return e;
}

int CanonicalExpr::degree() const {
  int deg = 0;
  for (const auto& t : terms_) deg = std::max(deg, static_cast<int>(t.factors.size()));
  return deg;
}

void CanonicalExpr::normalize() {
  for (auto& t : terms_) std::sort(t.factors.begin(), t.factors.end());
  std::sort(terms_.begin(), terms_.end(), [](const Monomial& a, const Monomial& b) {
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    return std::lexicographical_compare(
        a.factors.begin(), a.factors.end(), b.factors.begin(), b.factors.end(),
        [](const Symbol& x, const Symbol& y) { return x < y; });
  });
  std::vector<Monomial> merged;
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().factors == t.factors)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(std::move(t));
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Monomial& m) { return m.coeff == 0.0; }),
               merged.end());
  terms_ = std::move(merged);
}

CanonicalExpr& CanonicalExpr::operator+=(const CanonicalExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  normalize();
  return *this;
}

CanonicalExpr& CanonicalExpr::operator-=(const CanonicalExpr& o) {
  for (const auto& t : o.terms_) {
    Monomial m = t;
    m.coeff = -m.coeff;
    terms_.push_back(std::move(m));
  }
  normalize();
  return *this;
}

CanonicalExpr& CanonicalExpr::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

CanonicalExpr operator*(const CanonicalExpr& a, const CanonicalExpr& b) {
  CanonicalExpr out;
  for (const auto& ta : a.terms_)
    for (const auto& tb : b.terms_) {
      Monomial m;
      m.coeff = ta.coeff * tb.coeff;
      m.factors = ta.factors;
      m.factors.insert(m.factors.end(), tb.factors.begin(), tb.factors.end());
      out.terms_.push_back(std::move(m));
    }
  out.normalize();
  return out;
}

std::string CanonicalExpr::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  char buf[64];
  for (size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    std::snprintf(buf, sizeof buf, "%s%g", (i && t.coeff >= 0) ? "+ " : "", t.coeff);
    out += buf;
    for (const auto& s : t.factors) {
      switch (s.kind) {
        case SymbolKind::GLower:
          out += " g_" + std::to_string(s.idx[0]) + std::to_string(s.idx[1]);
          break;
        case SymbolKind::GUpper:
          out += " g^" + std::to_string(s.idx[0]) + std::to_string(s.idx[1]);
          break;
        case SymbolKind::SqrtNegG:
          out += " sqrt(-g)";
          break;
        case SymbolKind::InvG00:
          out += " (1/g^00)";
          break;
        case SymbolKind::Deriv:
          out += " g_" + std::to_string(s.idx[0]) + std::to_string(s.idx[1]) + "," +
                 std::to_string(s.idx[2]);
          break;
        case SymbolKind::Momentum:
          out += " pi^" + std::to_string(s.idx[0]) + std::to_string(s.idx[1]);
          break;
      }
    }
    out += (i + 1 < terms_.size()) ? " " : "";
  }
  return out;
}

namespace {

// Delta^mn_ab with both pairs in normalized order.
double delta_mixed_value(const Symbol& lower, const Symbol& mom) {
  const int a = lower.idx[0], b = lower.idx[1], m = mom.idx[0], n = mom.idx[1];
  double v = 0.0;
  if (a == m && b == n) v += 0.5;
  if (a == n && b == m) v += 0.5;
  return v;
}

// +Delta^mn;ab = 1/2 (g^am g^bn + g^an g^bm) as an expression.
CanonicalExpr delta_upper_expr(const Symbol& upper, const Symbol& mom) {
  const int a = upper.idx[0], b = upper.idx[1], m = mom.idx[0], n = mom.idx[1];
  Monomial t1{0.5, {Symbol::g_upper(a, m), Symbol::g_upper(b, n)}};
  Monomial t2{0.5, {Symbol::g_upper(a, n), Symbol::g_upper(b, m)}};
  CanonicalExpr e = CanonicalExpr::from_monomial(t1);
  e += CanonicalExpr::from_monomial(t2);
  return e;
}

// {s, pi^mn} for a single coordinate-type symbol s.
CanonicalExpr base_bracket_with_momentum(const Symbol& s, const Symbol& mom) {
  switch (s.kind) {
    case SymbolKind::GLower:
      return CanonicalExpr(delta_mixed_value(s, mom));
    case SymbolKind::GUpper:
      return delta_upper_expr(s, mom);
    case SymbolKind::SqrtNegG: {
      // d sqrt(-g) / d g_ab = 1/2 sqrt(-g) g^ab
      Monomial m{0.5, {Symbol::sqrt_neg_g(), Symbol::g_upper(mom.idx[0], mom.idx[1])}};
      return CanonicalExpr::from_monomial(m);
    }
    case SymbolKind::InvG00: {
      // chain rule through g^00: {1/g^00, pi} = -(1/g^00)^2 {g^00, pi},
      // and {g^00, pi^mn} = Delta^mn;00 = g^0m g^0n
      Monomial m{-1.0,
                 {Symbol::inv_g00(), Symbol::inv_g00(), Symbol::g_upper(0, mom.idx[0]),
                  Symbol::g_upper(0, mom.idx[1])}};
      return CanonicalExpr::from_monomial(m);
    }
    case SymbolKind::Deriv:
      return CanonicalExpr();
    case SymbolKind::Momentum:
      return CanonicalExpr();
  }
  throw UnsupportedSymbol("unknown symbol kind");
}

CanonicalExpr base_bracket(const Symbol& x, const Symbol& y) {
  const bool xm = is_momentum(x), ym = is_momentum(y);
  if (xm == ym) return CanonicalExpr();  // {coord,coord} = {pi,pi} = 0
  if (!xm) return base_bracket_with_momentum(x, y);
  CanonicalExpr e = base_bracket_with_momentum(y, x);
  e *= -1.0;
  return e;
}

}  // namespace

CanonicalExpr poisson_bracket(const CanonicalExpr& a, const CanonicalExpr& b) {
  CanonicalExpr out;
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms()) {
      // Bi-derivation over commuting factors:
      // {x1..xr, y1..ys} = sum_i sum_j (prod x != xi)(prod y != yj) {xi, yj}
      for (size_t i = 0; i < ta.factors.size(); ++i)
        for (size_t j = 0; j < tb.factors.size(); ++j) {
          CanonicalExpr base = base_bracket(ta.factors[i], tb.factors[j]);
          if (base.zero()) continue;
          Monomial rest;
          rest.coeff = ta.coeff * tb.coeff;
          for (size_t u = 0; u < ta.factors.size(); ++u)
            if (u != i) rest.factors.push_back(ta.factors[u]);
          for (size_t v = 0; v < tb.factors.size(); ++v)
            if (v != j) rest.factors.push_back(tb.factors[v]);
          out += CanonicalExpr::from_monomial(rest) * base;
        }
    }
  return out;
}

double eval(const CanonicalExpr& e, const FieldPoint<double>& p) {
  const int d = p.metric.d;
  double total = 0.0;
  for (const auto& t : e.terms()) {
    double v = t.coeff;
    for (const auto& s : t.factors) {
      const int a = s.idx[0], b = s.idx[1], k = s.idx[2];
      if (a >= d || b >= d || k >= d) throw BadInput("symbol index exceeds dimension");
      switch (s.kind) {
        case SymbolKind::GLower: v *= p.metric.lower(a, b); break;
        case SymbolKind::GUpper: v *= p.metric.upper(a, b); break;
        case SymbolKind::SqrtNegG: v *= p.metric.sqrt_neg_det; break;
        case SymbolKind::InvG00: v *= 1.0 / p.metric.upper(0, 0); break;
        case SymbolKind::Deriv: v *= p.d_spatial(a, b, k); break;
        case SymbolKind::Momentum: v *= p.momentum(a, b); break;
      }
    }
    total += v;
  }
  return total;
}

CanonicalExpr bg_contraction_expr(int d, int p, int q) {
  require_dimension(d);
  // B^{abc|mno} as index pattern over contravariant symbols:
  //   g^ab g^co g^mn - g^am g^bn g^co + 2 g^ao g^bn g^cm - 2 g^ab g^cm g^no
  // with (a,b,c) = (p,q,0), o = k, then symmetrized over c <-> o.
  CanonicalExpr sum;
  auto add_B = [&sum](double w, int a, int b, int c, int m, int n, int o, const Symbol& dsym) {
    auto term = [&](double coeff, Symbol u1, Symbol u2, Symbol u3) {
      Monomial mo{coeff, {u1, u2, u3, dsym}};
      sum += CanonicalExpr::from_monomial(mo);
    };
    term(w, Symbol::g_upper(a, b), Symbol::g_upper(c, o), Symbol::g_upper(m, n));
    term(-w, Symbol::g_upper(a, m), Symbol::g_upper(b, n), Symbol::g_upper(c, o));
    term(2 * w, Symbol::g_upper(a, o), Symbol::g_upper(b, n), Symbol::g_upper(c, m));
    term(-2 * w, Symbol::g_upper(a, b), Symbol::g_upper(c, m), Symbol::g_upper(n, o));
  };
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int k = 1; k < d; ++k) {
        Symbol dsym = Symbol::deriv(m, n, k);
        add_B(0.5, p, q, 0, m, n, k, dsym);
        add_B(0.5, p, q, k, m, n, 0, dsym);
      }
  return sum;
}

DenseTensor<double> bracket_pi_with_Bg(const FieldPoint<double>& p, int pp, int q) {
  const int d = p.metric.d;
  DenseTensor<double> out(d, {Variance::Upper, Variance::Upper});
  const auto& u = p.metric.g_upper;
  // {pi^mn, g^ab} = -Delta^mn;ab, the engine's raised-bracket value.
  auto W = [&](int m, int n, int a, int b) {
    return -0.5 * (u(a, m) * u(b, n) + u(a, n) * u(b, m));
  };
  for (int m = 0; m < d; ++m)
    for (int n = m; n < d; ++n) {
      double acc = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int k = 1; k < d; ++k) {
            double dv = p.d_spatial(a, b, k);
            if (dv == 0.0) continue;
            // Leibniz over each triple product of the two c<->o halves.
            for (int half = 0; half < 2; ++half) {
              const int c = half == 0 ? 0 : k;
              const int o = half == 0 ? k : 0;
              double t = 0.0;
              // g^pq g^co g^ab pattern with (p,q)=(pp,q),(m,n)->(a,b)
              t += W(m, n, pp, q) * u(c, o) * u(a, b) + u(pp, q) * W(m, n, c, o) * u(a, b) +
                   u(pp, q) * u(c, o) * W(m, n, a, b);
              t -= W(m, n, pp, a) * u(q, b) * u(c, o) + u(pp, a) * W(m, n, q, b) * u(c, o) +
                   u(pp, a) * u(q, b) * W(m, n, c, o);
              t += 2.0 * (W(m, n, pp, o) * u(q, b) * u(c, a) + u(pp, o) * W(m, n, q, b) * u(c, a) +
                          u(pp, o) * u(q, b) * W(m, n, c, a));
              t -= 2.0 * (W(m, n, pp, q) * u(c, a) * u(b, o) + u(pp, q) * W(m, n, c, a) * u(b, o) +
                          u(pp, q) * u(c, a) * W(m, n, b, o));
              acc += 0.5 * t * dv;
            }
          }
      out(m, n) = out(n, m) = acc;
    }
  return out;
}

DenseTensor<double> bracket_pi_with_Bg_engine(const FieldPoint<double>& p, int pp, int q) {
  const int d = p.metric.d;
  CanonicalExpr bg = bg_contraction_expr(d, pp, q);
  DenseTensor<double> out(d, {Variance::Upper, Variance::Upper});
  for (int m = 0; m < d; ++m)
    for (int n = m; n < d; ++n) {
      CanonicalExpr br = poisson_bracket(CanonicalExpr(Symbol::momentum(m, n)), bg);
      out(m, n) = out(n, m) = eval(br, p);
    }
  return out;
}

CanonicalExpr random_expr(Rng& rng, int d, int max_degree) {
  CanonicalExpr e;
  const int nterms = 1 + static_cast<int>(rng() % 3);
  for (int t = 0; t < nterms; ++t) {
    Monomial m;
    m.coeff = uniform(rng, -2.0, 2.0);
    const int deg = static_cast<int>(rng() % (max_degree + 1));
    for (int f = 0; f < deg; ++f) {
      int a = static_cast<int>(rng() % d), b = static_cast<int>(rng() % d);
      switch (rng() % 6) {
        case 0: m.factors.push_back(Symbol::g_lower(a, b)); break;
        case 1: m.factors.push_back(Symbol::g_upper(a, b)); break;
        case 2: m.factors.push_back(Symbol::sqrt_neg_g()); break;
        case 3: m.factors.push_back(Symbol::momentum(a, b)); break;
        case 4: m.factors.push_back(Symbol::inv_g00()); break;
        default: m.factors.push_back(Symbol::deriv(a, b, 1 + static_cast<int>(rng() % (d - 1))));
      }
    }
    e += CanonicalExpr::from_monomial(m);
  }
  return e;
}

}  // namespace gravham
