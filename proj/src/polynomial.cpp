#include "gravham/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gravham/metric.hpp"

namespace gravham {

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw BadInput("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  return {num * o.den + o.num * den, den * o.den};
}

Rational Rational::operator-(const Rational& o) const {
  return {num * o.den - o.num * den, den * o.den};
}

Rational Rational::operator*(const Rational& o) const { return {num * o.num, den * o.den}; }

std::string Rational::str() const {
  std::string s = std::to_string(num);
  if (den != 1) s += "/" + std::to_string(den);
  return s;
}

PolyVar var_lower(int a, int b) {
  return {PolyVar::Lower, static_cast<std::int8_t>(std::min(a, b)),
          static_cast<std::int8_t>(std::max(a, b)), 0};
}

PolyVar var_upper(int a, int b) {
  return {PolyVar::Upper, static_cast<std::int8_t>(std::min(a, b)),
          static_cast<std::int8_t>(std::max(a, b)), 0};
}

PolyVar var_deriv(int a, int b, int k) {
  return {PolyVar::DerivLower, static_cast<std::int8_t>(std::min(a, b)),
          static_cast<std::int8_t>(std::max(a, b)), static_cast<std::int8_t>(k)};
}

std::string PolyVar::str() const {
  std::string s;
  switch (kind) {
    case Lower: s = "g_" + std::to_string(a) + std::to_string(b); break;
    case Upper: s = "g^" + std::to_string(a) + std::to_string(b); break;
    case DerivLower:
      s = "g_" + std::to_string(a) + std::to_string(b) + "," + std::to_string(k);
      break;
  }
  return s;
}

MetricPolynomial MetricPolynomial::constant(const Rational& c) {
  MetricPolynomial p;
  p.add_term(c, {});
  return p;
}

MetricPolynomial MetricPolynomial::variable(const PolyVar& v) {
  MetricPolynomial p;
  p.add_term(Rational(1), {{v, 1}});
  return p;
}

void MetricPolynomial::add_term(const Rational& c, const PolyMonomial& m) {
  if (c.zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.zero()) terms_.erase(it);
}

MetricPolynomial MetricPolynomial::operator+(const MetricPolynomial& o) const {
  MetricPolynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(c, m);
  out.flags_.insert(o.flags_.begin(), o.flags_.end());
  return out;
}

MetricPolynomial MetricPolynomial::operator-(const MetricPolynomial& o) const {
  MetricPolynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(-c, m);
  out.flags_.insert(o.flags_.begin(), o.flags_.end());
  return out;
}

MetricPolynomial MetricPolynomial::operator*(const MetricPolynomial& o) const {
  MetricPolynomial out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      PolyMonomial m = ma;
      for (const auto& [v, e] : mb) m[v] += e;
      out.add_term(ca * cb, m);
    }
  out.flags_ = flags_;
  out.flags_.insert(o.flags_.begin(), o.flags_.end());
  return out;
}

int MetricPolynomial::degree() const {
  int deg = 0;
  for (const auto& [m, c] : terms_) {
    int total = 0;
    for (const auto& [v, e] : m) total += e;
    deg = std::max(deg, total);
  }
  return deg;
}

double MetricPolynomial::eval(const std::function<double(const PolyVar&)>& value_of) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double prod = c.value();
    for (const auto& [v, e] : m)
      for (int i = 0; i < e; ++i) prod *= value_of(v);
    sum += prod;
  }
  return sum;
}

double MetricPolynomial::eval_at(const FieldPoint<double>& p) const {
  return eval([&p](const PolyVar& v) {
    switch (v.kind) {
      case PolyVar::Lower: return p.metric.lower(v.a, v.b);
      case PolyVar::Upper: return p.metric.upper(v.a, v.b);
      case PolyVar::DerivLower: return p.deriv(v.a, v.b, v.k);
    }
    return 0.0;
  });
}

MetricPolynomial poly_det(int d) {
  if (d < 2) throw DimensionTooSmall("determinant expansion needs d >= 2");
  if (d > kMaxDim) throw RankOverflow("dimension above supported maximum");
  MetricPolynomial out;
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  // Leibniz sum; parity tracked by counting inversions of each permutation.
  do {
    int inversions = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (perm[i] > perm[j]) ++inversions;
    PolyMonomial m;
    for (int i = 0; i < d; ++i) m[var_lower(i, perm[i])] += 1;
    out.add_term(Rational(inversions % 2 == 0 ? 1 : -1), m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

MetricPolynomial poly_B_representative(int d) {
  require_dimension(d);
  // Same four-product structure as the numeric kernel, at the generic index
  // tuple (a,b,c|m,n,o) = (1,2,0|1,2,0) where no products merge away:
  //   g^ab g^co g^mn - g^am g^bn g^co + 2 g^ao g^bn g^cm - 2 g^ab g^cm g^no
  const int a = 1, b = 2, c = 0, m = 1, n = 2, o = 0;
  auto u = [](int i, int j) { return MetricPolynomial::variable(var_upper(i, j)); };
  MetricPolynomial out = u(a, b) * u(c, o) * u(m, n) - u(a, m) * u(b, n) * u(c, o) +
                         MetricPolynomial::constant(Rational(2)) * u(a, o) * u(b, n) * u(c, m) -
                         MetricPolynomial::constant(Rational(2)) * u(a, b) * u(c, m) * u(n, o);
  out.flag("inverse_metric");
  return out;
}

namespace {

std::string join_parts(int total, const std::vector<int>& parts) {
  std::string s = std::to_string(total) + " =";
  for (std::size_t i = 0; i < parts.size(); ++i)
    s += (i == 0 ? " " : " + ") + std::to_string(parts[i]);
  return s;
}

}  // namespace

DegreeReport classify_S_terms(int d) {
  require_dimension(d);
  DegreeReport rep;
  rep.d = d;

  const MetricPolynomial det = poly_det(d);
  const MetricPolynomial B = poly_B_representative(d);
  auto deriv = MetricPolynomial::variable(var_deriv(1, 1, 1));
  auto momentum = MetricPolynomial::variable(var_upper(1, 1));  // stands in for pi^11
  // Trace kernel I_mnpq: quadratic in lower components.
  auto l = [](int i, int j) { return MetricPolynomial::variable(var_lower(i, j)); };
  const MetricPolynomial I_rep = l(1, 1) * l(2, 2) - l(1, 2) * l(1, 2);

  {
    // momentum cross term: sqrt(-g) * B * g_,k * pi
    TermReport t;
    t.name = "momentum cross term";
    MetricPolynomial body = B * deriv * momentum;
    t.degree = body.degree();
    t.degree_parts = {B.degree(), deriv.degree(), momentum.degree()};
    t.flags = body.nonpoly_flags();
    t.flags.insert("sqrt_neg_det");
    t.summary = join_parts(t.degree, t.degree_parts) + ", times sqrt_neg_det";
    rep.terms.push_back(std::move(t));
  }
  {
    // derivative-derivative potential: (-g)/4 * [B*B - g^00 E*B] * g_,k g_,l.
    // Polynomial once E's 1/g^00 denominator is cleared; the determinant
    // factor contributes d, each B kernel contributes 3.
    TermReport t;
    t.name = "derivative potential";
    MetricPolynomial body = det * B * B;
    t.degree = body.degree();
    t.degree_parts = {det.degree(), B.degree(), B.degree()};
    t.flags = body.nonpoly_flags();
    t.flags.insert("inverse_g00");
    t.summary = join_parts(t.degree, t.degree_parts);
    rep.terms.push_back(std::move(t));
  }
  {
    // reordering correction: sqrt(-g) * I * bracket(pi, B g_,k)
    TermReport t;
    t.name = "reordering correction";
    MetricPolynomial body = I_rep * B * deriv;
    t.degree = body.degree();
    t.degree_parts = {I_rep.degree(), B.degree(), deriv.degree()};
    t.flags = body.nonpoly_flags();
    t.flags.insert("sqrt_neg_det");
    t.summary = join_parts(t.degree, t.degree_parts) + ", times sqrt_neg_det";
    rep.terms.push_back(std::move(t));
  }

  rep.reducible_to_quadratic = true;
  for (const auto& t : rep.terms)
    if (t.degree > 2 || !t.flags.empty()) rep.reducible_to_quadratic = false;
  rep.conclusion = rep.reducible_to_quadratic
                       ? "all terms quadratic"
                       : "not reducible to quadratic: degree above 2 or "
                         "non-polynomial factors present";
  return rep;
}

std::vector<double> default_eps_schedule() {
  std::vector<double> eps;
  double e = 0.1;
  for (int i = 0; i < 10; ++i) {
    eps.push_back(e);
    e /= std::sqrt(2.0);
  }
  return eps;
}

double weak_field_expand(const std::function<double(const FieldPoint<double>&)>& functional,
                         const std::vector<double>& eps_schedule, int d, Rng& rng,
                         WeakFieldData* data) {
  require_dimension(d);
  if (eps_schedule.size() < 6) throw BadInput("need at least 6 epsilon values");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (eps_schedule[i] <= 0.0 || eps_schedule[i] > 0.5)
      throw BadInput("epsilon values must lie in (0, 0.5]");
    if (i > 0 && eps_schedule[i] >= eps_schedule[i - 1])
      throw BadInput("epsilon schedule must decrease");
  }

  // Fixed random direction: symmetric h, spatial derivatives, spatial momenta.
  DenseTensor<double> h(d, {Variance::Lower, Variance::Lower});
  DenseTensor<double> hd(d, {Variance::Lower, Variance::Lower, Variance::Lower});
  DenseTensor<double> hp(d, {Variance::Upper, Variance::Upper});
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      h(a, b) = h(b, a) = uniform(rng, -0.5, 0.5);
      for (int k = 1; k < d; ++k) hd(a, b, k) = hd(b, a, k) = uniform(rng, -0.5, 0.5);
      if (a > 0) hp(a, b) = hp(b, a) = uniform(rng, -0.5, 0.5);
    }

  auto point_at = [&](double eps) {
    DenseTensor<double> g(d, {Variance::Lower, Variance::Lower});
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) g(a, b) = (a == b ? (a == 0 ? -1.0 : 1.0) : 0.0) + eps * h(a, b);
    FieldPoint<double> p = make_field_point(invert_metric(g));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        p.momentum(a, b) = eps * hp(a, b);
        for (int k = 1; k < d; ++k) p.d_spatial(a, b, k) = eps * hd(a, b, k);
      }
    return p;
  };

  std::vector<double> values(eps_schedule.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    values[i] = functional(point_at(eps_schedule[i]));
    scale = std::max(scale, std::abs(values[i]));
  }

  // Sliding quadratic model: the residual at eps_i is measured against the
  // quadratic through the three next-smaller scales.  On a geometric
  // schedule the interpolation-node factor is the same for every i, so it
  // cancels from the log-log slope and the remainder order comes out clean.
  const std::size_t ns = eps_schedule.size();
  auto quad_through = [&](std::size_t j) {
    Eigen::Matrix3d V;
    Eigen::Vector3d y;
    for (int r = 0; r < 3; ++r) {
      double e = eps_schedule[j + r];
      V(r, 0) = 1.0;
      V(r, 1) = e;
      V(r, 2) = e * e;
      y(r) = values[j + r];
    }
    Eigen::Vector3d c = V.fullPivLu().solve(y);
    return c;
  };

  const double noise_floor = 1e-12 * scale;
  std::vector<double> fit_eps, fit_res;
  for (std::size_t i = 0; i + 3 < ns; ++i) {
    Eigen::Vector3d c = quad_through(i + 1);
    double e = eps_schedule[i];
    double r = std::abs(values[i] - (c(0) + c(1) * e + c(2) * e * e));
    if (r > noise_floor) {
      fit_eps.push_back(e);
      fit_res.push_back(r);
    }
  }
  if (fit_eps.size() < 3)
    throw DegenerateFit("quadratic to machine precision: remainder at the noise floor");
  Eigen::Vector3d c = quad_through(ns - 3);

  // Least-squares slope of log|r| against log(eps).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < fit_eps.size(); ++i) {
    double x = std::log(fit_eps[i]), yv = std::log(fit_res[i]);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
  }
  const double npts = static_cast<double>(fit_eps.size());
  const double denom = npts * sxx - sx * sx;
  if (std::abs(denom) < 1e-14) throw DegenerateFit("epsilon schedule has no spread");
  double exponent = (npts * sxy - sx * sy) / denom;

  if (data) {
    data->eps = eps_schedule;
    data->values = values;
    data->fit_eps = fit_eps;
    data->residuals = fit_res;
    data->c0 = c(0);
    data->c1 = c(1);
    data->c2 = c(2);
    data->exponent = exponent;
  }
  return exponent;
}

}  // namespace gravham
