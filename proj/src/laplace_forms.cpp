#include "expostat/laplace_forms.hpp"

#include <string>
#include <vector>

#include "expostat/errors.hpp"

namespace expostat {

void OrderStatParams::validate() const {
  if (k == 0 || k > n) {
    throw ParameterError("order statistic requires 1 <= k <= n, got n=" + std::to_string(n) +
                         " k=" + std::to_string(k));
  }
}

void require_positive(const Rational& s, const char* name) {
  if (s.sign() <= 0) throw ParameterError(std::string(name) + " must be > 0, got " + s.to_string());
}

namespace {

void require_shape(unsigned r) {
  if (r == 0) throw ParameterError("gamma shape r must be >= 1");
}

}  // namespace

RationalFunction product_form(OrderStatParams p) {
  p.validate();
  BigInt numer(1);
  Polynomial denom = Polynomial::constant(1);
  for (unsigned j = p.n - p.k + 1; j <= p.n; ++j) {
    numer *= j;
    denom *= Polynomial::linear(j, 1);
  }
  return RationalFunction(Polynomial::constant(numer), std::move(denom));
}

RationalFunction double_sum_form(OrderStatParams p) {
  p.validate();
  const unsigned n = p.n;
  // Every term s/(s+c) has c = n-m+j in [0, n]; sum over the common
  // denominator prod_{c=0}^{n} (s+c) and reduce once at the end.
  std::vector<Polynomial> cofactor(n + 1, Polynomial::linear(0, 1));  // leading factor s
  Polynomial denom = Polynomial::constant(1);
  for (unsigned c = 0; c <= n; ++c) {
    const Polynomial factor = Polynomial::linear(c, 1);
    denom *= factor;
    for (unsigned other = 0; other <= n; ++other) {
      if (other != c) cofactor[other] *= factor;
    }
  }
  Polynomial numer;
  for (unsigned m = p.k; m <= n; ++m) {
    const BigInt cnm = binomial(n, m);
    for (unsigned j = 0; j <= m; ++j) {
      BigInt weight = cnm * binomial(m, j);
      if (j % 2 == 1) weight = -weight;
      numer += cofactor[n - m + j] * weight;
    }
  }
  return RationalFunction(std::move(numer), std::move(denom));
}

RationalFunction laplace_derivative(OrderStatParams p, unsigned order) {
  RationalFunction f = product_form(p);
  for (unsigned i = 0; i < order; ++i) f = derivative(f);
  return f;
}

Rational erlang_weighted_sum(OrderStatParams p, unsigned r, const Rational& s) {
  p.validate();
  require_shape(r);
  require_positive(s);
  RationalFunction f = product_form(p);
  Rational total;
  Rational s_power(1);
  for (unsigned j = 0; j < r; ++j) {
    if (j > 0) {
      f = derivative(f);
      s_power *= s;
    }
    Rational term = s_power / Rational(factorial(j)) * f.evaluate(s);
    total += (j % 2 == 1) ? -term : term;
  }
  return total;
}

Rational generalized_double_sum(OrderStatParams p, unsigned r, const Rational& s) {
  p.validate();
  require_shape(r);
  require_positive(s);
  const unsigned n = p.n;
  std::vector<Rational> powered(n + 1);
  for (unsigned c = 0; c <= n; ++c) powered[c] = pow(s / (s + Rational(static_cast<long>(c))), r);
  Rational total;
  for (unsigned m = p.k; m <= n; ++m) {
    Rational inner;
    for (unsigned j = 0; j <= m; ++j) {
      Rational term = Rational(binomial(m, j)) * powered[n - m + j];
      inner += (j % 2 == 1) ? -term : term;
    }
    total += Rational(binomial(n, m)) * inner;
  }
  return total;
}

Rational r2_closed_form(OrderStatParams p, const Rational& s) {
  p.validate();
  require_positive(s);
  Rational product(1);
  Rational bracket(1);
  for (unsigned j = p.n - p.k + 1; j <= p.n; ++j) {
    const Rational rj(static_cast<long>(j));
    product *= rj / (s + rj);
    bracket += s / (s + rj);
  }
  return product * bracket;
}

Rational r2_k1_closed_form(unsigned n, const Rational& s) {
  if (n == 0) throw ParameterError("n must be >= 1");
  require_positive(s);
  const Rational rn(static_cast<long>(n));
  return rn * (rn + Rational(2) * s) / pow(s + rn, 2);
}

}  // namespace expostat
