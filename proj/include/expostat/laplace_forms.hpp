#pragma once

// Laplace transform E[exp(-s T_(k))] of the k-th order statistic of n unit
// exponentials, built two ways: the product over rates n-k+1..n, and the
// alternating double sum obtained from the cdf by integration by parts.

#include "expostat/exact_arith.hpp"

namespace expostat {

/// Sample size n and order index k with 1 <= k <= n.
struct OrderStatParams {
  unsigned n = 1;
  unsigned k = 1;

  /// Throws ParameterError unless 1 <= k <= n.
  void validate() const;
};

/// prod_{j=n-k+1}^{n} j/(s+j)
RationalFunction product_form(OrderStatParams p);

/// sum_{m=k}^{n} sum_{j=0}^{m} (-1)^j C(n,m) C(m,j) s/(s+n-m+j)
RationalFunction double_sum_form(OrderStatParams p);

/// j-th derivative of product_form(p); order 0 is product_form(p) itself.
RationalFunction laplace_derivative(OrderStatParams p, unsigned order);

/// sum_{j=0}^{r-1} (-1)^j s^j/j! f^{(j)}(s) with f = product_form(p), which is
/// P(X_r > T_(k)) for an independent X_r ~ Gamma(rate s, shape r).
Rational erlang_weighted_sum(OrderStatParams p, unsigned r, const Rational& s);

/// sum_{m=k}^{n} C(n,m) sum_{j=0}^{m} (-1)^j C(m,j) (s/(s+n-m+j))^r
Rational generalized_double_sum(OrderStatParams p, unsigned r, const Rational& s);

/// f(s)·[1 + sum_{j=n-k+1}^{n} s/(s+j)], the r = 2 closed form.
Rational r2_closed_form(OrderStatParams p, const Rational& s);

/// n(n+2s)/(s+n)^2, the r = 2, k = 1 closed form.
Rational r2_k1_closed_form(unsigned n, const Rational& s);

/// Throws ParameterError unless s > 0.
void require_positive(const Rational& s, const char* name = "s");

}  // namespace expostat
