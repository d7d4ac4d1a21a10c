#pragma once

// Closed-form distribution functions for order statistics of unit
// exponentials, the integer-shape gamma (Erlang) law, and the Gumbel limit of
// Z_n = T_(n) - ln n.

#include "expostat/exact_arith.hpp"
#include "expostat/laplace_forms.hpp"

namespace expostat {

/// Rate s > 0 and integer shape r >= 1.
struct GammaParams {
  double s = 1.0;
  unsigned r = 1;

  void validate() const;
};

/// Density of T_(k): (1-e^{-t})^{k-1} e^{-(n-k+1)t} / B(k, n-k+1), t >= 0.
double orderstat_pdf(OrderStatParams p, double t);

/// P(T_(k) <= t) = sum_{m=k}^{n} C(n,m) (1-e^{-t})^m e^{-(n-m)t}.
double orderstat_cdf(OrderStatParams p, double t);

/// E[T_(k)] = sum_{j=1}^{k} 1/(n-k+j).
Rational orderstat_mean(OrderStatParams p);

/// Var[T_(k)] = sum_{j=1}^{k} 1/(n-k+j)^2.
Rational orderstat_var(OrderStatParams p);

/// Var[T_(k)] in double precision with compensated summation, summed from the
/// largest term (j = n-k+1) upward; for large n where the exact sum is slow.
double orderstat_var_float(OrderStatParams p);

/// P(X_r > x) for X_r ~ Gamma(rate s, shape r).
double erlang_survival(GammaParams g, double x);

/// Exact P(X_r > T_(k)) for an independent X_r ~ Gamma(rate s, shape r).
Rational race_probability_exact(OrderStatParams p, unsigned r, const Rational& s);

/// exp(-e^{-x})
double gumbel_cdf(double x);

/// P(Z_n <= x) = (1 - e^{-x}/n)^n for x >= -ln n, else 0.
double zn_cdf(unsigned n, double x);

}  // namespace expostat
