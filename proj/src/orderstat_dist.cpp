#include "expostat/orderstat_dist.hpp"

#include <cmath>
#include <string>

#include "expostat/compensated_sum.hpp"
#include "expostat/errors.hpp"

namespace expostat {

namespace {

void require_nonnegative(double t, const char* name) {
  if (!(t >= 0.0)) throw ParameterError(std::string(name) + " must be >= 0");
}

// sum_{m=lo}^{hi} C(n,m) w^m (1-w)^{n-m} with w = 1 - e^{-t}
double binomial_tail(unsigned n, unsigned lo, unsigned hi, double w, double t) {
  double total = 0.0;
  for (unsigned m = lo; m <= hi; ++m) {
    total += binomial(n, m).get_d() * std::pow(w, m) * std::exp(-static_cast<double>(n - m) * t);
  }
  return total;
}

}  // namespace

void GammaParams::validate() const {
  if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("gamma rate s must be > 0");
  if (r == 0) throw ParameterError("gamma shape r must be >= 1");
}

double orderstat_pdf(OrderStatParams p, double t) {
  p.validate();
  require_nonnegative(t, "t");
  // 1/B(k, n-k+1) = n!/((k-1)!(n-k)!) = n C(n-1, k-1)
  const double inv_beta = BigInt(BigInt(p.n) * binomial(p.n - 1, p.k - 1)).get_d();
  const double w = -std::expm1(-t);
  return inv_beta * std::pow(w, p.k - 1) * std::exp(-static_cast<double>(p.n - p.k + 1) * t);
}

double orderstat_cdf(OrderStatParams p, double t) {
  p.validate();
  require_nonnegative(t, "t");
  const double w = -std::expm1(-t);
  const double upper = binomial_tail(p.n, p.k, p.n, w, t);
  if (upper <= 0.5) return upper;
  // Near 1 the complement is the accurate (and monotone) route.
  return 1.0 - binomial_tail(p.n, 0, p.k - 1, w, t);
}

Rational orderstat_mean(OrderStatParams p) {
  p.validate();
  return sum_reciprocal_powers(p.n - p.k + 1, p.n, 1);
}

Rational orderstat_var(OrderStatParams p) {
  p.validate();
  return sum_reciprocal_powers(p.n - p.k + 1, p.n, 2);
}

double orderstat_var_float(OrderStatParams p) {
  p.validate();
  CompensatedSum sum;
  for (unsigned j = 1; j <= p.k; ++j) {
    const double rate = static_cast<double>(p.n - p.k + j);
    sum.add(1.0 / (rate * rate));
  }
  return sum.value();
}

double erlang_survival(GammaParams g, double x) {
  g.validate();
  require_nonnegative(x, "x");
  const double sx = g.s * x;
  double term = std::exp(-sx);
  double total = term;
  for (unsigned j = 1; j < g.r; ++j) {
    term *= sx / j;
    total += term;
  }
  return total;
}

Rational race_probability_exact(OrderStatParams p, unsigned r, const Rational& s) {
  return erlang_weighted_sum(p, r, s);
}

double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

double zn_cdf(unsigned n, double x) {
  if (n == 0) throw ParameterError("zn_cdf requires n >= 1");
  const double nd = static_cast<double>(n);
  if (x < -std::log(nd)) return 0.0;
  const double u = std::exp(-x) / nd;
  if (u >= 1.0) return 0.0;
  return std::exp(nd * std::log1p(-u));
}

}  // namespace expostat
