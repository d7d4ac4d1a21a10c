#include "expostat/exact_arith.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "expostat/errors.hpp"

namespace expostat {

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt result(1);
  // result = C(n - k + i, i) after step i, always an integer.
  for (unsigned i = 1; i <= k; ++i) {
    result *= (n - k + i);
    mpz_divexact_ui(result.get_mpz_t(), result.get_mpz_t(), i);
  }
  return result;
}

BigInt factorial(unsigned n) {
  BigInt result;
  mpz_fac_ui(result.get_mpz_t(), n);
  return result;
}

std::string to_string(const BigInt& value) { return value.get_str(); }

// ---------------------------------------------------------------- Rational

Rational::Rational(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) throw DivisionByZeroError("rational with zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  auto is_digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  const bool negative = !num.empty() && num.front() == '-';
  if (negative) num.remove_prefix(1);
  if (!is_digits(num) || !is_digits(den)) {
    throw std::invalid_argument("not a fraction: '" + std::string(text) + "'");
  }
  BigInt p(std::string(num), 10);
  BigInt q(std::string(den), 10);
  if (negative) p = -p;
  return Rational(p, q);
}

std::string Rational::to_string() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational Rational::operator-() const {
  Rational r;
  r.value_ = -value_;
  return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
  value_ += rhs.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  value_ -= rhs.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  value_ *= rhs.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) throw DivisionByZeroError("rational division by zero");
  value_ /= rhs.value_;
  return *this;
}

Rational rational_arith(const Rational& a, const Rational& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  throw std::logic_error("unknown ArithOp");
}

Rational pow(const Rational& base, unsigned exponent) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.raw().get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.raw().get_den_mpz_t(), exponent);
  return Rational(num, den);
}

namespace {

// sum_{j=lo}^{hi} 1/j^power as an unreduced fraction num/den.
void split_reciprocal_sum(unsigned lo, unsigned hi, unsigned power, BigInt& num, BigInt& den) {
  if (lo == hi) {
    num = 1;
    mpz_ui_pow_ui(den.get_mpz_t(), lo, power);
    return;
  }
  const unsigned mid = lo + (hi - lo) / 2;
  BigInt n1, d1, n2, d2;
  split_reciprocal_sum(lo, mid, power, n1, d1);
  split_reciprocal_sum(mid + 1, hi, power, n2, d2);
  num = n1 * d2 + n2 * d1;
  den = d1 * d2;
}

}  // namespace

Rational sum_reciprocal_powers(unsigned lo, unsigned hi, unsigned power) {
  if (lo == 0) throw ParameterError("sum_reciprocal_powers requires lo >= 1");
  if (lo > hi) return Rational();
  BigInt num, den;
  split_reciprocal_sum(lo, hi, power, num, den);
  return Rational(num, den);
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<BigInt> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

Polynomial::Polynomial(std::initializer_list<long> coefficients) {
  coeffs_.reserve(coefficients.size());
  for (long c : coefficients) coeffs_.emplace_back(c);
  trim();
}

Polynomial Polynomial::constant(const BigInt& c) { return Polynomial(std::vector<BigInt>{c}); }

Polynomial Polynomial::linear(const BigInt& c0, const BigInt& c1) {
  return Polynomial(std::vector<BigInt>{c0, c1});
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

BigInt Polynomial::leading() const { return coeffs_.empty() ? BigInt(0) : coeffs_.back(); }

BigInt Polynomial::content() const {
  BigInt g(0);
  for (const auto& c : coeffs_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

Polynomial Polynomial::primitive_part() const {
  if (is_zero()) return {};
  const BigInt g = content();
  Polynomial result = *this;
  for (auto& c : result.coeffs_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  return result;
}

Rational Polynomial::evaluate(const Rational& s) const {
  mpq_class acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= s.raw();
    acc += mpq_class(*it);
  }
  return Rational(BigInt(acc.get_num()), BigInt(acc.get_den()));
}

double Polynomial::evaluate(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + it->get_d();
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<BigInt> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<unsigned long>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (coeffs_.size() < rhs.coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (coeffs_.size() < rhs.coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      mpz_addmul(out[i + j].get_mpz_t(), a.coeffs_[i].get_mpz_t(), b.coeffs_[j].get_mpz_t());
    }
  }
  return Polynomial(std::move(out));
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) { return *this = *this * rhs; }

Polynomial& Polynomial::operator*=(const BigInt& scalar) {
  for (auto& c : coeffs_) c *= scalar;
  trim();
  return *this;
}

std::string Polynomial::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) out += ',';
    out += coeffs_[i].get_str();
  }
  return out + "]";
}

Polynomial poly_arith(const Polynomial& p, const Polynomial& q, PolyOp op) {
  return op == PolyOp::add ? p + q : p * q;
}

namespace {

// Remainder of lc(b)^e · a by b for some e >= 0; zero iff b divides a over Q.
Polynomial pseudo_remainder(Polynomial a, const Polynomial& b) {
  const BigInt lb = b.leading();
  const int db = b.degree();
  while (!a.is_zero() && a.degree() >= db) {
    std::vector<BigInt> shift(static_cast<std::size_t>(a.degree() - db) + 1);
    shift.back() = a.leading();
    a *= lb;
    a -= Polynomial(std::move(shift)) * b;
  }
  return a;
}

Polynomial normalized(const Polynomial& p) {
  Polynomial r = p.primitive_part();
  return r.leading() < 0 ? -r : r;
}

}  // namespace

Polynomial poly_gcd(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() && q.is_zero()) throw ParameterError("poly_gcd of two zero polynomials");
  Polynomial a = normalized(p);
  Polynomial b = normalized(q);
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    Polynomial r = pseudo_remainder(a, b);
    a = std::move(b);
    b = normalized(r);
  }
  return a;
}

Polynomial exact_quotient(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw DivisionByZeroError("polynomial division by zero");
  if (a.is_zero()) return {};
  if (a.degree() < b.degree()) throw std::domain_error("exact_quotient: divisor does not divide");
  std::vector<BigInt> rem = a.coefficients();
  const auto& bc = b.coefficients();
  const std::size_t db = bc.size() - 1;
  std::vector<BigInt> quot(rem.size() - db);
  for (std::size_t i = quot.size(); i-- > 0;) {
    BigInt& top = rem[i + db];
    if (!mpz_divisible_p(top.get_mpz_t(), bc.back().get_mpz_t())) {
      throw std::domain_error("exact_quotient: divisor does not divide");
    }
    mpz_divexact(quot[i].get_mpz_t(), top.get_mpz_t(), bc.back().get_mpz_t());
    for (std::size_t j = 0; j <= db; ++j) {
      mpz_submul(rem[i + j].get_mpz_t(), quot[i].get_mpz_t(), bc[j].get_mpz_t());
    }
  }
  if (!Polynomial(std::move(rem)).is_zero()) throw std::domain_error("exact_quotient: divisor does not divide");
  return Polynomial(std::move(quot));
}

// -------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction(Polynomial numer, Polynomial denom)
    : numer_(std::move(numer)), denom_(std::move(denom)) {
  if (denom_.is_zero()) throw DivisionByZeroError("rational function with zero denominator");
  canonicalize();
}

RationalFunction::RationalFunction(const Rational& c)
    : numer_(Polynomial::constant(c.numerator())), denom_(Polynomial::constant(c.denominator())) {}

void RationalFunction::canonicalize() {
  if (numer_.is_zero()) {
    denom_ = Polynomial::constant(1);
    return;
  }
  const Polynomial g = poly_gcd(numer_, denom_);
  if (g.degree() > 0) {
    numer_ = exact_quotient(numer_, g);
    denom_ = exact_quotient(denom_, g);
  }
  BigInt c;
  const BigInt cn = numer_.content();
  const BigInt cd = denom_.content();
  mpz_gcd(c.get_mpz_t(), cn.get_mpz_t(), cd.get_mpz_t());
  if (denom_.leading() < 0) c = -c;
  if (c != 1) {
    numer_ = exact_quotient(numer_, Polynomial::constant(c));
    denom_ = exact_quotient(denom_, Polynomial::constant(c));
  }
}

Rational RationalFunction::evaluate(const Rational& s) const {
  const Rational d = denom_.evaluate(s);
  if (d.is_zero()) throw PoleError("rational function evaluated at a pole s = " + s.to_string());
  return numer_.evaluate(s) / d;
}

double RationalFunction::evaluate(double s) const { return numer_.evaluate(s) / denom_.evaluate(s); }

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.numer_ = -r.numer_;
  return r;
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& rhs) {
  if (denom_ == rhs.denom_) {
    numer_ += rhs.numer_;
  } else {
    numer_ = numer_ * rhs.denom_ + rhs.numer_ * denom_;
    denom_ *= rhs.denom_;
  }
  canonicalize();
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& rhs) { return *this += -rhs; }

RationalFunction& RationalFunction::operator*=(const RationalFunction& rhs) {
  numer_ *= rhs.numer_;
  denom_ *= rhs.denom_;
  canonicalize();
  return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& rhs) {
  if (rhs.is_zero()) throw DivisionByZeroError("rational function division by zero");
  numer_ *= rhs.denom_;
  denom_ *= rhs.numer_;
  canonicalize();
  return *this;
}

std::string RationalFunction::to_string() const { return numer_.to_string() + "/" + denom_.to_string(); }

RationalFunction derivative(const RationalFunction& r) {
  const Polynomial& n = r.numer();
  const Polynomial& d = r.denom();
  return RationalFunction(n.derivative() * d - n * d.derivative(), d * d);
}

Rational ratfun_eval(const RationalFunction& r, const Rational& s) { return r.evaluate(s); }

}  // namespace expostat
