#pragma once

// Exact arithmetic: big integers, rationals, integer polynomials in one
// variable s, and rational functions in s. Every value is kept in canonical
// form after every operation, so structural equality is mathematical equality.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace expostat {

using BigInt = mpz_class;

/// Exact C(n, k); zero when k > n.
BigInt binomial(unsigned n, unsigned k);

/// Exact n!.
BigInt factorial(unsigned n);

std::string to_string(const BigInt& value);

/// Exact fraction with a positive denominator and coprime numerator and
/// denominator. Zero is 0/1.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  /// Throws DivisionByZeroError when `denominator` is zero.
  Rational(const BigInt& numerator, const BigInt& denominator);

  /// Accepts "p/q" or "p" with an optional leading '-'; nothing else.
  static Rational parse(std::string_view text);

  BigInt numerator() const { return BigInt(value_.get_num()); }
  BigInt denominator() const { return BigInt(value_.get_den()); }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const { return sgn(value_); }
  double to_double() const { return value_.get_d(); }

  /// "p/q", or "p" when the denominator is one.
  std::string to_string() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  /// Throws DivisionByZeroError when `rhs` is zero.
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  const mpq_class& raw() const { return value_; }

 private:
  mpq_class value_;
};

enum class ArithOp { add, sub, mul, div };

/// Dispatching form of the four field operations.
Rational rational_arith(const Rational& a, const Rational& b, ArithOp op);

Rational pow(const Rational& base, unsigned exponent);

/// sum_{j=lo}^{hi} 1/j^power, by binary splitting; zero when lo > hi.
/// Requires lo >= 1.
Rational sum_reciprocal_powers(unsigned lo, unsigned hi, unsigned power);

/// Integer polynomial in s. Coefficients are stored by ascending degree with
/// no trailing zeros; the zero polynomial has no coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<BigInt> coefficients);
  Polynomial(std::initializer_list<long> coefficients);

  static Polynomial constant(const BigInt& c);
  /// c0 + c1·s
  static Polynomial linear(const BigInt& c0, const BigInt& c1);

  const std::vector<BigInt>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// Zero for the zero polynomial.
  BigInt leading() const;
  /// Non-negative gcd of the coefficients; zero for the zero polynomial.
  BigInt content() const;
  Polynomial primitive_part() const;

  Rational evaluate(const Rational& s) const;
  double evaluate(double s) const;
  Polynomial derivative() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(const BigInt& scalar);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const BigInt& b) { return a *= b; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  /// "[c0,c1,...]"; "[]" for zero.
  std::string to_string() const;

 private:
  void trim();
  std::vector<BigInt> coeffs_;
};

enum class PolyOp { add, mul };

Polynomial poly_arith(const Polynomial& p, const Polynomial& q, PolyOp op);

/// Primitive gcd with positive leading coefficient. Throws ParameterError when
/// both inputs are zero.
Polynomial poly_gcd(const Polynomial& p, const Polynomial& q);

/// a / b for a divisor b of a over Z[s]. Throws std::domain_error otherwise.
Polynomial exact_quotient(const Polynomial& a, const Polynomial& b);

/// numer/denom reduced by their gcd, with gcd(content(numer), content(denom))
/// = 1 and a positive leading coefficient on denom. Zero is 0/1.
class RationalFunction {
 public:
  RationalFunction() : denom_(Polynomial::constant(1)) {}
  /// Throws DivisionByZeroError when `denom` is zero.
  RationalFunction(Polynomial numer, Polynomial denom);
  RationalFunction(const Rational& c);  // NOLINT(google-explicit-constructor)

  const Polynomial& numer() const { return numer_; }
  const Polynomial& denom() const { return denom_; }
  bool is_zero() const { return numer_.is_zero(); }

  /// Throws PoleError if denom(s) = 0.
  Rational evaluate(const Rational& s) const;
  double evaluate(double s) const;

  RationalFunction operator-() const;
  RationalFunction& operator+=(const RationalFunction& rhs);
  RationalFunction& operator-=(const RationalFunction& rhs);
  RationalFunction& operator*=(const RationalFunction& rhs);
  RationalFunction& operator/=(const RationalFunction& rhs);

  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.numer_ == b.numer_ && a.denom_ == b.denom_;
  }

  /// "[numer coefficients]/[denom coefficients]".
  std::string to_string() const;

 private:
  void canonicalize();
  Polynomial numer_;
  Polynomial denom_;
};

/// Exact derivative in s via the quotient rule.
RationalFunction derivative(const RationalFunction& r);

/// Exact value of r(s). Throws PoleError at a pole.
Rational ratfun_eval(const RationalFunction& r, const Rational& s);

}  // namespace expostat
