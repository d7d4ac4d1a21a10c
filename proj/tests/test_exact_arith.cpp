#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "expostat/errors.hpp"
#include "expostat/exact_arith.hpp"
#include "generators.hpp"

using namespace expostat;
using expostat::testing::Gen;

namespace {

Rational q(long p, long d) { return Rational(BigInt(p), BigInt(d)); }

Polynomial s_plus(long a) { return Polynomial::linear(BigInt(a), BigInt(1)); }

bool canonical(const Rational& r) {
  return r.denominator() > 0 && gcd(r.numerator(), r.denominator()) == 1;
}

bool canonical(const RationalFunction& f) {
  if (f.is_zero()) return f.denom() == Polynomial{1};
  if (f.denom().leading() <= 0) return false;
  if (gcd(f.numer().content(), f.denom().content()) != 1) return false;
  return poly_gcd(f.numer(), f.denom()).degree() == 0;
}

}  // namespace

TEST(Rational, Examples) {
  EXPECT_EQ(rational_arith(q(1, 2), q(1, 3), ArithOp::add), q(5, 6));
  EXPECT_EQ(rational_arith(q(2, 4), q(1, 1), ArithOp::mul), q(1, 2));
  EXPECT_EQ(q(2, 4).to_string(), "1/2");
  EXPECT_THROW(rational_arith(q(1, 3), q(0, 1), ArithOp::div), DivisionByZeroError);
}

TEST(Rational, ConstructionAndParsing) {
  EXPECT_THROW(q(1, 0), DivisionByZeroError);
  EXPECT_EQ(q(3, -6), q(-1, 2));
  EXPECT_EQ(q(3, -6).denominator(), 2);
  EXPECT_EQ(Rational::parse("7/2"), q(7, 2));
  EXPECT_EQ(Rational::parse("-14/4"), q(-7, 2));
  EXPECT_EQ(Rational::parse("5"), Rational(5));
  EXPECT_EQ(Rational(0).to_string(), "0");
  EXPECT_EQ(Rational(-3).to_string(), "-3");
  for (const char* bad : {"", "/", "1/", "/2", "1.5", "a", "1/2/3", "+1", " 1", "1/-2"}) {
    EXPECT_THROW(Rational::parse(bad), std::invalid_argument) << bad;
  }
  EXPECT_THROW(Rational::parse("1/0"), DivisionByZeroError);
}

TEST(Rational, Ordering) {
  EXPECT_LT(q(1, 3), q(1, 2));
  EXPECT_GT(q(-1, 3), q(-1, 2));
  EXPECT_EQ(pow(q(2, 3), 3), q(8, 27));
  EXPECT_EQ(pow(q(2, 3), 0), Rational(1));
}

TEST(Rational, FieldAxiomsHoldOnRandomValues) {
  Gen gen(11);
  for (int iter = 0; iter < 500; ++iter) {
    const Rational a = gen.rational(), b = gen.rational(), c = gen.nonzero_rational();
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a + b) * c, a * c + b * c);
    EXPECT_EQ((a * c) / c, a);
    EXPECT_EQ(a - a, Rational(0));
    for (const Rational& r : {a + b, a - b, a * b, a / c}) EXPECT_TRUE(canonical(r)) << r.to_string();
  }
}

TEST(Binomial, Examples) {
  EXPECT_EQ(binomial(4, 2), 6);
  for (unsigned n = 0; n < 20; ++n) EXPECT_EQ(binomial(n, 0), 1);
  EXPECT_EQ(binomial(3, 5), 0);
  EXPECT_EQ(factorial(0), 1);
  EXPECT_EQ(factorial(20), BigInt("2432902008176640000"));
}

TEST(Binomial, MatchesPascalTriangle) {
  std::vector<std::vector<BigInt>> row{{1}};
  for (unsigned n = 1; n <= 60; ++n) {
    std::vector<BigInt> next(n + 1, BigInt(1));
    for (unsigned k = 1; k < n; ++k) next[k] = row[n - 1][k - 1] + row[n - 1][k];
    row.push_back(next);
  }
  EXPECT_EQ(row[30][15], BigInt(155117520));
  EXPECT_EQ(binomial(30, 15), BigInt(155117520));
  for (unsigned n = 0; n <= 60; ++n) {
    for (unsigned k = 0; k <= n; ++k) ASSERT_EQ(binomial(n, k), row[n][k]) << n << "," << k;
  }
}

TEST(SumReciprocalPowers, MatchesDirectSum) {
  for (unsigned power : {1u, 2u, 3u}) {
    Rational direct(0);
    for (unsigned j = 1; j <= 200; ++j) {
      direct += pow(Rational(BigInt(1), BigInt(j)), power);
      if (j % 37 == 0 || j <= 5) EXPECT_EQ(sum_reciprocal_powers(1, j, power), direct) << j;
    }
  }
  EXPECT_EQ(sum_reciprocal_powers(1, 3, 1), q(11, 6));
  EXPECT_EQ(sum_reciprocal_powers(1, 3, 2), q(49, 36));
  EXPECT_EQ(sum_reciprocal_powers(5, 4, 1), Rational(0));
  EXPECT_EQ(sum_reciprocal_powers(2, 3, 1), q(5, 6));
  EXPECT_THROW(sum_reciprocal_powers(0, 3, 1), ParameterError);
}

TEST(Polynomial, Examples) {
  EXPECT_EQ(poly_arith(s_plus(1), s_plus(2), PolyOp::mul), (Polynomial{2, 3, 1}));
  EXPECT_TRUE(poly_arith(s_plus(1), Polynomial{}, PolyOp::mul).is_zero());
  const Polynomial zero = poly_arith(s_plus(1), Polynomial{-1, -1}, PolyOp::add);
  EXPECT_TRUE(zero.is_zero());
  EXPECT_EQ(zero.degree(), -1);
  EXPECT_EQ(zero.to_string(), "[]");
  EXPECT_EQ((Polynomial{2, 3, 1}).to_string(), "[2,3,1]");
  EXPECT_EQ((Polynomial{1, 0, 0}).degree(), 0);
}

TEST(Polynomial, EvaluationAndDerivative) {
  const Polynomial p{2, 3, 1};
  EXPECT_EQ(p.evaluate(q(1, 2)), q(15, 4));
  EXPECT_DOUBLE_EQ(p.evaluate(0.5), 3.75);
  EXPECT_EQ(p.derivative(), (Polynomial{3, 2}));
  EXPECT_TRUE(Polynomial{7}.derivative().is_zero());
  EXPECT_EQ((Polynomial{6, -4, 2}).content(), 2);
  EXPECT_EQ((Polynomial{6, -4, 2}).primitive_part(), (Polynomial{3, -2, 1}));
}

TEST(Polynomial, GcdExamples) {
  EXPECT_EQ(poly_gcd(Polynomial{-1, 0, 1}, Polynomial{-1, 1}), (Polynomial{-1, 1}));
  EXPECT_EQ(poly_gcd(s_plus(2), s_plus(3)), Polynomial{1});
  EXPECT_THROW(poly_gcd(Polynomial{}, Polynomial{}), ParameterError);
  EXPECT_EQ(poly_gcd(Polynomial{}, Polynomial{-2, -4}), (Polynomial{1, 2}));
}

TEST(Polynomial, GcdAgreesWithFactorisation) {
  // Oracle: build both inputs from known linear factors; the gcd is the
  // product of the shared factors, counted with multiplicity.
  const Polynomial a = s_plus(1) * s_plus(1) * s_plus(2);
  const Polynomial b = s_plus(1) * s_plus(3);
  EXPECT_EQ(poly_gcd(a, b), s_plus(1));

  Gen gen(5);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<int> ma(6, 0), mb(6, 0);
    Polynomial pa{1}, pb{1}, expected{1};
    for (int root = 1; root <= 5; ++root) {
      ma[root] = static_cast<int>(gen.integer(0, 2));
      mb[root] = static_cast<int>(gen.integer(0, 2));
      for (int i = 0; i < ma[root]; ++i) pa *= s_plus(root);
      for (int i = 0; i < mb[root]; ++i) pb *= s_plus(root);
      for (int i = 0; i < std::min(ma[root], mb[root]); ++i) expected *= s_plus(root);
    }
    pa *= BigInt(gen.integer(1, 5));
    pb *= BigInt(-gen.integer(1, 5));
    ASSERT_EQ(poly_gcd(pa, pb), expected) << pa.to_string() << " " << pb.to_string();
  }
}

TEST(Polynomial, ExactQuotient) {
  EXPECT_EQ(exact_quotient(Polynomial{2, 3, 1}, s_plus(1)), s_plus(2));
  EXPECT_THROW(exact_quotient(Polynomial{2, 3, 1}, s_plus(3)), std::domain_error);
}

TEST(Polynomial, RingAxiomsHoldOnRandomValues) {
  Gen gen(17);
  for (int iter = 0; iter < 300; ++iter) {
    const Polynomial a = gen.polynomial(), b = gen.polynomial(), c = gen.polynomial();
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_TRUE((a - a).is_zero());
    const Polynomial prod = a * b;
    EXPECT_TRUE(prod.is_zero() || prod.coefficients().back() != 0);
    if (!b.is_zero()) {
      EXPECT_EQ(exact_quotient(prod, b), a);
    }
  }
}

TEST(RationalFunction, Examples) {
  const RationalFunction inv(Polynomial{1}, s_plus(1));
  EXPECT_EQ(ratfun_eval(inv, Rational(1)), q(1, 2));
  EXPECT_THROW(ratfun_eval(inv, Rational(-1)), PoleError);
  const RationalFunction six(Polynomial{6}, s_plus(1) * s_plus(2) * s_plus(3));
  EXPECT_EQ(ratfun_eval(six, Rational(1)), q(1, 4));
  EXPECT_EQ(six.evaluate(Rational(1)), q(6, 24));
  EXPECT_THROW(RationalFunction(Polynomial{1}, Polynomial{}), DivisionByZeroError);
}

TEST(RationalFunction, CanonicalForm) {
  const RationalFunction r(Polynomial{-2, -2}, Polynomial{-4, -6, -2});  // -2(s+1) / -2(s+1)(s+2)
  EXPECT_EQ(r.numer(), Polynomial{1});
  EXPECT_EQ(r.denom(), s_plus(2));
  EXPECT_EQ(r.to_string(), "[1]/[2,1]");
  const RationalFunction half(Polynomial{2}, Polynomial{4});
  EXPECT_EQ(half, RationalFunction(q(1, 2)));
  const RationalFunction zero(Polynomial{}, s_plus(5));
  EXPECT_EQ(zero, RationalFunction());
  EXPECT_EQ(zero.denom(), Polynomial{1});
  // 3/(2s+4): contents 3 and 2 are coprime, so nothing further divides out.
  const RationalFunction c(Polynomial{3}, Polynomial{4, 2});
  EXPECT_EQ(c.numer(), Polynomial{3});
  EXPECT_EQ(c.denom(), (Polynomial{4, 2}));
}

TEST(RationalFunction, ClosureUnderOperations) {
  Gen gen(23);
  for (int iter = 0; iter < 300; ++iter) {
    const RationalFunction a = gen.ratfun(), b = gen.ratfun(), c = gen.nonzero_ratfun();
    for (const RationalFunction& r : {a + b, a - b, a * b, a / c, derivative(a)}) {
      ASSERT_TRUE(canonical(r)) << r.to_string();
    }
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a + b) * c, a * c + b * c);
    EXPECT_EQ((a / c) * c, a);
    // Structural equality coincides with value equality at a safe point.
    const Rational s = gen.positive_rational();
    EXPECT_EQ(((a + b) * c).evaluate(s), (a.evaluate(s) + b.evaluate(s)) * c.evaluate(s));
  }
}

TEST(RationalFunction, DerivativeExamples) {
  const RationalFunction inv(Polynomial{1}, s_plus(1));
  EXPECT_EQ(derivative(inv), RationalFunction(Polynomial{-1}, s_plus(1) * s_plus(1)));
  EXPECT_TRUE(derivative(RationalFunction(q(7, 3))).is_zero());

  const RationalFunction second = derivative(derivative(inv));
  EXPECT_EQ(ratfun_eval(second, Rational(1)), q(1, 4));
  // Central difference of the exact first derivative at h = 1e-6.
  const RationalFunction first = derivative(inv);
  const double h = 1e-6;
  const double fd = (first.evaluate(1 + h) - first.evaluate(1 - h)) / (2 * h);
  EXPECT_NEAR(fd, 0.25, 0.25 * 1e-5);
}

TEST(RationalFunction, DerivativeMatchesFiniteDifferences) {
  Gen gen(29);
  for (int point = 0; point < 20; ++point) {
    RationalFunction f;
    do f = gen.ratfun();
    while (f.numer().degree() < 1 && f.denom().degree() < 1);
    const double s = gen.real(0.5, 5.0);
    const double h = 1e-5 * std::max(1.0, s);
    const double fd = (f.evaluate(s + h) - f.evaluate(s - h)) / (2 * h);
    const double exact = derivative(f).evaluate(s);
    const double scale = std::max(std::fabs(exact), 1e-3);
    EXPECT_LE(std::fabs(fd - exact) / scale, 1e-6) << f.to_string() << " at " << s;
  }
}
