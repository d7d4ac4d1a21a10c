#pragma once

// Batch verification of the order-statistic identity family with exact
// arithmetic. Each check produces an IdentityReport; run_suite sweeps a grid
// and returns the reports in a deterministic order.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "expostat/exact_arith.hpp"
#include "expostat/laplace_forms.hpp"

namespace expostat {

/// Which identity a report checks. The wire name (identity_name) is what
/// appears in serialized reports.
enum class IdentityId {
  product_equals_double_sum,
  minimum_closed_form,
  maximum_closed_form,
  integer_s_reciprocal,
  nested_product,
  erlang_race,
  r2_closed_form,
  r2_minimum_closed_form,
  inversion_involution,
};

std::string_view identity_name(IdentityId id);
std::optional<IdentityId> identity_from_name(std::string_view name);

struct IdentityParams {
  std::optional<unsigned> n;
  std::optional<unsigned> k;
  std::optional<unsigned> r;
  std::optional<Rational> s;
};

using IdentityValue = std::variant<Rational, RationalFunction>;

enum class Verdict { exact_match, mismatch };

struct IdentityReport {
  IdentityId id{};
  IdentityParams params;
  IdentityValue lhs;
  IdentityValue rhs;
  Verdict verdict = Verdict::mismatch;
  std::chrono::microseconds elapsed{0};
  /// Set when the check threw instead of producing both sides.
  std::optional<std::string> error;

  bool ok() const { return verdict == Verdict::exact_match; }
};

/// double_sum_form(n, k) against product_form(n, k), structurally.
IdentityReport verify_main(unsigned n, unsigned k);
/// double_sum_form(n, 1) against n/(s+n), structurally.
IdentityReport verify_minimum(unsigned n);
/// sum_j (-1)^j C(n,j) s/(s+j) against prod_{j=1}^n j/(s+j) at a point s.
IdentityReport verify_maximum(unsigned n, const Rational& s);
/// sum_j (-1)^j C(n,j) q/(q+j) against 1/C(n+q, q) for a positive integer q.
IdentityReport verify_integer_s(unsigned n, unsigned q);
/// sum_m C(n,m) s/(s+n-m) prod_{i=1}^m i/(s+n-m+i) against product_form at s.
IdentityReport verify_nested(unsigned n, unsigned k, const Rational& s);
/// generalized_double_sum against erlang_weighted_sum at s.
IdentityReport verify_generalized(unsigned n, unsigned k, unsigned r, const Rational& s);
/// erlang_weighted_sum with r = 2 against r2_closed_form at s.
IdentityReport verify_r2_closed(unsigned n, unsigned k, const Rational& s);
/// generalized_double_sum with k = 1, r = 2 against n(n+2s)/(s+n)^2 at s.
IdentityReport verify_r2_minimum(unsigned n, const Rational& s);
/// Inverting the sequence j -> prod_{i=1}^{j} i/(s+i) recovers s/(s+n) at n.
IdentityReport verify_inversion(unsigned n, const Rational& s);

/// b_n = sum_{j=0}^{n} (-1)^j C(n,j) a_j. Self-inverse.
std::vector<Rational> binomial_invert(const std::vector<Rational>& a);

struct SuiteGrid {
  unsigned max_n = 12;
  unsigned max_r = 4;
  std::vector<Rational> s_grid;
  /// Ceiling on n for the pointwise maximum identity and the inversion check.
  unsigned max_n_maximum = 12;
  /// Ceiling on both n and the integer s for verify_integer_s.
  unsigned max_integer_s = 12;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Test hook: perturbs the right side of the first report.
  bool inject_fault = false;
};

/// The six-point rational grid {1/3, 1/2, 1, 2, 7/2, 5}.
std::vector<Rational> default_s_grid();

/// max_n 12, max_r 4, default_s_grid(), maximum identity to n = 30, integer s
/// identity to n, s <= 15.
SuiteGrid acceptance_grid();

/// Runs every verifier over `grid`. Errors thrown by a check are recorded in
/// its report. Reports are sorted by (identity name, n, k, r, s).
std::vector<IdentityReport> run_suite(const SuiteGrid& grid);
std::vector<IdentityReport> run_suite(unsigned max_n, unsigned max_r, const std::vector<Rational>& s_grid);

/// One JSON object per line: identity_id, params, lhs, rhs, verdict,
/// elapsed_us. Exact values are fraction strings; rational functions are
/// "[numer coefficients]/[denom coefficients]". Mismatches also carry the
/// coefficient lists. With include_timing false, elapsed_us is written as 0.
std::string to_json_line(const IdentityReport& report, bool include_timing = true);

/// Header plus one row per report.
std::string to_csv(const std::vector<IdentityReport>& reports, bool include_timing = true);

std::string value_to_string(const IdentityValue& value);

}  // namespace expostat
