#pragma once

// Kolmogorov-Smirnov tests and the limit experiments: H_n - ln n -> gamma,
// sum 1/j^2 -> pi^2/6, the tail bound on Z_n, and Z_n -> Gumbel.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "expostat/exact_arith.hpp"
#include "expostat/montecarlo.hpp"

namespace expostat {

inline constexpr double kEulerGamma = 0.5772156649015329;   // Euler-Mascheroni
inline constexpr double kBaselLimit = 1.6449340668482264;   // pi^2/6
inline constexpr double kDefaultAlpha = 0.001;
/// Harmonic-type sums are exact rationals up to this n, compensated doubles above.
inline constexpr unsigned kExactSumLimit = 10000;

enum class TestVerdict { pass, fail };

struct TestResult {
  std::string test_id;
  double statistic = 0.0;
  /// p-value for the KS tests, the bound for audits.
  double threshold_or_pvalue = 0.0;
  std::size_t n_effective = 0;
  TestVerdict verdict = TestVerdict::fail;
  /// Extra named values (abscissa, envelope, ...), serialized as-is.
  std::vector<std::pair<std::string, double>> details;

  bool passed() const { return verdict == TestVerdict::pass; }
};

struct ConvergenceRow {
  unsigned n = 0;
  double value = 0.0;
  std::optional<Rational> exact;
  double target = 0.0;
  double abs_error = 0.0;
};

/// Q(lambda) = 2 sum_{i>=1} (-1)^{i-1} exp(-2 i^2 lambda^2), the asymptotic
/// Kolmogorov tail probability. Small lambda uses the equivalent theta series.
double kolmogorov_pvalue(double lambda);

using Cdf = std::function<double(double)>;

/// D_N = sup |F_emp - cdf| from the sorted sample; pass iff p > alpha.
/// Throws DegenerateSampleError when N >= 2 and every value is equal.
TestResult ks_one_sample(std::span<const double> values, const Cdf& cdf, double alpha = kDefaultAlpha,
                         std::string test_id = "ks_one_sample");
TestResult ks_one_sample(const SampleBatch& batch, const Cdf& cdf, double alpha = kDefaultAlpha);

/// Two-sample statistic with N_eff = n_a n_b / (n_a + n_b). Throws
/// DegenerateSampleError when the pooled sample has a single distinct value.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = kDefaultAlpha,
                         std::string test_id = "ks_two_sample");
TestResult ks_two_sample(const SampleBatch& a, const SampleBatch& b, double alpha = kDefaultAlpha);

/// H_n - ln n against the Euler-Mascheroni constant. n_list must be
/// nondecreasing with entries >= 1.
std::vector<ConvergenceRow> euler_gamma_table(const std::vector<unsigned>& n_list);

/// sum_{j<=n} 1/j^2 against pi^2/6.
std::vector<ConvergenceRow> basel_table(const std::vector<unsigned>& n_list);

/// Var T_(n) for sample size n against pi^2/6, via the order-statistic variance.
std::vector<ConvergenceRow> variance_convergence_check(const std::vector<unsigned>& n_list);

/// For each x: max over n of G_n(-x) + 1 - G_n(x) against 2e^{-x}.
/// details: x, envelope exp(-e^x) + e^{-x}, argmax_n.
std::vector<TestResult> tail_bound_audit(const std::vector<unsigned>& n_list, const std::vector<double>& x_grid);

/// sup over 2000 points of [-ln n + 1e-6, 10] of |zn_cdf(n,.) - gumbel_cdf|.
std::vector<ConvergenceRow> gumbel_approx_error(const std::vector<unsigned>& n_list);

/// 1/(2(n+1)) < H_n - ln n - gamma < 1/(2n).
bool within_euler_envelope(const ConvergenceRow& row);
/// 1/(n+1) < pi^2/6 - sum_{j<=n} 1/j^2 < 1/n.
bool within_basel_bracket(const ConvergenceRow& row);

/// `count` distinct integers from lo to hi, spaced geometrically.
std::vector<unsigned> log_spaced_integers(unsigned lo, unsigned hi, std::size_t count);

/// 10, 100, ..., 10^6.
std::vector<unsigned> powers_of_ten(unsigned first_exponent, unsigned last_exponent);

/// "n,value,target,abs_error" header plus rows.
std::string rows_to_csv(const std::vector<ConvergenceRow>& rows);
/// One JSON object per row, tagged with `table`.
std::string rows_to_json_lines(const std::string& table, const std::vector<ConvergenceRow>& rows);
std::string to_json_line(const TestResult& result);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace expostat
