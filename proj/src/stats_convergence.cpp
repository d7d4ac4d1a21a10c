#include "expostat/stats_convergence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "expostat/compensated_sum.hpp"
#include "expostat/errors.hpp"
#include "expostat/orderstat_dist.hpp"

namespace expostat {

// ------------------------------------------------------------------ KS tests

double kolmogorov_pvalue(double lambda) {
  constexpr double kTermCutoff = 1e-10;
  if (!(lambda > 0.0)) return 1.0;
  double p;
  if (lambda < 1.18) {
    // P(K <= lambda) = sqrt(2 pi)/lambda sum_{i>=1} exp(-(2i-1)^2 pi^2 / (8 lambda^2))
    const double y = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double odd = 2.0 * i - 1.0;
      const double term = std::exp(odd * odd * y);
      sum += term;
      if (term < kTermCutoff) break;
    }
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double term = std::exp(-2.0 * i * i * lambda * lambda);
      sum += (i % 2 == 1) ? term : -term;
      if (term < kTermCutoff) break;
    }
    p = 2.0 * sum;
  }
  return std::clamp(p, 0.0, 1.0);
}

namespace {

TestResult ks_result(std::string test_id, double statistic, double n_eff, double alpha) {
  TestResult result;
  result.test_id = std::move(test_id);
  result.statistic = statistic;
  result.threshold_or_pvalue = kolmogorov_pvalue(std::sqrt(n_eff) * statistic);
  result.n_effective = static_cast<std::size_t>(std::llround(n_eff));
  result.verdict = result.threshold_or_pvalue > alpha ? TestVerdict::pass : TestVerdict::fail;
  result.details.emplace_back("alpha", alpha);
  return result;
}

}  // namespace

TestResult ks_one_sample(std::span<const double> values, const Cdf& cdf, double alpha, std::string test_id) {
  if (values.empty()) throw ParameterError("ks_one_sample: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() >= 2 && sorted.front() == sorted.back()) {
    throw DegenerateSampleError("ks_one_sample: all values are equal");
  }
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return ks_result(std::move(test_id), d, n, alpha);
}

TestResult ks_one_sample(const SampleBatch& batch, const Cdf& cdf, double alpha) {
  return ks_one_sample(batch.values, cdf, alpha, "ks_one_sample:" + std::string(sampler_name(batch.sampler)));
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha, std::string test_id) {
  if (a.empty() || b.empty()) throw ParameterError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  if (std::min(x.front(), y.front()) == std::max(x.back(), y.back())) {
    throw DegenerateSampleError("ks_two_sample: pooled sample has a single value");
  }
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return ks_result(std::move(test_id), d, na * nb / (na + nb), alpha);
}

TestResult ks_two_sample(const SampleBatch& a, const SampleBatch& b, double alpha) {
  return ks_two_sample(a.values, b.values, alpha,
                       "ks_two_sample:" + std::string(sampler_name(a.sampler)) + "/" +
                           std::string(sampler_name(b.sampler)));
}

// ------------------------------------------------------- convergence tables

namespace {

void require_n_list(const std::vector<unsigned>& n_list) {
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw ParameterError("n_list entries must be >= 1");
    if (i > 0 && n_list[i] < n_list[i - 1]) throw ParameterError("n_list must be nondecreasing");
  }
}

// Running sum_{j<=n} 1/j^power along a nondecreasing n_list: exact up to
// kExactSumLimit, compensated double precision beyond.
class ReciprocalPowerSums {
 public:
  explicit ReciprocalPowerSums(unsigned power) : power_(power) {}

  // Returns the double value and, when exact, the rational.
  std::pair<double, std::optional<Rational>> at(unsigned n) {
    if (n <= kExactSumLimit) {
      exact_ += sum_reciprocal_powers(exact_upto_ + 1, n, power_);
      exact_upto_ = std::max(exact_upto_, n);
      return {exact_.to_double(), exact_};
    }
    for (unsigned j = float_upto_ + 1; j <= n; ++j) {
      const double jd = static_cast<double>(j);
      float_.add(power_ == 1 ? 1.0 / jd : 1.0 / (jd * jd));
    }
    float_upto_ = std::max(float_upto_, n);
    return {float_.value(), std::nullopt};
  }

 private:
  unsigned power_;
  Rational exact_;
  unsigned exact_upto_ = 0;
  CompensatedSum float_;
  unsigned float_upto_ = 0;
};

ConvergenceRow make_row(unsigned n, double value, std::optional<Rational> exact, double target) {
  return {n, value, std::move(exact), target, std::fabs(value - target)};
}

}  // namespace

std::vector<ConvergenceRow> euler_gamma_table(const std::vector<unsigned>& n_list) {
  require_n_list(n_list);
  ReciprocalPowerSums harmonic(1);
  std::vector<ConvergenceRow> rows;
  for (unsigned n : n_list) {
    auto [h, exact] = harmonic.at(n);
    rows.push_back(make_row(n, h - std::log(static_cast<double>(n)), std::move(exact), kEulerGamma));
  }
  return rows;
}

std::vector<ConvergenceRow> basel_table(const std::vector<unsigned>& n_list) {
  require_n_list(n_list);
  ReciprocalPowerSums squares(2);
  std::vector<ConvergenceRow> rows;
  for (unsigned n : n_list) {
    auto [s, exact] = squares.at(n);
    rows.push_back(make_row(n, s, std::move(exact), kBaselLimit));
  }
  return rows;
}

std::vector<ConvergenceRow> variance_convergence_check(const std::vector<unsigned>& n_list) {
  require_n_list(n_list);
  std::vector<ConvergenceRow> rows;
  for (unsigned n : n_list) {
    const OrderStatParams p{n, n};
    if (n <= kExactSumLimit) {
      Rational v = orderstat_var(p);
      const double value = v.to_double();
      rows.push_back(make_row(n, value, std::move(v), kBaselLimit));
    } else {
      rows.push_back(make_row(n, orderstat_var_float(p), std::nullopt, kBaselLimit));
    }
  }
  return rows;
}

std::vector<TestResult> tail_bound_audit(const std::vector<unsigned>& n_list, const std::vector<double>& x_grid) {
  if (n_list.empty()) throw ParameterError("tail_bound_audit: empty n_list");
  for (unsigned n : n_list) {
    if (n == 0) throw ParameterError("tail_bound_audit: n must be >= 1");
  }
  std::vector<TestResult> results;
  results.reserve(x_grid.size());
  for (double x : x_grid) {
    if (!(x > 0.0)) throw ParameterError("tail_bound_audit: x must be > 0");
    double worst = -1.0;
    unsigned worst_n = 0;
    for (unsigned n : n_list) {
      const double mass = zn_cdf(n, -x) + (1.0 - zn_cdf(n, x));
      if (mass > worst) {
        worst = mass;
        worst_n = n;
      }
    }
    TestResult r;
    r.test_id = "tail_bound_audit";
    r.statistic = worst;
    r.threshold_or_pvalue = 2.0 * std::exp(-x);
    r.n_effective = n_list.size();
    r.verdict = worst < r.threshold_or_pvalue ? TestVerdict::pass : TestVerdict::fail;
    r.details = {{"x", x}, {"envelope", std::exp(-std::exp(x)) + std::exp(-x)}, {"argmax_n", worst_n}};
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<ConvergenceRow> gumbel_approx_error(const std::vector<unsigned>& n_list) {
  require_n_list(n_list);
  constexpr int kPoints = 2000;
  std::vector<ConvergenceRow> rows;
  for (unsigned n : n_list) {
    const double lo = -std::log(static_cast<double>(n)) + 1e-6;
    const double hi = 10.0;
    double sup = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double x = lo + (hi - lo) * i / (kPoints - 1);
      sup = std::max(sup, std::fabs(zn_cdf(n, x) - gumbel_cdf(x)));
    }
    rows.push_back(make_row(n, sup, std::nullopt, 0.0));
  }
  return rows;
}

bool within_euler_envelope(const ConvergenceRow& row) {
  const double n = row.n;
  const double excess = row.value - row.target;
  return excess > 1.0 / (2.0 * (n + 1.0)) && excess < 1.0 / (2.0 * n);
}

bool within_basel_bracket(const ConvergenceRow& row) {
  const double n = row.n;
  const double tail = row.target - row.value;
  return tail > 1.0 / (n + 1.0) && tail < 1.0 / n;
}

std::vector<unsigned> log_spaced_integers(unsigned lo, unsigned hi, std::size_t count) {
  if (lo == 0 || hi < lo) throw ParameterError("log_spaced_integers: need 1 <= lo <= hi");
  if (count == 0) return {};
  if (count > static_cast<std::size_t>(hi - lo) + 1) {
    throw ParameterError("log_spaced_integers: more values requested than integers in range");
  }
  std::vector<unsigned> out;
  const double ratio = std::log(static_cast<double>(hi) / lo);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    auto v = static_cast<unsigned>(std::llround(lo * std::exp(ratio * t)));
    if (!out.empty()) v = std::max(v, out.back() + 1);
    // Leave room for the remaining values below hi.
    v = std::min<unsigned>(v, hi - static_cast<unsigned>(count - 1 - i));
    out.push_back(v);
  }
  return out;
}

std::vector<unsigned> powers_of_ten(unsigned first_exponent, unsigned last_exponent) {
  std::vector<unsigned> out;
  for (unsigned e = first_exponent; e <= last_exponent; ++e) {
    out.push_back(static_cast<unsigned>(std::llround(std::pow(10.0, e))));
  }
  return out;
}

// ------------------------------------------------------------ serialization

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string rows_to_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "n,value,target,abs_error\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.value) << ',' << format_double(r.target) << ','
        << format_double(r.abs_error) << '\n';
  }
  return out.str();
}

std::string rows_to_json_lines(const std::string& table, const std::vector<ConvergenceRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["table"] = table;
    j["n"] = r.n;
    j["value"] = r.value;
    j["target"] = r.target;
    j["abs_error"] = r.abs_error;
    out += j.dump() + '\n';
  }
  return out;
}

std::string to_json_line(const TestResult& result) {
  nlohmann::ordered_json j;
  j["test_id"] = result.test_id;
  j["statistic"] = result.statistic;
  j["threshold_or_pvalue"] = result.threshold_or_pvalue;
  j["n_effective"] = result.n_effective;
  j["verdict"] = result.passed() ? "pass" : "fail";
  if (!result.details.empty()) {
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
    for (const auto& [name, value] : result.details) details[name] = value;
    j["details"] = details;
  }
  return j.dump();
}

}  // namespace expostat
