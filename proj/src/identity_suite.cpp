#include "expostat/identity_suite.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "expostat/errors.hpp"

namespace expostat {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<std::pair<IdentityId, std::string_view>, 9> kNames{{
    {IdentityId::product_equals_double_sum, "main_2_17"},
    {IdentityId::minimum_closed_form, "k1_2_18"},
    {IdentityId::maximum_closed_form, "kn_2_19"},
    {IdentityId::integer_s_reciprocal, "integer_s_remark_2_3"},
    {IdentityId::nested_product, "nested_remark_2_5"},
    {IdentityId::erlang_race, "generalized_3_12"},
    {IdentityId::r2_closed_form, "r2_closed_3_13"},
    {IdentityId::r2_minimum_closed_form, "r2_k1_3_14"},
    {IdentityId::inversion_involution, "inversion_involution"},
}};

IdentityReport make_report(IdentityId id, IdentityParams params, IdentityValue lhs, IdentityValue rhs,
                           Clock::time_point start) {
  IdentityReport report;
  report.id = id;
  report.params = std::move(params);
  report.verdict = lhs == rhs ? Verdict::exact_match : Verdict::mismatch;
  report.lhs = std::move(lhs);
  report.rhs = std::move(rhs);
  report.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
  return report;
}

Rational rat(unsigned v) { return Rational(static_cast<long>(v)); }

// sum_{j=0}^{n} (-1)^j C(n,j) s/(s+j)
Rational alternating_reciprocal_sum(unsigned n, const Rational& s) {
  Rational total;
  for (unsigned j = 0; j <= n; ++j) {
    Rational term = Rational(binomial(n, j)) * s / (s + rat(j));
    total += (j % 2 == 1) ? -term : term;
  }
  return total;
}

// prod_{j=lo}^{hi} j/(s+j)
Rational rate_product(unsigned lo, unsigned hi, const Rational& s) {
  Rational product(1);
  for (unsigned j = lo; j <= hi; ++j) product *= rat(j) / (s + rat(j));
  return product;
}

// sum_{j=0}^{r-1} (-1)^j s^j/j! f^{(j)}(s) from precomputed derivatives.
Rational erlang_from_derivatives(const std::vector<RationalFunction>& derivs, unsigned r, const Rational& s) {
  Rational total;
  Rational s_power(1);
  for (unsigned j = 0; j < r; ++j) {
    if (j > 0) s_power *= s;
    Rational term = s_power / Rational(factorial(j)) * derivs[j].evaluate(s);
    total += (j % 2 == 1) ? -term : term;
  }
  return total;
}

void require_order_params(unsigned n, unsigned k) { OrderStatParams{n, k}.validate(); }

}  // namespace

std::string_view identity_name(IdentityId id) {
  for (const auto& [key, name] : kNames) {
    if (key == id) return name;
  }
  return "unknown";
}

std::optional<IdentityId> identity_from_name(std::string_view name) {
  for (const auto& [key, wire] : kNames) {
    if (wire == name) return key;
  }
  return std::nullopt;
}

IdentityReport verify_main(unsigned n, unsigned k) {
  const auto start = Clock::now();
  const OrderStatParams p{n, k};
  return make_report(IdentityId::product_equals_double_sum, {n, k, {}, {}}, double_sum_form(p), product_form(p),
                     start);
}

IdentityReport verify_minimum(unsigned n) {
  const auto start = Clock::now();
  const OrderStatParams p{n, 1};
  RationalFunction rhs(Polynomial::constant(n), Polynomial::linear(n, 1));
  return make_report(IdentityId::minimum_closed_form, {n, 1u, {}, {}}, double_sum_form(p), std::move(rhs), start);
}

IdentityReport verify_maximum(unsigned n, const Rational& s) {
  const auto start = Clock::now();
  if (n == 0) throw ParameterError("n must be >= 1");
  require_positive(s);
  return make_report(IdentityId::maximum_closed_form, {n, n, {}, s}, alternating_reciprocal_sum(n, s),
                     rate_product(1, n, s), start);
}

IdentityReport verify_integer_s(unsigned n, unsigned q) {
  const auto start = Clock::now();
  if (n == 0 || q == 0) throw ParameterError("integer-s identity requires n >= 1 and s >= 1");
  const Rational s = rat(q);
  Rational rhs = Rational(BigInt(1), binomial(n + q, q));
  return make_report(IdentityId::integer_s_reciprocal, {n, {}, {}, s}, alternating_reciprocal_sum(n, s),
                     std::move(rhs), start);
}

IdentityReport verify_nested(unsigned n, unsigned k, const Rational& s) {
  const auto start = Clock::now();
  require_order_params(n, k);
  require_positive(s);
  Rational lhs;
  for (unsigned m = k; m <= n; ++m) {
    const Rational shift = s + rat(n - m);
    Rational term = Rational(binomial(n, m)) * (s / shift);
    for (unsigned i = 1; i <= m; ++i) term *= rat(i) / (shift + rat(i));
    lhs += term;
  }
  return make_report(IdentityId::nested_product, {n, k, {}, s}, std::move(lhs), rate_product(n - k + 1, n, s),
                     start);
}

IdentityReport verify_generalized(unsigned n, unsigned k, unsigned r, const Rational& s) {
  const auto start = Clock::now();
  const OrderStatParams p{n, k};
  return make_report(IdentityId::erlang_race, {n, k, r, s}, generalized_double_sum(p, r, s),
                     erlang_weighted_sum(p, r, s), start);
}

IdentityReport verify_r2_closed(unsigned n, unsigned k, const Rational& s) {
  const auto start = Clock::now();
  const OrderStatParams p{n, k};
  return make_report(IdentityId::r2_closed_form, {n, k, 2u, s}, erlang_weighted_sum(p, 2, s), r2_closed_form(p, s),
                     start);
}

IdentityReport verify_r2_minimum(unsigned n, const Rational& s) {
  const auto start = Clock::now();
  const OrderStatParams p{n, 1};
  return make_report(IdentityId::r2_minimum_closed_form, {n, 1u, 2u, s}, generalized_double_sum(p, 2, s),
                     r2_k1_closed_form(n, s), start);
}

IdentityReport verify_inversion(unsigned n, const Rational& s) {
  const auto start = Clock::now();
  require_positive(s);
  std::vector<Rational> products(n + 1);
  for (unsigned j = 0; j <= n; ++j) products[j] = rate_product(1, j, s);
  Rational lhs = binomial_invert(products).back();
  return make_report(IdentityId::inversion_involution, {n, {}, {}, s}, std::move(lhs), s / (s + rat(n)), start);
}

std::vector<Rational> binomial_invert(const std::vector<Rational>& a) {
  std::vector<Rational> b(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    Rational total;
    for (std::size_t j = 0; j <= n; ++j) {
      Rational term =
          Rational(binomial(static_cast<unsigned>(n), static_cast<unsigned>(j))) * a[j];
      total += (j % 2 == 1) ? -term : term;
    }
    b[n] = std::move(total);
  }
  return b;
}

std::vector<Rational> default_s_grid() {
  return {Rational(BigInt(1), BigInt(3)), Rational(BigInt(1), BigInt(2)), Rational(1), Rational(2),
          Rational(BigInt(7), BigInt(2)), Rational(5)};
}

SuiteGrid acceptance_grid() {
  SuiteGrid grid;
  grid.max_n = 12;
  grid.max_r = 4;
  grid.s_grid = default_s_grid();
  grid.max_n_maximum = 30;
  grid.max_integer_s = 15;
  return grid;
}

namespace {

using Task = std::function<std::vector<IdentityReport>()>;

// Runs `fn`, turning an exception into a mismatch report with the error text.
IdentityReport guarded(IdentityId id, IdentityParams params, const std::function<IdentityReport()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    IdentityReport report;
    report.id = id;
    report.params = std::move(params);
    report.verdict = Verdict::mismatch;
    report.error = e.what();
    return report;
  }
}

std::vector<Task> build_tasks(const SuiteGrid& grid) {
  std::vector<Task> tasks;
  const auto& sg = grid.s_grid;
  for (unsigned n = 1; n <= grid.max_n; ++n) {
    tasks.emplace_back([n] {
      return std::vector{guarded(IdentityId::minimum_closed_form, {n, 1u, {}, {}}, [n] { return verify_minimum(n); })};
    });
    for (unsigned k = 1; k <= n; ++k) {
      tasks.emplace_back([n, k] {
        return std::vector{
            guarded(IdentityId::product_equals_double_sum, {n, k, {}, {}}, [n, k] { return verify_main(n, k); })};
      });
      // Derivatives of f_{n,k} are shared by every (r, s) cell of this (n, k).
      tasks.emplace_back([n, k, &grid, &sg] {
        std::vector<IdentityReport> out;
        std::vector<RationalFunction> derivs;
        try {
          derivs.push_back(product_form({n, k}));
          for (unsigned j = 1; j < std::max(grid.max_r, 2u); ++j) derivs.push_back(derivative(derivs.back()));
        } catch (...) {
          derivs.clear();
        }
        for (const auto& s : sg) {
          for (unsigned r = 1; r <= grid.max_r; ++r) {
            out.push_back(guarded(IdentityId::erlang_race, {n, k, r, s}, [&] {
              if (derivs.empty()) return verify_generalized(n, k, r, s);
              const auto start = Clock::now();
              const OrderStatParams p{n, k};
              return make_report(IdentityId::erlang_race, {n, k, r, s}, generalized_double_sum(p, r, s),
                                 erlang_from_derivatives(derivs, r, s), start);
            }));
          }
          out.push_back(guarded(IdentityId::r2_closed_form, {n, k, 2u, s}, [&] {
            if (derivs.empty()) return verify_r2_closed(n, k, s);
            const auto start = Clock::now();
            return make_report(IdentityId::r2_closed_form, {n, k, 2u, s}, erlang_from_derivatives(derivs, 2, s),
                               r2_closed_form({n, k}, s), start);
          }));
          out.push_back(
              guarded(IdentityId::nested_product, {n, k, {}, s}, [&] { return verify_nested(n, k, s); }));
        }
        return out;
      });
    }
    tasks.emplace_back([n, &sg] {
      std::vector<IdentityReport> out;
      for (const auto& s : sg) {
        out.push_back(guarded(IdentityId::r2_minimum_closed_form, {n, 1u, 2u, s},
                              [&] { return verify_r2_minimum(n, s); }));
      }
      return out;
    });
  }
  for (unsigned n = 1; n <= grid.max_n_maximum; ++n) {
    tasks.emplace_back([n, &sg] {
      std::vector<IdentityReport> out;
      for (const auto& s : sg) {
        out.push_back(
            guarded(IdentityId::maximum_closed_form, {n, n, {}, s}, [&] { return verify_maximum(n, s); }));
      }
      return out;
    });
  }
  for (unsigned n = 0; n <= grid.max_n_maximum; ++n) {
    tasks.emplace_back([n, &sg] {
      std::vector<IdentityReport> out;
      for (const auto& s : sg) {
        out.push_back(
            guarded(IdentityId::inversion_involution, {n, {}, {}, s}, [&] { return verify_inversion(n, s); }));
      }
      return out;
    });
  }
  for (unsigned n = 1; n <= grid.max_integer_s; ++n) {
    for (unsigned q = 1; q <= grid.max_integer_s; ++q) {
      tasks.emplace_back([n, q] {
        return std::vector{guarded(IdentityId::integer_s_reciprocal, {n, {}, {}, rat(q)},
                                   [n, q] { return verify_integer_s(n, q); })};
      });
    }
  }
  return tasks;
}

template <typename T>
bool optional_less(const std::optional<T>& a, const std::optional<T>& b) {
  if (!a || !b) return !a && b.has_value();
  return *a < *b;
}

bool report_less(const IdentityReport& a, const IdentityReport& b) {
  const auto na = identity_name(a.id);
  const auto nb = identity_name(b.id);
  if (na != nb) return na < nb;
  const auto& pa = a.params;
  const auto& pb = b.params;
  if (pa.n != pb.n) return optional_less(pa.n, pb.n);
  if (pa.k != pb.k) return optional_less(pa.k, pb.k);
  if (pa.r != pb.r) return optional_less(pa.r, pb.r);
  return optional_less(pa.s, pb.s);
}

}  // namespace

std::vector<IdentityReport> run_suite(const SuiteGrid& grid) {
  if (grid.max_n == 0) throw ParameterError("run_suite requires max_n >= 1");
  for (const auto& s : grid.s_grid) require_positive(s);

  const std::vector<Task> tasks = build_tasks(grid);
  std::vector<std::vector<IdentityReport>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = tasks[i]();
  };
  unsigned threads = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<IdentityReport> reports;
  for (auto& chunk : results) {
    for (auto& r : chunk) reports.push_back(std::move(r));
  }
  std::stable_sort(reports.begin(), reports.end(), report_less);

  if (grid.inject_fault && !reports.empty()) {
    auto& victim = reports.front();
    std::visit([](auto& v) { v += Rational(1); }, victim.rhs);
    victim.verdict = victim.lhs == victim.rhs ? Verdict::exact_match : Verdict::mismatch;
  }
  return reports;
}

std::vector<IdentityReport> run_suite(unsigned max_n, unsigned max_r, const std::vector<Rational>& s_grid) {
  SuiteGrid grid;
  grid.max_n = max_n;
  grid.max_r = max_r;
  grid.s_grid = s_grid;
  grid.max_n_maximum = max_n;
  grid.max_integer_s = max_n;
  return run_suite(grid);
}

// ------------------------------------------------------------ serialization

std::string value_to_string(const IdentityValue& value) {
  return std::visit([](const auto& v) { return v.to_string(); }, value);
}

namespace {

nlohmann::ordered_json coefficient_lists(const IdentityValue& value) {
  auto strings = [](const Polynomial& p) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : p.coefficients()) arr.push_back(c.get_str());
    if (p.is_zero()) arr.push_back("0");
    return arr;
  };
  nlohmann::ordered_json out;
  if (const auto* rf = std::get_if<RationalFunction>(&value)) {
    out["numer"] = strings(rf->numer());
    out["denom"] = strings(rf->denom());
  } else {
    const auto& q = std::get<Rational>(value);
    out["numer"] = nlohmann::ordered_json::array({q.numerator().get_str()});
    out["denom"] = nlohmann::ordered_json::array({q.denominator().get_str()});
  }
  return out;
}

std::string csv_field(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

std::string to_json_line(const IdentityReport& report, bool include_timing) {
  nlohmann::ordered_json j;
  j["identity_id"] = identity_name(report.id);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  if (report.params.n) params["n"] = *report.params.n;
  if (report.params.k) params["k"] = *report.params.k;
  if (report.params.r) params["r"] = *report.params.r;
  if (report.params.s) params["s"] = report.params.s->to_string();
  j["params"] = params;
  j["lhs"] = value_to_string(report.lhs);
  j["rhs"] = value_to_string(report.rhs);
  j["verdict"] = report.ok() ? "exact_match" : "mismatch";
  j["elapsed_us"] = include_timing ? report.elapsed.count() : 0;
  if (!report.ok()) {
    j["lhs_coeffs"] = coefficient_lists(report.lhs);
    j["rhs_coeffs"] = coefficient_lists(report.rhs);
  }
  if (report.error) j["error"] = *report.error;
  return j.dump();
}

std::string to_csv(const std::vector<IdentityReport>& reports, bool include_timing) {
  std::ostringstream out;
  out << "identity_id,n,k,r,s,lhs,rhs,verdict,elapsed_us\n";
  for (const auto& rep : reports) {
    const auto& p = rep.params;
    out << identity_name(rep.id) << ',' << (p.n ? std::to_string(*p.n) : "") << ','
        << (p.k ? std::to_string(*p.k) : "") << ',' << (p.r ? std::to_string(*p.r) : "") << ','
        << (p.s ? p.s->to_string() : "") << ',' << csv_field(value_to_string(rep.lhs)) << ','
        << csv_field(value_to_string(rep.rhs)) << ',' << (rep.ok() ? "exact_match" : "mismatch") << ','
        << (include_timing ? rep.elapsed.count() : 0) << '\n';
  }
  return out.str();
}

}  // namespace expostat
