#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "expostat/cli.hpp"
#include "expostat/errors.hpp"
#include "expostat/exact_arith.hpp"
#include "expostat/identity_suite.hpp"
#include "expostat/laplace_forms.hpp"
#include "expostat/montecarlo.hpp"
#include "expostat/orderstat_dist.hpp"
#include "expostat/stats_convergence.hpp"

namespace py = pybind11;
using namespace expostat;

namespace {

py::object big_to_py(const BigInt& v) {
  const std::string text = v.get_str();
  return py::reinterpret_steal<py::object>(PyLong_FromString(text.c_str(), nullptr, 10));
}

py::object to_fraction(const Rational& q) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(big_to_py(q.numerator()), big_to_py(q.denominator()));
}

// Accepts int, Fraction or a "p/q" string.
Rational from_py(const py::handle& obj) {
  const std::string text = py::str(obj);
  try {
    return Rational::parse(text);
  } catch (const std::invalid_argument&) {
    throw py::type_error("expected an int, Fraction or 'p/q' string, got " + text);
  }
}

py::list coeffs(const Polynomial& p) {
  py::list out;
  for (const auto& c : p.coefficients()) out.append(big_to_py(c));
  return out;
}

// (numerator coefficients, denominator coefficients), ascending degree.
py::tuple ratfun_to_py(const RationalFunction& f) { return py::make_tuple(coeffs(f.numer()), coeffs(f.denom())); }

py::array_t<double> values_array(const SampleBatch& batch) {
  py::array_t<double> out(static_cast<py::ssize_t>(batch.values.size()));
  std::copy(batch.values.begin(), batch.values.end(), out.mutable_data());
  return out;
}

py::dict report_to_py(const IdentityReport& r) {
  py::dict d;
  d["identity_id"] = std::string(identity_name(r.id));
  d["n"] = r.params.n ? py::cast(*r.params.n) : py::none();
  d["k"] = r.params.k ? py::cast(*r.params.k) : py::none();
  d["r"] = r.params.r ? py::cast(*r.params.r) : py::none();
  d["s"] = r.params.s ? to_fraction(*r.params.s) : py::none();
  d["lhs"] = value_to_string(r.lhs);
  d["rhs"] = value_to_string(r.rhs);
  d["ok"] = r.ok();
  return d;
}

OrderStatParams params(unsigned n, unsigned k) {
  OrderStatParams p{n, k};
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_expostat, m) {
  m.doc() = "Exact Laplace-transform identities and Monte Carlo checks for exponential order statistics";

  py::register_exception<DivisionByZeroError>(m, "DivisionByZeroError", PyExc_ZeroDivisionError);
  py::register_exception<PoleError>(m, "PoleError", PyExc_ZeroDivisionError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DegenerateSampleError>(m, "DegenerateSampleError", PyExc_ValueError);

  m.def("binomial", [](unsigned n, unsigned k) { return big_to_py(binomial(n, k)); });
  m.def("factorial", [](unsigned n) { return big_to_py(factorial(n)); });

  m.def(
      "product_form", [](unsigned n, unsigned k) { return ratfun_to_py(product_form(params(n, k))); }, py::arg("n"),
      py::arg("k"));
  m.def(
      "double_sum_form", [](unsigned n, unsigned k) { return ratfun_to_py(double_sum_form(params(n, k))); },
      py::arg("n"), py::arg("k"));
  m.def(
      "laplace_transform",
      [](unsigned n, unsigned k, const py::object& s) {
        const Rational value = from_py(s);
        require_positive(value);
        return to_fraction(product_form(params(n, k)).evaluate(value));
      },
      py::arg("n"), py::arg("k"), py::arg("s"));
  m.def(
      "erlang_weighted_sum",
      [](unsigned n, unsigned k, unsigned r, const py::object& s) {
        return to_fraction(erlang_weighted_sum(params(n, k), r, from_py(s)));
      },
      py::arg("n"), py::arg("k"), py::arg("r"), py::arg("s"));
  m.def(
      "race_probability",
      [](unsigned n, unsigned k, unsigned r, const py::object& s) {
        return to_fraction(race_probability_exact(params(n, k), r, from_py(s)));
      },
      py::arg("n"), py::arg("k"), py::arg("r"), py::arg("s"));
  m.def(
      "binomial_invert",
      [](const std::vector<py::object>& seq) {
        std::vector<Rational> a;
        for (const auto& x : seq) a.push_back(from_py(x));
        py::list out;
        for (const auto& q : binomial_invert(a)) out.append(to_fraction(q));
        return out;
      },
      py::arg("sequence"));

  m.def("orderstat_mean", [](unsigned n, unsigned k) { return to_fraction(orderstat_mean(params(n, k))); });
  m.def("orderstat_var", [](unsigned n, unsigned k) { return to_fraction(orderstat_var(params(n, k))); });
  m.def("orderstat_pdf", [](unsigned n, unsigned k, double t) { return orderstat_pdf(params(n, k), t); });
  m.def("orderstat_cdf", [](unsigned n, unsigned k, double t) { return orderstat_cdf(params(n, k), t); });
  m.def("gumbel_cdf", &gumbel_cdf);
  m.def("zn_cdf", &zn_cdf, py::arg("n"), py::arg("x"));

  m.def(
      "run_suite",
      [](unsigned max_n, unsigned max_r, const std::vector<py::object>& s_grid) {
        std::vector<Rational> grid;
        for (const auto& s : s_grid) grid.push_back(from_py(s));
        if (grid.empty()) grid = default_s_grid();
        py::list out;
        for (const auto& r : run_suite(max_n, max_r, grid)) out.append(report_to_py(r));
        return out;
      },
      py::arg("max_n") = 6, py::arg("max_r") = 2, py::arg("s_grid") = std::vector<py::object>{});

  m.def(
      "philox4x64_10",
      [](std::array<std::uint64_t, 4> counter, std::array<std::uint64_t, 2> key) { return philox4x64_10(counter, key); },
      py::arg("counter"), py::arg("key"));
  m.def(
      "raw_stream",
      [](std::uint64_t seed, std::uint64_t stream_id, std::size_t count) {
        SeededStream stream(seed, stream_id);
        py::array_t<std::uint64_t> out(static_cast<py::ssize_t>(count));
        auto* data = out.mutable_data();
        for (std::size_t i = 0; i < count; ++i) data[i] = stream.next_u64();
        return out;
      },
      py::arg("seed"), py::arg("stream_id"), py::arg("count"));
  m.def(
      "sample_orderstat",
      [](unsigned n, unsigned k, std::size_t count, std::uint64_t seed, std::uint64_t stream_id,
         const std::string& method) {
        const SeededStream stream(seed, stream_id);
        if (method == "direct_sort") return values_array(sample_orderstat_direct(stream, params(n, k), count));
        if (method == "sum_representation") {
          return values_array(sample_orderstat_representation(stream, params(n, k), count));
        }
        throw py::value_error("method must be 'direct_sort' or 'sum_representation'");
      },
      py::arg("n"), py::arg("k"), py::arg("count"), py::arg("seed"), py::arg("stream_id") = 0,
      py::arg("method") = "direct_sort");
  m.def(
      "estimate_race",
      [](unsigned n, unsigned k, unsigned r, double s, std::size_t count, std::uint64_t seed) {
        ChunkPlan plan{seed, 0, count, 1 << 16, 0};
        return estimate_race_chunked(plan, params(n, k), GammaParams{s, r}).estimate();
      },
      py::arg("n"), py::arg("k"), py::arg("r"), py::arg("s"), py::arg("count"), py::arg("seed"));

  m.def(
      "ks_one_sample_exponential",
      [](std::vector<double> values) {
        const auto r = ks_one_sample(values, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
        return py::make_tuple(r.statistic, r.threshold_or_pvalue, r.passed());
      },
      py::arg("values"));
  m.def("kolmogorov_pvalue", &kolmogorov_pvalue);
  m.def("euler_gamma_error", [](unsigned n) { return euler_gamma_table({n}).front().abs_error; });
  m.def("basel_error", [](unsigned n) { return basel_table({n}).front().abs_error; });

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 2;
        try {
          code = cli::run(cli::parse_args(args), out, err);
        } catch (const UsageError& e) {
          err << e.what() << '\n';
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
