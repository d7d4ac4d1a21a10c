#include "expostat/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "expostat/errors.hpp"
#include "expostat/identity_suite.hpp"
#include "expostat/montecarlo.hpp"
#include "expostat/orderstat_dist.hpp"
#include "expostat/stats_convergence.hpp"

namespace expostat::cli {

namespace {

// Stream-id ranges per experiment, so no two experiments share variates.
constexpr std::uint64_t kEquivalenceStreams = 1000;
constexpr std::uint64_t kMomentStreams = 2000;
constexpr std::uint64_t kSpacingStreams = 3000;
constexpr std::uint64_t kZnStreams = 4000;
constexpr std::uint64_t kRaceStreams = 5000;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

Rational parse_positive_fraction(const std::string& text, const std::string& flag) {
  Rational value;
  try {
    value = Rational::parse(text);
  } catch (const std::exception&) {
    throw UsageError(flag + ": '" + text + "' is not a fraction p/q or an integer");
  }
  if (value.sign() <= 0) throw UsageError(flag + ": '" + text + "' must be > 0");
  return value;
}

std::vector<unsigned> parse_unsigned_list(const std::string& text, const std::string& flag) {
  std::vector<unsigned> out;
  for (const auto& item : split(text, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size() || item.empty() || item.front() == '-' || v == 0 || v > 0xFFFFFFFFUL) {
      throw UsageError(flag + ": '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<unsigned>(v));
  }
  return out;
}

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnvVar);
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  const std::string text(env);
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != text.size() || text.front() == '-') {
    throw UsageError(std::string(kSeedEnvVar) + ": '" + text + "' is not a decimal integer");
  }
  return v;
}

const std::vector<std::string> kAllTargets = {"gamma", "basel", "variance", "gumbel", "tail"};

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig config;
  config.seed = default_seed();
  config.s_grid = default_s_grid();
  config.targets = {"gamma", "basel"};
  config.n_list = powers_of_ten(1, 6);

  CLI::App app{"Exact identities and Monte Carlo checks for exponential order statistics", "expostat"};
  app.require_subcommand(1);

  std::string format;
  std::string output;
  std::string s_list;
  std::string targets;
  std::string n_list;
  unsigned long long seed = config.seed;
  long long max_n = config.max_n, max_r = config.max_r, max_n_maximum = config.max_n_maximum,
            max_integer_s = config.max_integer_s, replicates = static_cast<long long>(config.replicates),
            moment_replicates = static_cast<long long>(config.moment_replicates), sim_max_n = config.sim_max_n,
            threads = 0;
  long long race_n = config.race_n, race_k = config.race_k, race_r = config.race_r;
  std::string race_s = "1";
  std::string dump_dir;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json | csv | pretty");
    sub->add_option("--output", output, "Write to this file instead of stdout");
    sub->add_option("--threads", threads, "Worker threads (0: all cores)");
  };
  auto verify_flags = [&](CLI::App* sub) {
    sub->add_option("--max-n", max_n, "Largest n for the identity sweeps");
    sub->add_option("--max-r", max_r, "Largest gamma shape r");
    sub->add_option("--s", s_list, "Comma-separated positive fractions, e.g. 1/3,1/2,1");
    sub->add_option("--max-n-maximum", max_n_maximum, "Largest n for the pointwise k = n identity");
    sub->add_option("--max-integer-s", max_integer_s, "Largest n and s for the integer-s identity");
    sub->add_flag("--timing", config.timing, "Report per-check elapsed time (breaks byte-identical output)");
  };
  auto sim_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, std::string("Seed (default from ") + kSeedEnvVar + ")");
    sub->add_option("--replicates", replicates, "Replicates per KS test");
    sub->add_option("--moment-replicates", moment_replicates, "Replicates for mean and race checks");
    sub->add_option("--sim-max-n", sim_max_n, "Largest n for the sampler equivalence sweep");
    sub->add_option("--dump-dir", dump_dir, "Write sample batches as binary dumps into this directory");
  };
  auto converge_flags = [&](CLI::App* sub) {
    sub->add_option("--targets", targets, "Comma-separated: gamma,basel,variance,gumbel,tail");
    sub->add_option("--n", n_list, "Comma-separated nondecreasing n values");
  };

  auto* verify = app.add_subcommand("verify", "Exact identity sweep");
  verify_flags(verify);
  common(verify);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo distribution checks");
  sim_flags(simulate);
  common(simulate);
  auto* converge = app.add_subcommand("converge", "Euler constant, Basel, Gumbel and tail-bound tables");
  converge_flags(converge);
  common(converge);
  auto* race = app.add_subcommand("race", "P(X_r > T_(k)): exact value and Monte Carlo estimate");
  race->add_option("--n", race_n, "Sample size");
  race->add_option("--k", race_k, "Order index");
  race->add_option("--r", race_r, "Gamma shape");
  race->add_option("--s", race_s, "Gamma rate as a fraction");
  race->add_option("--seed", seed, "Seed");
  race->add_option("--replicates", replicates, "Monte Carlo replicates");
  common(race);
  auto* all = app.add_subcommand("all", "verify, simulate and converge with the default grids");
  common(all);
  all->add_option("--seed", seed, "Seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    config.help = app.help();
    return config;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      config.help = app.help();
      return config;
    }
    throw UsageError(e.what());
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
      config.help = sub->help();
      return config;
    }
  }

  if (verify->parsed()) config.command = Command::verify;
  if (simulate->parsed()) config.command = Command::simulate;
  if (converge->parsed()) config.command = Command::converge;
  if (race->parsed()) config.command = Command::race;
  if (all->parsed()) config.command = Command::all;

  auto positive = [](long long v, const char* flag) {
    if (v < 1 || v > 0xFFFFFFFFLL) throw UsageError(std::string(flag) + " must be >= 1");
    return static_cast<unsigned>(v);
  };
  config.max_n = positive(max_n, "--max-n");
  config.max_r = positive(max_r, "--max-r");
  config.max_n_maximum = positive(max_n_maximum, "--max-n-maximum");
  config.max_integer_s = positive(max_integer_s, "--max-integer-s");
  config.replicates = positive(replicates, "--replicates");
  config.moment_replicates = positive(moment_replicates, "--moment-replicates");
  config.sim_max_n = positive(sim_max_n, "--sim-max-n");
  if (threads < 0) throw UsageError("--threads must be >= 0");
  config.threads = static_cast<unsigned>(threads);
  config.seed = seed;

  if (!s_list.empty()) {
    config.s_grid.clear();
    for (const auto& item : split(s_list, ',')) config.s_grid.push_back(parse_positive_fraction(item, "--s"));
  }
  if (!targets.empty()) {
    config.targets = split(targets, ',');
    for (const auto& t : config.targets) {
      if (std::find(kAllTargets.begin(), kAllTargets.end(), t) == kAllTargets.end()) {
        throw UsageError("--targets: unknown target '" + t + "'");
      }
    }
  }
  if (!n_list.empty()) {
    config.n_list = parse_unsigned_list(n_list, "--n");
    for (std::size_t i = 1; i < config.n_list.size(); ++i) {
      if (config.n_list[i] < config.n_list[i - 1]) throw UsageError("--n must be nondecreasing");
    }
  }

  if (config.command == Command::race) {
    config.race_n = positive(race_n, "--n");
    config.race_k = positive(race_k, "--k");
    config.race_r = positive(race_r, "--r");
    if (config.race_k > config.race_n) throw UsageError("--k must not exceed --n");
    config.race_s = parse_positive_fraction(race_s, "--s");
  }
  if (!dump_dir.empty()) config.dump_dir = dump_dir;
  if (!output.empty()) config.output_path = output;

  if (format.empty()) {
    config.format = config.command == Command::converge ? OutputFormat::csv : OutputFormat::json;
  } else if (format == "json") {
    config.format = OutputFormat::json;
  } else if (format == "csv") {
    config.format = OutputFormat::csv;
  } else if (format == "pretty") {
    config.format = OutputFormat::pretty;
  } else {
    throw UsageError("--format: expected json, csv or pretty, got '" + format + "'");
  }
  return config;
}

namespace {

struct Section {
  std::string text;
  bool ok = true;
};

std::string results_csv(const std::vector<TestResult>& results) {
  std::ostringstream out;
  out << "test_id,statistic,threshold_or_pvalue,n_effective,verdict\n";
  for (const auto& r : results) {
    out << r.test_id << ',' << format_double(r.statistic) << ',' << format_double(r.threshold_or_pvalue) << ','
        << r.n_effective << ',' << (r.passed() ? "pass" : "fail") << '\n';
  }
  return out.str();
}

std::string results_pretty(const std::vector<TestResult>& results) {
  std::ostringstream out;
  for (const auto& r : results) {
    out << (r.passed() ? "PASS " : "FAIL ") << r.test_id << "  statistic=" << format_double(r.statistic)
        << "  p/threshold=" << format_double(r.threshold_or_pvalue) << "  N=" << r.n_effective << '\n';
  }
  return out.str();
}

Section emit_results(const std::vector<TestResult>& results, OutputFormat format) {
  Section section;
  for (const auto& r : results) section.ok = section.ok && r.passed();
  switch (format) {
    case OutputFormat::json:
      for (const auto& r : results) section.text += to_json_line(r) + '\n';
      break;
    case OutputFormat::csv: section.text = results_csv(results); break;
    case OutputFormat::pretty: section.text = results_pretty(results); break;
  }
  return section;
}

Section run_verify(const RunConfig& config, unsigned max_n, unsigned max_r, const std::vector<Rational>& s_grid,
                   unsigned max_n_maximum, unsigned max_integer_s) {
  SuiteGrid grid;
  grid.max_n = max_n;
  grid.max_r = max_r;
  grid.s_grid = s_grid;
  grid.max_n_maximum = max_n_maximum;
  grid.max_integer_s = max_integer_s;
  grid.threads = config.threads;
  grid.inject_fault = config.inject_fault;
  const auto reports = run_suite(grid);

  Section section;
  std::size_t mismatches = 0;
  for (const auto& r : reports) mismatches += r.ok() ? 0 : 1;
  section.ok = mismatches == 0;
  switch (config.format) {
    case OutputFormat::json:
      for (const auto& r : reports) section.text += to_json_line(r, config.timing) + '\n';
      break;
    case OutputFormat::csv: section.text = to_csv(reports, config.timing); break;
    case OutputFormat::pretty: {
      std::ostringstream out;
      out << "identity checks: " << reports.size() << ", mismatches: " << mismatches << '\n';
      for (const auto& r : reports) {
        if (r.ok()) continue;
        out << "MISMATCH " << identity_name(r.id) << "  lhs=" << value_to_string(r.lhs)
            << "  rhs=" << value_to_string(r.rhs) << (r.error ? "  error=" + *r.error : "") << '\n';
      }
      section.text = out.str();
      break;
    }
  }
  return section;
}

void maybe_dump(const RunConfig& config, const SampleBatch& batch, const std::string& name) {
  if (!config.dump_dir) return;
  std::filesystem::create_directories(*config.dump_dir);
  std::ofstream file(std::filesystem::path(*config.dump_dir) / (name + ".esvb"), std::ios::binary);
  write_batch(file, batch);
}

std::string label(const char* what, OrderStatParams p) {
  return std::string(what) + ":n=" + std::to_string(p.n) + ",k=" + std::to_string(p.k);
}

TestResult band_check(std::string id, double estimate, double exact, double band, std::size_t count) {
  TestResult r;
  r.test_id = std::move(id);
  r.statistic = std::fabs(estimate - exact);
  r.threshold_or_pvalue = band;
  r.n_effective = count;
  r.verdict = r.statistic < band ? TestVerdict::pass : TestVerdict::fail;
  r.details = {{"estimate", estimate}, {"exact", exact}};
  return r;
}

Section run_simulate(const RunConfig& config) {
  std::vector<TestResult> results;
  const std::size_t reps = config.replicates;

  std::uint64_t cell = 0;
  for (unsigned n = 1; n <= config.sim_max_n; ++n) {
    for (unsigned k = 1; k <= n; ++k, ++cell) {
      const OrderStatParams p{n, k};
      const auto direct = sample_orderstat_direct(SeededStream(config.seed, kEquivalenceStreams + 2 * cell), p, reps);
      const auto repr =
          sample_orderstat_representation(SeededStream(config.seed, kEquivalenceStreams + 2 * cell + 1), p, reps);
      auto r = ks_two_sample(direct, repr);
      r.test_id = label("equivalence", p);
      results.push_back(std::move(r));
      maybe_dump(config, direct, "direct_sort_n" + std::to_string(n) + "_k" + std::to_string(k));
      maybe_dump(config, repr, "sum_representation_n" + std::to_string(n) + "_k" + std::to_string(k));
    }
  }

  const OrderStatParams moment_cases[] = {{3, 3}, {5, 1}, {4, 2}};
  std::uint64_t base = kMomentStreams;
  for (const auto& p : moment_cases) {
    ChunkPlan plan{config.seed, base, config.moment_replicates, 1 << 16, config.threads};
    base += plan.chunks();
    const auto m = moments_chunked(plan, SamplerId::direct_sort, p);
    const double sigma = std::sqrt(orderstat_var(p).to_double());
    results.push_back(band_check(label("mean", p), m.mean(), orderstat_mean(p).to_double(),
                                 4.0 * sigma / std::sqrt(static_cast<double>(m.count())), m.count()));
  }

  const OrderStatParams spacing_cases[] = {{5, 3}, {10, 1}, {10, 10}};
  std::uint64_t spacing_stream = kSpacingStreams;
  for (const auto& p : spacing_cases) {
    const auto batch = sample_normalized_spacings(SeededStream(config.seed, spacing_stream++), p, reps);
    auto r = ks_one_sample(batch, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
    r.test_id = label("spacing", p);
    results.push_back(std::move(r));
    maybe_dump(config, batch, "spacing_n" + std::to_string(p.n) + "_k" + std::to_string(p.k));
  }

  {
    constexpr unsigned kZnSize = 1000;
    const auto batch = sample_zn(SeededStream(config.seed, kZnStreams), kZnSize, reps);
    auto r = ks_one_sample(batch, [](double x) { return zn_cdf(kZnSize, x); });
    r.test_id = "zn:n=1000";
    results.push_back(std::move(r));
    maybe_dump(config, batch, "zn_n1000");
  }

  struct RaceCase {
    OrderStatParams p;
    unsigned r;
    long s;
  };
  const RaceCase race_cases[] = {{{3, 2}, 1, 1}, {{1, 1}, 2, 1}};
  base = kRaceStreams;
  for (const auto& c : race_cases) {
    ChunkPlan plan{config.seed, base, config.moment_replicates, 1 << 16, config.threads};
    base += plan.chunks();
    const auto tally = estimate_race_chunked(plan, c.p, GammaParams{static_cast<double>(c.s), c.r});
    const double exact = race_probability_exact(c.p, c.r, Rational(c.s)).to_double();
    results.push_back(band_check(label("race", c.p) + ",r=" + std::to_string(c.r), tally.estimate(), exact,
                                 2.0 / std::sqrt(static_cast<double>(tally.trials)), tally.trials));
  }
  return emit_results(results, config.format);
}

Section emit_rows(const std::string& table, const std::vector<ConvergenceRow>& rows, bool ok, OutputFormat format) {
  Section section;
  section.ok = ok;
  switch (format) {
    case OutputFormat::json: section.text = rows_to_json_lines(table, rows); break;
    case OutputFormat::csv: section.text = "# " + table + "\n" + rows_to_csv(rows); break;
    case OutputFormat::pretty: {
      std::ostringstream out;
      out << table << (ok ? " (ok)" : " (FAILED)") << '\n';
      for (const auto& r : rows) {
        out << "  n=" << r.n << "  value=" << format_double(r.value) << "  abs_error=" << format_double(r.abs_error)
            << '\n';
      }
      section.text = out.str();
      break;
    }
  }
  return section;
}

bool strictly_decreasing_errors(const std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].n > rows[i - 1].n && !(rows[i].abs_error < rows[i - 1].abs_error)) return false;
  }
  return true;
}

Section run_converge(const RunConfig& config, const std::vector<std::string>& targets) {
  Section all;
  for (const auto& target : targets) {
    Section s;
    if (target == "gamma") {
      const auto rows = euler_gamma_table(config.n_list);
      bool ok = strictly_decreasing_errors(rows);
      for (const auto& r : rows) ok = ok && within_euler_envelope(r);
      s = emit_rows("gamma", rows, ok, config.format);
    } else if (target == "basel") {
      const auto rows = basel_table(config.n_list);
      bool ok = true;
      for (const auto& r : rows) ok = ok && within_basel_bracket(r);
      s = emit_rows("basel", rows, ok, config.format);
    } else if (target == "variance") {
      const auto rows = variance_convergence_check(config.n_list);
      const auto basel = basel_table(config.n_list);
      bool ok = true;
      for (std::size_t i = 0; i < rows.size(); ++i) ok = ok && rows[i].value == basel[i].value;
      s = emit_rows("variance", rows, ok, config.format);
    } else if (target == "gumbel") {
      const auto rows = gumbel_approx_error(config.n_list);
      bool ok = strictly_decreasing_errors(rows);
      for (const auto& r : rows) ok = ok && (r.n < 10 || r.value < 0.3 / r.n);
      s = emit_rows("gumbel", rows, ok, config.format);
    } else if (target == "tail") {
      std::vector<double> xs;
      for (int i = 1; i <= 1000; ++i) xs.push_back(0.01 * i);
      const auto results = tail_bound_audit(log_spaced_integers(1, 10000, 50), xs);
      s = emit_results(results, config.format);
      if (config.format == OutputFormat::csv) s.text = "# tail\n" + s.text;
    }
    all.text += s.text;
    all.ok = all.ok && s.ok;
  }
  return all;
}

Section run_race(const RunConfig& config) {
  const OrderStatParams p{config.race_n, config.race_k};
  const Rational exact = race_probability_exact(p, config.race_r, config.race_s);
  ChunkPlan plan{config.seed, kRaceStreams, config.replicates, 1 << 16, config.threads};
  const auto tally = estimate_race_chunked(plan, p, GammaParams{config.race_s.to_double(), config.race_r});
  const double band = 2.0 / std::sqrt(static_cast<double>(tally.trials));
  const double estimate = tally.estimate();
  Section s;
  s.ok = std::fabs(estimate - exact.to_double()) <= band;
  switch (config.format) {
    case OutputFormat::json: {
      nlohmann::ordered_json j;
      j["n"] = p.n;
      j["k"] = p.k;
      j["r"] = config.race_r;
      j["s"] = config.race_s.to_string();
      j["exact"] = exact.to_string();
      j["exact_value"] = exact.to_double();
      j["estimate"] = estimate;
      j["successes"] = tally.successes;
      j["replicates"] = tally.trials;
      j["seed"] = config.seed;
      j["band"] = band;
      j["verdict"] = s.ok ? "pass" : "fail";
      s.text = j.dump() + '\n';
      break;
    }
    case OutputFormat::csv:
      s.text = "n,k,r,s,exact,estimate,replicates,band,verdict\n" + std::to_string(p.n) + ',' + std::to_string(p.k) +
               ',' + std::to_string(config.race_r) + ',' + config.race_s.to_string() + ',' + exact.to_string() + ',' +
               format_double(estimate) + ',' + std::to_string(tally.trials) + ',' + format_double(band) + ',' +
               (s.ok ? "pass" : "fail") + '\n';
      break;
    case OutputFormat::pretty:
      s.text = "P(X_" + std::to_string(config.race_r) + " > T_(" + std::to_string(p.k) + ")), n=" +
               std::to_string(p.n) + ", s=" + config.race_s.to_string() + "\n  exact     " + exact.to_string() +
               " = " + format_double(exact.to_double()) + "\n  estimate  " + format_double(estimate) + "  (" +
               std::to_string(tally.trials) + " replicates, band " + format_double(band) + ")\n";
      break;
  }
  return s;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.help) {
    out << *config.help;
    return 0;
  }
  Section result;
  try {
    switch (config.command) {
      case Command::verify:
        result = run_verify(config, config.max_n, config.max_r, config.s_grid, config.max_n_maximum,
                            config.max_integer_s);
        break;
      case Command::simulate: result = run_simulate(config); break;
      case Command::converge: result = run_converge(config, config.targets); break;
      case Command::race: result = run_race(config); break;
      case Command::all: {
        const SuiteGrid grid = acceptance_grid();
        Section parts[] = {
            run_verify(config, grid.max_n, grid.max_r, grid.s_grid, grid.max_n_maximum, grid.max_integer_s),
            run_simulate(config), run_converge(config, kAllTargets)};
        for (auto& p : parts) {
          result.text += p.text;
          result.ok = result.ok && p.ok;
        }
        break;
      }
    }
  } catch (const ParameterError& e) {
    err << "expostat: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "expostat: " << e.what() << '\n';
    return 1;
  }

  if (config.output_path) {
    std::ofstream file(*config.output_path, std::ios::binary);
    if (!file) {
      err << "expostat: cannot open " << *config.output_path << '\n';
      return 2;
    }
    file << result.text;
  } else {
    out << result.text;
  }
  if (!result.ok) err << "expostat: at least one check failed\n";
  return result.ok ? 0 : 1;
}

int main_entry(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(parse_args(args), std::cout, std::cerr);
  } catch (const UsageError& e) {
    std::cerr << "expostat: usage error: " << e.what() << "\n(run 'expostat --help' for usage)\n";
    return 2;
  }
}

}  // namespace expostat::cli
