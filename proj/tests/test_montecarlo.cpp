#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "expostat/errors.hpp"
#include "expostat/montecarlo.hpp"
#include "expostat/orderstat_dist.hpp"
#include "expostat/stats_convergence.hpp"
#include "generators.hpp"

using namespace expostat;

namespace {

double unit_exponential_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

}  // namespace

// Known answers produced by numpy.random.Philox with the same key. numpy
// increments the counter before each block, hence its counter = 2^64 - 1.
TEST(Philox, MatchesNumpyKnownAnswers) {
  EXPECT_EQ(philox4x64_10({0, 0, 0, 0}, {42, 7}),
            (std::array<std::uint64_t, 4>{0x2fd1bc0d2c8697bbULL, 0x8ee17f67a549bba6ULL, 0x1bdce1f847e7df47ULL,
                                          0xe123b6bbe4e89f03ULL}));
  EXPECT_EQ(philox4x64_10({1, 0, 0, 0}, {0, 0}),
            (std::array<std::uint64_t, 4>{0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL,
                                          0x907d7a052fd5b4dcULL}));
  EXPECT_EQ(philox4x64_10({2, 0, 0, 0}, {0, 0}),
            (std::array<std::uint64_t, 4>{0x809bf322883987c3ULL, 0x471128b9e807f7ddULL, 0xf250ba0dbec065b7ULL,
                                          0xfc6ed66767a457bcULL}));
}

TEST(SeededStream, CountsBlocksFromZero) {
  SeededStream stream(42, 7);
  EXPECT_EQ(stream.next_u64(), 0x2fd1bc0d2c8697bbULL);
  EXPECT_EQ(stream.next_u64(), 0x8ee17f67a549bba6ULL);
  EXPECT_EQ(stream.next_u64(), 0x1bdce1f847e7df47ULL);
  EXPECT_EQ(stream.next_u64(), 0xe123b6bbe4e89f03ULL);
  EXPECT_EQ(stream.next_u64(), philox4x64_10({1, 0, 0, 0}, {42, 7})[0]);
}

TEST(SeededStream, DistinctKeysGiveDistinctSequences) {
  SeededStream a(1, 0), b(1, 1), c(2, 0);
  const auto x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
  EXPECT_NE(x, y);
  EXPECT_NE(x, z);
  EXPECT_NE(y, z);
}

TEST(SeededStream, UniformRange) {
  SeededStream stream(9, 9);
  for (int i = 0; i < 100000; ++i) {
    const double u = stream.next_uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SampleExponential, GoldenFirstValues) {
  // Frozen from the first run; numpy reproduces them via -log1p(-U).
  const auto batch = sample_exponential(SeededStream(20170601, 0), 3);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(batch.values[0]), 0x4000d28ac795d123ULL);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(batch.values[1]), 0x3fe3bd15a2de1fe0ULL);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(batch.values[2]), 0x3fea134d6efe7b12ULL);
  EXPECT_EQ(batch.sampler, SamplerId::direct_sort);
  EXPECT_EQ(batch.n, 1u);
  EXPECT_EQ(batch.k, 1u);
  EXPECT_EQ(batch.seed_info.seed, 20170601u);
}

TEST(SampleExponential, MeanOfAMillion) {
  const auto m = summarize(sample_exponential(SeededStream(3, 0), 1000000));
  EXPECT_NEAR(m.mean(), 1.0, 0.004);
  EXPECT_GE(m.min(), 0.0);
}

TEST(Samplers, RejectBadArguments) {
  const SeededStream s(1, 0);
  EXPECT_THROW(sample_exponential(s, 0), ParameterError);
  EXPECT_THROW(sample_orderstat_direct(s, {2, 3}, 10), ParameterError);
  EXPECT_THROW(sample_orderstat_representation(s, {0, 0}, 10), ParameterError);
  EXPECT_THROW(sample_normalized_spacings(s, {3, 4}, 10), ParameterError);
  EXPECT_THROW(sample_zn(s, 0, 10), ParameterError);
  EXPECT_THROW(sample_race_indicators(s, {3, 2}, {0.0, 1}, 10), ParameterError);
  EXPECT_THROW(sample_race_indicators(s, {3, 2}, {1.0, 0}, 10), ParameterError);
}

TEST(Samplers, BatchesAreLabelledAndInRange) {
  const SeededStream s(5, 1);
  const auto direct = sample_orderstat_direct(s, {4, 3}, 1000);
  const auto repr = sample_orderstat_representation(s, {4, 3}, 1000);
  const auto spacing = sample_normalized_spacings(s, {4, 3}, 1000);
  const auto zn = sample_zn(s, 50, 1000);
  const auto race = sample_race_indicators(s, {4, 3}, {1.0, 2}, 1000);
  EXPECT_EQ(direct.sampler, SamplerId::direct_sort);
  EXPECT_EQ(repr.sampler, SamplerId::sum_representation);
  EXPECT_EQ(spacing.sampler, SamplerId::spacing);
  EXPECT_EQ(zn.sampler, SamplerId::zn);
  EXPECT_EQ(race.sampler, SamplerId::race_indicator);
  EXPECT_EQ(direct.k, 3u);
  EXPECT_FALSE(zn.k.has_value());
  for (const auto* b : {&direct, &repr, &spacing}) {
    EXPECT_EQ(b->values.size(), 1000u);
    for (double v : b->values) ASSERT_TRUE(std::isfinite(v) && v >= 0.0);
  }
  for (double v : zn.values) ASSERT_GE(v, -std::log(50.0));
  for (double v : race.values) ASSERT_TRUE(v == 0.0 || v == 1.0);
}

TEST(Samplers, Deterministic) {
  const SeededStream s(77, 3);
  EXPECT_EQ(sample_orderstat_direct(s, {6, 2}, 5000).values, sample_orderstat_direct(s, {6, 2}, 5000).values);
  EXPECT_EQ(sample_orderstat_representation(s, {6, 2}, 5000).values,
            sample_orderstat_representation(s, {6, 2}, 5000).values);
  EXPECT_EQ(sample_zn(s, 10, 5000).values, sample_zn(s, 10, 5000).values);
  EXPECT_EQ(race_tally(s, {3, 2}, {1.0, 1}, 5000), race_tally(s, {3, 2}, {1.0, 1}, 5000));
}

TEST(Samplers, TrivialCasesAreExponential) {
  const SeededStream s(8, 8);
  const auto e = sample_exponential(s, 2000).values;
  EXPECT_EQ(sample_orderstat_direct(s, {1, 1}, 2000).values, e);
  EXPECT_EQ(sample_orderstat_representation(s, {1, 1}, 2000).values, e);
  EXPECT_EQ(sample_normalized_spacings(s, {1, 1}, 2000).values, e);
  EXPECT_EQ(sample_zn(s, 1, 2000).values, e);
}

TEST(Samplers, MaximumMeanMatchesExact) {
  const auto m = summarize(sample_orderstat_direct(SeededStream(11, 0), {3, 3}, 1000000));
  const double sigma = std::sqrt(49.0 / 36.0);
  EXPECT_NEAR(m.mean(), 11.0 / 6.0, 4 * sigma / 1000.0);
  const auto m5 = summarize(sample_orderstat_direct(SeededStream(11, 1), {5, 1}, 1000000));
  EXPECT_NEAR(m5.mean(), 0.2, 4 * 0.2 / 1000.0);
}

TEST(Samplers, RepresentationVarianceMatchesExact) {
  const auto m = summarize(sample_orderstat_representation(SeededStream(12, 0), {4, 4}, 1000000));
  EXPECT_NEAR(m.variance() / (205.0 / 144.0), 1.0, 0.05);
}

TEST(Samplers, RepresentationMatchesDirectInLaw) {
  const auto a = sample_orderstat_direct(SeededStream(13, 0), {3, 2}, 100000);
  const auto b = sample_orderstat_representation(SeededStream(13, 1), {3, 2}, 100000);
  EXPECT_TRUE(ks_two_sample(a, b).passed());
}

TEST(Samplers, SpacingsAreUnitExponential) {
  const auto batch = sample_normalized_spacings(SeededStream(14, 0), {5, 3}, 100000);
  EXPECT_TRUE(ks_one_sample(batch, unit_exponential_cdf).passed());
}

TEST(Samplers, ZnMatchesFiniteCdfAndMean) {
  const auto batch = sample_zn(SeededStream(15, 0), 1000, 100000);
  EXPECT_TRUE(ks_one_sample(batch, [](double x) { return zn_cdf(1000, x); }).passed());
  const double exact_mean = sum_reciprocal_powers(1, 1000, 1).to_double() - std::log(1000.0);
  const double band = 4 * (M_PI / std::sqrt(6.0)) / std::sqrt(1e5) + 0.001;
  EXPECT_NEAR(summarize(batch).mean(), exact_mean, band);
}

TEST(Race, EstimatesMatchExact) {
  EXPECT_NEAR(estimate_race(SeededStream(16, 0), {3, 2}, {1.0, 1}, 1000000), 0.5, 0.002);
  EXPECT_NEAR(estimate_race(SeededStream(16, 1), {1, 1}, {1.0, 2}, 1000000), 0.75, 0.002);
}

TEST(Race, ApproachesOneAsShapeGrows) {
  double prev_exact = 0.0;
  double prev_estimate = 0.0;
  for (unsigned r : {1u, 2u, 4u, 8u, 16u}) {
    const double exact = race_probability_exact({3, 2}, r, Rational(1)).to_double();
    const double estimate = estimate_race(SeededStream(17, r), {3, 2}, {1.0, r}, 100000);
    EXPECT_NEAR(estimate, exact, 4 * std::sqrt(exact * (1 - exact) / 1e5) + 1e-5) << r;
    EXPECT_GT(exact, prev_exact);
    EXPECT_GE(estimate, prev_estimate);
    prev_exact = exact;
    prev_estimate = estimate;
  }
  EXPECT_GT(prev_estimate, 0.999);
}

TEST(ExactSum, OrderIndependent) {
  expostat::testing::Gen gen(51);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(std::ldexp(gen.real(-1.0, 1.0), static_cast<int>(gen.integer(-60, 60))));
  xs.push_back(1e300);
  xs.push_back(-1e300);
  xs.push_back(5e-324);
  ExactSum forward, backward;
  for (double x : xs) forward.add(x);
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) backward.add(*it);
  EXPECT_EQ(forward, backward);
  EXPECT_EQ(forward.value(), backward.value());

  // Splitting into parts and merging in any order gives the same sum.
  ExactSum parts[3];
  for (std::size_t i = 0; i < xs.size(); ++i) parts[i % 3].add(xs[i]);
  ExactSum merged;
  merged.merge(parts[2]);
  merged.merge(parts[0]);
  merged.merge(parts[1]);
  EXPECT_EQ(merged, forward);
  EXPECT_THROW(merged.add(std::nan("")), std::domain_error);
}

TEST(ExactSum, IsExact) {
  ExactSum sum;
  sum.add(1.0);
  sum.add(1e-30);
  sum.add(-1.0);
  EXPECT_EQ(sum.value(), 1e-30);
  EXPECT_EQ(sum.exact(), mpq_class(1e-30));
}

TEST(MomentSummary, MatchesTwoPass) {
  const auto batch = sample_orderstat_direct(SeededStream(18, 0), {5, 2}, 10000);
  const auto m = summarize(batch);
  double mean = 0.0;
  for (double v : batch.values) mean += v;
  mean /= batch.values.size();
  double ss = 0.0;
  for (double v : batch.values) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(m.mean(), mean, 1e-14);
  EXPECT_NEAR(m.variance(), ss / (batch.values.size() - 1), 1e-13);
  EXPECT_EQ(m.count(), 10000u);
  EXPECT_EQ(m.min(), *std::min_element(batch.values.begin(), batch.values.end()));
  EXPECT_EQ(m.max(), *std::max_element(batch.values.begin(), batch.values.end()));
}

TEST(ChunkedRuns, IndependentOfThreadCount) {
  for (std::size_t count : {1u, 1000u, 70000u, 300001u}) {
    ChunkPlan plan{99, 10, count, 4096, 1};
    const auto base_moments = moments_chunked(plan, SamplerId::sum_representation, {6, 4});
    const auto base_race = estimate_race_chunked(plan, {4, 2}, {0.5, 3});
    for (unsigned threads : {2u, 3u, 8u, 0u}) {
      plan.threads = threads;
      EXPECT_EQ(moments_chunked(plan, SamplerId::sum_representation, {6, 4}), base_moments) << threads;
      EXPECT_EQ(estimate_race_chunked(plan, {4, 2}, {0.5, 3}), base_race) << threads;
    }
    EXPECT_EQ(base_moments.count(), count);
    EXPECT_EQ(base_race.trials, count);
  }
}

TEST(ChunkedRuns, MergeMatchesSequentialChunks) {
  const ChunkPlan plan{3, 0, 10000, 3000, 4};
  MomentSummary manual;
  for (std::size_t c = 0; c < plan.chunks(); ++c) {
    const auto batch = sample_orderstat_direct(SeededStream(3, c), {3, 1}, plan.chunk_count(c));
    for (double v : batch.values) manual.add(v);
  }
  EXPECT_EQ(moments_chunked(plan, SamplerId::direct_sort, {3, 1}), manual);
}

TEST(BatchDump, RoundTrip) {
  for (const auto& batch : {sample_orderstat_direct(SeededStream(1, 2), {7, 3}, 257),
                            sample_zn(SeededStream(4, 5), 30, 10)}) {
    std::stringstream buf;
    write_batch(buf, batch);
    EXPECT_EQ(buf.str().size(), 32 + 8 * batch.values.size());
    EXPECT_EQ(buf.str().substr(0, 4), "ESVB");
    const auto back = read_batch(buf);
    EXPECT_EQ(back.values, batch.values);
    EXPECT_EQ(back.n, batch.n);
    EXPECT_EQ(back.k, batch.k);
    EXPECT_EQ(back.sampler, batch.sampler);
    EXPECT_EQ(back.seed_info.seed, batch.seed_info.seed);
    EXPECT_EQ(back.seed_info.stream_id, batch.seed_info.stream_id);
  }
}

TEST(BatchDump, RejectsCorruptInput) {
  std::stringstream bad_magic("XXXX0000000000000000000000000000");
  EXPECT_THROW(read_batch(bad_magic), std::runtime_error);
  std::stringstream buf;
  write_batch(buf, sample_exponential(SeededStream(1, 1), 4));
  std::string truncated = buf.str();
  truncated.pop_back();
  std::stringstream short_in(truncated);
  EXPECT_THROW(read_batch(short_in), std::runtime_error);
}
