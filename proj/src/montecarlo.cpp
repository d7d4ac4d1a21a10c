#include "expostat/montecarlo.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "expostat/errors.hpp"

namespace expostat {

// ------------------------------------------------------------------ Philox

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;  // golden ratio
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;  // sqrt(3) - 1

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& lo, std::uint64_t& hi) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  lo = static_cast<std::uint64_t>(product);
  hi = static_cast<std::uint64_t>(product >> 64);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> ctr, std::array<std::uint64_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint64_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t SeededStream::next_u64() {
  if (pos_ == 4) {
    buffer_ = philox4x64_10({block_, 0, 0, 0}, {seed_, stream_id_});
    ++block_;
    pos_ = 0;
  }
  return buffer_[pos_++];
}

double SeededStream::next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double SeededStream::next_exponential() { return -std::log1p(-next_uniform()); }

std::string_view sampler_name(SamplerId id) {
  switch (id) {
    case SamplerId::direct_sort: return "direct_sort";
    case SamplerId::sum_representation: return "sum_representation";
    case SamplerId::spacing: return "spacing";
    case SamplerId::zn: return "zn";
    case SamplerId::race_indicator: return "race_indicator";
  }
  return "unknown";
}

// --------------------------------------------------------------- summaries

namespace {
constexpr unsigned long kFixedPointShift = 1130;  // covers the smallest subnormal
}

void ExactSum::add(double x) {
  if (x == 0.0) return;
  if (!std::isfinite(x)) throw std::domain_error("ExactSum::add: non-finite value");
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa · 2^exponent
  const auto integer = static_cast<long>(std::ldexp(mantissa, 53));
  mpz_set_si(scratch_.get_mpz_t(), integer);
  mpz_mul_2exp(scratch_.get_mpz_t(), scratch_.get_mpz_t(),
               static_cast<mp_bitcnt_t>(exponent - 53 + static_cast<long>(kFixedPointShift)));
  acc_ += scratch_;
}

mpq_class ExactSum::exact() const {
  mpz_class den(1);
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), kFixedPointShift);
  mpq_class q(acc_, den);
  q.canonicalize();
  return q;
}

double ExactSum::value() const { return exact().get_d(); }

void MomentSummary::add(double x) {
  min_ = count_ == 0 ? x : std::min(min_, x);
  max_ = count_ == 0 ? x : std::max(max_, x);
  ++count_;
  sum_.add(x);
  sum_sq_.add(x * x);
}

void MomentSummary::merge(const MomentSummary& other) {
  if (other.count_ == 0) return;
  min_ = count_ == 0 ? other.min_ : std::min(min_, other.min_);
  max_ = count_ == 0 ? other.max_ : std::max(max_, other.max_);
  count_ += other.count_;
  sum_.merge(other.sum_);
  sum_sq_.merge(other.sum_sq_);
}

double MomentSummary::mean() const {
  if (count_ == 0) return 0.0;
  mpq_class m = sum_.exact() / mpq_class(mpz_class(std::to_string(count_)));
  return m.get_d();
}

double MomentSummary::variance() const {
  if (count_ < 2) return 0.0;
  const mpq_class n(mpz_class(std::to_string(count_)));
  const mpq_class s1 = sum_.exact();
  const mpq_class s2 = sum_sq_.exact();
  mpq_class v = (n * s2 - s1 * s1) / (n * (n - 1));
  return v.get_d();
}

MomentSummary summarize(const SampleBatch& batch) {
  MomentSummary m;
  for (double v : batch.values) m.add(v);
  return m;
}

// ---------------------------------------------------------------- samplers

namespace {

void require_count(std::size_t count) {
  if (count == 0) throw ParameterError("sample count must be >= 1");
}

SampleBatch empty_batch(const SeededStream& stream, SamplerId sampler, unsigned n, std::optional<unsigned> k,
                        std::size_t count) {
  SampleBatch batch;
  batch.values.reserve(count);
  batch.n = n;
  batch.k = k;
  batch.sampler = sampler;
  batch.seed_info = {stream.seed(), stream.stream_id()};
  return batch;
}

void draw_sorted(SeededStream& stream, std::vector<double>& scratch) {
  for (auto& v : scratch) v = stream.next_exponential();
  std::sort(scratch.begin(), scratch.end());
  assert(std::is_sorted(scratch.begin(), scratch.end()));
}

double draw_gamma(SeededStream& stream, GammaParams g) {
  double total = 0.0;
  for (unsigned i = 0; i < g.r; ++i) total += stream.next_exponential();
  return total / g.s;
}

}  // namespace

SampleBatch sample_exponential(SeededStream stream, std::size_t count) {
  require_count(count);
  SampleBatch batch = empty_batch(stream, SamplerId::direct_sort, 1, 1u, count);
  for (std::size_t i = 0; i < count; ++i) batch.values.push_back(stream.next_exponential());
  return batch;
}

SampleBatch sample_orderstat_direct(SeededStream stream, OrderStatParams p, std::size_t count) {
  p.validate();
  require_count(count);
  SampleBatch batch = empty_batch(stream, SamplerId::direct_sort, p.n, p.k, count);
  std::vector<double> scratch(p.n);
  for (std::size_t i = 0; i < count; ++i) {
    draw_sorted(stream, scratch);
    batch.values.push_back(scratch[p.k - 1]);
  }
  return batch;
}

SampleBatch sample_orderstat_representation(SeededStream stream, OrderStatParams p, std::size_t count) {
  p.validate();
  require_count(count);
  SampleBatch batch = empty_batch(stream, SamplerId::sum_representation, p.n, p.k, count);
  for (std::size_t i = 0; i < count; ++i) {
    double total = 0.0;
    for (unsigned j = p.n - p.k + 1; j <= p.n; ++j) total += stream.next_exponential() / j;
    batch.values.push_back(total);
  }
  return batch;
}

SampleBatch sample_normalized_spacings(SeededStream stream, OrderStatParams p, std::size_t count) {
  p.validate();
  require_count(count);
  SampleBatch batch = empty_batch(stream, SamplerId::spacing, p.n, p.k, count);
  std::vector<double> scratch(p.n);
  const double weight = p.n - p.k + 1;
  for (std::size_t i = 0; i < count; ++i) {
    draw_sorted(stream, scratch);
    const double previous = p.k >= 2 ? scratch[p.k - 2] : 0.0;
    batch.values.push_back(weight * (scratch[p.k - 1] - previous));
  }
  return batch;
}

SampleBatch sample_zn(SeededStream stream, unsigned n, std::size_t count) {
  if (n == 0) throw ParameterError("sample_zn requires n >= 1");
  require_count(count);
  SampleBatch batch = empty_batch(stream, SamplerId::zn, n, std::nullopt, count);
  const double shift = std::log(static_cast<double>(n));
  for (std::size_t i = 0; i < count; ++i) {
    // -log1p(-u) is increasing, so the largest exponential comes from the largest uniform.
    double largest = 0.0;
    for (unsigned j = 0; j < n; ++j) largest = std::max(largest, stream.next_uniform());
    batch.values.push_back(-std::log1p(-largest) - shift);
  }
  return batch;
}

SampleBatch sample_race_indicators(SeededStream stream, OrderStatParams p, GammaParams g, std::size_t count) {
  p.validate();
  g.validate();
  require_count(count);
  SampleBatch batch = empty_batch(stream, SamplerId::race_indicator, p.n, p.k, count);
  std::vector<double> scratch(p.n);
  for (std::size_t i = 0; i < count; ++i) {
    draw_sorted(stream, scratch);
    const double order_stat = scratch[p.k - 1];
    batch.values.push_back(draw_gamma(stream, g) > order_stat ? 1.0 : 0.0);
  }
  return batch;
}

RaceTally race_tally(SeededStream stream, OrderStatParams p, GammaParams g, std::size_t count) {
  const SampleBatch batch = sample_race_indicators(stream, p, g, count);
  RaceTally tally;
  tally.trials = batch.values.size();
  for (double v : batch.values) tally.successes += v > 0.5 ? 1 : 0;
  return tally;
}

double estimate_race(SeededStream stream, OrderStatParams p, GammaParams g, std::size_t count) {
  return race_tally(stream, p, g, count).estimate();
}

RaceTally estimate_race_chunked(const ChunkPlan& plan, OrderStatParams p, GammaParams g) {
  p.validate();
  g.validate();
  require_count(plan.count);
  return run_chunked<RaceTally>(plan, [&](SeededStream stream, std::size_t n) { return race_tally(stream, p, g, n); });
}

MomentSummary moments_chunked(const ChunkPlan& plan, SamplerId sampler, OrderStatParams p) {
  p.validate();
  require_count(plan.count);
  return run_chunked<MomentSummary>(plan, [&](SeededStream stream, std::size_t n) {
    switch (sampler) {
      case SamplerId::direct_sort: return summarize(sample_orderstat_direct(stream, p, n));
      case SamplerId::sum_representation: return summarize(sample_orderstat_representation(stream, p, n));
      case SamplerId::spacing: return summarize(sample_normalized_spacings(stream, p, n));
      case SamplerId::zn: return summarize(sample_zn(stream, p.n, n));
      case SamplerId::race_indicator: break;
    }
    throw ParameterError("moments_chunked: race indicators need gamma parameters; use estimate_race_chunked");
  });
}

// ------------------------------------------------------------- binary dump

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::istream& in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("batch dump truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

void write_batch(std::ostream& out, const SampleBatch& batch) {
  if (batch.n > 0xFFFF || batch.k.value_or(0) > 0xFFFF) throw ParameterError("batch dump: n and k must fit in 16 bits");
  if (batch.values.size() > 0xFFFFFFFFULL) throw ParameterError("batch dump: count must fit in 32 bits");
  out.write("ESVB", 4);
  put_le<std::uint8_t>(out, kBatchFormatVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(batch.sampler));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(batch.n));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(batch.k.value_or(0)));
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(batch.values.size()));
  put_le<std::uint64_t>(out, batch.seed_info.seed);
  put_le<std::uint64_t>(out, batch.seed_info.stream_id);
  for (double v : batch.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

SampleBatch read_batch(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "ESVB") throw std::runtime_error("batch dump: bad magic");
  const auto version = get_le<std::uint8_t>(in);
  if (version != kBatchFormatVersion) throw std::runtime_error("batch dump: unsupported version");
  const auto sampler = get_le<std::uint8_t>(in);
  if (sampler > static_cast<std::uint8_t>(SamplerId::race_indicator)) throw std::runtime_error("batch dump: bad sampler id");
  SampleBatch batch;
  batch.sampler = static_cast<SamplerId>(sampler);
  batch.n = get_le<std::uint16_t>(in);
  const auto k = get_le<std::uint16_t>(in);
  if (k != 0) batch.k = k;
  (void)get_le<std::uint16_t>(in);
  const auto count = get_le<std::uint32_t>(in);
  batch.seed_info.seed = get_le<std::uint64_t>(in);
  batch.seed_info.stream_id = get_le<std::uint64_t>(in);
  batch.values.resize(count);
  for (auto& v : batch.values) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  return batch;
}

}  // namespace expostat
