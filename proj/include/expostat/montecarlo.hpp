#pragma once

// Seeded samplers for exponential order statistics.
//
// Random numbers come from Philox4x64-10 (Salmon et al., Random123), keyed by
// (seed, stream_id) with a 64-bit block counter starting at zero. Given the
// same key the output is bit-identical on every platform; numpy's
// `Philox(key=[seed, stream_id], counter=[2**64-1]*4)` reproduces it.

#include <algorithm>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include <gmpxx.h>

#include "expostat/laplace_forms.hpp"
#include "expostat/orderstat_dist.hpp"

namespace expostat {

/// One Philox4x64-10 block: 10 rounds over `counter` under `key`.
std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> counter, std::array<std::uint64_t, 2> key);

class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// 53-bit uniform on [0, 1).
  double next_uniform();
  /// Unit exponential by inversion, -log(1 - U).
  double next_exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  unsigned pos_ = 4;
};

/// Stored in the binary dump header; the numeric values are part of the format.
enum class SamplerId : std::uint8_t {
  direct_sort = 0,
  sum_representation = 1,
  spacing = 2,
  zn = 3,
  race_indicator = 4,
};

std::string_view sampler_name(SamplerId id);

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

struct SampleBatch {
  std::vector<double> values;
  unsigned n = 1;
  std::optional<unsigned> k;
  SamplerId sampler = SamplerId::direct_sort;
  StreamKey seed_info;
};

/// Exact sum of doubles in a 2^-1130 fixed-point big integer, so merging
/// partial sums in any order gives bit-identical results.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other) { acc_ += other.acc_; }
  mpq_class exact() const;
  double value() const;
  friend bool operator==(const ExactSum& a, const ExactSum& b) { return a.acc_ == b.acc_; }

 private:
  mpz_class acc_{0};
  mpz_class scratch_{0};
};

/// Count, sum and sum of squares with exact (order-independent) merging.
class MomentSummary {
 public:
  void add(double x);
  void merge(const MomentSummary& other);

  std::uint64_t count() const { return count_; }
  double mean() const;
  /// Unbiased sample variance; zero for count < 2.
  double variance() const;
  double min() const { return min_; }
  double max() const { return max_; }

  friend bool operator==(const MomentSummary& a, const MomentSummary& b) {
    return a.count_ == b.count_ && a.sum_ == b.sum_ && a.sum_sq_ == b.sum_sq_;
  }

 private:
  std::uint64_t count_ = 0;
  ExactSum sum_;
  ExactSum sum_sq_;
  double min_ = 0.0;
  double max_ = 0.0;
};

MomentSummary summarize(const SampleBatch& batch);

// All samplers take the stream by value: the output depends only on
// (stream key, parameters, count). Each throws ParameterError for count = 0
// or invalid parameters.

/// Unit exponentials. Labelled direct_sort with n = k = 1, the same law.
SampleBatch sample_exponential(SeededStream stream, std::size_t count);

/// k-th smallest of n sorted unit exponentials, per replicate.
SampleBatch sample_orderstat_direct(SeededStream stream, OrderStatParams p, std::size_t count);

/// sum_{j=n-k+1}^{n} E_j / j with E_j unit exponential, per replicate.
SampleBatch sample_orderstat_representation(SeededStream stream, OrderStatParams p, std::size_t count);

/// (n-k+1)(T_(k) - T_(k-1)) from sorted samples of size n, T_(0) = 0.
SampleBatch sample_normalized_spacings(SeededStream stream, OrderStatParams p, std::size_t count);

/// max of n unit exponentials minus ln n.
SampleBatch sample_zn(SeededStream stream, unsigned n, std::size_t count);

/// 1 when an independent Gamma(rate s, shape r) draw, built as a sum of r
/// exponentials, exceeds an independent direct-sort draw of T_(k); else 0.
SampleBatch sample_race_indicators(SeededStream stream, OrderStatParams p, GammaParams g, std::size_t count);

struct RaceTally {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  void merge(const RaceTally& other) {
    successes += other.successes;
    trials += other.trials;
  }
  double estimate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
  friend bool operator==(const RaceTally&, const RaceTally&) = default;
};

RaceTally race_tally(SeededStream stream, OrderStatParams p, GammaParams g, std::size_t count);

/// Monte Carlo estimate of P(X_r > T_(k)).
double estimate_race(SeededStream stream, OrderStatParams p, GammaParams g, std::size_t count);

/// Splits `count` replicates into chunks of `chunk_size`; chunk c draws from
/// stream (seed, first_stream_id + c).
struct ChunkPlan {
  std::uint64_t seed = 0;
  std::uint64_t first_stream_id = 0;
  std::size_t count = 0;
  std::size_t chunk_size = 1 << 16;
  unsigned threads = 0;  // 0: hardware concurrency

  std::size_t chunks() const { return chunk_size ? (count + chunk_size - 1) / chunk_size : 0; }
  std::size_t chunk_count(std::size_t c) const { return std::min(chunk_size, count - c * chunk_size); }
};

/// Evaluates `per_chunk(stream, replicates)` for every chunk, possibly on
/// several threads, and merges the summaries in chunk order.
template <typename Summary, typename Fn>
Summary run_chunked(const ChunkPlan& plan, Fn&& per_chunk) {
  const std::size_t chunks = plan.chunks();
  std::vector<Summary> partial(chunks);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t c = first; c < chunks; c += stride) {
      partial[c] = per_chunk(SeededStream(plan.seed, plan.first_stream_id + c), plan.chunk_count(c));
    }
  };
  unsigned threads = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  Summary total{};
  for (const auto& s : partial) total.merge(s);
  return total;
}

RaceTally estimate_race_chunked(const ChunkPlan& plan, OrderStatParams p, GammaParams g);

/// Moments of a sampler run over `plan`.
MomentSummary moments_chunked(const ChunkPlan& plan, SamplerId sampler, OrderStatParams p);

// Binary dump: a 32-byte little-endian header followed by `count` doubles.
//   0  "ESVB"          4  u8 version (1)   5  u8 sampler_id
//   6  u16 n           8  u16 k (0: none) 10  u16 reserved (0)
//  12  u32 count      16  u64 seed        24  u64 stream_id
inline constexpr std::uint8_t kBatchFormatVersion = 1;

void write_batch(std::ostream& out, const SampleBatch& batch);
SampleBatch read_batch(std::istream& in);

}  // namespace expostat
