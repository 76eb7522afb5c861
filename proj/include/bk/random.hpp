#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

namespace bk {

//! Seeded xoshiro256** generator. State is initialised from the seed with splitmix64.
//! Single owner: concurrent simulations take substreams, never a shared stream.
class RandomStream {
public:
  static constexpr std::string_view kAlgorithm = "xoshiro256**/splitmix64";

  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  //! Uniform on [0, 1) with 53 random bits.
  double uniform();
  //! Uniform on (0, 1).
  double uniform_pos();
  //! Standard normal (Marsaglia polar method).
  double normal();

  //! Child stream determined by (seed, index). Distinct indices give distinct child seeds.
  RandomStream substream(std::uint64_t index) const;

private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

inline constexpr std::size_t kSimulationBlocks = 64;

//! Split [0, reps) into a fixed number of blocks, each with its own substream derived from
//! one draw of `stream`. Blocks run on worker threads; results come back in block order, so
//! the reduction is identical for any thread count.
//! body(RandomStream&, std::size_t begin, std::size_t end) -> R
template <class R, class Body>
std::vector<R> simulate_blocks(std::size_t reps, RandomStream& stream, Body&& body) {
  const RandomStream root(stream.next_u64());
  const std::size_t blocks = std::max<std::size_t>(1, std::min(reps, kSimulationBlocks));
  std::vector<R> out(blocks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      try {
        RandomStream local = root.substream(b);
        const std::size_t begin = reps * b / blocks;
        const std::size_t end = reps * (b + 1) / blocks;
        out[b] = body(local, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(blocks, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

//! Mean and standard error accumulated block-wise.
struct MonteCarloSum {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void merge(const MonteCarloSum& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double variance() const;
  double stderr_of_mean() const;
};

} // namespace bk
