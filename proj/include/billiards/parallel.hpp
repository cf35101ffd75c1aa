#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace billiards {

/// Worker count from BILLIARDS_WORKERS, else the hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("BILLIARDS_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Samples per work block. Fixed so that block boundaries never depend on
/// the worker count.
inline constexpr std::uint64_t kBlockSize = 4096;

/// Fork-join map-reduce over [0, count) in fixed blocks. `block(begin, end)`
/// returns a partial result; partials are folded with `merge` in block order,
/// which makes the output independent of `workers`.
template <class Result, class BlockFn, class MergeFn>
Result parallel_blocks(std::uint64_t count, int workers, Result init, BlockFn block, MergeFn merge) {
  const std::uint64_t nblocks = (count + kBlockSize - 1) / kBlockSize;
  std::vector<Result> partial(nblocks, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      try {
        const std::uint64_t begin = b * kBlockSize;
        partial[b] = block(begin, std::min(count, begin + kBlockSize));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(nblocks);
        return;
      }
    }
  };
  const int nthreads = static_cast<int>(std::min<std::uint64_t>(std::max(1, workers), std::max<std::uint64_t>(1, nblocks)));
  if (nthreads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  Result out = init;
  for (auto& p : partial) merge(out, p);
  return out;
}

/// Parallel loop over independent items with no result.
template <class Fn>
void parallel_for(std::uint64_t count, int workers, Fn fn) {
  struct Unit {};
  parallel_blocks(
      count, workers, Unit{},
      [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) fn(i);
        return Unit{};
      },
      [](Unit&, const Unit&) {});
}

}  // namespace billiards
