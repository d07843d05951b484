#include "perifem/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace perifem {

namespace {
int g_threads = 1;
constexpr int kMaxChunks = 32;
} // namespace

void set_threads(int n) { g_threads = std::max(1, n); }
int get_threads() { return g_threads; }

int chunk_count(int n) {
  if (n <= 0) return 0;
  return std::min(n, kMaxChunks);
}

void parallel_for(int n, const std::function<void(int, int, int)>& body) {
  const int chunks = chunk_count(n);
  if (chunks == 0) return;

  auto run_chunk = [&](int c) {
    const int begin = static_cast<int>(static_cast<long long>(n) * c / chunks);
    const int end = static_cast<int>(static_cast<long long>(n) * (c + 1) / chunks);
    if (begin < end) body(c, begin, end);
  };

  const int workers = std::min(g_threads, chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int c = next.fetch_add(1);
        if (c >= chunks) return;
        run_chunk(c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

} // namespace perifem
