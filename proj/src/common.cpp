#include "mcl/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace mcl {

namespace {

std::string join_issues(const std::vector<ParseIssue>& list) {
  std::string out = "configuration rejected:";
  for (const auto& issue : list) {
    out += "\n  line " + std::to_string(issue.line) + ": " + issue.message;
  }
  return out;
}

std::atomic<int> g_max_threads{1};

}  // namespace

ConfigError::ConfigError(std::vector<ParseIssue> list)
    : std::runtime_error(join_issues(list)), issues(std::move(list)) {}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void set_max_threads(int n) { g_max_threads.store(std::max(1, n)); }

int max_threads() { return g_max_threads.load(); }

void parallel_for(int n, const std::function<void(int, int)>& fn) {
  const int threads = std::min(max_threads(), n);
  if (threads <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mcl
