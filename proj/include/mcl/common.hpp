#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcl {

// Coordinates and metric components live in fixed 2-slots; 1D charts use slot 0.
using Vec = std::array<double, 2>;
using Mat = std::array<std::array<double, 2>, 2>;

struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

struct FluxError : std::runtime_error {
  explicit FluxError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseIssue {
  int line = 0;
  std::string message;
};

struct ConfigError : std::runtime_error {
  std::vector<ParseIssue> issues;
  explicit ConfigError(std::vector<ParseIssue> list);
};

/// Render a double with 17 significant digits; round-trips bit exactly.
std::string format17(double v);

/// Intra-run parallelism cap for per-cell solver loops. Default 1.
void set_max_threads(int n);
int max_threads();

/// Runs fn(begin,end) over a partition of [0,n). Chunks are contiguous and the
/// partition depends only on (n, max_threads), so disjoint-write loops stay
/// deterministic at any thread count.
void parallel_for(int n, const std::function<void(int, int)>& fn);

}  // namespace mcl
