#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimorse {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Every failure the library can report. The numeric values double as the
// process exit codes of the command-line tool.
enum class ErrorCode : int {
  config = 2,
  dimension_mismatch = 3,
  malformed_spec = 4,
  invalid_argument = 5,
  divergence = 6,
  resolution = 7,
  not_attracted = 8,
  no_attractor_certificate = 9,
  invariant_violation = 10,
  truncation_unsound = 11,
  neighborhood_unstable = 12,
  precondition = 13,
  io = 14,
  missing_golden = 15,
  check_failed = 20,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

// SplitMix64 finalizer; used both as a hash and as a counter-based stream.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t hash_point(const Vec& x);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

// Deterministic generator keyed by (seed, stream). Uniform variates are built
// from raw bits so results do not depend on the standard library vendor.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(hash_combine(seed, stream)) {}
  std::uint64_t next() { return mix64(key_ ^ mix64(++counter_)); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in (0, 1], safe for logarithms.
  double uniform_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
  double normal();
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Global worker cap used by the parallel loops (the `--threads` flag).
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() workers. Work items are
// handed out in contiguous chunks; body must not touch shared mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t chunk = 64);

// Fixed-precision float formatting used by every report writer.
std::string format_double(double v, int precision = 10);

}  // namespace dimorse
