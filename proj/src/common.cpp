#include "dimorse/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

namespace dimorse {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::malformed_spec: return "malformed_spec";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::resolution: return "resolution";
    case ErrorCode::not_attracted: return "not_attracted";
    case ErrorCode::no_attractor_certificate: return "no_attractor_certificate";
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::truncation_unsound: return "truncation_unsound";
    case ErrorCode::neighborhood_unstable: return "neighborhood_unstable";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::io: return "io";
    case ErrorCode::missing_golden: return "missing_golden";
    case ErrorCode::check_failed: return "check_failed";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x632BE59BD9B4E019ull + (a << 6) + (a >> 2)));
}

std::uint64_t hash_point(const Vec& x) {
  std::uint64_t h = 0x84222325CBF29CE4ull ^ static_cast<std::uint64_t>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = x[i] == 0.0 ? 0.0 : x[i];  // fold -0 onto +0
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = hash_combine(h, bits);
  }
  return h;
}

double CounterRng::normal() {
  // Box-Muller; one variate per call keeps the stream position simple.
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(std::max(0, n)); }

int thread_count() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t chunk) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(1, chunk);
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), (n + chunk - 1) / chunk);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    try {
      for (;;) {
        std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_double(double v, int precision) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

}  // namespace dimorse
