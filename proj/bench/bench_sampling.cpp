// Compares the serial reference kernels against their OpenMP versions and
// checks that both produce identical results.

#include <chrono>
#include <cstdio>

#include "cgt/miller.hpp"
#include "cgt/randmeasure.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double run_seconds(const char* name, long long& out, const std::function<long long()>& body) {
  auto start = Clock::now();
  out = body();
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%-28s %8.3fs (result %lld)\n", name, secs, out);
  return secs;
}

}  // namespace

int main() {
  cgt::MillerGroup g = cgt::MillerGroup::build({"s1", "s2"}, {"s1 s2 s1^-1 s2^-1", "s1 s1 s1"});

  const long long trials = 2000000;
  long long serial_count = 0, parallel_count = 0;
  double ts = run_seconds("singular count, serial", serial_count, [&]() {
    return cgt::count_singular_samples(g, 0.1, 0.3, trials, 42, false);
  });
  double tp = run_seconds("singular count, parallel", parallel_count, [&]() {
    return cgt::count_singular_samples(g, 0.1, 0.3, trials, 42, true);
  });
  if (serial_count != parallel_count) {
    std::printf("MISMATCH: serial %lld vs parallel %lld\n", serial_count, parallel_count);
    return 1;
  }
  std::printf("sampling speedup: %.2fx\n\n", ts / tp);

  long long serial_ok = 0, parallel_ok = 0;
  double bs = run_seconds("bound sweep, serial", serial_ok, [&]() {
    return cgt::sweep_bound_margins(1, 4, 2, 5, 2, 400, false) ? 1 : 0;
  });
  double bp = run_seconds("bound sweep, parallel", parallel_ok, [&]() {
    return cgt::sweep_bound_margins(1, 4, 2, 5, 2, 400, true) ? 1 : 0;
  });
  if (serial_ok != parallel_ok) {
    std::printf("MISMATCH in sweep results\n");
    return 1;
  }
  std::printf("sweep speedup: %.2fx\n", bs / bp);
  return 0;
}
