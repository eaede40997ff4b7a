#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cgt/fgword.hpp"
#include "cgt/miller.hpp"

namespace cgt {

// All density and bound computations run in exact rational arithmetic;
// floating point appears only in Monte-Carlo summaries.
using Rational = mpq_class;

struct MeasureParams {
  int rank = 1;                // rank of the free group
  Rational stop = Rational(1, 2);  // stopping probability in (0, 1]
  std::uint64_t seed = 0;
};

// No-return random walk on the Cayley graph: stop with probability `stop`,
// otherwise append a uniformly chosen non-backtracking letter. Lengths are
// geometric, words of equal length equiprobable. Fully deterministic under a
// fixed seed (mt19937_64 with 53-bit uniforms and modulo index draws).
class WordSampler {
 public:
  WordSampler(AlphabetPtr alphabet, double stop_probability, std::uint64_t seed);
  FreeWord next();

 private:
  double unit();
  AlphabetPtr alphabet_;
  double stop_;
  std::mt19937_64 rng_;
};

Rational mu_s(int rank, const Rational& stop, int length);
Rational mu_s(int rank, const Rational& stop, const FreeWord& w);
Rational mu_star(int rank, const Rational& stop, int length);
Rational mu_star(int rank, const Rational& stop, const FreeWord& w);
Rational lambda_star(int rank, int length);
Rational lambda_star(int rank, const FreeWord& w);

// |S_0| = 1, |S_k| = 2m (2m-1)^{k-1}.
Rational sphere_size(int rank, int k);

// Sphere frequency of the strong black hole F(S, q) inside the group of a
// presentation with n generators and m relators, under the stratification
// l(g) = l(u) + l(f):  f_k = |B_k| / sum_j |P_{k-j}| |B_j| with B-spheres of
// rank n+1 and P-spheres of rank n+m.
Rational exact_fk_sbh(int n, int m, int k);

struct DensityRow {
  int k = 0;
  Rational f;
  Rational bound;  // ((n+1)/(n+m))^{k-1}
  bool holds = true;
};

// Rows k = 1..kmax with exact frequencies and bounds.
std::vector<DensityRow> density_table(int n, int m, int kmax);

// Requires m > 1 and k > 1.
DensityRow bound_margin(int n, int m, int k);

// Checks f_k < ((n+1)/(n+m))^{k-1} over the whole grid. The parallel variant
// splits the (n, m) cells across threads and agrees exactly with the serial
// one.
bool sweep_bound_margins(int n_lo, int n_hi, int m_lo, int m_hi, int k_lo, int k_hi,
                         bool parallel);

// Independent draws of the two coordinates of K = F(T,D) x F(S).
class KSampler {
 public:
  KSampler(const MillerGroup& g, double sigma1, double sigma2, std::uint64_t seed);
  KElement next();

 private:
  WordSampler u_;
  WordSampler s_;
};

// Random words u f over the standard generators, with u over F(T,D) and f
// over F(S, q).
class GSampler {
 public:
  GSampler(const MillerGroup& g, double sigma1, double sigma2, std::uint64_t seed);
  FreeWord next();

 private:
  const AlphabetPtr alpha_g_;
  WordSampler u_;
  WordSampler f_;
};

struct DensityEstimate {
  double estimate = 0;
  double lo = 0, hi = 0;  // Wilson 95% interval
  long long hits = 0;
  long long trials = 0;
};

DensityEstimate wilson_interval(long long hits, long long trials);
DensityEstimate estimate_density(const std::function<bool(const FreeWord&)>& predicate,
                                 WordSampler& sampler, long long trials);

// Exact partial Cesaro average (f_1 + ... + f_nmax) / nmax.
Rational cesaro_partial(std::span<const Rational> f, int nmax);

// Number of strongly singular draws (u = 1) among `trials` samples of K.
// Work is split into fixed 4096-sample chunks; chunk c is seeded seed + c, so
// the count does not depend on the thread count and the parallel and serial
// paths agree bit for bit.
long long count_singular_samples(const MillerGroup& g, double sigma1, double sigma2,
                                 long long trials, std::uint64_t seed, bool parallel);

}  // namespace cgt
