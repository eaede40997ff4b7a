#include "cgt/randmeasure.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cgt {

namespace {

constexpr long long kChunk = 4096;

Rational rational_pow(Rational base, int e) {
  Rational out(1);
  for (int i = 0; i < e; ++i) out *= base;
  out.canonicalize();
  return out;
}

mpz_class int_pow(const mpz_class& base, int e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
  return out;
}

mpz_class sphere_count(int rank, int k) {
  if (k == 0) return 1;
  return mpz_class(2 * rank) * int_pow(mpz_class(2 * rank - 1), k - 1);
}

}  // namespace

WordSampler::WordSampler(AlphabetPtr alphabet, double stop_probability, std::uint64_t seed)
    : alphabet_(std::move(alphabet)), stop_(stop_probability), rng_(seed) {
  if (!(stop_ > 0.0) || stop_ > 1.0)
    throw std::invalid_argument("stopping probability must lie in (0, 1]");
}

double WordSampler::unit() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

FreeWord WordSampler::next() {
  int m = alphabet_->rank();
  std::vector<int> letters;
  if (unit() < stop_) return FreeWord(alphabet_);
  auto letter_of = [](std::uint64_t index) {
    int gen = static_cast<int>(index / 2) + 1;
    return index % 2 == 0 ? gen : -gen;
  };
  letters.push_back(letter_of(rng_() % static_cast<std::uint64_t>(2 * m)));
  while (unit() >= stop_) {
    int last = letters.back();
    std::uint64_t banned =
        static_cast<std::uint64_t>(2 * (std::abs(last) - 1) + (last > 0 ? 1 : 0));
    std::uint64_t r = rng_() % static_cast<std::uint64_t>(2 * m - 1);
    if (r >= banned) ++r;
    letters.push_back(letter_of(r));
  }
  return FreeWord(alphabet_, std::move(letters));
}

Rational mu_s(int rank, const Rational& stop, int length) {
  if (length == 0) return stop;
  Rational out = stop * rational_pow(Rational(1) - stop, length);
  out /= Rational(sphere_count(rank, length));
  out.canonicalize();
  return out;
}

Rational mu_s(int rank, const Rational& stop, const FreeWord& w) {
  return mu_s(rank, stop, w.length());
}

Rational mu_star(int rank, const Rational& stop, int length) {
  if (length == 0) return Rational(2 * rank, 2 * rank - 1);
  Rational t = (Rational(1) - stop) / Rational(2 * rank - 1);
  return rational_pow(t, length);
}

Rational mu_star(int rank, const Rational& stop, const FreeWord& w) {
  return mu_star(rank, stop, w.length());
}

Rational lambda_star(int rank, int length) {
  return Rational(1) / Rational(int_pow(mpz_class(2 * rank - 1), length));
}

Rational lambda_star(int rank, const FreeWord& w) { return lambda_star(rank, w.length()); }

Rational sphere_size(int rank, int k) {
  if (k < 0) throw std::invalid_argument("negative radius");
  return Rational(sphere_count(rank, k));
}

Rational exact_fk_sbh(int n, int m, int k) {
  if (n < 1 || m < 1 || k < 1) throw std::invalid_argument("need n, m, k >= 1");
  mpz_class total = 0;
  for (int j = 0; j <= k; ++j) total += sphere_count(n + m, k - j) * sphere_count(n + 1, j);
  Rational out(sphere_count(n + 1, k), total);
  out.canonicalize();
  return out;
}

std::vector<DensityRow> density_table(int n, int m, int kmax) {
  if (n < 1 || m < 1 || kmax < 1) throw std::invalid_argument("need n, m, kmax >= 1");
  std::vector<mpz_class> b(static_cast<size_t>(kmax) + 1), p(static_cast<size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    b[static_cast<size_t>(k)] = sphere_count(n + 1, k);
    p[static_cast<size_t>(k)] = sphere_count(n + m, k);
  }
  Rational base(n + 1, n + m);
  std::vector<DensityRow> rows;
  rows.reserve(static_cast<size_t>(kmax));
  for (int k = 1; k <= kmax; ++k) {
    mpz_class total = 0;
    for (int j = 0; j <= k; ++j)
      total += p[static_cast<size_t>(k - j)] * b[static_cast<size_t>(j)];
    DensityRow row;
    row.k = k;
    row.f = Rational(b[static_cast<size_t>(k)], total);
    row.f.canonicalize();
    row.bound = rational_pow(base, k - 1);
    row.holds = k <= 1 || row.f < row.bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

DensityRow bound_margin(int n, int m, int k) {
  if (m <= 1) throw std::invalid_argument("m > 1 required");
  if (k <= 1) throw std::invalid_argument("k > 1 required");
  DensityRow row;
  row.k = k;
  row.f = exact_fk_sbh(n, m, k);
  row.bound = rational_pow(Rational(n + 1, n + m), k - 1);
  row.holds = row.f < row.bound;
  return row;
}

bool sweep_bound_margins(int n_lo, int n_hi, int m_lo, int m_hi, int k_lo, int k_hi,
                         bool parallel) {
  if (m_lo <= 1) throw std::invalid_argument("m > 1 required");
  if (k_lo <= 1) throw std::invalid_argument("k > 1 required");
  int cells = (n_hi - n_lo + 1) * (m_hi - m_lo + 1);
  bool all_hold = true;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(&& : all_hold) if (parallel)
#endif
  for (int cell = 0; cell < cells; ++cell) {
    int n = n_lo + cell % (n_hi - n_lo + 1);
    int m = m_lo + cell / (n_hi - n_lo + 1);
    std::vector<DensityRow> rows = density_table(n, m, k_hi);
    bool ok = true;
    for (const DensityRow& row : rows) {
      if (row.k >= k_lo && row.k <= k_hi && !row.holds) ok = false;
    }
    all_hold = all_hold && ok;
  }
  return all_hold;
}

KSampler::KSampler(const MillerGroup& g, double sigma1, double sigma2, std::uint64_t seed)
    : u_(g.alphabet_td(), sigma1, seed), s_(g.alphabet_s(), sigma2, seed ^ 0x9e3779b97f4a7c15ull) {}

KElement KSampler::next() { return {u_.next(), s_.next()}; }

GSampler::GSampler(const MillerGroup& g, double sigma1, double sigma2, std::uint64_t seed)
    : alpha_g_(g.alphabet()),
      u_(g.alphabet_td(), sigma1, seed),
      f_(g.alphabet_sq(), sigma2, seed ^ 0x9e3779b97f4a7c15ull) {}

FreeWord GSampler::next() {
  return multiply(translate(u_.next(), alpha_g_), translate(f_.next(), alpha_g_));
}

DensityEstimate wilson_interval(long long hits, long long trials) {
  DensityEstimate out;
  out.hits = hits;
  out.trials = trials;
  if (trials <= 0) return out;
  double p = static_cast<double>(hits) / static_cast<double>(trials);
  double z = 1.959963984540054;
  double nn = static_cast<double>(trials);
  double denom = 1.0 + z * z / nn;
  double center = (p + z * z / (2 * nn)) / denom;
  double radius = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  out.estimate = p;
  out.lo = center - radius;
  out.hi = center + radius;
  return out;
}

DensityEstimate estimate_density(const std::function<bool(const FreeWord&)>& predicate,
                                 WordSampler& sampler, long long trials) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  long long hits = 0;
  for (long long i = 0; i < trials; ++i) {
    if (predicate(sampler.next())) ++hits;
  }
  return wilson_interval(hits, trials);
}

Rational cesaro_partial(std::span<const Rational> f, int nmax) {
  if (nmax < 1 || nmax > static_cast<int>(f.size()))
    throw std::invalid_argument("partial average length out of range");
  Rational sum(0);
  for (int i = 0; i < nmax; ++i) sum += f[static_cast<size_t>(i)];
  sum /= nmax;
  sum.canonicalize();
  return sum;
}

namespace {

// Counts identity draws of the no-return walk without materializing words.
// Consumes the generator stream exactly like WordSampler::next, so the count
// matches a KSampler-based run with the same seed bit for bit.
long long count_identity_draws(double stop, std::uint64_t seed, long long n) {
  std::mt19937_64 rng(seed);
  auto unit = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    if (unit() < stop) {
      ++hits;
      continue;
    }
    rng();  // first letter
    while (unit() >= stop) rng();  // non-backtracking letters
  }
  return hits;
}

}  // namespace

long long count_singular_samples(const MillerGroup& g, double sigma1, double sigma2,
                                 long long trials, std::uint64_t seed, bool parallel) {
  if (trials < 0) throw std::invalid_argument("negative trial count");
  long long chunks = (trials + kChunk - 1) / kChunk;
  long long total = 0;
  if (!parallel) {
    // Reference path: full K draws through the samplers.
    for (long long c = 0; c < chunks; ++c) {
      KSampler sampler(g, sigma1, sigma2, seed + static_cast<std::uint64_t>(c));
      long long hi = std::min(trials, (c + 1) * kChunk);
      for (long long i = c * kChunk; i < hi; ++i) {
        if (sampler.next().u.empty()) ++total;
      }
    }
    return total;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : total)
#endif
  for (long long c = 0; c < chunks; ++c) {
    long long size = std::min(trials, (c + 1) * kChunk) - c * kChunk;
    total += count_identity_draws(sigma1, seed + static_cast<std::uint64_t>(c), size);
  }
  return total;
}

}  // namespace cgt
