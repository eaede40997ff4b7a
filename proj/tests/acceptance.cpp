// Acceptance suite: one pass/fail line per criterion, nonzero exit when a
// gating criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cgt/fgword.hpp"
#include "cgt/hnn.hpp"
#include "cgt/miller.hpp"
#include "cgt/randmeasure.hpp"
#include "cgt/stallings.hpp"

using namespace cgt;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

FreeWord random_word(const AlphabetPtr& a, int len, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> gen(1, a->rank());
  std::uniform_int_distribution<int> sgn(0, 1);
  std::vector<int> letters;
  for (int i = 0; i < len; ++i) letters.push_back(sgn(rng) ? gen(rng) : -gen(rng));
  return FreeWord(a, std::move(letters));
}

std::vector<FreeWord> all_words(const AlphabetPtr& a, int max_len) {
  std::vector<FreeWord> out{FreeWord(a)};
  std::vector<std::vector<int>> frontier{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& word : frontier) {
      for (int gen = 1; gen <= a->rank(); ++gen) {
        for (int letter : {gen, -gen}) {
          if (!word.empty() && word.back() == -letter) continue;
          auto ext = word;
          ext.push_back(letter);
          out.emplace_back(a, ext);
          next.push_back(std::move(ext));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<MillerGroup> presentations() {
  std::vector<MillerGroup> out;
  out.push_back(MillerGroup::build({"s1"}, {"s1 s1", "s1 s1 s1"}));
  out.push_back(MillerGroup::build({"s1", "s2"}, {"s1 s2 s1^-1 s2^-1", "s1 s1 s1"}));
  out.push_back(MillerGroup::build({"s1", "s2"}, {"s1 s2 s1", "s2 s1 s2", "s1 s1 s1 s1"}));
  return out;
}

std::vector<FreeWord> defining_relators(const MillerGroup& g) {
  std::vector<FreeWord> out;
  const AlphabetPtr& a = g.alphabet();
  int n = g.generator_count(), m = g.relator_count();
  FreeWord q(a, {1});
  for (int i = 1; i <= m; ++i) {
    FreeWord t(a, {1 + n + i});
    FreeWord r = translate(g.relator(i - 1), a);
    out.push_back(multiply(multiply(multiply(invert(t), q), t), invert(multiply(q, r))));
    for (int j = 1; j <= n; ++j) {
      FreeWord s(a, {1 + j});
      out.push_back(multiply(multiply(multiply(invert(t), s), t), invert(s)));
    }
  }
  for (int j = 1; j <= n; ++j) {
    FreeWord d(a, {1 + n + m + j});
    FreeWord s(a, {1 + j});
    out.push_back(multiply(multiply(multiply(invert(d), q), d),
                           invert(multiply(multiply(invert(s), q), s))));
    for (int jj = 1; jj <= n; ++jj) {
      FreeWord ss(a, {1 + jj});
      out.push_back(multiply(multiply(multiply(invert(d), ss), d), invert(ss)));
    }
  }
  return out;
}

// --------------------------------------------------------------------------

void criterion_1_borisov() {
  auto start = Clock::now();
  bool pass = true;
  std::string detail;

  auto rows = density_table(10, 27, 81);
  for (const auto& row : rows) {
    if (row.k > 1 && !row.holds) pass = false;
  }
  const DensityRow& last = rows.back();
  Rational third_pow(1);
  for (int i = 0; i < 80; ++i) third_pow *= Rational(1, 3);
  if (!(last.k == 81 && last.f < last.bound && last.bound < third_pow)) pass = false;

  // The same run through the command-line front end.
  const char* cli = std::getenv("CGT_CLI");
  if (cli) {
    std::string cmd = std::string(cli) + " density --n 10 --m 27 --kmax 81 --csv > /dev/null";
    int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) pass = false;
  } else {
    detail = "CGT_CLI unset, CLI leg skipped; ";
    pass = false;
  }

  double secs = seconds_since(start);
  if (secs >= 10.0) pass = false;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%sf_81 < (11/37)^80 < 3^-80 exactly, %.2fs (< 10s)",
                detail.c_str(), secs);
  report(1, "Borisov parameters reproduce exactly", pass, buf);
}

void criterion_2_sweep() {
  auto start = Clock::now();
  bool holds = sweep_bound_margins(1, 4, 2, 5, 2, 100, true);
  double secs = seconds_since(start);
  char buf[128];
  std::snprintf(buf, sizeof buf, "16 cells x k<=100 exact, %.2fs (< 60s)", secs);
  report(2, "negligibility bound holds on the whole grid", holds && secs < 60.0, buf);
}

void criterion_3_enumeration() {
  auto td = Alphabet::make({"t1", "t2", "d1"});  // rank n + m = 3
  auto sq = Alphabet::make({"q", "s1"});         // rank n + 1 = 2
  std::map<int, long long> pc, bc;
  for (const FreeWord& w : all_words(td, 6)) pc[w.length()]++;
  for (const FreeWord& w : all_words(sq, 6)) bc[w.length()]++;
  bool pass = true;
  for (int k = 1; k <= 6; ++k) {
    long long total = 0;
    for (int j = 0; j <= k; ++j) total += pc[k - j] * bc[j];
    Rational oracle(static_cast<long>(bc[k]), static_cast<long>(total));
    oracle.canonicalize();
    if (!(oracle == exact_fk_sbh(1, 2, k))) pass = false;
  }
  report(3, "frequencies equal exhaustive normal-form counts (n=1, m=2, k<=6)", pass, "");
}

void criterion_4_uniqueness() {
  std::mt19937_64 rng(404);
  int checked = 0, bad = 0;
  for (const MillerGroup& g : presentations()) {
    auto rels = defining_relators(g);
    for (int trial = 0; trial < 500; ++trial) {
      FreeWord w = random_word(g.alphabet(), 1 + static_cast<int>(rng() % 60), rng);
      MillerNormalForm nf = normal_form_miller(g, w);
      const FreeWord& rel = rels[rng() % rels.size()];
      int pos = static_cast<int>(rng() % static_cast<unsigned long>(w.length() + 1));
      FreeWord w2 = multiply(multiply(w.subword(0, pos), rel), w.subword(pos, w.length()));
      if (!(normal_form_miller(g, w2) == nf)) ++bad;
      ++checked;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d insertions, %d mismatches", checked, bad);
  report(4, "normal forms ignore inserted defining relators", bad == 0, buf);
}

void criterion_5_conjugacy() {
  std::mt19937_64 rng(505);
  auto groups = presentations();
  int positive = 0, positive_bad = 0;
  int trial = 0;
  while (positive < 1000 && trial < 20000) {
    ++trial;
    const MillerGroup& g = groups[static_cast<size_t>(trial) % groups.size()];
    FreeWord seed_word = random_word(g.alphabet(), 1 + static_cast<int>(rng() % 12), rng);
    auto [nf, xc] = cyc_reduce_miller(g, seed_word);
    if (nf.u.empty()) continue;
    FreeWord gword = nf.to_word(g);
    FreeWord x = random_word(g.alphabet(), static_cast<int>(rng() % 7), rng);
    FreeWord u = conjugate(gword, x);
    ConjugacyCertificate cert = conjugacy_search_miller(g, gword, u);
    if (cert.verdict != MillerVerdict::Conjugate || !verify_certificate(g, gword, u, cert))
      ++positive_bad;
    ++positive;
  }
  int negative = 0, negative_bad = 0;
  trial = 0;
  while (negative < 200 && trial < 20000) {
    ++trial;
    const MillerGroup& g = groups[static_cast<size_t>(trial) % groups.size()];
    FreeWord w1 = random_word(g.alphabet(), 1 + static_cast<int>(rng() % 10), rng);
    FreeWord w2 = random_word(g.alphabet(), 1 + static_cast<int>(rng() % 10), rng);
    MillerNormalForm n1 = normal_form_miller(g, w1);
    MillerNormalForm n2 = normal_form_miller(g, w2);
    if (n1.u.empty() || n2.u.empty()) continue;
    if (free_conjugacy(n1.u, n2.u)) continue;  // different u classes only
    ConjugacyCertificate cert = conjugacy_search_miller(g, w1, w2);
    if (cert.verdict != MillerVerdict::NotConjugate) ++negative_bad;
    ++negative;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d conjugate pairs (%d misses), %d non-conjugate pairs (%d misses)", positive,
                positive_bad, negative, negative_bad);
  report(5, "conjugacy search is sound and complete at desk scale",
         positive == 1000 && positive_bad == 0 && negative == 200 && negative_bad == 0, buf);
}

void criterion_6_power_solver() {
  auto xy = Alphabet::make({"x", "y"});
  std::mt19937_64 rng(606);
  int bad = 0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    FreeWord a = random_word(xy, 1 + static_cast<int>(rng() % 5), rng);
    FreeWord b = random_word(xy, 1 + static_cast<int>(rng() % 5), rng);
    long long l = static_cast<long long>(rng() % 17) - 8;
    FreeWord d = multiply(power(a, l), power(b, l));
    PowerSolution got = solve_power_equation(a, b, d);

    long long window = d.length() + 2 * (a.length() + b.length() + 1);
    std::vector<long long> sols;
    if (d.empty()) sols.push_back(0);
    FreeWord ap(xy), bp(xy);
    for (long long e = 1; e <= window; ++e) {
      ap = multiply(ap, a);
      bp = multiply(bp, b);
      if (multiply(ap, bp) == d) sols.push_back(e);
      if (multiply(invert(ap), invert(bp)) == d) sols.push_back(-e);
    }

    bool degenerate = d.empty() && a == invert(b);
    if (degenerate) {
      if (got.tag != PowerSolution::Tag::AllIntegers) ++bad;
    } else if (got.tag != PowerSolution::Tag::Unique || sols.size() != 1 ||
               sols.front() != got.exponent ||
               !(multiply(power(a, got.exponent), power(b, got.exponent)) == d)) {
      ++bad;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d instances, %d disagreements with brute force", trials, bad);
  report(6, "power-equation solver agrees with brute force", bad == 0, buf);
}

void criterion_7_sigma1() {
  MillerGroup g = MillerGroup::build({"s1"}, {"s1 s1", "s1 s1 s1"});
  const long long n = 100000;
  long long singular = count_singular_samples(g, 0.1, 0.3, n, 20240, true);
  double fraction = static_cast<double>(singular) / static_cast<double>(n);
  double tolerance = 3 * std::sqrt(0.1 * 0.9 / static_cast<double>(n));
  char buf[96];
  std::snprintf(buf, sizeof buf, "fraction %.5f vs 0.1, tolerance %.5f", fraction, tolerance);
  report(7, "strongly singular fraction matches sigma1", std::abs(fraction - 0.1) < tolerance,
         buf);
}

void criterion_8_generator_law() {
  bool pass = true;
  auto ab = Alphabet::make({"a", "b"});
  const long long n = 100000;
  double stop = 0.25;
  WordSampler sampler(ab, stop, 808);
  std::map<int, long long> hist;
  for (long long i = 0; i < n; ++i) hist[sampler.next().length()]++;
  for (int k = 0; k <= 10; ++k) {
    double p = stop * std::pow(1 - stop, k);
    double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    double observed = static_cast<double>(hist[k]) / static_cast<double>(n);
    if (std::abs(observed - p) >= 4 * sigma) pass = false;
  }
  for (int m = 1; m <= 2; ++m) {
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i) names.push_back("x" + std::to_string(i + 1));
    std::map<int, long long> counts;
    for (const FreeWord& w : all_words(Alphabet::make(names), 6)) counts[w.length()]++;
    for (int k = 0; k <= 6; ++k) {
      if (!(sphere_size(m, k) == Rational(static_cast<long>(counts[k])))) pass = false;
    }
  }
  report(8, "sampler length law and sphere sizes check out", pass, "");
}

void criterion_9_bs_instance() {
  auto base = Alphabet::make({"a", "b"});
  HnnPresentation p = make_free_base_hnn(base, "t", {FreeWord::parse(base, "a")},
                                         {FreeWord::parse(base, "a a")});
  std::mt19937_64 rng(909);
  bool pass = true;

  std::vector<FreeWord> rels = {FreeWord::parse(p.alphabet(), "t^-1 a t a^-1 a^-1"),
                                FreeWord::parse(p.alphabet(), "t a a t^-1 a^-1"),
                                FreeWord::parse(p.alphabet(), "a a t^-1 a^-1 t")};
  for (int trial = 0; trial < 500; ++trial) {
    FreeWord w = random_word(p.alphabet(), 1 + static_cast<int>(rng() % 14), rng);
    HnnNormalForm nf = normal_form(p, w);
    const FreeWord& rel = rels[rng() % rels.size()];
    int pos = static_cast<int>(rng() % static_cast<unsigned long>(w.length() + 1));
    FreeWord w2 = multiply(multiply(w.subword(0, pos), rel), w.subword(pos, w.length()));
    if (!(normal_form(p, w2) == nf)) pass = false;

    auto [cyc, x] = cyc_reduce(p, w);
    if (cyc.length() >= 1) {
      FreeWord gg = cyc.to_word(p);
      if (normal_form(p, multiply(gg, gg)).length() != 2 * cyc.length()) pass = false;
    }
  }

  // Subgroup-graph oracles up to length 6.
  SubgroupGraph a_graph = SubgroupGraph::build(base, {FreeWord::parse(base, "a")});
  SubgroupGraph mixed =
      SubgroupGraph::build(base, {FreeWord::parse(base, "a a"), FreeWord::parse(base, "b a b")});
  auto words6 = all_words(base, 6);
  // Membership closure oracle.
  std::set<FreeWord> closure{FreeWord(base)};
  {
    std::vector<FreeWord> frontier{FreeWord(base)};
    while (!frontier.empty()) {
      std::vector<FreeWord> next;
      for (const FreeWord& cur : frontier) {
        for (const FreeWord& gen :
             {FreeWord::parse(base, "a a"), FreeWord::parse(base, "b a b")}) {
          for (const FreeWord& f : {gen, invert(gen)}) {
            FreeWord prod = multiply(cur, f);
            if (prod.length() > 18) continue;
            if (closure.insert(prod).second) next.push_back(prod);
          }
        }
      }
      frontier = std::move(next);
    }
  }
  for (const FreeWord& w : words6) {
    bool expected = closure.contains(w);
    auto expr = mixed.membership(w);
    if (expr.has_value() != expected) pass = false;
    if (expr && !(mixed.evaluate(*expr) == w)) pass = false;
    FreeWord rep = mixed.coset_representative(w);
    if (!mixed.accepts(multiply(w, invert(rep)))) pass = false;
    if (!(mixed.coset_representative(rep) == rep)) pass = false;
    // Conjugacy membership against brute-force conjugators.
    if (w.length() <= 4 && !w.empty()) {
      bool oracle = false;
      for (const FreeWord& x : words6) {
        if (a_graph.accepts(conjugate(w, x))) {
          oracle = true;
          break;
        }
      }
      auto hit = a_graph.conjugate_into(w);
      if (hit.has_value() != oracle) pass = false;
      if (hit && (!(conjugate(w, hit->first) == hit->second) || !a_graph.accepts(hit->second)))
        pass = false;
    }
  }
  report(9, "generic engine and subgroup graphs verified on the base instance", pass, "");
}

void criterion_10_runtime_slope() {
  MillerGroup g = MillerGroup::build({"s1"}, {"s1 s1", "s1 s1 s1"});
  std::mt19937_64 rng(1010);
  std::vector<double> xs, ys;
  for (int length = 64; length <= 4096; length *= 2) {
    std::vector<double> times;
    for (int rep = 0; rep < 9; ++rep) {
      FreeWord w = random_word(g.alphabet(), length, rng);
      auto start = Clock::now();
      MillerNormalForm nf = normal_form_miller(g, w);
      times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
      if (nf.length() > length) std::abort();  // keep the call alive
    }
    std::sort(times.begin(), times.end());
    xs.push_back(std::log(static_cast<double>(length)));
    ys.push_back(std::log(times[times.size() / 2]));
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double num = 0, den = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  double slope = num / den;
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "log-log slope %.2f (soft target <= 3.3; reported, not gating)", slope);
  report(10, "normal-form runtime growth", true, buf);
}

}  // namespace

int main() {
  criterion_1_borisov();
  criterion_2_sweep();
  criterion_3_enumeration();
  criterion_4_uniqueness();
  criterion_5_conjugacy();
  criterion_6_power_solver();
  criterion_7_sigma1();
  criterion_8_generator_law();
  criterion_9_bs_instance();
  criterion_10_runtime_slope();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
