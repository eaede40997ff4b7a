#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "cgt/fgword.hpp"
#include "cgt/stallings.hpp"

using namespace cgt;

namespace {

AlphabetPtr ab() { return Alphabet::make({"a", "b"}); }

FreeWord w(const AlphabetPtr& a, const char* text) { return FreeWord::parse(a, text); }

// All reduced words of length <= max_len.
std::vector<FreeWord> all_words(const AlphabetPtr& a, int max_len) {
  std::vector<FreeWord> out{FreeWord(a)};
  std::vector<std::vector<int>> frontier{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next_frontier;
    for (const auto& word : frontier) {
      for (int gen = 1; gen <= a->rank(); ++gen) {
        for (int letter : {gen, -gen}) {
          if (!word.empty() && word.back() == -letter) continue;
          auto extended = word;
          extended.push_back(letter);
          out.emplace_back(a, extended);
          next_frontier.push_back(std::move(extended));
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  return out;
}

// Subgroup elements reachable as generator products, capped at 3*max_len to
// leave room for intermediate growth; filtered to length <= max_len.
std::set<FreeWord> closure_oracle(const AlphabetPtr& a, const std::vector<FreeWord>& gens,
                                  int max_len) {
  std::set<FreeWord> seen{FreeWord(a)};
  std::vector<FreeWord> frontier{FreeWord(a)};
  int cap = 3 * max_len;
  while (!frontier.empty()) {
    std::vector<FreeWord> next_frontier;
    for (const FreeWord& cur : frontier) {
      for (const FreeWord& g : gens) {
        for (const FreeWord& factor : {g, invert(g)}) {
          FreeWord prod = multiply(cur, factor);
          if (prod.length() > cap) continue;
          if (seen.insert(prod).second) next_frontier.push_back(prod);
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  std::set<FreeWord> out;
  for (const FreeWord& u : seen)
    if (u.length() <= max_len) out.insert(u);
  return out;
}

FreeWord random_word(const AlphabetPtr& a, int len, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> gen(1, a->rank());
  std::uniform_int_distribution<int> sgn(0, 1);
  std::vector<int> letters;
  for (int i = 0; i < len; ++i) letters.push_back(sgn(rng) ? gen(rng) : -gen(rng));
  return FreeWord(a, std::move(letters));
}

}  // namespace

TEST_CASE("build basics") {
  auto a = ab();
  SubgroupGraph ga = SubgroupGraph::build(a, {w(a, "a")});
  CHECK(ga.accepts(w(a, "a a")));
  CHECK(!ga.accepts(w(a, "b")));
  CHECK(ga.rank() == 1);

  SubgroupGraph trivial = SubgroupGraph::build(a, {});
  CHECK(trivial.accepts(w(a, "1")));
  CHECK(!trivial.accepts(w(a, "a")));
  CHECK(trivial.trivial());
  CHECK(trivial.vertex_count() == 1);

  SubgroupGraph g2 = SubgroupGraph::build(a, {w(a, "a a"), w(a, "a b")});
  CHECK(g2.accepts(multiply(w(a, "a a"), w(a, "a b"))));
  CHECK(!g2.accepts(w(a, "a")));
}

TEST_CASE("membership matches closure oracle") {
  auto a = ab();
  std::vector<std::vector<FreeWord>> generator_sets = {
      {w(a, "a")},
      {w(a, "a a"), w(a, "a b")},
      {w(a, "a a"), w(a, "b b"), w(a, "a b a^-1")},
      {w(a, "b^-1 a b")},
  };
  for (const auto& gens : generator_sets) {
    SubgroupGraph g = SubgroupGraph::build(a, gens);
    auto inside = closure_oracle(a, gens, 6);
    for (const FreeWord& u : all_words(a, 6)) {
      bool expected = inside.contains(u);
      auto expr = g.membership(u);
      CHECK(expr.has_value() == expected);
      if (expr) CHECK(g.evaluate(*expr) == u);
    }
  }
}

TEST_CASE("membership witness on random products") {
  auto a = ab();
  std::vector<FreeWord> gens = {w(a, "a a"), w(a, "a b"), w(a, "b b b")};
  SubgroupGraph g = SubgroupGraph::build(a, gens);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(gens.size()) - 1);
  std::uniform_int_distribution<int> sgn(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    FreeWord prod(a);
    int factors = 1 + trial % 5;
    for (int i = 0; i < factors; ++i) {
      FreeWord f = gens[static_cast<size_t>(pick(rng))];
      prod = multiply(prod, sgn(rng) ? f : invert(f));
    }
    auto expr = g.membership(prod);
    REQUIRE(expr);
    CHECK(g.evaluate(*expr) == prod);
  }
}

TEST_CASE("folding confluence: generator list order does not matter") {
  auto a = ab();
  std::vector<FreeWord> gens = {w(a, "a a"), w(a, "a b"), w(a, "b a^-1")};
  SubgroupGraph g1 = SubgroupGraph::build(a, gens);
  SubgroupGraph g2 = SubgroupGraph::build(a, {invert(gens[2]), gens[0], invert(gens[1])});
  for (const FreeWord& u : all_words(a, 5)) {
    CHECK(g1.accepts(u) == g2.accepts(u));
  }
}

TEST_CASE("coset representatives") {
  auto a = ab();
  SubgroupGraph g = SubgroupGraph::build(a, {w(a, "a")});
  CHECK(g.coset_representative(w(a, "a a a")).empty());
  CHECK(g.coset_representative(w(a, "a a a b")) == w(a, "b"));

  SubgroupGraph g2 = SubgroupGraph::build(a, {w(a, "a a"), w(a, "b b")});
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    FreeWord u = random_word(a, trial % 10, rng);
    FreeWord r = g2.coset_representative(u);
    CHECK(g2.coset_representative(r) == r);
    CHECK(g2.accepts(multiply(u, invert(r))));
    // r(member * u) = r(u)
    FreeWord member = power(w(a, "a a"), trial % 3);
    CHECK(g2.coset_representative(multiply(member, u)) == r);
  }

  // Minimality against every shorter word in the same coset.
  for (const FreeWord& u : all_words(a, 4)) {
    FreeWord r = g2.coset_representative(u);
    for (const FreeWord& v : all_words(a, 4)) {
      if (v.length() < r.length()) CHECK(!g2.accepts(multiply(u, invert(v))));
    }
  }
}

TEST_CASE("conjugate_into") {
  auto a = ab();
  SubgroupGraph g = SubgroupGraph::build(a, {w(a, "a")});
  auto hit = g.conjugate_into(w(a, "b^-1 a b"));
  REQUIRE(hit);
  CHECK(conjugate(w(a, "b^-1 a b"), hit->first) == hit->second);
  CHECK(g.membership(hit->second));
  CHECK(!g.conjugate_into(w(a, "b")));

  // Brute-force conjugator oracle, |x| <= 6.
  SubgroupGraph g2 = SubgroupGraph::build(a, {w(a, "a a"), w(a, "b a b")});
  auto candidates = all_words(a, 6);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    FreeWord u = random_word(a, 1 + trial % 6, rng);
    auto found = g2.conjugate_into(u);
    bool oracle = false;
    for (const FreeWord& x : candidates) {
      if (g2.accepts(conjugate(u, x))) {
        oracle = true;
        break;
      }
    }
    if (found) {
      CHECK(conjugate(u, found->first) == found->second);
      CHECK(g2.membership(found->second));
    } else {
      CHECK(!oracle);
    }
    if (oracle) CHECK(found.has_value());
  }

  // Random h in subgroup conjugated by random x: always found and verified.
  for (int trial = 0; trial < 100; ++trial) {
    FreeWord h = multiply(power(w(a, "a a"), 1 + trial % 3),
                          power(w(a, "b a b"), trial % 2));
    if (h.empty()) continue;
    FreeWord x = random_word(a, trial % 6, rng);
    FreeWord gword = conjugate(h, invert(x));
    auto found = g2.conjugate_into(gword);
    REQUIRE(found);
    CHECK(conjugate(gword, found->first) == found->second);
    CHECK(g2.membership(found->second));
  }
}

TEST_CASE("intersection") {
  auto a = ab();
  SubgroupGraph ga = SubgroupGraph::build(a, {w(a, "a")});
  SubgroupGraph ga2 = SubgroupGraph::build(a, {w(a, "a a")});
  SubgroupGraph gb = SubgroupGraph::build(a, {w(a, "b")});
  SubgroupGraph gab2 = SubgroupGraph::build(a, {w(a, "a"), w(a, "b b")});

  SubgroupGraph meet = ga.intersect(ga2);
  for (const FreeWord& u : all_words(a, 6)) {
    CHECK(meet.accepts(u) == ga2.accepts(u));
  }
  CHECK(ga.intersect(gb).trivial());
  SubgroupGraph m2 = gab2.intersect(gb);
  SubgroupGraph gb2 = SubgroupGraph::build(a, {w(a, "b b")});
  for (const FreeWord& u : all_words(a, 6)) {
    CHECK(m2.accepts(u) == gb2.accepts(u));
    CHECK((ga.accepts(u) && gab2.accepts(u)) == ga.intersect(gab2).accepts(u));
  }
  // Membership witnesses work on derived bases too.
  for (const FreeWord& u : all_words(a, 5)) {
    auto expr = m2.membership(u);
    if (expr) CHECK(m2.evaluate(*expr) == u);
  }
}

TEST_CASE("coset intersection matches enumeration") {
  auto a = ab();
  SubgroupGraph ga = SubgroupGraph::build(a, {w(a, "a")});
  SubgroupGraph ga2 = SubgroupGraph::build(a, {w(a, "a a")});
  SubgroupGraph gb = SubgroupGraph::build(a, {w(a, "b")});

  CosetUnion same = coset_intersection(ga, w(a, "b"), ga, w(a, "b"));
  REQUIRE(!same.empty());
  CHECK(ga.accepts(multiply(same.components()[0].representative, invert(w(a, "b")))));

  // <a>*1 cap <b>*a = {a}: the only common element is a itself (k = 0).
  CosetUnion point = coset_intersection(ga, w(a, "1"), gb, w(a, "a"));
  Cardinality pc = cardinality(point);
  REQUIRE(pc.tag == Cardinality::Tag::Finite);
  REQUIRE(pc.elements.size() == 1);
  CHECK(pc.elements[0] == w(a, "a"));

  CHECK(coset_intersection(ga, w(a, "1"), gb, w(a, "a b a")).empty());

  CosetUnion mixed = coset_intersection(ga, w(a, "b"), ga2, w(a, "b"));
  REQUIRE(!mixed.empty());

  // Exhaustive cross-check on random small cosets.
  std::mt19937_64 rng(33);
  std::vector<SubgroupGraph> graphs;
  graphs.push_back(SubgroupGraph::build(a, {w(a, "a")}));
  graphs.push_back(SubgroupGraph::build(a, {w(a, "a a"), w(a, "b")}));
  graphs.push_back(SubgroupGraph::build(a, {w(a, "a b")}));
  graphs.push_back(SubgroupGraph::build(a, {}));
  auto words = all_words(a, 6);
  for (int trial = 0; trial < 60; ++trial) {
    const SubgroupGraph& g1 = graphs[static_cast<size_t>(trial) % graphs.size()];
    const SubgroupGraph& g2 = graphs[static_cast<size_t>(trial / 2) % graphs.size()];
    FreeWord h1 = random_word(a, trial % 4, rng);
    FreeWord h2 = random_word(a, (trial / 3) % 4, rng);
    CosetUnion meet = coset_intersection(g1, h1, g2, h2);
    auto in_coset = [&](const SubgroupGraph& g, const FreeWord& h, const FreeWord& u) {
      return g.accepts(multiply(u, invert(h)));
    };
    for (const FreeWord& u : words) {
      bool expected = in_coset(g1, h1, u) && in_coset(g2, h2, u);
      bool got = !meet.empty() &&
                 meet.components()[0].subgroup.accepts(
                     multiply(u, invert(meet.components()[0].representative)));
      CHECK(expected == got);
    }
    if (!meet.empty()) {
      const auto& c = meet.components()[0];
      CHECK(in_coset(g1, h1, c.representative));
      CHECK(in_coset(g2, h2, c.representative));
    }
  }
}

TEST_CASE("cardinality") {
  auto a = ab();
  CHECK(cardinality(CosetUnion{}).tag == Cardinality::Tag::Empty);

  CosetUnion single;
  single.add({SubgroupGraph::build(a, {}), w(a, "a b")});
  Cardinality fin = cardinality(single);
  CHECK(fin.tag == Cardinality::Tag::Finite);
  REQUIRE(fin.elements.size() == 1);
  CHECK(fin.elements[0] == w(a, "a b"));

  CosetUnion infinite;
  infinite.add({SubgroupGraph::build(a, {w(a, "a")}), w(a, "b")});
  CHECK(cardinality(infinite).tag == Cardinality::Tag::Infinite);

  CosetUnion dup;
  dup.add({SubgroupGraph::build(a, {}), w(a, "a")});
  dup.add({SubgroupGraph::build(a, {}), w(a, "a")});
  CHECK(cardinality(dup).elements.size() == 1);
}

TEST_CASE("generalized normalizer membership") {
  auto a = ab();
  SubgroupGraph A = SubgroupGraph::build(a, {w(a, "a")});
  SubgroupGraph B = SubgroupGraph::build(a, {w(a, "a a")});
  CHECK(generalized_normalizer_member(A, B, w(a, "1")));
  CHECK(generalized_normalizer_member(A, B, w(a, "a")));
  CHECK(!generalized_normalizer_member(A, B, w(a, "b")));
  CHECK(!generalized_normalizer_member(A, B, w(a, "a b")));
}
