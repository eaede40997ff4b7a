#include "cgt/hnn.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "cgt/errors.hpp"

namespace cgt {

namespace {

// Splits a word over the full alphabet into h0 t^{e1} h1 ... t^{ek} hk.
struct Syllables {
  std::vector<FreeWord> base;  // k+1 entries
  std::vector<int> signs;      // k entries
};

Syllables split_syllables(const HnnPresentation& p, const FreeWord& w) {
  require_same_alphabet(w.alphabet(), p.alphabet());
  int t = p.stable_letter();
  Syllables out;
  std::vector<int> current;
  for (int l : w.letters()) {
    if (std::abs(l) == t) {
      out.base.emplace_back(p.base_alphabet(), current);
      current.clear();
      out.signs.push_back(l > 0 ? 1 : -1);
    } else {
      current.push_back(l);
    }
  }
  out.base.emplace_back(p.base_alphabet(), current);
  return out;
}

}  // namespace

HnnPresentation::HnnPresentation(std::shared_ptr<const BaseToolkit> toolkit,
                                 std::string stable_name, std::vector<FreeWord> a_generators,
                                 std::vector<FreeWord> b_generators)
    : toolkit_(std::move(toolkit)),
      a_gens_(std::move(a_generators)),
      b_gens_(std::move(b_generators)) {
  if (!toolkit_) throw std::invalid_argument("null toolkit");
  if (a_gens_.size() != b_gens_.size())
    throw std::invalid_argument("associated subgroup generator lists differ in size");
  const AlphabetPtr& base = toolkit_->alphabet();
  if (base->index_of(stable_name))
    throw std::invalid_argument("stable letter clashes with a base generator");
  std::vector<std::string> names = base->names();
  names.push_back(stable_name);
  full_ = Alphabet::make(std::move(names));
  stable_ = full_->rank();  // letter code of t
  for (const FreeWord& g : a_gens_) require_same_alphabet(g.alphabet(), base);
  for (const FreeWord& g : b_gens_) require_same_alphabet(g.alphabet(), base);
}

FreeWord HnnPresentation::phi(const Expression& a_expression) const {
  FreeWord out(base_alphabet());
  for (int l : a_expression) {
    const FreeWord& gen = b_gens_.at(static_cast<size_t>(std::abs(l) - 1));
    out = multiply(out, l > 0 ? gen : invert(gen));
  }
  return toolkit_->canonical(out);
}

FreeWord HnnPresentation::phi_inv(const Expression& b_expression) const {
  FreeWord out(base_alphabet());
  for (int l : b_expression) {
    const FreeWord& gen = a_gens_.at(static_cast<size_t>(std::abs(l) - 1));
    out = multiply(out, l > 0 ? gen : invert(gen));
  }
  return toolkit_->canonical(out);
}

FreeWord HnnPresentation::to_base(const FreeWord& w) const {
  for (int l : w.letters()) {
    if (std::abs(l) == stable_) throw std::invalid_argument("word contains the stable letter");
  }
  return FreeWord(base_alphabet(), std::vector<int>(w.letters().begin(), w.letters().end()));
}

FreeWord HnnPresentation::to_full(const FreeWord& base_word) const {
  require_same_alphabet(base_word.alphabet(), base_alphabet());
  return FreeWord(full_, std::vector<int>(base_word.letters().begin(), base_word.letters().end()));
}

FreeWord HnnPresentation::stable_power(int sign) const {
  return FreeWord(full_, {sign > 0 ? stable_ : -stable_});
}

FreeWord HnnNormalForm::to_word(const HnnPresentation& p) const {
  FreeWord out = p.to_full(head);
  for (const auto& [sign, word] : syllables) {
    out = multiply(out, p.stable_power(sign));
    out = multiply(out, p.to_full(word));
  }
  return out;
}

std::vector<int> HnnNormalForm::exponent_sequence() const {
  std::vector<int> out;
  out.reserve(syllables.size());
  for (const auto& [sign, word] : syllables) out.push_back(sign);
  return out;
}

HnnNormalForm reduce_form(const HnnPresentation& p, const FreeWord& w) {
  const BaseToolkit& kit = *p.toolkit();
  Syllables s = split_syllables(p, w);
  for (FreeWord& b : s.base) b = kit.canonical(b);
  // Remove the leftmost pinch until none remains.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < s.signs.size() && !changed; ++i) {
      int e1 = s.signs[i], e2 = s.signs[i + 1];
      if (e1 == e2) continue;
      const FreeWord& mid = s.base[i + 1];
      FreeWord image(p.base_alphabet());
      if (e1 == -1) {
        auto expr = kit.membership_a(mid);
        if (!expr) continue;
        image = p.phi(*expr);
      } else {
        auto expr = kit.membership_b(mid);
        if (!expr) continue;
        image = p.phi_inv(*expr);
      }
      s.base[i] = kit.canonical(multiply(s.base[i], multiply(image, s.base[i + 2])));
      s.base.erase(s.base.begin() + static_cast<long>(i) + 1,
                   s.base.begin() + static_cast<long>(i) + 3);
      s.signs.erase(s.signs.begin() + static_cast<long>(i),
                    s.signs.begin() + static_cast<long>(i) + 2);
      changed = true;
    }
  }
  HnnNormalForm out;
  out.head = s.base[0];
  for (size_t i = 0; i < s.signs.size(); ++i) out.syllables.emplace_back(s.signs[i], s.base[i + 1]);
  out.reduced = true;
  return out;
}

HnnNormalForm normal_form(const HnnPresentation& p, const FreeWord& w) {
  const BaseToolkit& kit = *p.toolkit();
  Syllables s = split_syllables(p, w);
  int k = static_cast<int>(s.signs.size());
  std::deque<std::pair<int, FreeWord>> nf;
  FreeWord carry(p.base_alphabet());
  for (int i = k; i >= 1; --i) {
    FreeWord h = kit.canonical(multiply(s.base[static_cast<size_t>(i)], carry));
    int sign = s.signs[static_cast<size_t>(i - 1)];
    FreeWord rep, image;
    if (sign == -1) {
      rep = kit.coset_representative_a(h);
      FreeWord c = kit.canonical(multiply(h, invert(rep)));
      auto expr = kit.membership_a(c);
      if (!expr) throw std::logic_error("coset representative out of contract (A side)");
      image = p.phi(*expr);
    } else {
      rep = kit.coset_representative_b(h);
      FreeWord c = kit.canonical(multiply(h, invert(rep)));
      auto expr = kit.membership_b(c);
      if (!expr) throw std::logic_error("coset representative out of contract (B side)");
      image = p.phi_inv(*expr);
    }
    if (!nf.empty() && nf.front().first == -sign && rep.empty()) {
      // t^{sign} 1 t^{-sign} cancels; its transversal word merges leftward.
      FreeWord absorbed = nf.front().second;
      nf.pop_front();
      carry = kit.canonical(multiply(image, absorbed));
    } else {
      nf.push_front({sign, rep});
      carry = image;
    }
  }
  HnnNormalForm out;
  out.head = kit.canonical(multiply(s.base[0], carry));
  out.syllables.assign(nf.begin(), nf.end());
  out.reduced = true;
  out.normal = true;
  return out;
}

std::pair<HnnNormalForm, FreeWord> cyc_reduce(const HnnPresentation& p, const FreeWord& w) {
  const BaseToolkit& kit = *p.toolkit();
  HnnNormalForm nf = normal_form(p, w);
  FreeWord x(p.alphabet());
  while (true) {
    int k = nf.length();
    if (k == 0) {
      const FreeWord& h = nf.head;
      if (kit.membership_a(h) || kit.membership_b(h)) break;
      if (auto cm = kit.conjugate_into_union(h)) {
        x = multiply(x, p.to_full(cm->conjugator));
        nf.head = kit.canonical(cm->element);
        break;
      }
      break;  // not conjugate into A u B
    }
    if (k == 1) break;
    int e1 = nf.syllables.front().first;
    int ek = nf.syllables.back().first;
    if (e1 == ek) break;
    FreeWord wrap = kit.canonical(multiply(nf.syllables.back().second, nf.head));
    bool collapse =
        ek == -1 ? kit.membership_a(wrap).has_value() : kit.membership_b(wrap).has_value();
    if (!collapse) break;
    // g* = t^{-e1} h^{-1} g h t^{e1}, two syllables shorter.
    FreeWord step = multiply(p.to_full(nf.head), p.stable_power(e1));
    x = multiply(x, step);
    FreeWord conjugated = multiply(multiply(invert(step), nf.to_word(p)), step);
    HnnNormalForm next = normal_form(p, conjugated);
    if (next.length() != k - 2) throw std::logic_error("cyclic reduction did not shorten");
    nf = next;
  }
  nf.cyclically_reduced = true;
  return {nf, x};
}

std::pair<HnnNormalForm, FreeWord> cyclic_permutation(const HnnPresentation& p,
                                                      const HnnNormalForm& nf, int i) {
  int k = nf.length();
  if (k == 0) throw std::invalid_argument("cyclic permutation of a length-0 form");
  if (i < 1 || i > k) throw std::invalid_argument("cyclic permutation index out of range");
  if (!nf.cyclically_reduced) throw std::invalid_argument("form is not cyclically reduced");
  // Rotations act on the spelling that ends with a stable letter: the cut
  // sits after t^{e_i}. The conjugating prefix is h0 p_1 ... p_{i-1} t^{e_i}
  // and the permutation reads s_i t^{e_{i+1}} ... s_k h0 t^{e_1} ... t^{e_i}.
  FreeWord prefix = p.to_full(nf.head);
  for (int j = 0; j + 1 < i; ++j) {
    prefix = multiply(prefix, p.stable_power(nf.syllables[static_cast<size_t>(j)].first));
    prefix = multiply(prefix, p.to_full(nf.syllables[static_cast<size_t>(j)].second));
  }
  prefix = multiply(prefix, p.stable_power(nf.syllables[static_cast<size_t>(i - 1)].first));
  FreeWord rotated = p.to_full(nf.syllables[static_cast<size_t>(i - 1)].second);
  for (int j = i; j < k; ++j) {
    rotated = multiply(rotated, p.stable_power(nf.syllables[static_cast<size_t>(j)].first));
    rotated = multiply(rotated, p.to_full(nf.syllables[static_cast<size_t>(j)].second));
  }
  rotated = multiply(rotated, prefix);
  HnnNormalForm out = normal_form(p, rotated);
  if (out.length() != k) throw std::logic_error("cyclic permutation changed the length");
  out.cyclically_reduced = true;
  return {out, prefix};
}

PrincipalSystem principal_system(const HnnNormalForm& g, const HnnNormalForm& gp) {
  if (g.length() != gp.length() || g.length() < 1)
    throw std::invalid_argument("principal system needs equal positive lengths");
  PrincipalSystem sys;
  sys.left_head = g.head;
  sys.right_head = gp.head;
  sys.left = g.syllables;
  sys.right = gp.syllables;
  return sys;
}

FreeBaseToolkit::FreeBaseToolkit(AlphabetPtr base, std::vector<FreeWord> a_generators,
                                 std::vector<FreeWord> b_generators)
    : base_(base),
      a_(SubgroupGraph::build(base, std::move(a_generators))),
      b_(SubgroupGraph::build(base, std::move(b_generators))) {}

FreeWord FreeBaseToolkit::canonical(const FreeWord& w) const {
  require_same_alphabet(w.alphabet(), base_);
  return w;
}

std::optional<Expression> FreeBaseToolkit::membership_a(const FreeWord& w) const {
  return a_.membership(w);
}

std::optional<Expression> FreeBaseToolkit::membership_b(const FreeWord& w) const {
  return b_.membership(w);
}

FreeWord FreeBaseToolkit::coset_representative_a(const FreeWord& w) const {
  return a_.coset_representative(w);
}

FreeWord FreeBaseToolkit::coset_representative_b(const FreeWord& w) const {
  return b_.coset_representative(w);
}

std::optional<CmspWitness> FreeBaseToolkit::conjugate_into_a(const FreeWord& w) const {
  if (auto hit = a_.conjugate_into(w)) return CmspWitness{hit->first, hit->second, 0};
  return std::nullopt;
}

std::optional<CmspWitness> FreeBaseToolkit::conjugate_into_b(const FreeWord& w) const {
  if (auto hit = b_.conjugate_into(w)) return CmspWitness{hit->first, hit->second, 1};
  return std::nullopt;
}

bool FreeBaseToolkit::normalizer_member(const FreeWord& w) const {
  return generalized_normalizer_member(a_, b_, w);
}

HnnPresentation make_free_base_hnn(const AlphabetPtr& base, std::string stable_name,
                                   std::vector<FreeWord> a_generators,
                                   std::vector<FreeWord> b_generators) {
  auto kit = std::make_shared<FreeBaseToolkit>(base, a_generators, b_generators);
  return HnnPresentation(kit, std::move(stable_name), std::move(a_generators),
                         std::move(b_generators));
}

namespace {

const FreeBaseToolkit& free_base(const HnnPresentation& p) {
  auto* kit = dynamic_cast<const FreeBaseToolkit*>(p.toolkit().get());
  if (!kit) throw std::invalid_argument("operation requires a free base group");
  return *kit;
}

CosetUnion whole_subgroup(const SubgroupGraph& g) {
  CosetUnion out;
  out.add({g, FreeWord(g.alphabet())});
  return out;
}

CosetUnion meet_subgroup(const CosetUnion& u, const SubgroupGraph& g) {
  CosetUnion out;
  FreeWord one(g.alphabet());
  for (const CosetComponent& c : u.components()) {
    CosetUnion met = coset_intersection(c.subgroup, c.representative, g, one);
    for (const CosetComponent& m : met.components()) out.add(m);
  }
  return out;
}

// Image of a union of cosets of subgroups of A under phi (direction = +1) or
// of subgroups of B under phi^{-1} (direction = -1).
CosetUnion map_iso(const HnnPresentation& p, const FreeBaseToolkit& kit, const CosetUnion& u,
                   int direction) {
  CosetUnion out;
  for (const CosetComponent& c : u.components()) {
    std::vector<FreeWord> gens;
    for (const FreeWord& g : c.subgroup.generators()) {
      auto expr = direction > 0 ? kit.membership_a(g) : kit.membership_b(g);
      if (!expr) throw std::logic_error("coset component escapes the associated subgroup");
      gens.push_back(direction > 0 ? p.phi(*expr) : p.phi_inv(*expr));
    }
    auto rex = direction > 0 ? kit.membership_a(c.representative)
                             : kit.membership_b(c.representative);
    if (!rex) throw std::logic_error("coset representative escapes the associated subgroup");
    FreeWord rep = direction > 0 ? p.phi(*rex) : p.phi_inv(*rex);
    out.add({SubgroupGraph::build(p.base_alphabet(), std::move(gens)), rep});
  }
  return out;
}

// left * (V w) * right as a union of cosets.
CosetUnion shift(const CosetUnion& u, const FreeWord& left, const FreeWord& right) {
  CosetUnion out;
  for (const CosetComponent& c : u.components()) {
    out.add({c.subgroup.conjugated(invert(left)),
             multiply(multiply(left, c.representative), right)});
  }
  return out;
}

// One backward step of the constraint chain: from the allowed set for c_j to
// the allowed set for c_{j-1} across the equation with syllable (sign, s, s').
// std::nullopt stands for the unconstrained set.
CosetUnion chain_step(const HnnPresentation& p, const FreeBaseToolkit& kit,
                      const std::optional<CosetUnion>& allowed, int sign, const FreeWord& s,
                      const FreeWord& sp) {
  if (sign == -1) {
    CosetUnion met = allowed ? meet_subgroup(*allowed, kit.graph_b())
                             : whole_subgroup(kit.graph_b());
    CosetUnion pre = map_iso(p, kit, met, -1);
    return shift(pre, invert(s), sp);
  }
  CosetUnion met = allowed ? meet_subgroup(*allowed, kit.graph_a())
                           : whole_subgroup(kit.graph_a());
  CosetUnion img = map_iso(p, kit, met, +1);
  return shift(img, invert(s), sp);
}

CosetUnion run_chain(const HnnPresentation& p, const FreeBaseToolkit& kit,
                     const PrincipalSystem& sys, std::optional<CosetUnion> allowed,
                     int length_cap) {
  int k = sys.length();
  if (k > length_cap)
    throw ResourceLimitError("principal system length " + std::to_string(k) +
                             " exceeds the configured cap " + std::to_string(length_cap));
  for (int m = 0; m < k; ++m) {
    if (sys.left[static_cast<size_t>(m)].first != sys.right[static_cast<size_t>(m)].first)
      return CosetUnion{};  // mismatched stable-letter exponents: no solutions
    allowed = chain_step(p, kit, allowed, sys.left[static_cast<size_t>(m)].first,
                         sys.left[static_cast<size_t>(m)].second,
                         sys.right[static_cast<size_t>(m)].second);
    if (allowed->empty()) return CosetUnion{};
  }
  return *allowed;
}

CosetUnion restrict_to_union(const FreeBaseToolkit& kit, const CosetUnion& u) {
  CosetUnion out;
  for (const SubgroupGraph* g : {&kit.graph_a(), &kit.graph_b()}) {
    CosetUnion met = meet_subgroup(u, *g);
    for (const CosetComponent& c : met.components()) out.add(c);
  }
  return out;
}

}  // namespace

CosetUnion solution_set(const HnnPresentation& p, const PrincipalSystem& sys, int length_cap) {
  const FreeBaseToolkit& kit = free_base(p);
  CosetUnion chain = run_chain(p, kit, sys, std::nullopt, length_cap);
  if (chain.empty()) return chain;
  return restrict_to_union(kit, chain);
}

bool is_regular(const HnnPresentation& p, const FreeWord& w, int length_cap) {
  const FreeBaseToolkit& kit = free_base(p);
  HnnNormalForm nf = normal_form(p, w);
  if (nf.length() == 0) return !kit.normalizer_member(nf.head);
  // Closing condition h c_k h^{-1} in A u B seeds the backward chain.
  CosetUnion closing;
  closing.add({kit.graph_a().conjugated(nf.head), FreeWord(p.base_alphabet())});
  closing.add({kit.graph_b().conjugated(nf.head), FreeWord(p.base_alphabet())});
  PrincipalSystem sys = principal_system(nf, nf);
  CosetUnion chain = run_chain(p, kit, sys, closing, length_cap);
  if (chain.empty()) return true;
  CosetUnion solutions = restrict_to_union(kit, chain);
  for (const CosetComponent& c : solutions.components()) {
    if (!c.subgroup.trivial() || !c.representative.empty()) return false;
  }
  return true;
}

namespace {

bool in_union(const BaseToolkit& kit, const FreeWord& h) {
  return kit.membership_a(h).has_value() || kit.membership_b(h).has_value();
}

// Forward chain map of the principal system: x -> phi^{+-}(s_m x s'_m^{-1})
// applied for m = k..1. With `diagonal` set, the right conjugator equals the
// left one; that variant is the group homomorphism acting on the subgroup
// part of a solution component. Returns nullopt if a membership fails.
std::optional<FreeWord> chain_forward(const HnnPresentation& p, const BaseToolkit& kit,
                                      const PrincipalSystem& sys, const FreeWord& x0,
                                      bool diagonal) {
  FreeWord x = x0;
  for (int m = sys.length() - 1; m >= 0; --m) {
    int sign = sys.left[static_cast<size_t>(m)].first;
    const FreeWord& s = sys.left[static_cast<size_t>(m)].second;
    const FreeWord& sp =
        diagonal ? sys.left[static_cast<size_t>(m)].second : sys.right[static_cast<size_t>(m)].second;
    FreeWord y = kit.canonical(multiply(multiply(s, x), invert(sp)));
    if (sign == -1) {
      auto expr = kit.membership_a(y);
      if (!expr) return std::nullopt;
      x = p.phi(*expr);
    } else {
      auto expr = kit.membership_b(y);
      if (!expr) return std::nullopt;
      x = p.phi_inv(*expr);
    }
  }
  return x;
}

HnnConjugacyResult verified_conjugate(const HnnPresentation& p, const FreeWord& g,
                                      const FreeWord& u, const FreeWord& x) {
  if (!(normal_form(p, conjugate(g, x)) == normal_form(p, u)))
    throw std::logic_error("conjugator failed verification");
  return {ConjugacyVerdict::Conjugate, x, ""};
}

}  // namespace

HnnConjugacyResult collins_case2_bounded(const HnnPresentation& p, const FreeWord& g,
                                         const FreeWord& gp, int max_chain) {
  const BaseToolkit& kit = *p.toolkit();
  FreeWord start = kit.canonical(p.to_base(g));
  FreeWord goal = kit.canonical(p.to_base(gp));
  if (!in_union(kit, start) || !in_union(kit, goal))
    throw std::invalid_argument("chain search requires elements of A u B");
  if (max_chain < 0) max_chain = 2 * (start.length() + goal.length() + 2);

  struct Node {
    FreeWord word;
    int depth;
  };
  std::map<std::string, std::pair<std::string, FreeWord>> parent;  // word -> (prev, move)
  std::deque<Node> queue;
  parent[start.str()] = {"", FreeWord(p.alphabet())};
  queue.push_back({start, 0});
  std::optional<FreeWord> reached;
  if (start == goal) reached = start;
  while (!reached && !queue.empty()) {
    Node node = queue.front();
    queue.pop_front();
    if (node.depth >= max_chain) continue;
    std::vector<std::pair<FreeWord, FreeWord>> moves;  // (target base word, conjugator)
    if (auto expr = kit.membership_a(node.word))
      moves.emplace_back(p.phi(*expr), p.stable_power(1));
    if (auto expr = kit.membership_b(node.word))
      moves.emplace_back(p.phi_inv(*expr), p.stable_power(-1));
    if (auto cm = kit.conjugate_into_a(node.word))
      moves.emplace_back(kit.canonical(cm->element), p.to_full(cm->conjugator));
    if (auto cm = kit.conjugate_into_b(node.word))
      moves.emplace_back(kit.canonical(cm->element), p.to_full(cm->conjugator));
    for (auto& [target, move] : moves) {
      std::string key = target.str();
      if (parent.contains(key)) continue;
      parent[key] = {node.word.str(), move};
      queue.push_back({target, node.depth + 1});
      if (target == goal) {
        reached = target;
        break;
      }
    }
  }
  if (!reached) return {ConjugacyVerdict::Unknown, FreeWord(p.alphabet()), "chain horizon exhausted"};

  FreeWord x(p.alphabet());
  std::vector<FreeWord> steps;
  std::string cur = reached->str();
  while (!cur.empty() && cur != start.str()) {
    auto& [prev, move] = parent[cur];
    steps.push_back(move);
    cur = prev;
  }
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) x = multiply(x, *it);
  return verified_conjugate(p, p.to_full(start), p.to_full(goal), x);
}

HnnConjugacyResult conjugacy_search_regular(const HnnPresentation& p, const FreeWord& g,
                                            const FreeWord& u, int length_cap, int max_chain) {
  const FreeBaseToolkit& kit = free_base(p);
  auto [gnf, xg] = cyc_reduce(p, g);
  auto [unf, xu] = cyc_reduce(p, u);

  if (gnf.length() == 0) {
    if (in_union(kit, gnf.head)) {
      // Singular branch: Collins case 1)/2) with a bounded chain search.
      if (unf.length() >= 1)
        return {ConjugacyVerdict::NotConjugate, FreeWord(p.alphabet()), "lengths differ"};
      if (!in_union(kit, unf.head))
        return {ConjugacyVerdict::NotConjugate, FreeWord(p.alphabet()),
                "one side lies in A u B, the other cannot be conjugated into it"};
      HnnConjugacyResult chain =
          collins_case2_bounded(p, p.to_full(gnf.head), p.to_full(unf.head), max_chain);
      if (chain.verdict != ConjugacyVerdict::Conjugate) return chain;
      FreeWord x = multiply(multiply(xg, chain.conjugator), invert(xu));
      return verified_conjugate(p, g, u, x);
    }
    if (kit.normalizer_member(gnf.head))
      throw std::invalid_argument("element is singular; conjugacy search not supported");
    if (unf.length() >= 1)
      return {ConjugacyVerdict::NotConjugate, FreeWord(p.alphabet()), "lengths differ"};
    auto x0 = free_conjugacy(gnf.head, unf.head);
    if (!x0)
      return {ConjugacyVerdict::NotConjugate, FreeWord(p.alphabet()), "not conjugate in the base"};
    FreeWord x = multiply(multiply(xg, p.to_full(*x0)), invert(xu));
    return verified_conjugate(p, g, u, x);
  }

  if (!is_regular(p, gnf.to_word(p), length_cap))
    throw std::invalid_argument("element is singular; conjugacy search not supported");
  if (unf.length() != gnf.length())
    return {ConjugacyVerdict::NotConjugate, FreeWord(p.alphabet()), "lengths differ"};

  // Shift g into the spelling that ends with a stable letter (conjugate by
  // the last transversal word); the conjugacy criterion relates that shape of
  // g to the cyclic permutations of u.
  FreeWord sigma = p.to_full(invert(gnf.syllables.back().second));
  HnnNormalForm gshift = normal_form(p, conjugate(gnf.to_word(p), sigma));
  if (gshift.length() != gnf.length()) throw std::logic_error("trailing shift changed length");
  gshift.cyclically_reduced = true;

  bool unresolved = false;
  std::vector<int> target = gshift.exponent_sequence();
  FreeWord gword = gshift.to_word(p);
  for (int i = 1; i <= unf.length(); ++i) {
    auto [pi, prefix] = cyclic_permutation(p, unf, i);
    if (pi.exponent_sequence() != target) continue;
    PrincipalSystem sys = principal_system(gshift, pi);
    CosetUnion sols = solution_set(p, sys, length_cap);
    auto matches = [&](const FreeWord& c) {
      return normal_form(p, conjugate(gword, p.to_full(c))) == pi;
    };
    std::optional<FreeWord> solution;
    for (const CosetComponent& comp : sols.components()) {
      const FreeWord& w = comp.representative;
      if (matches(w)) {
        solution = w;
        break;
      }
      if (comp.subgroup.trivial()) continue;
      SubgroupGraph basis_graph = comp.subgroup.intersect(comp.subgroup);
      const std::vector<FreeWord>& basis = basis_graph.generators();
      if (basis.size() == 1) {
        // On a cyclic component V w the twisted condition c = h Phi(c) h_pi^{-1}
        // turns into a power equation for c = v0^l w: Phi is homomorphic on the
        // V part and constant on w.
        auto image_v = chain_forward(p, kit, sys, basis[0], true);
        auto image_w = chain_forward(p, kit, sys, w, false);
        if (!image_v || !image_w) {
          unresolved = true;
          continue;
        }
        const FreeWord& h = gshift.head;
        FreeWord big_k = multiply(multiply(*image_w, invert(pi.head)), invert(w));
        FreeWord a = invert(basis[0]);
        FreeWord b = multiply(multiply(h, *image_v), invert(h));
        FreeWord d = invert(multiply(h, big_k));
        PowerSolution ps = solve_power_equation(a, b, d);
        if (ps.tag == PowerSolution::Tag::Unique) {
          FreeWord c = multiply(power(basis[0], ps.exponent), w);
          if (matches(c)) {
            solution = c;
            break;
          }
        }
        // AllIntegers implies l = 0 works, which the representative covered.
      } else {
        // Bounded sweep over products of the component's basis.
        int cap = 2 * (gword.length() + pi.to_word(p).length()) + 8;
        std::set<std::string> seen;
        std::deque<FreeWord> queue;
        queue.emplace_back(p.base_alphabet());
        seen.insert(queue.back().str());
        bool found = false;
        int visited = 0;
        while (!queue.empty() && visited < 20000 && !found) {
          FreeWord v = queue.front();
          queue.pop_front();
          ++visited;
          for (const FreeWord& gen : basis) {
            for (const FreeWord& f : {gen, invert(gen)}) {
              FreeWord nv = multiply(v, f);
              if (nv.length() > cap || !seen.insert(nv.str()).second) continue;
              FreeWord c = multiply(nv, w);
              if (matches(c)) {
                solution = c;
                found = true;
                break;
              }
              queue.push_back(nv);
            }
            if (found) break;
          }
        }
        if (!found) unresolved = true;
      }
    }
    if (solution) {
      FreeWord x = multiply(
          multiply(multiply(multiply(xg, sigma), p.to_full(*solution)), invert(prefix)),
          invert(xu));
      return verified_conjugate(p, g, u, x);
    }
  }
  if (unresolved)
    return {ConjugacyVerdict::Unknown, FreeWord(p.alphabet()),
            "a solution component could not be exhausted"};
  return {ConjugacyVerdict::NotConjugate, FreeWord(p.alphabet()), "no cyclic permutation matches"};
}

}  // namespace cgt
