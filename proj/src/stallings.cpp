#include "cgt/stallings.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace cgt {

namespace {

int dir_of(int letter) { return 2 * (std::abs(letter) - 1) + (letter < 0 ? 1 : 0); }

Expression concat_reduce(const Expression& a, const Expression& b) {
  Expression out = a;
  for (int l : b) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

}  // namespace

Expression reduce_expression(Expression raw) {
  Expression out;
  for (int l : raw) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Expression invert_expression(const Expression& e) {
  Expression out(e.rbegin(), e.rend());
  for (int& l : out) l = -l;
  return out;
}

namespace {

// Mutable graph used only during folding. Darts come in reverse pairs
// (id ^ 1); each dart carries the expression contributed when traversed, and
// reverse darts keep mutually inverse expressions.
struct Workspace {
  struct Dart {
    int src = -1, dst = -1, letter = 0;
    Expression tag;
    bool alive = true;
  };
  std::vector<Dart> darts;
  std::vector<std::vector<int>> out;  // candidate dart ids per source vertex

  int new_vertex() {
    out.emplace_back();
    return static_cast<int>(out.size()) - 1;
  }

  void add_edge(int src, int dst, int letter, Expression tag) {
    int id = static_cast<int>(darts.size());
    darts.push_back({src, dst, letter, tag, true});
    darts.push_back({dst, src, -letter, invert_expression(tag), true});
    out[static_cast<size_t>(src)].push_back(id);
    out[static_cast<size_t>(dst)].push_back(id + 1);
  }

  void kill(int id) {
    darts[static_cast<size_t>(id)].alive = false;
    darts[static_cast<size_t>(id ^ 1)].alive = false;
  }

  void fold(int d1, int d2, int base) {
    int v1 = darts[static_cast<size_t>(d1)].dst;
    int v2 = darts[static_cast<size_t>(d2)].dst;
    if (v1 == v2) {
      kill(d2);
      return;
    }
    if (v2 == base) {
      std::swap(d1, d2);
      std::swap(v1, v2);
    }
    // Any visit to v2 can be rerouted through the detour d1^{-1} d2, which
    // reads the empty word and outputs this correction.
    Expression detour = concat_reduce(invert_expression(darts[static_cast<size_t>(d1)].tag),
                                      darts[static_cast<size_t>(d2)].tag);
    Expression detour_inv = invert_expression(detour);
    kill(d2);
    std::vector<int> moved;
    for (int id : out[static_cast<size_t>(v2)]) {
      Dart& q = darts[static_cast<size_t>(id)];
      if (q.alive && q.src == v2) moved.push_back(id);
    }
    for (int id : moved) {
      Dart& q = darts[static_cast<size_t>(id)];
      Dart& qr = darts[static_cast<size_t>(id ^ 1)];
      q.tag = concat_reduce(detour, q.tag);
      qr.tag = concat_reduce(qr.tag, detour_inv);
    }
    for (int id : moved) {
      darts[static_cast<size_t>(id)].src = v1;
      darts[static_cast<size_t>(id ^ 1)].dst = v1;
      out[static_cast<size_t>(v1)].push_back(id);
    }
    out[static_cast<size_t>(v2)].clear();
  }

  void fold_to_fixpoint(int base) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int v = 0; v < static_cast<int>(out.size()); ++v) {
        bool local = true;
        while (local) {
          local = false;
          std::map<int, int> seen;  // letter -> dart id
          for (int id : out[static_cast<size_t>(v)]) {
            const Dart& q = darts[static_cast<size_t>(id)];
            if (!q.alive || q.src != v) continue;
            auto [it, fresh] = seen.emplace(q.letter, id);
            if (!fresh) {
              fold(it->second, id, base);
              local = true;
              changed = true;
              break;
            }
          }
        }
      }
    }
  }

  void prune(int base) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int v = 0; v < static_cast<int>(out.size()); ++v) {
        if (v == base) continue;
        int degree = 0;
        int last = -1;
        for (int id : out[static_cast<size_t>(v)]) {
          const Dart& q = darts[static_cast<size_t>(id)];
          if (q.alive && q.src == v) {
            ++degree;
            last = id;
          }
        }
        if (degree == 1) {
          kill(last);
          changed = true;
        }
      }
    }
  }
};

}  // namespace

SubgroupGraph SubgroupGraph::build(AlphabetPtr alphabet, std::vector<FreeWord> generators) {
  if (!alphabet) throw std::invalid_argument("null alphabet");
  for (FreeWord& g : generators) require_same_alphabet(g.alphabet(), alphabet);

  Workspace ws;
  int base = ws.new_vertex();
  for (int i = 0; i < static_cast<int>(generators.size()); ++i) {
    const FreeWord& g = generators[static_cast<size_t>(i)];
    if (g.empty()) continue;
    int prev = base;
    for (int j = 0; j < g.length(); ++j) {
      int target = (j + 1 == g.length()) ? base : ws.new_vertex();
      Expression tag = (j == 0) ? Expression{i + 1} : Expression{};
      int letter = g.letter(j);
      if (letter > 0) {
        ws.add_edge(prev, target, letter, tag);
      } else {
        ws.add_edge(target, prev, -letter, invert_expression(tag));
      }
      prev = target;
    }
  }
  ws.fold_to_fixpoint(base);
  ws.prune(base);

  SubgroupGraph g;
  g.alphabet_ = alphabet;
  g.generators_ = std::move(generators);
  int dirs = 2 * alphabet->rank();
  std::vector<int> remap(ws.out.size(), -1);
  std::deque<int> queue;
  remap[static_cast<size_t>(base)] = 0;
  g.next_.emplace_back(static_cast<size_t>(dirs), -1);
  g.tag_.emplace_back(static_cast<size_t>(dirs));
  queue.push_back(base);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int id : ws.out[static_cast<size_t>(v)]) {
      const Workspace::Dart& q = ws.darts[static_cast<size_t>(id)];
      if (!q.alive || q.src != v) continue;
      if (remap[static_cast<size_t>(q.dst)] < 0) {
        remap[static_cast<size_t>(q.dst)] = static_cast<int>(g.next_.size());
        g.next_.emplace_back(static_cast<size_t>(dirs), -1);
        g.tag_.emplace_back(static_cast<size_t>(dirs));
        queue.push_back(q.dst);
      }
      int cv = remap[static_cast<size_t>(v)];
      int cw = remap[static_cast<size_t>(q.dst)];
      g.next_[static_cast<size_t>(cv)][static_cast<size_t>(dir_of(q.letter))] = cw;
      g.tag_[static_cast<size_t>(cv)][static_cast<size_t>(dir_of(q.letter))] = q.tag;
    }
  }
  g.base_ = 0;
  g.finalize_tree();
  return g;
}

SubgroupGraph SubgroupGraph::from_raw(AlphabetPtr alphabet, int base,
                                      std::vector<std::vector<int>> next) {
  int dirs = 2 * alphabet->rank();
  // Core pruning: repeatedly delete degree-<=1 vertices other than the base.
  std::vector<bool> dead(next.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < static_cast<int>(next.size()); ++v) {
      if (v == base || dead[static_cast<size_t>(v)]) continue;
      int degree = 0;
      for (int d = 0; d < dirs; ++d) {
        int w = next[static_cast<size_t>(v)][static_cast<size_t>(d)];
        if (w >= 0 && !dead[static_cast<size_t>(w)]) ++degree;
      }
      if (degree <= 1) {
        dead[static_cast<size_t>(v)] = true;
        changed = true;
      }
    }
  }
  // Cut transitions into dead vertices.
  for (int v = 0; v < static_cast<int>(next.size()); ++v) {
    for (int d = 0; d < dirs; ++d) {
      int& w = next[static_cast<size_t>(v)][static_cast<size_t>(d)];
      if (w >= 0 && dead[static_cast<size_t>(w)]) w = -1;
    }
  }

  SubgroupGraph g;
  g.alphabet_ = alphabet;
  std::vector<int> remap(next.size(), -1);
  std::deque<int> queue;
  remap[static_cast<size_t>(base)] = 0;
  g.next_.emplace_back(static_cast<size_t>(dirs), -1);
  queue.push_back(base);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int d = 0; d < dirs; ++d) {
      int w = next[static_cast<size_t>(v)][static_cast<size_t>(d)];
      if (w < 0) continue;
      if (remap[static_cast<size_t>(w)] < 0) {
        remap[static_cast<size_t>(w)] = static_cast<int>(g.next_.size());
        g.next_.emplace_back(static_cast<size_t>(dirs), -1);
        queue.push_back(w);
      }
      g.next_[static_cast<size_t>(remap[static_cast<size_t>(v)])][static_cast<size_t>(d)] =
          remap[static_cast<size_t>(w)];
    }
  }
  g.base_ = 0;
  g.finalize_tree();

  // Derive a free basis from the spanning tree and attach single-letter
  // expressions, so membership witnesses work on intersection graphs too.
  g.tag_.assign(g.next_.size(), std::vector<Expression>(static_cast<size_t>(dirs)));
  std::vector<std::vector<bool>> in_tree(g.next_.size(),
                                         std::vector<bool>(static_cast<size_t>(dirs), false));
  for (int v = 0; v < static_cast<int>(g.next_.size()); ++v) {
    if (v == g.base_) continue;
    int pl = g.parent_letter_[static_cast<size_t>(v)];
    int pv = g.parent_[static_cast<size_t>(v)];
    in_tree[static_cast<size_t>(pv)][static_cast<size_t>(dir_of(pl))] = true;
    in_tree[static_cast<size_t>(v)][static_cast<size_t>(dir_of(-pl))] = true;
  }
  for (int v : g.bfs_order_) {
    for (int gen = 1; gen <= g.alphabet_->rank(); ++gen) {
      int d = dir_of(gen);
      int w = g.next_[static_cast<size_t>(v)][static_cast<size_t>(d)];
      if (w < 0 || in_tree[static_cast<size_t>(v)][static_cast<size_t>(d)]) continue;
      FreeWord word = multiply(multiply(g.tree_word(v), FreeWord(alphabet, {gen})),
                               invert(g.tree_word(w)));
      g.generators_.push_back(word);
      int idx = static_cast<int>(g.generators_.size());
      g.tag_[static_cast<size_t>(v)][static_cast<size_t>(d)] = {idx};
      g.tag_[static_cast<size_t>(w)][static_cast<size_t>(dir_of(-gen))] = {-idx};
    }
  }
  return g;
}

void SubgroupGraph::finalize_tree() {
  int n = static_cast<int>(next_.size());
  parent_.assign(static_cast<size_t>(n), -1);
  parent_letter_.assign(static_cast<size_t>(n), 0);
  bfs_order_.clear();
  std::vector<bool> seen(static_cast<size_t>(n), false);
  std::deque<int> queue;
  seen[static_cast<size_t>(base_)] = true;
  queue.push_back(base_);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    bfs_order_.push_back(v);
    for (int gen = 1; gen <= alphabet_->rank(); ++gen) {
      for (int letter : {gen, -gen}) {
        int w = next_[static_cast<size_t>(v)][static_cast<size_t>(dir_of(letter))];
        if (w >= 0 && !seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = true;
          parent_[static_cast<size_t>(w)] = v;
          parent_letter_[static_cast<size_t>(w)] = letter;
          queue.push_back(w);
        }
      }
    }
  }
}

int SubgroupGraph::step(int v, int letter) const {
  return next_[static_cast<size_t>(v)][static_cast<size_t>(dir_of(letter))];
}

FreeWord SubgroupGraph::tree_word(int v) const {
  std::vector<int> letters;
  while (v != base_) {
    letters.push_back(parent_letter_[static_cast<size_t>(v)]);
    v = parent_[static_cast<size_t>(v)];
  }
  std::reverse(letters.begin(), letters.end());
  return FreeWord(alphabet_, std::move(letters));
}

int SubgroupGraph::rank() const {
  int edges = 0;
  for (const auto& row : next_)
    for (int w : row)
      if (w >= 0) ++edges;
  edges /= 2;  // each edge seen from both endpoints
  return edges - (static_cast<int>(next_.size()) - 1);
}

bool SubgroupGraph::accepts(const FreeWord& w) const {
  require_same_alphabet(w.alphabet(), alphabet_);
  int v = base_;
  for (int l : w.letters()) {
    v = step(v, l);
    if (v < 0) return false;
  }
  return v == base_;
}

std::optional<Expression> SubgroupGraph::membership(const FreeWord& w) const {
  require_same_alphabet(w.alphabet(), alphabet_);
  int v = base_;
  Expression expr;
  for (int l : w.letters()) {
    int nv = step(v, l);
    if (nv < 0) return std::nullopt;
    expr = concat_reduce(expr, tag_[static_cast<size_t>(v)][static_cast<size_t>(dir_of(l))]);
    v = nv;
  }
  if (v != base_) return std::nullopt;
  return expr;
}

FreeWord SubgroupGraph::evaluate(const Expression& e) const {
  FreeWord out(alphabet_);
  for (int l : e) {
    const FreeWord& gen = generators_.at(static_cast<size_t>(std::abs(l) - 1));
    out = multiply(out, l > 0 ? gen : invert(gen));
  }
  return out;
}

FreeWord SubgroupGraph::coset_representative(const FreeWord& w) const {
  require_same_alphabet(w.alphabet(), alphabet_);
  int v = base_;
  int i = 0;
  while (i < w.length()) {
    int nv = step(v, w.letter(i));
    if (nv < 0) break;
    v = nv;
    ++i;
  }
  return multiply(tree_word(v), w.subword(i, w.length()));
}

std::optional<std::pair<FreeWord, FreeWord>> SubgroupGraph::conjugate_into(
    const FreeWord& g) const {
  require_same_alphabet(g.alphabet(), alphabet_);
  auto [core, x0] = cyclic_reduce(g);
  if (core.empty()) return std::make_pair(x0, FreeWord(alphabet_));
  // A conjugate of a cyclically reduced word lies in the subgroup exactly
  // when the word reads a closed path at some vertex of the core.
  for (int v : bfs_order_) {
    int u = v;
    bool ok = true;
    for (int l : core.letters()) {
      u = step(u, l);
      if (u < 0) {
        ok = false;
        break;
      }
    }
    if (ok && u == v) {
      FreeWord tv = tree_word(v);
      FreeWord a = multiply(multiply(tv, core), invert(tv));
      FreeWord x = multiply(invert(x0), invert(tv));
      return std::make_pair(x, a);
    }
  }
  return std::nullopt;
}

SubgroupGraph SubgroupGraph::intersect(const SubgroupGraph& other) const {
  require_same_alphabet(alphabet_, other.alphabet_);
  int dirs = 2 * alphabet_->rank();
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> states;
  std::vector<std::vector<int>> next;
  auto intern = [&](int a, int b) {
    auto [it, fresh] = index.emplace(std::make_pair(a, b), static_cast<int>(states.size()));
    if (fresh) {
      states.emplace_back(a, b);
      next.emplace_back(static_cast<size_t>(dirs), -1);
    }
    return it->second;
  };
  int start = intern(base_, other.base_);
  for (int i = 0; i < static_cast<int>(states.size()); ++i) {
    auto [a, b] = states[static_cast<size_t>(i)];
    for (int gen = 1; gen <= alphabet_->rank(); ++gen) {
      for (int letter : {gen, -gen}) {
        int na = step(a, letter);
        int nb = other.step(b, letter);
        if (na < 0 || nb < 0) continue;
        next[static_cast<size_t>(i)][static_cast<size_t>(dir_of(letter))] = intern(na, nb);
      }
    }
  }
  return from_raw(alphabet_, start, std::move(next));
}

SubgroupGraph SubgroupGraph::conjugated(const FreeWord& x) const {
  std::vector<FreeWord> gens;
  gens.reserve(generators_.size());
  for (const FreeWord& g : generators_) gens.push_back(conjugate(g, x));
  return build(alphabet_, std::move(gens));
}

CosetUnion coset_intersection(const SubgroupGraph& g1, const FreeWord& h1,
                              const SubgroupGraph& g2, const FreeWord& h2) {
  require_same_alphabet(g1.alphabet(), g2.alphabet());
  require_same_alphabet(h1.alphabet(), g1.alphabet());
  require_same_alphabet(h2.alphabet(), g2.alphabet());
  const AlphabetPtr& alpha = g1.alphabet();
  FreeWord h = multiply(h2, invert(h1));

  // State of h in the covering of g2: vertex after the longest readable
  // prefix plus the unread suffix. Membership in the coset g2 h is equality
  // of these states.
  int v2s = g2.base();
  int consumed = 0;
  while (consumed < h.length()) {
    int nv = g2.step(v2s, h.letter(consumed));
    if (nv < 0) break;
    v2s = nv;
    ++consumed;
  }
  FreeWord suffix = h.subword(consumed, h.length());

  // Looking for u = u'' o suffix with u a base loop of g1 and u'' read by g2
  // into v2s. The suffix fixes the g1-vertex that u'' must reach.
  int p = g1.base();
  if (!suffix.empty()) {
    FreeWord back = invert(suffix);
    for (int l : back.letters()) {
      p = g1.step(p, l);
      if (p < 0) return CosetUnion{};
    }
  }
  int forbidden_last = suffix.empty() ? 0 : -suffix.letter(0);

  // BFS over (vertex1, vertex2, last letter) keeps the candidate word
  // reduced, including across the junction with the suffix.
  int rank = alpha->rank();
  auto is_target = [&](int a, int b, int last) {
    if (suffix.empty()) return a == g1.base() && b == v2s;
    return a == p && b == v2s && last != forbidden_last;
  };
  using Key = std::tuple<int, int, int>;
  std::map<Key, std::pair<Key, int>> parent;
  std::deque<Key> queue;
  Key start{g1.base(), g2.base(), 0};
  parent[start] = {Key{-1, -1, -1}, 0};
  queue.push_back(start);
  std::optional<Key> found;
  if (is_target(g1.base(), g2.base(), 0)) found = start;
  while (!found && !queue.empty()) {
    auto [a, b, last] = queue.front();
    queue.pop_front();
    for (int gen = 1; gen <= rank && !found; ++gen) {
      for (int letter : {gen, -gen}) {
        if (letter == -last) continue;
        int na = g1.step(a, letter);
        int nb = g2.step(b, letter);
        if (na < 0 || nb < 0) continue;
        Key key{na, nb, letter};
        if (parent.contains(key)) continue;
        parent[key] = {Key{a, b, last}, letter};
        queue.push_back(key);
        if (is_target(na, nb, letter)) {
          found = key;
          break;
        }
      }
    }
  }
  if (!found) return CosetUnion{};

  std::vector<int> letters;
  Key cur = *found;
  while (true) {
    auto [prev, letter] = parent[cur];
    if (std::get<0>(prev) < 0) break;
    letters.push_back(letter);
    cur = prev;
  }
  std::reverse(letters.begin(), letters.end());
  FreeWord u = multiply(FreeWord(alpha, std::move(letters)), suffix);
  FreeWord w0 = multiply(u, h1);
  SubgroupGraph meet = g1.intersect(g2);
  FreeWord rep = meet.coset_representative(w0);
  CosetUnion out;
  out.add({std::move(meet), std::move(rep)});
  return out;
}

Cardinality cardinality(const CosetUnion& u) {
  if (u.empty()) return {Cardinality::Tag::Empty, {}};
  for (const CosetComponent& c : u.components()) {
    if (!c.subgroup.trivial()) return {Cardinality::Tag::Infinite, {}};
  }
  std::set<std::string> seen;
  std::vector<FreeWord> elems;
  for (const CosetComponent& c : u.components()) {
    if (seen.insert(c.representative.str()).second) elems.push_back(c.representative);
  }
  return {Cardinality::Tag::Finite, std::move(elems)};
}

bool generalized_normalizer_member(const SubgroupGraph& a, const SubgroupGraph& b,
                                   const FreeWord& g) {
  SubgroupGraph ag = a.conjugated(g);
  SubgroupGraph bg = b.conjugated(g);
  for (const SubgroupGraph* left : {&ag, &bg}) {
    for (const SubgroupGraph* right : {&a, &b}) {
      if (!left->intersect(*right).trivial()) return true;
    }
  }
  return false;
}

}  // namespace cgt
