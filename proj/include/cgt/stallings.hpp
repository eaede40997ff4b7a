#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cgt/fgword.hpp"

namespace cgt {

// Word in the generators of a subgroup: signed 1-based indices into its
// generator list.
using Expression = std::vector<int>;

Expression reduce_expression(Expression raw);
Expression invert_expression(const Expression& e);

// Folded core graph of a finitely generated subgroup of a free group. The
// graph is deterministic (no vertex has two equally-labeled edges on the same
// side), every non-base vertex has degree >= 2, and each directed edge carries
// an expression in the subgroup's generators so that membership witnesses can
// be read off while tracing a word. Immutable once built; queries are pure.
class SubgroupGraph {
 public:
  // Folds the wedge of generator loops. Accepts redundant or trivial
  // generators; expressions returned by membership() index this list.
  static SubgroupGraph build(AlphabetPtr alphabet, std::vector<FreeWord> generators);

  const AlphabetPtr& alphabet() const { return alphabet_; }
  const std::vector<FreeWord>& generators() const { return generators_; }
  int vertex_count() const { return static_cast<int>(next_.size()); }
  // Rank of the subgroup (number of edges outside a spanning tree).
  int rank() const;
  bool trivial() const { return rank() == 0; }

  bool accepts(const FreeWord& w) const;
  // Present iff w is in the subgroup; the expression evaluates back to w.
  std::optional<Expression> membership(const FreeWord& w) const;
  FreeWord evaluate(const Expression& e) const;

  // Canonical right-coset representative: tree word of the vertex reached by
  // the longest readable prefix, followed by the unread suffix. Members map
  // to the empty word; r is idempotent and constant on cosets.
  FreeWord coset_representative(const FreeWord& w) const;

  // Conjugacy membership: some x with x^{-1} g x = a, a in the subgroup.
  std::optional<std::pair<FreeWord, FreeWord>> conjugate_into(const FreeWord& g) const;

  // Pullback (product) graph, rebased at the pair of base vertices.
  SubgroupGraph intersect(const SubgroupGraph& other) const;
  // Subgroup generated by x^{-1} g_i x.
  SubgroupGraph conjugated(const FreeWord& x) const;

  // Transition: vertex reached from v by one letter, -1 if undefined.
  int step(int v, int letter) const;
  int base() const { return base_; }
  FreeWord tree_word(int v) const;

 private:
  SubgroupGraph() = default;
  static SubgroupGraph from_raw(AlphabetPtr alphabet, int base,
                                std::vector<std::vector<int>> next);
  void finalize_tree();

  AlphabetPtr alphabet_;
  std::vector<std::vector<int>> next_;        // [v][dir]
  std::vector<std::vector<Expression>> tag_;  // [v][dir], parallel to next_
  std::vector<FreeWord> generators_;
  int base_ = 0;
  std::vector<int> parent_;
  std::vector<int> parent_letter_;
  std::vector<int> bfs_order_;
};

struct CosetComponent {
  SubgroupGraph subgroup;
  FreeWord representative;
};

// Finite union of cosets (H1 cap ... cap Hr) h. Representatives are kept
// reduced; an empty component list denotes the empty set.
class CosetUnion {
 public:
  CosetUnion() = default;
  explicit CosetUnion(std::vector<CosetComponent> components)
      : components_(std::move(components)) {}
  const std::vector<CosetComponent>& components() const { return components_; }
  bool empty() const { return components_.empty(); }
  void add(CosetComponent c) { components_.push_back(std::move(c)); }

 private:
  std::vector<CosetComponent> components_;
};

struct Cardinality {
  enum class Tag { Empty, Finite, Infinite };
  Tag tag = Tag::Empty;
  std::vector<FreeWord> elements;  // populated in the Finite case
};

// G1 h1 cap G2 h2: empty or a single coset (G1 cap G2) h with h in both
// cosets.
CosetUnion coset_intersection(const SubgroupGraph& g1, const FreeWord& h1,
                              const SubgroupGraph& g2, const FreeWord& h2);

Cardinality cardinality(const CosetUnion& u);

// Membership in N*(C) = { g : C^g cap C != 1 } for C = A u B.
bool generalized_normalizer_member(const SubgroupGraph& a, const SubgroupGraph& b,
                                   const FreeWord& g);

}  // namespace cgt
