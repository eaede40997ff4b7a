#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgt/fgword.hpp"
#include "cgt/stallings.hpp"

namespace cgt {

// Witness for conjugacy membership into an associated subgroup:
// canonical(conjugator^{-1} g conjugator) = element, element in the factor.
struct CmspWitness {
  FreeWord conjugator;
  FreeWord element;
  int factor = 0;  // 0 = A, 1 = B
};

// Capability bundle the base group must provide: word problem, membership
// with rewriting (SMP), coset representatives against fixed transversals
// (CRSP), conjugacy membership into A u B (CMSP), and membership in the
// generalized normalizer N*(A u B). Implementations must be pure/read-only.
class BaseToolkit {
 public:
  virtual ~BaseToolkit() = default;

  virtual const AlphabetPtr& alphabet() const = 0;
  // Canonical word for the base-group element represented by w.
  virtual FreeWord canonical(const FreeWord& w) const = 0;
  virtual std::optional<Expression> membership_a(const FreeWord& w) const = 0;
  virtual std::optional<Expression> membership_b(const FreeWord& w) const = 0;
  virtual FreeWord coset_representative_a(const FreeWord& w) const = 0;
  virtual FreeWord coset_representative_b(const FreeWord& w) const = 0;
  virtual std::optional<CmspWitness> conjugate_into_a(const FreeWord& w) const = 0;
  virtual std::optional<CmspWitness> conjugate_into_b(const FreeWord& w) const = 0;
  virtual bool normalizer_member(const FreeWord& w) const = 0;

  bool equal(const FreeWord& u, const FreeWord& v) const { return canonical(u) == canonical(v); }
  bool is_identity(const FreeWord& w) const { return canonical(w).empty(); }
  std::optional<CmspWitness> conjugate_into_union(const FreeWord& w) const {
    if (auto a = conjugate_into_a(w)) return a;
    return conjugate_into_b(w);
  }
};

// Single-stable-letter presentation <H, t | t^{-1} U_i t = V_i>. Words of the
// whole group live over the base alphabet extended by the stable letter.
class HnnPresentation {
 public:
  HnnPresentation(std::shared_ptr<const BaseToolkit> toolkit, std::string stable_name,
                  std::vector<FreeWord> a_generators, std::vector<FreeWord> b_generators);

  const std::shared_ptr<const BaseToolkit>& toolkit() const { return toolkit_; }
  const AlphabetPtr& base_alphabet() const { return toolkit_->alphabet(); }
  const AlphabetPtr& alphabet() const { return full_; }
  // Positive letter code of the stable letter in alphabet().
  int stable_letter() const { return stable_; }
  const std::vector<FreeWord>& a_generators() const { return a_gens_; }
  const std::vector<FreeWord>& b_generators() const { return b_gens_; }

  // phi / phi^{-1} on elements given as expressions in the generators of the
  // corresponding associated subgroup.
  FreeWord phi(const Expression& a_expression) const;
  FreeWord phi_inv(const Expression& b_expression) const;

  FreeWord to_base(const FreeWord& w) const;  // w must not contain the stable letter
  FreeWord to_full(const FreeWord& base_word) const;
  FreeWord stable_power(int sign) const;  // t or t^{-1}

 private:
  std::shared_ptr<const BaseToolkit> toolkit_;
  AlphabetPtr full_;
  int stable_;
  std::vector<FreeWord> a_gens_;
  std::vector<FreeWord> b_gens_;
};

// h0 t^{e1} h1 ... t^{ek} hk with base words kept canonical. `reduced` means
// pinch-free, `normal` additionally has every h_i (i >= 1) in the fixed
// transversal, `cyclically_reduced` as usual.
struct HnnNormalForm {
  FreeWord head;
  std::vector<std::pair<int, FreeWord>> syllables;
  bool reduced = false;
  bool normal = false;
  bool cyclically_reduced = false;

  int length() const { return static_cast<int>(syllables.size()); }
  bool operator==(const HnnNormalForm& other) const {
    return head == other.head && syllables == other.syllables;
  }
  FreeWord to_word(const HnnPresentation& p) const;
  std::vector<int> exponent_sequence() const;
};

// Pinch removal, leftmost pinch first.
HnnNormalForm reduce_form(const HnnPresentation& p, const FreeWord& w);
// Rightmost-first rewriting into the unique normal form.
HnnNormalForm normal_form(const HnnPresentation& p, const FreeWord& w);
// Cyclically reduced normal form and a conjugator x with
// result = normal_form(x^{-1} w x).
std::pair<HnnNormalForm, FreeWord> cyc_reduce(const HnnPresentation& p, const FreeWord& w);
// i-th cyclic permutation (1-based; i = length gives the original element)
// together with the conjugating prefix h0 p_1 ... p_i.
std::pair<HnnNormalForm, FreeWord> cyclic_permutation(const HnnPresentation& p,
                                                      const HnnNormalForm& nf, int i);

// Constants of the system of equations attached to g c = c' g' for equal
// length normal forms.
struct PrincipalSystem {
  FreeWord left_head, right_head;
  std::vector<std::pair<int, FreeWord>> left, right;
  int length() const { return static_cast<int>(left.size()); }
};
PrincipalSystem principal_system(const HnnNormalForm& g, const HnnNormalForm& gp);

// Free base group behind the toolkit interface: membership, transversals and
// conjugacy through subgroup graphs.
class FreeBaseToolkit final : public BaseToolkit {
 public:
  FreeBaseToolkit(AlphabetPtr base, std::vector<FreeWord> a_generators,
                  std::vector<FreeWord> b_generators);

  const AlphabetPtr& alphabet() const override { return base_; }
  FreeWord canonical(const FreeWord& w) const override;
  std::optional<Expression> membership_a(const FreeWord& w) const override;
  std::optional<Expression> membership_b(const FreeWord& w) const override;
  FreeWord coset_representative_a(const FreeWord& w) const override;
  FreeWord coset_representative_b(const FreeWord& w) const override;
  std::optional<CmspWitness> conjugate_into_a(const FreeWord& w) const override;
  std::optional<CmspWitness> conjugate_into_b(const FreeWord& w) const override;
  bool normalizer_member(const FreeWord& w) const override;

  const SubgroupGraph& graph_a() const { return a_; }
  const SubgroupGraph& graph_b() const { return b_; }

 private:
  AlphabetPtr base_;
  SubgroupGraph a_;
  SubgroupGraph b_;
};

HnnPresentation make_free_base_hnn(const AlphabetPtr& base, std::string stable_name,
                                   std::vector<FreeWord> a_generators,
                                   std::vector<FreeWord> b_generators);

// Set of c in C for which the principal system has a solution, as a finite
// union of cosets. Free-base presentations only; `length_cap` bounds the
// number of chained equations.
CosetUnion solution_set(const HnnPresentation& p, const PrincipalSystem& sys,
                        int length_cap = 16);

// Regularity test: no nontrivial solution of the attached system (length >= 1)
// or non-membership in N*(A u B) (length 0). Free-base presentations only.
bool is_regular(const HnnPresentation& p, const FreeWord& w, int length_cap = 16);

enum class ConjugacyVerdict { Conjugate, NotConjugate, Unknown };

struct HnnConjugacyResult {
  ConjugacyVerdict verdict = ConjugacyVerdict::Unknown;
  FreeWord conjugator;  // over the full alphabet, meaningful for Conjugate
  std::string note;
};

// Conjugacy search for g regular (checked; throws std::invalid_argument on a
// singular g of positive length). g in A u B falls back to the bounded chain
// search, whose exhausted horizon reports Unknown. Free-base presentations
// only.
HnnConjugacyResult conjugacy_search_regular(const HnnPresentation& p, const FreeWord& g,
                                            const FreeWord& u, int length_cap = 16,
                                            int max_chain = -1);

// Bounded breadth-first search over conjugation chains inside A u B by
// elements h t^{+-1}; sound but deliberately incomplete.
HnnConjugacyResult collins_case2_bounded(const HnnPresentation& p, const FreeWord& g,
                                         const FreeWord& gp, int max_chain);

}  // namespace cgt
