#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgt/fgword.hpp"
#include "cgt/hnn.hpp"
#include "cgt/stallings.hpp"

namespace cgt {

// Group built from a finite presentation < s_1..s_n | R_1..R_m >: an
// HNN-extension of K = F(T,D) x F(S) by a stable letter q, with associated
// subgroups A = <t_i, s_j d_j^{-1}> and B = <t_i R_i^{-1}, s_j d_j^{-1}>
// identified through theta. Immutable after construction.
class MillerGroup {
 public:
  static MillerGroup build(const std::vector<std::string>& generator_names,
                           const std::vector<std::string>& relator_texts);

  int generator_count() const { return n_; }
  int relator_count() const { return m_; }
  const FreeWord& relator(int i) const { return relators_.at(static_cast<size_t>(i)); }
  // Largest relator length; the constant that scales the rewriting bounds.
  int relator_bound() const { return cr_; }

  const AlphabetPtr& alphabet_s() const { return alpha_s_; }
  const AlphabetPtr& alphabet_sq() const { return alpha_sq_; }
  const AlphabetPtr& alphabet_td() const { return alpha_td_; }
  // Standard generators: q, s_1..s_n, t_1..t_m, d_1..d_n.
  const AlphabetPtr& alphabet() const { return alpha_g_; }

  // u-part homomorphisms F(T,D) -> F(S): t_i -> 1 resp. R_i^{-1}, d_j -> s_j^{-1}.
  const Homomorphism& rho_bar() const { return *rho_bar_opt_; }
  const Homomorphism& rho_bar_prime() const { return *rho_bar_prime_opt_; }

  // Conjugation action of the stable letters on F(S,q).
  const Homomorphism& phi(int i) const { return phi_.at(static_cast<size_t>(i)); }
  const Homomorphism& phi_inv(int i) const { return phi_inv_.at(static_cast<size_t>(i)); }
  const Homomorphism& psi(int k) const { return psi_.at(static_cast<size_t>(k)); }
  const Homomorphism& psi_inv(int k) const { return psi_inv_.at(static_cast<size_t>(k)); }

  bool is_q(int letter) const { return std::abs(letter) == 1; }
  bool is_s(int letter) const { return std::abs(letter) >= 2 && std::abs(letter) <= 1 + n_; }
  bool is_t(int letter) const {
    return std::abs(letter) >= 2 + n_ && std::abs(letter) <= 1 + n_ + m_;
  }
  bool is_d(int letter) const { return std::abs(letter) >= 2 + n_ + m_; }

 private:
  MillerGroup() = default;
  int n_ = 0, m_ = 0, cr_ = 0;
  std::vector<FreeWord> relators_;
  AlphabetPtr alpha_s_, alpha_sq_, alpha_td_, alpha_g_;
  std::optional<Homomorphism> rho_bar_opt_;
  std::optional<Homomorphism> rho_bar_prime_opt_;
  std::vector<Homomorphism> phi_, phi_inv_, psi_, psi_inv_;
};

// Element of K = F(T,D) x F(S), componentwise.
struct KElement {
  FreeWord u;  // over alphabet_td
  FreeWord s;  // over alphabet_s
  bool operator==(const KElement&) const = default;
};

KElement k_multiply(const KElement& a, const KElement& b);
KElement k_inverse(const KElement& a);
KElement k_identity(const MillerGroup& g);

// Projection of a q-free word in the standard generators onto K coordinates.
KElement k_from_word(const MillerGroup& g, const FreeWord& w);
FreeWord k_to_word(const MillerGroup& g, const KElement& k);

// The three decompositions x = u s = a s_a = b s_b.
struct KDecomposition {
  KElement k;
  FreeWord s_a;  // over alphabet_s; a-part is (k.u, rho_bar(k.u))
  FreeWord s_b;
  Expression a_expression;  // a-part over the A generators (1..m: t_i, m+j: s_j d_j^{-1})
  Expression b_expression;
};
KDecomposition decompose_k(const MillerGroup& g, const FreeWord& w);

std::optional<Expression> membership_a(const MillerGroup& g, const KElement& x);
std::optional<Expression> membership_b(const MillerGroup& g, const KElement& x);

// theta: (u, rho_bar(u)) -> (u, rho_bar_prime(u)); throws on membership
// violation.
KElement theta(const MillerGroup& g, const KElement& a);
KElement theta_inv(const MillerGroup& g, const KElement& b);

// g = u s_0 q^{e1} s_1 ... q^{ek} s_k; unique once every s_i lies in F(S),
// which the transversal structure guarantees.
struct MillerNormalForm {
  FreeWord u;   // over alphabet_td
  FreeWord s0;  // over alphabet_s
  std::vector<std::pair<int, FreeWord>> syllables;
  bool cyclically_reduced = false;

  int length() const { return static_cast<int>(syllables.size()); }
  bool operator==(const MillerNormalForm& other) const {
    return u == other.u && s0 == other.s0 && syllables == other.syllables;
  }
  FreeWord to_word(const MillerGroup& g) const;
  std::vector<int> exponent_sequence() const;
};

MillerNormalForm normal_form_miller(const MillerGroup& g, const FreeWord& w);
std::pair<MillerNormalForm, FreeWord> cyc_reduce_miller(const MillerGroup& g, const FreeWord& w);
std::pair<MillerNormalForm, FreeWord> cyclic_permutation_miller(const MillerGroup& g,
                                                                const MillerNormalForm& nf,
                                                                int i);

enum class ElementClass { WeaklyRegular, StronglySingular };
ElementClass classify(const MillerGroup& g, const FreeWord& w);

// v^{-1} f v rewritten as a reduced word of F(S, q) through the conjugation
// action of the stable letters.
FreeWord rewrite_conjugate_by_ftd(const MillerGroup& g, const FreeWord& f, const FreeWord& v);

enum class MillerVerdict { Conjugate, NotConjugate, OutsideScope };

struct ConjugacyCertificate {
  MillerVerdict verdict = MillerVerdict::OutsideScope;
  FreeWord conjugator;  // over the standard generators, meaningful for Conjugate
  std::vector<std::string> trace;
  int permutation_index = 0;
  long long exponent = 0;
};

// Conjugacy search for pairs with a weakly regular side. Pairs that are both
// strongly singular get the honest OutsideScope verdict.
ConjugacyCertificate conjugacy_search_miller(const MillerGroup& g, const FreeWord& lhs,
                                             const FreeWord& rhs);

bool verify_certificate(const MillerGroup& g, const FreeWord& lhs, const FreeWord& rhs,
                        const ConjugacyCertificate& cert);

// K behind the generic HNN toolkit interface, for cross-checking the direct
// implementation against the generic engine.
HnnPresentation miller_as_hnn(const MillerGroup& g);

}  // namespace cgt
