#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cgt {

class Alphabet;
using AlphabetPtr = std::shared_ptr<const Alphabet>;

// Ordered set of generator names. The declared order is used for every
// deterministic tie-break in the toolkit (least cyclic rotations, BFS
// transversals), so two alphabets with the same names in the same order are
// interchangeable.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> names);
  static AlphabetPtr make(std::vector<std::string> names);

  int rank() const { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_.at(static_cast<size_t>(index)); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> index_of(std::string_view name) const;

  bool operator==(const Alphabet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int, std::less<>> index_;
};

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b);
void require_same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b);

// Freely reduced word. Letters are encoded as +-(generator index + 1); the
// concrete encoding is exposed through letters() for the graph machinery.
// Words are immutable values; every operation below is a pure function.
class FreeWord {
 public:
  FreeWord() = default;
  explicit FreeWord(AlphabetPtr alphabet) : alphabet_(std::move(alphabet)) {}
  // Applies free reduction to `letters`.
  FreeWord(AlphabetPtr alphabet, std::vector<int> letters);

  // Word syntax: whitespace-separated tokens `name` or `name^-1`; the empty
  // word is the literal `1`.
  static FreeWord parse(const AlphabetPtr& alphabet, std::string_view text);

  const AlphabetPtr& alphabet() const { return alphabet_; }
  std::span<const int> letters() const { return letters_; }
  int length() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }
  int letter(int i) const { return letters_[static_cast<size_t>(i)]; }
  FreeWord subword(int begin, int end) const;

  std::string str() const;

  bool operator==(const FreeWord& other) const;
  bool operator!=(const FreeWord& other) const { return !(*this == other); }
  // Shortlex under the alphabet's declared generator order.
  bool operator<(const FreeWord& other) const;

 private:
  friend FreeWord reduce(const AlphabetPtr&, std::vector<int>);
  AlphabetPtr alphabet_;
  std::vector<int> letters_;
};

FreeWord reduce(const AlphabetPtr& alphabet, std::vector<int> raw);
FreeWord multiply(const FreeWord& u, const FreeWord& v);
FreeWord invert(const FreeWord& u);
// x^{-1} g x.
FreeWord conjugate(const FreeWord& g, const FreeWord& x);
FreeWord power(const FreeWord& u, long long n);

// w = conjugator^{-1} . core . conjugator with core cyclically reduced.
std::pair<FreeWord, FreeWord> cyclic_reduce(const FreeWord& w);

// Canonical representative of the cyclic word: least rotation in shortlex
// order. Input must be cyclically reduced.
FreeWord least_cyclic_rotation(const FreeWord& w);

// A conjugator x with reduce(x^{-1} u x) = v, if u ~ v.
std::optional<FreeWord> free_conjugacy(const FreeWord& u, const FreeWord& v);

// w = root^e with root not a proper power, e maximal. w must be nontrivial.
std::pair<FreeWord, int> maximal_root(const FreeWord& w);

// Map between free groups given by generator images; letter-by-letter
// substitution followed by free reduction.
class Homomorphism {
 public:
  Homomorphism(AlphabetPtr from, AlphabetPtr to, std::vector<FreeWord> images);

  const AlphabetPtr& from() const { return from_; }
  const AlphabetPtr& to() const { return to_; }
  const FreeWord& image(int generator) const { return images_.at(static_cast<size_t>(generator)); }
  FreeWord apply(const FreeWord& w) const;

 private:
  AlphabetPtr from_;
  AlphabetPtr to_;
  std::vector<FreeWord> images_;
};

struct PowerSolution {
  enum class Tag { NoSolution, Unique, AllIntegers };
  Tag tag = Tag::NoSolution;
  long long exponent = 0;

  static PowerSolution none() { return {Tag::NoSolution, 0}; }
  static PowerSolution unique(long long l) { return {Tag::Unique, l}; }
  static PowerSolution all_integers() { return {Tag::AllIntegers, 0}; }
  bool operator==(const PowerSolution&) const = default;
};

// Solves a^l b^l = d over the free group for an integer l. AllIntegers
// exactly when d = 1 and a = b^{-1}; otherwise at most one solution exists.
PowerSolution solve_power_equation(const FreeWord& a, const FreeWord& b, const FreeWord& d);

// Re-expresses w over `target`, matching generators by name.
FreeWord translate(const FreeWord& w, const AlphabetPtr& target);

}  // namespace cgt
