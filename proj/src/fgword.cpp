#include "cgt/fgword.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cgt/errors.hpp"

namespace cgt {

namespace {

bool valid_name(std::string_view name) {
  if (name.empty() || name == "1") return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

// Total order on letters: generator order first, positive sign before
// negative. Used by shortlex comparisons.
int letter_key(int letter) {
  int idx = std::abs(letter) - 1;
  return 2 * idx + (letter < 0 ? 1 : 0);
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("alphabet must have rank >= 1");
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!valid_name(names_[static_cast<size_t>(i)]))
      throw std::invalid_argument("invalid generator name: '" + names_[static_cast<size_t>(i)] + "'");
    if (!index_.emplace(names_[static_cast<size_t>(i)], i).second)
      throw std::invalid_argument("duplicate generator name: '" + names_[static_cast<size_t>(i)] + "'");
  }
}

AlphabetPtr Alphabet::make(std::vector<std::string> names) {
  return std::make_shared<Alphabet>(std::move(names));
}

std::optional<int> Alphabet::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void require_same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
  if (!same_alphabet(a, b)) throw std::invalid_argument("alphabet mismatch");
}

FreeWord::FreeWord(AlphabetPtr alphabet, std::vector<int> letters)
    : alphabet_(std::move(alphabet)) {
  if (!alphabet_) throw std::invalid_argument("null alphabet");
  letters_.reserve(letters.size());
  for (int l : letters) {
    if (l == 0 || std::abs(l) > alphabet_->rank())
      throw std::invalid_argument("letter out of range");
    if (!letters_.empty() && letters_.back() == -l) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }
}

FreeWord FreeWord::parse(const AlphabetPtr& alphabet, std::string_view text) {
  if (!alphabet) throw std::invalid_argument("null alphabet");
  std::vector<int> letters;
  size_t pos = 0;
  int column = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    std::string_view token = text.substr(pos, end - pos);
    ++column;
    int sign = 1;
    if (token.size() > 3 && token.substr(token.size() - 3) == "^-1") {
      sign = -1;
      token = token.substr(0, token.size() - 3);
    }
    if (token == "1" && sign == 1) {
      pos = end;
      continue;
    }
    auto idx = alphabet->index_of(token);
    if (!idx)
      throw ParseError("unknown generator '" + std::string(token) + "'", 0, column);
    letters.push_back(sign * (*idx + 1));
    pos = end;
  }
  return FreeWord(alphabet, std::move(letters));
}

FreeWord FreeWord::subword(int begin, int end) const {
  FreeWord out(alphabet_);
  out.letters_.assign(letters_.begin() + begin, letters_.begin() + end);
  return out;
}

std::string FreeWord::str() const {
  if (letters_.empty()) return "1";
  std::ostringstream os;
  for (size_t i = 0; i < letters_.size(); ++i) {
    if (i) os << ' ';
    os << alphabet_->name(std::abs(letters_[i]) - 1);
    if (letters_[i] < 0) os << "^-1";
  }
  return os.str();
}

bool FreeWord::operator==(const FreeWord& other) const {
  if (letters_.size() != other.letters_.size()) return false;
  if (!(alphabet_ == other.alphabet_) && alphabet_ && other.alphabet_ &&
      !(*alphabet_ == *other.alphabet_))
    return false;
  return letters_ == other.letters_;
}

bool FreeWord::operator<(const FreeWord& other) const {
  if (letters_.size() != other.letters_.size()) return letters_.size() < other.letters_.size();
  for (size_t i = 0; i < letters_.size(); ++i) {
    int ka = letter_key(letters_[i]), kb = letter_key(other.letters_[i]);
    if (ka != kb) return ka < kb;
  }
  return false;
}

FreeWord reduce(const AlphabetPtr& alphabet, std::vector<int> raw) {
  return FreeWord(alphabet, std::move(raw));
}

FreeWord multiply(const FreeWord& u, const FreeWord& v) {
  require_same_alphabet(u.alphabet(), v.alphabet());
  std::vector<int> letters(u.letters().begin(), u.letters().end());
  letters.insert(letters.end(), v.letters().begin(), v.letters().end());
  return FreeWord(u.alphabet() ? u.alphabet() : v.alphabet(), std::move(letters));
}

FreeWord invert(const FreeWord& u) {
  std::vector<int> letters(u.letters().rbegin(), u.letters().rend());
  for (int& l : letters) l = -l;
  FreeWord out(u.alphabet(), std::move(letters));
  return out;
}

FreeWord conjugate(const FreeWord& g, const FreeWord& x) {
  return multiply(multiply(invert(x), g), x);
}

FreeWord power(const FreeWord& u, long long n) {
  FreeWord base = n < 0 ? invert(u) : u;
  long long k = n < 0 ? -n : n;
  FreeWord out(u.alphabet());
  for (long long i = 0; i < k; ++i) out = multiply(out, base);
  return out;
}

std::pair<FreeWord, FreeWord> cyclic_reduce(const FreeWord& w) {
  auto letters = w.letters();
  int lo = 0, hi = static_cast<int>(letters.size());
  while (hi - lo >= 2 && letters[static_cast<size_t>(lo)] == -letters[static_cast<size_t>(hi - 1)]) {
    ++lo;
    --hi;
  }
  FreeWord core = w.subword(lo, hi);
  // w = x^{-1} core x where x is the peeled tail, outermost letter last.
  FreeWord conjugator = w.subword(hi, static_cast<int>(letters.size()));
  return {core, conjugator};
}

FreeWord least_cyclic_rotation(const FreeWord& w) {
  FreeWord best = w;
  for (int k = 1; k < w.length(); ++k) {
    FreeWord rot = multiply(w.subword(k, w.length()), w.subword(0, k));
    if (rot < best) best = rot;
  }
  return best;
}

std::optional<FreeWord> free_conjugacy(const FreeWord& u, const FreeWord& v) {
  require_same_alphabet(u.alphabet(), v.alphabet());
  auto [cu, xu] = cyclic_reduce(u);
  auto [cv, xv] = cyclic_reduce(v);
  if (cu.length() != cv.length()) return std::nullopt;
  if (cu.empty()) return multiply(invert(xu), xv);
  for (int k = 0; k < cu.length(); ++k) {
    FreeWord rot = multiply(cu.subword(k, cu.length()), cu.subword(0, k));
    if (rot == cv) {
      // rot = p^{-1} cu p with p the length-k prefix.
      FreeWord x = multiply(multiply(invert(xu), cu.subword(0, k)), xv);
      return x;
    }
  }
  return std::nullopt;
}

std::pair<FreeWord, int> maximal_root(const FreeWord& w) {
  if (w.empty()) throw std::invalid_argument("maximal_root of the identity");
  auto [core, x] = cyclic_reduce(w);
  int n = core.length();
  for (int d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool periodic = true;
    for (int i = 0; i + d < n; ++i) {
      if (core.letter(i) != core.letter(i + d)) {
        periodic = false;
        break;
      }
    }
    if (periodic) {
      // w = x^{-1} core x and core = prefix^e, so the root is x^{-1} prefix x.
      FreeWord root = conjugate(core.subword(0, d), x);
      return {root, n / d};
    }
  }
  return {w, 1};  // unreachable: d = n always matches
}

Homomorphism::Homomorphism(AlphabetPtr from, AlphabetPtr to, std::vector<FreeWord> images)
    : from_(std::move(from)), to_(std::move(to)), images_(std::move(images)) {
  if (!from_ || !to_) throw std::invalid_argument("null alphabet");
  if (static_cast<int>(images_.size()) != from_->rank())
    throw std::invalid_argument("missing generator image");
  for (const FreeWord& im : images_) require_same_alphabet(im.alphabet(), to_);
}

FreeWord Homomorphism::apply(const FreeWord& w) const {
  require_same_alphabet(w.alphabet(), from_);
  std::vector<int> letters;
  for (int l : w.letters()) {
    const FreeWord& im = images_[static_cast<size_t>(std::abs(l) - 1)];
    if (l > 0) {
      letters.insert(letters.end(), im.letters().begin(), im.letters().end());
    } else {
      for (auto it = im.letters().rbegin(); it != im.letters().rend(); ++it)
        letters.push_back(-*it);
    }
  }
  return FreeWord(to_, std::move(letters));
}

namespace {

bool commute(const FreeWord& a, const FreeWord& b) {
  return multiply(a, b) == multiply(b, a);
}

// Solutions with l >= 1 of a^l b^l = d, assuming [a, b] != 1. Once a is
// cyclically reduced and b = e^{-1} b0 e with b0 cyclically reduced,
// |a^l b^l| = l(|a| + |b0|) + 2|e| - 2*cancel, and the cancellation cannot
// exceed |e| + |a| + |b0| (it would force a and b0 to commute), so only
// exponents up to |d|/(|a| + |b0|) + 2 can match |d|.
std::optional<long long> solve_nonneg(const FreeWord& a, const FreeWord& b, const FreeWord& d) {
  if (d.empty()) return 0;
  // Conjugate the equation so the base of the left power is cyclically
  // reduced: a^l b^l = d  <=>  (xa a xa^-1)^l (xa b xa^-1)^l = xa d xa^-1.
  auto [ac, xa] = cyclic_reduce(a);
  FreeWord ix = invert(xa);
  FreeWord bc = conjugate(b, ix);
  FreeWord dc = conjugate(d, ix);
  auto [b0, e] = cyclic_reduce(bc);
  long long den = ac.length() + b0.length();
  if (den == 0) return std::nullopt;  // both trivial: handled by callers
  long long lmax = static_cast<long long>(dc.length()) / den + 2;
  FreeWord ap(a.alphabet()), bp(a.alphabet());
  for (long long l = 1; l <= lmax; ++l) {
    ap = multiply(ap, ac);
    bp = multiply(bp, bc);
    if (multiply(ap, bp) == dc) return l;
  }
  return std::nullopt;
}

}  // namespace

PowerSolution solve_power_equation(const FreeWord& a, const FreeWord& b, const FreeWord& d) {
  require_same_alphabet(a.alphabet(), b.alphabet());
  require_same_alphabet(a.alphabet(), d.alphabet());
  if (d.empty() && a == invert(b)) return PowerSolution::all_integers();

  if (commute(a, b)) {
    FreeWord ab = multiply(a, b);
    if (ab.empty()) return PowerSolution::none();  // a = b^{-1}, d != 1
    if (d.empty()) return PowerSolution::unique(0);
    auto [r, e] = maximal_root(ab);
    auto [rd, ed] = maximal_root(d);
    long long l = 0;
    if (rd == r && ed % e == 0) {
      l = ed / e;
    } else if (rd == invert(r) && ed % e == 0) {
      l = -(ed / e);
    } else {
      return PowerSolution::none();
    }
    if (multiply(power(a, l), power(b, l)) == d) return PowerSolution::unique(l);
    return PowerSolution::none();
  }

  // Non-commuting: at most one solution (a^l b^l = a^m b^m forces l = m).
  if (d.empty()) return PowerSolution::unique(0);
  if (auto l = solve_nonneg(a, b, d)) return PowerSolution::unique(*l);
  // l < 0: a^{-k} b^{-k} = (a^{-1})^k (b^{-1})^k.
  if (auto k = solve_nonneg(invert(a), invert(b), d)) return PowerSolution::unique(-*k);
  return PowerSolution::none();
}

FreeWord translate(const FreeWord& w, const AlphabetPtr& target) {
  if (!target) throw std::invalid_argument("null alphabet");
  std::vector<int> letters;
  letters.reserve(w.letters().size());
  for (int l : w.letters()) {
    const std::string& name = w.alphabet()->name(std::abs(l) - 1);
    auto idx = target->index_of(name);
    if (!idx) throw std::invalid_argument("generator '" + name + "' not in target alphabet");
    letters.push_back(l > 0 ? *idx + 1 : -(*idx + 1));
  }
  return FreeWord(target, std::move(letters));
}

}  // namespace cgt
