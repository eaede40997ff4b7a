#include "cgt/miller.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <stdexcept>

#include "cgt/errors.hpp"

namespace cgt {

namespace {

bool reserved_name(const std::string& name) {
  if (name == "q") return true;
  if (name.size() >= 2 && (name[0] == 't' || name[0] == 'd')) {
    return std::all_of(name.begin() + 1, name.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }
  return false;
}

}  // namespace

MillerGroup MillerGroup::build(const std::vector<std::string>& generator_names,
                               const std::vector<std::string>& relator_texts) {
  if (generator_names.empty()) throw std::invalid_argument("need at least one generator");
  if (relator_texts.empty()) throw std::invalid_argument("need at least one relator");
  for (const std::string& name : generator_names) {
    if (reserved_name(name))
      throw std::invalid_argument("generator name '" + name + "' is reserved");
  }

  MillerGroup g;
  g.n_ = static_cast<int>(generator_names.size());
  g.m_ = static_cast<int>(relator_texts.size());
  g.alpha_s_ = Alphabet::make(generator_names);

  for (const std::string& text : relator_texts) {
    FreeWord r = FreeWord::parse(g.alpha_s_, text);
    if (r.empty()) throw std::invalid_argument("relator reduces to the empty word");
    g.relators_.push_back(std::move(r));
    g.cr_ = std::max(g.cr_, g.relators_.back().length());
  }

  std::vector<std::string> sq_names{"q"};
  sq_names.insert(sq_names.end(), generator_names.begin(), generator_names.end());
  g.alpha_sq_ = Alphabet::make(sq_names);

  std::vector<std::string> td_names;
  for (int i = 1; i <= g.m_; ++i) td_names.push_back("t" + std::to_string(i));
  for (int j = 1; j <= g.n_; ++j) td_names.push_back("d" + std::to_string(j));
  g.alpha_td_ = Alphabet::make(td_names);

  std::vector<std::string> g_names = sq_names;
  g_names.insert(g_names.end(), td_names.begin(), td_names.end());
  g.alpha_g_ = Alphabet::make(g_names);

  std::vector<FreeWord> rho_images, rho_prime_images;
  for (int i = 0; i < g.m_; ++i) {
    rho_images.emplace_back(g.alpha_s_);
    rho_prime_images.push_back(invert(g.relators_[static_cast<size_t>(i)]));
  }
  for (int j = 1; j <= g.n_; ++j) {
    rho_images.emplace_back(g.alpha_s_, std::vector<int>{-j});
    rho_prime_images.emplace_back(g.alpha_s_, std::vector<int>{-j});
  }
  g.rho_bar_opt_.emplace(g.alpha_td_, g.alpha_s_, std::move(rho_images));
  g.rho_bar_prime_opt_.emplace(g.alpha_td_, g.alpha_s_, std::move(rho_prime_images));

  // Conjugation action of the stable letters on F(S, q).
  FreeWord q(g.alpha_sq_, {1});
  std::vector<FreeWord> fixed;
  for (int j = 1; j <= g.n_; ++j) fixed.emplace_back(g.alpha_sq_, std::vector<int>{j + 1});
  for (int i = 0; i < g.m_; ++i) {
    FreeWord r = translate(g.relators_[static_cast<size_t>(i)], g.alpha_sq_);
    std::vector<FreeWord> images{multiply(q, r)};
    images.insert(images.end(), fixed.begin(), fixed.end());
    g.phi_.emplace_back(g.alpha_sq_, g.alpha_sq_, std::move(images));
    std::vector<FreeWord> inv_images{multiply(q, invert(r))};
    inv_images.insert(inv_images.end(), fixed.begin(), fixed.end());
    g.phi_inv_.emplace_back(g.alpha_sq_, g.alpha_sq_, std::move(inv_images));
  }
  for (int k = 1; k <= g.n_; ++k) {
    std::vector<FreeWord> images{FreeWord(g.alpha_sq_, {-(k + 1), 1, k + 1})};
    images.insert(images.end(), fixed.begin(), fixed.end());
    g.psi_.emplace_back(g.alpha_sq_, g.alpha_sq_, std::move(images));
    std::vector<FreeWord> inv_images{FreeWord(g.alpha_sq_, {k + 1, 1, -(k + 1)})};
    inv_images.insert(inv_images.end(), fixed.begin(), fixed.end());
    g.psi_inv_.emplace_back(g.alpha_sq_, g.alpha_sq_, std::move(inv_images));
  }

  // Sanity: every defining relation evaluates to the identity.
  auto check_identity = [&g](const FreeWord& w) {
    MillerNormalForm nf = normal_form_miller(g, w);
    if (nf.length() != 0 || !nf.u.empty() || !nf.s0.empty())
      throw std::logic_error("defining relation does not normalize to the identity");
  };
  const AlphabetPtr& ag = g.alpha_g_;
  FreeWord qg(ag, {1});
  for (int i = 1; i <= g.m_; ++i) {
    FreeWord t(ag, {1 + g.n_ + i});
    FreeWord r = translate(g.relators_[static_cast<size_t>(i - 1)], ag);
    check_identity(multiply(multiply(multiply(invert(t), qg), t),
                            invert(multiply(qg, r))));  // t^{-1} q t (q R)^{-1}
    for (int j = 1; j <= g.n_; ++j) {
      FreeWord s(ag, {1 + j});
      check_identity(multiply(multiply(multiply(invert(t), s), t), invert(s)));
    }
  }
  for (int j = 1; j <= g.n_; ++j) {
    FreeWord d(ag, {1 + g.n_ + g.m_ + j});
    FreeWord s(ag, {1 + j});
    check_identity(multiply(multiply(multiply(invert(d), qg), d),
                            invert(multiply(multiply(invert(s), qg), s))));
    for (int jj = 1; jj <= g.n_; ++jj) {
      FreeWord ss(ag, {1 + jj});
      check_identity(multiply(multiply(multiply(invert(d), ss), d), invert(ss)));
    }
  }
  return g;
}

KElement k_multiply(const KElement& a, const KElement& b) {
  return {multiply(a.u, b.u), multiply(a.s, b.s)};
}

KElement k_inverse(const KElement& a) { return {invert(a.u), invert(a.s)}; }

KElement k_identity(const MillerGroup& g) {
  return {FreeWord(g.alphabet_td()), FreeWord(g.alphabet_s())};
}

KElement k_from_word(const MillerGroup& g, const FreeWord& w) {
  require_same_alphabet(w.alphabet(), g.alphabet());
  std::vector<int> u_letters, s_letters;
  int n = g.generator_count(), m = g.relator_count();
  for (int l : w.letters()) {
    int idx = std::abs(l), sign = l > 0 ? 1 : -1;
    if (g.is_q(l)) throw std::invalid_argument("word contains the stable letter");
    if (g.is_s(l)) {
      s_letters.push_back(sign * (idx - 1));
    } else if (g.is_t(l)) {
      u_letters.push_back(sign * (idx - 1 - n));
    } else {
      u_letters.push_back(sign * (idx - 1 - n));  // d_j keeps code m + j
    }
  }
  return {FreeWord(g.alphabet_td(), std::move(u_letters)),
          FreeWord(g.alphabet_s(), std::move(s_letters))};
}

FreeWord k_to_word(const MillerGroup& g, const KElement& k) {
  return multiply(translate(k.u, g.alphabet()), translate(k.s, g.alphabet()));
}

KDecomposition decompose_k(const MillerGroup& g, const FreeWord& w) {
  KElement k = k_from_word(g, w);
  KDecomposition out;
  out.s_a = multiply(invert(g.rho_bar().apply(k.u)), k.s);
  out.s_b = multiply(invert(g.rho_bar_prime().apply(k.u)), k.s);
  int m = g.relator_count();
  for (int l : k.u.letters()) {
    int idx = std::abs(l), sign = l > 0 ? 1 : -1;
    // t_i is the i-th A generator; s_j d_j^{-1} is generator m + j, whose
    // F(T,D) part is d_j^{-1}.
    int flip = idx <= m ? 1 : -1;
    out.a_expression.push_back(sign * flip * idx);
  }
  out.a_expression = reduce_expression(std::move(out.a_expression));
  out.b_expression = out.a_expression;  // same generator indexing in B
  out.k = std::move(k);
  return out;
}

namespace {

Expression u_expression(const MillerGroup& g, const FreeWord& u) {
  int m = g.relator_count();
  Expression expr;
  for (int l : u.letters()) {
    int idx = std::abs(l), sign = l > 0 ? 1 : -1;
    int flip = idx <= m ? 1 : -1;
    expr.push_back(sign * flip * idx);
  }
  return reduce_expression(std::move(expr));
}

}  // namespace

std::optional<Expression> membership_a(const MillerGroup& g, const KElement& x) {
  if (!(x.s == g.rho_bar().apply(x.u))) return std::nullopt;
  return u_expression(g, x.u);
}

std::optional<Expression> membership_b(const MillerGroup& g, const KElement& x) {
  if (!(x.s == g.rho_bar_prime().apply(x.u))) return std::nullopt;
  return u_expression(g, x.u);
}

KElement theta(const MillerGroup& g, const KElement& a) {
  if (!(a.s == g.rho_bar().apply(a.u)))
    throw std::invalid_argument("element is not in the subgroup A");
  return {a.u, g.rho_bar_prime().apply(a.u)};
}

KElement theta_inv(const MillerGroup& g, const KElement& b) {
  if (!(b.s == g.rho_bar_prime().apply(b.u)))
    throw std::invalid_argument("element is not in the subgroup B");
  return {b.u, g.rho_bar().apply(b.u)};
}

FreeWord MillerNormalForm::to_word(const MillerGroup& g) const {
  FreeWord out = multiply(translate(u, g.alphabet()), translate(s0, g.alphabet()));
  for (const auto& [sign, s] : syllables) {
    out = multiply(out, FreeWord(g.alphabet(), {sign > 0 ? 1 : -1}));
    out = multiply(out, translate(s, g.alphabet()));
  }
  return out;
}

std::vector<int> MillerNormalForm::exponent_sequence() const {
  std::vector<int> out;
  out.reserve(syllables.size());
  for (const auto& [sign, s] : syllables) out.push_back(sign);
  return out;
}

MillerNormalForm normal_form_miller(const MillerGroup& g, const FreeWord& w) {
  require_same_alphabet(w.alphabet(), g.alphabet());
  // Split into K pieces separated by powers of q.
  std::vector<std::vector<int>> pieces{{}};
  std::vector<int> signs;
  for (int l : w.letters()) {
    if (g.is_q(l)) {
      signs.push_back(l > 0 ? 1 : -1);
      pieces.emplace_back();
    } else {
      pieces.back().push_back(l);
    }
  }
  std::vector<KElement> base;
  base.reserve(pieces.size());
  for (auto& piece : pieces)
    base.push_back(k_from_word(g, FreeWord(g.alphabet(), std::move(piece))));

  int k = static_cast<int>(signs.size());
  std::deque<std::pair<int, FreeWord>> nf;
  KElement carry = k_identity(g);
  for (int i = k; i >= 1; --i) {
    KElement h = k_multiply(base[static_cast<size_t>(i)], carry);
    int sign = signs[static_cast<size_t>(i - 1)];
    FreeWord rep(g.alphabet_s());
    KElement next = carry;
    if (sign == -1) {
      rep = multiply(invert(g.rho_bar().apply(h.u)), h.s);
      next = {h.u, g.rho_bar_prime().apply(h.u)};
    } else {
      rep = multiply(invert(g.rho_bar_prime().apply(h.u)), h.s);
      next = {h.u, g.rho_bar().apply(h.u)};
    }
    if (!nf.empty() && nf.front().first == -sign && rep.empty()) {
      FreeWord absorbed = nf.front().second;
      nf.pop_front();
      carry = k_multiply(next, KElement{FreeWord(g.alphabet_td()), absorbed});
    } else {
      nf.push_front({sign, rep});
      carry = next;
    }
  }
  KElement head = k_multiply(base[0], carry);
  MillerNormalForm out;
  out.u = head.u;
  out.s0 = head.s;
  out.syllables.assign(nf.begin(), nf.end());
  return out;
}

std::pair<MillerNormalForm, FreeWord> cyc_reduce_miller(const MillerGroup& g, const FreeWord& w) {
  MillerNormalForm nf = normal_form_miller(g, w);
  FreeWord x(g.alphabet());
  while (true) {
    int k = nf.length();
    if (k == 0) {
      KElement head{nf.u, nf.s0};
      if (membership_a(g, head) || membership_b(g, head)) break;
      if (nf.u.empty()) break;  // elements of F(S) are never conjugate into A u B unless trivial u
      if (auto z = free_conjugacy(nf.s0, g.rho_bar().apply(nf.u))) {
        x = multiply(x, translate(*z, g.alphabet()));
        nf.s0 = g.rho_bar().apply(nf.u);
        break;
      }
      if (auto z = free_conjugacy(nf.s0, g.rho_bar_prime().apply(nf.u))) {
        x = multiply(x, translate(*z, g.alphabet()));
        nf.s0 = g.rho_bar_prime().apply(nf.u);
        break;
      }
      break;
    }
    if (k == 1) break;
    int e1 = nf.syllables.front().first;
    int ek = nf.syllables.back().first;
    if (e1 == ek) break;
    KElement wrap{nf.u, multiply(nf.syllables.back().second, nf.s0)};
    bool collapse = ek == -1 ? membership_a(g, wrap).has_value()
                             : membership_b(g, wrap).has_value();
    if (!collapse) break;
    FreeWord head_word =
        multiply(translate(nf.u, g.alphabet()), translate(nf.s0, g.alphabet()));
    FreeWord step = multiply(head_word, FreeWord(g.alphabet(), {e1 > 0 ? 1 : -1}));
    x = multiply(x, step);
    MillerNormalForm next =
        normal_form_miller(g, multiply(multiply(invert(step), nf.to_word(g)), step));
    if (next.length() != k - 2) throw std::logic_error("cyclic reduction did not shorten");
    nf = next;
  }
  nf.cyclically_reduced = true;
  return {nf, x};
}

std::pair<MillerNormalForm, FreeWord> cyclic_permutation_miller(const MillerGroup& g,
                                                                const MillerNormalForm& nf,
                                                                int i) {
  int k = nf.length();
  if (k == 0) throw std::invalid_argument("cyclic permutation of a length-0 form");
  if (i < 1 || i > k) throw std::invalid_argument("cyclic permutation index out of range");
  auto qpow = [&](int sign) { return FreeWord(g.alphabet(), {sign > 0 ? 1 : -1}); };
  FreeWord head_word = multiply(translate(nf.u, g.alphabet()), translate(nf.s0, g.alphabet()));
  FreeWord prefix = head_word;
  for (int j = 0; j + 1 < i; ++j) {
    prefix = multiply(prefix, qpow(nf.syllables[static_cast<size_t>(j)].first));
    prefix = multiply(prefix, translate(nf.syllables[static_cast<size_t>(j)].second, g.alphabet()));
  }
  prefix = multiply(prefix, qpow(nf.syllables[static_cast<size_t>(i - 1)].first));
  FreeWord rotated = translate(nf.syllables[static_cast<size_t>(i - 1)].second, g.alphabet());
  for (int j = i; j < k; ++j) {
    rotated = multiply(rotated, qpow(nf.syllables[static_cast<size_t>(j)].first));
    rotated = multiply(rotated, translate(nf.syllables[static_cast<size_t>(j)].second, g.alphabet()));
  }
  rotated = multiply(rotated, prefix);
  MillerNormalForm out = normal_form_miller(g, rotated);
  if (out.length() != k) throw std::logic_error("cyclic permutation changed the length");
  out.cyclically_reduced = true;
  return {out, prefix};
}

ElementClass classify(const MillerGroup& g, const FreeWord& w) {
  // The u part is the image in the quotient by the normal subgroup F(S, q),
  // so its triviality is invariant under conjugation and cyclic reduction.
  return normal_form_miller(g, w).u.empty() ? ElementClass::StronglySingular
                                            : ElementClass::WeaklyRegular;
}

FreeWord rewrite_conjugate_by_ftd(const MillerGroup& g, const FreeWord& f, const FreeWord& v) {
  require_same_alphabet(f.alphabet(), g.alphabet_sq());
  require_same_alphabet(v.alphabet(), g.alphabet_td());
  FreeWord out = f;
  int m = g.relator_count();
  for (int l : v.letters()) {
    int idx = std::abs(l);
    if (idx <= m) {
      out = (l > 0 ? g.phi(idx - 1) : g.phi_inv(idx - 1)).apply(out);
    } else {
      out = (l > 0 ? g.psi(idx - m - 1) : g.psi_inv(idx - m - 1)).apply(out);
    }
  }
  return out;
}

namespace {

FreeWord q_word(const MillerGroup& g, int sign) {
  return FreeWord(g.alphabet(), {sign > 0 ? 1 : -1});
}

bool in_a(const MillerGroup& g, const MillerNormalForm& nf) {
  return nf.s0 == g.rho_bar().apply(nf.u);
}

bool in_b(const MillerGroup& g, const MillerNormalForm& nf) {
  return nf.s0 == g.rho_bar_prime().apply(nf.u);
}

ConjugacyCertificate not_conjugate(std::vector<std::string> trace) {
  ConjugacyCertificate c;
  c.verdict = MillerVerdict::NotConjugate;
  c.trace = std::move(trace);
  return c;
}

ConjugacyCertificate search_impl(const MillerGroup& g, const FreeWord& lhs, const FreeWord& rhs) {
  ConjugacyCertificate cert;
  auto [gnf, xg] = cyc_reduce_miller(g, lhs);
  auto [hnf, xh] = cyc_reduce_miller(g, rhs);

  if (gnf.u.empty() && hnf.u.empty()) {
    cert.verdict = MillerVerdict::OutsideScope;
    cert.trace = {"both strongly singular"};
    return cert;
  }
  // The u part maps onto F(T,D) through the quotient, so conjugate elements
  // have conjugate u parts; mixed classes cannot be conjugate.
  if (gnf.u.empty() != hnf.u.empty()) return not_conjugate({"i: u-class mismatch"});

  // Case (i): align the F(T,D) parts.
  auto v = free_conjugacy(gnf.u, hnf.u);
  if (!v) return not_conjugate({"i: u parts not conjugate"});
  FreeWord v_word = translate(*v, g.alphabet());
  // Conjugating by v can break length-0 cyclic reducedness (the element may
  // leave A u B while staying conjugate into it), so reduce again.
  auto [h2, w2] = cyc_reduce_miller(
      g, multiply(multiply(v_word, hnf.to_word(g)), invert(v_word)));
  if (!(h2.u == gnf.u)) throw std::logic_error("u replacement failed");

  auto finish = [&](const FreeWord& middle, std::vector<std::string> trace, int perm,
                    long long exponent) {
    // lhs^{xg . middle . w2^{-1} . v . xh^{-1}} = rhs, middle relating gnf to h2.
    ConjugacyCertificate out;
    out.verdict = MillerVerdict::Conjugate;
    out.conjugator = multiply(
        multiply(multiply(multiply(xg, middle), invert(w2)), v_word), invert(xh));
    out.trace = std::move(trace);
    out.permutation_index = perm;
    out.exponent = exponent;
    if (!(normal_form_miller(g, conjugate(lhs, out.conjugator)) == normal_form_miller(g, rhs)))
      throw std::logic_error("conjugator failed verification");
    return out;
  };

  int k = gnf.length();
  if (h2.length() != k) return not_conjugate({"length mismatch"});

  if (k == 0) {
    bool ga = in_a(g, gnf), gb = in_b(g, gnf);
    bool ha = in_a(g, h2), hb = in_b(g, h2);
    if (ga || gb) {
      if (!(ha || hb)) return not_conjugate({"iii: one side outside A u B"});
      if (ga && ha && gnf.s0 == h2.s0) return finish(FreeWord(g.alphabet()), {"iii.a"}, 0, 0);
      if (gb && hb && gnf.s0 == h2.s0) return finish(FreeWord(g.alphabet()), {"iii.a"}, 0, 0);
      if (ga && hb && g.rho_bar_prime().apply(gnf.u) == h2.s0)
        return finish(q_word(g, 1), {"iii.b"}, 0, 0);
      if (gb && ha && g.rho_bar().apply(gnf.u) == h2.s0)
        return finish(q_word(g, -1), {"iii.c"}, 0, 0);
      return not_conjugate({"iii: no factor move matches"});
    }
    if (ha || hb) return not_conjugate({"iii: one side outside A u B"});
    // Case (ii): conjugacy of the F(S) parts.
    auto s = free_conjugacy(gnf.s0, h2.s0);
    if (!s) return not_conjugate({"ii: F(S) parts not conjugate"});
    return finish(translate(*s, g.alphabet()), {"ii"}, 0, 0);
  }

  // Case (iv). Shift g to the spelling ending in a power of q.
  FreeWord sigma = translate(invert(gnf.syllables.back().second), g.alphabet());
  MillerNormalForm gsh =
      normal_form_miller(g, multiply(multiply(invert(sigma), gnf.to_word(g)), sigma));
  if (gsh.length() != k) throw std::logic_error("trailing shift changed length");
  FreeWord gsh_word = gsh.to_word(g);

  FreeWord u0 = maximal_root(gnf.u).first;
  FreeWord p_img = g.rho_bar().apply(u0);
  FreeWord q_img = g.rho_bar_prime().apply(u0);
  auto n_of = [&](int sign) { return sign == -1 ? p_img : q_img; };
  auto m_of = [&](int sign) { return sign == -1 ? q_img : p_img; };

  std::vector<int> target = gsh.exponent_sequence();
  for (int i = 1; i <= k; ++i) {
    auto [pi, prefix] = cyclic_permutation_miller(g, h2, i);
    if (pi.exponent_sequence() != target) continue;
    if (!(pi.u == gsh.u)) continue;
    const FreeWord& y = n_of(target.back());

    // Slot equations b_j = alpha_j^{-l} a_j beta_j^l, solved as
    // (alpha^{-1})^l (a beta a^{-1})^l = b a^{-1}.
    bool infeasible = false;
    bool all_degenerate = true;
    std::set<long long> candidates;
    for (int j = 0; j <= k && !infeasible; ++j) {
      const FreeWord& a_j = j == 0 ? gsh.s0 : gsh.syllables[static_cast<size_t>(j - 1)].second;
      const FreeWord& b_j = j == 0 ? pi.s0 : pi.syllables[static_cast<size_t>(j - 1)].second;
      FreeWord alpha = j == 0 ? y : n_of(target[static_cast<size_t>(j - 1)]);
      FreeWord beta = j == k ? y : m_of(target[static_cast<size_t>(j)]);
      PowerSolution ps =
          solve_power_equation(invert(alpha), multiply(multiply(a_j, beta), invert(a_j)),
                               multiply(b_j, invert(a_j)));
      switch (ps.tag) {
        case PowerSolution::Tag::NoSolution:
          infeasible = true;
          break;
        case PowerSolution::Tag::Unique:
          candidates.insert(ps.exponent);
          all_degenerate = false;
          break;
        case PowerSolution::Tag::AllIntegers:
          break;
      }
    }
    if (infeasible) continue;
    if (all_degenerate) candidates.insert(0);
    for (long long l : candidates) {
      FreeWord z = multiply(translate(power(u0, l), g.alphabet()),
                            translate(power(y, l), g.alphabet()));
      if (normal_form_miller(g, conjugate(gsh_word, z)) == pi) {
        FreeWord middle = multiply(multiply(sigma, z), invert(prefix));
        return finish(middle, {"i", "iv"}, i, l);
      }
    }
  }
  return not_conjugate({"iv: no cyclic permutation matches"});
}

}  // namespace

ConjugacyCertificate conjugacy_search_miller(const MillerGroup& g, const FreeWord& lhs,
                                             const FreeWord& rhs) {
  bool lhs_singular = normal_form_miller(g, lhs).u.empty();
  bool rhs_singular = normal_form_miller(g, rhs).u.empty();
  if (lhs_singular && !rhs_singular) {
    // Conjugacy is symmetric; run with the weakly regular element first.
    ConjugacyCertificate cert = search_impl(g, rhs, lhs);
    if (cert.verdict == MillerVerdict::Conjugate) cert.conjugator = invert(cert.conjugator);
    cert.trace.insert(cert.trace.begin(), "swapped");
    return cert;
  }
  return search_impl(g, lhs, rhs);
}

bool verify_certificate(const MillerGroup& g, const FreeWord& lhs, const FreeWord& rhs,
                        const ConjugacyCertificate& cert) {
  if (cert.verdict != MillerVerdict::Conjugate) return false;
  return normal_form_miller(g, conjugate(lhs, cert.conjugator)) == normal_form_miller(g, rhs);
}

// ---------------------------------------------------------------------------
// K as a base-group toolkit for the generic HNN engine.

namespace {

class MillerKToolkit final : public BaseToolkit {
 public:
  explicit MillerKToolkit(MillerGroup g) : g_(std::move(g)) {
    std::vector<std::string> names;
    for (const std::string& name : g_.alphabet_td()->names()) names.push_back(name);
    for (const std::string& name : g_.alphabet_s()->names()) names.push_back(name);
    alpha_k_ = Alphabet::make(std::move(names));
  }

  const AlphabetPtr& alphabet() const override { return alpha_k_; }

  FreeWord canonical(const FreeWord& w) const override {
    KElement k = split(w);
    return join(k);
  }

  std::optional<Expression> membership_a(const FreeWord& w) const override {
    return cgt::membership_a(g_, split(w));
  }

  std::optional<Expression> membership_b(const FreeWord& w) const override {
    return cgt::membership_b(g_, split(w));
  }

  FreeWord coset_representative_a(const FreeWord& w) const override {
    KElement k = split(w);
    return lift_s(multiply(invert(g_.rho_bar().apply(k.u)), k.s));
  }

  FreeWord coset_representative_b(const FreeWord& w) const override {
    KElement k = split(w);
    return lift_s(multiply(invert(g_.rho_bar_prime().apply(k.u)), k.s));
  }

  std::optional<CmspWitness> conjugate_into_a(const FreeWord& w) const override {
    KElement k = split(w);
    auto z = free_conjugacy(k.s, g_.rho_bar().apply(k.u));
    if (!z) return std::nullopt;
    return CmspWitness{lift_s(*z), join({k.u, g_.rho_bar().apply(k.u)}), 0};
  }

  std::optional<CmspWitness> conjugate_into_b(const FreeWord& w) const override {
    KElement k = split(w);
    auto z = free_conjugacy(k.s, g_.rho_bar_prime().apply(k.u));
    if (!z) return std::nullopt;
    return CmspWitness{lift_s(*z), join({k.u, g_.rho_bar_prime().apply(k.u)}), 1};
  }

  bool normalizer_member(const FreeWord&) const override {
    // N*(A u B) is the whole group here: t_1 commutes with F(S) and keeps a
    // trivial rho_bar image, so t_1^g stays in A for every g in K.
    return true;
  }

 private:
  KElement split(const FreeWord& w) const {
    int td = g_.alphabet_td()->rank();
    std::vector<int> u_letters, s_letters;
    for (int l : w.letters()) {
      int idx = std::abs(l), sign = l > 0 ? 1 : -1;
      if (idx <= td) {
        u_letters.push_back(l);
      } else {
        s_letters.push_back(sign * (idx - td));
      }
    }
    return {FreeWord(g_.alphabet_td(), std::move(u_letters)),
            FreeWord(g_.alphabet_s(), std::move(s_letters))};
  }

  FreeWord join(const KElement& k) const {
    int td = g_.alphabet_td()->rank();
    std::vector<int> letters(k.u.letters().begin(), k.u.letters().end());
    for (int l : k.s.letters()) letters.push_back(l > 0 ? l + td : l - td);
    return FreeWord(alpha_k_, std::move(letters));
  }

  FreeWord lift_s(const FreeWord& s) const {
    int td = g_.alphabet_td()->rank();
    std::vector<int> letters;
    for (int l : s.letters()) letters.push_back(l > 0 ? l + td : l - td);
    return FreeWord(alpha_k_, std::move(letters));
  }

  MillerGroup g_;
  AlphabetPtr alpha_k_;
};

}  // namespace

HnnPresentation miller_as_hnn(const MillerGroup& g) {
  auto kit = std::make_shared<MillerKToolkit>(g);
  const AlphabetPtr& ak = kit->alphabet();
  int m = g.relator_count(), n = g.generator_count();
  int td = m + n;
  std::vector<FreeWord> a_gens, b_gens;
  for (int i = 1; i <= m; ++i) {
    a_gens.emplace_back(ak, std::vector<int>{i});
    FreeWord t(ak, {i});
    FreeWord r(ak);
    for (int l : g.relator(i - 1).letters())
      r = multiply(r, FreeWord(ak, {l > 0 ? l + td : l - td}));
    b_gens.push_back(multiply(t, invert(r)));
  }
  for (int j = 1; j <= n; ++j) {
    FreeWord w(ak, {td + j, -(m + j)});  // s_j d_j^{-1}
    a_gens.push_back(w);
    b_gens.push_back(w);
  }
  return HnnPresentation(kit, "q", std::move(a_gens), std::move(b_gens));
}

}  // namespace cgt
