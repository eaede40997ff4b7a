// Batch front end: normal forms, conjugacy certificates, exact density
// tables and Monte-Carlo experiments over presentation files.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgt/errors.hpp"
#include "cgt/fgword.hpp"
#include "cgt/hnn.hpp"
#include "cgt/miller.hpp"
#include "cgt/presentation_io.hpp"
#include "cgt/randmeasure.hpp"

namespace {

using nlohmann::json;

std::string exact(const cgt::Rational& q) { return q.get_str(); }

std::string decimal(const cgt::Rational& q, int digits = 12) {
  mpf_class f(q, 256);
  char buf[128];
  gmp_snprintf(buf, sizeof buf, "%.*Fe", digits - 1, f.get_mpf_t());
  return buf;
}

std::string syllables_text(const std::vector<std::pair<int, cgt::FreeWord>>& sylls) {
  std::string out;
  for (const auto& [sign, word] : sylls) {
    out += sign > 0 ? "(+1," : "(-1,";
    out += word.str();
    out += ")";
  }
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

int run_nf(const std::string& path, const std::string& word_text, bool as_json) {
  cgt::PresentationFile file = cgt::load_presentation(path);
  cgt::MillerGroup g = cgt::make_miller(file);
  cgt::FreeWord w = cgt::resolve_word(file, g.alphabet(), word_text);
  cgt::MillerNormalForm nf = cgt::normal_form_miller(g, w);
  if (as_json) {
    json out{{"u", nf.u.str()}, {"s0", nf.s0.str()}, {"k", nf.length()}};
    json sylls = json::array();
    for (const auto& [sign, s] : nf.syllables)
      sylls.push_back({{"sign", sign}, {"word", s.str()}});
    out["syllables"] = sylls;
    std::cout << out.dump() << "\n";
  } else {
    std::cout << "u=" << nf.u.str() << " s0=" << nf.s0.str() << " k=" << nf.length();
    if (nf.length() > 0) std::cout << " syll=" << syllables_text(nf.syllables);
    std::cout << "\n";
  }
  return 0;
}

int run_conj(const std::string& path, const std::string& g_text, const std::string& h_text,
             bool as_json, bool reverify) {
  cgt::PresentationFile file = cgt::load_presentation(path);
  cgt::MillerGroup g = cgt::make_miller(file);
  cgt::FreeWord lhs = cgt::resolve_word(file, g.alphabet(), g_text);
  cgt::FreeWord rhs = cgt::resolve_word(file, g.alphabet(), h_text);
  auto start = std::chrono::steady_clock::now();
  cgt::ConjugacyCertificate cert = cgt::conjugacy_search_miller(g, lhs, rhs);
  double ms = elapsed_ms(start);
  bool verified = cert.verdict == cgt::MillerVerdict::Conjugate &&
                  cgt::verify_certificate(g, lhs, rhs, cert);
  const char* verdict = cert.verdict == cgt::MillerVerdict::Conjugate      ? "conjugate"
                        : cert.verdict == cgt::MillerVerdict::NotConjugate ? "not-conjugate"
                                                                           : "outside-scope";
  if (as_json) {
    json out{{"verdict", verdict},
             {"conjugator", cert.conjugator.str()},
             {"trace", cert.trace},
             {"permutation_index", cert.permutation_index},
             {"exponent", cert.exponent},
             {"verified", verified},
             {"elapsed_ms", ms}};
    std::cout << out.dump() << "\n";
  } else {
    std::cout << "verdict=" << verdict;
    if (cert.verdict == cgt::MillerVerdict::Conjugate)
      std::cout << " conjugator=" << cert.conjugator.str();
    if (!cert.trace.empty()) {
      std::cout << " case=";
      for (size_t i = 0; i < cert.trace.size(); ++i)
        std::cout << (i ? "," : "") << cert.trace[i];
    }
    if (cert.permutation_index) std::cout << " perm=" << cert.permutation_index;
    std::cout << " l=" << cert.exponent;
    if (reverify) std::cout << " verified=" << (verified ? "yes" : "no");
    std::cout << "\n";
  }
  if (reverify && cert.verdict == cgt::MillerVerdict::Conjugate && !verified) return 70;
  switch (cert.verdict) {
    case cgt::MillerVerdict::Conjugate:
      return 0;
    case cgt::MillerVerdict::NotConjugate:
      return 1;
    case cgt::MillerVerdict::OutsideScope:
      return 2;
  }
  return 70;
}

int run_density(int n, int m, int kmax, bool csv, bool decimals) {
  if (m <= 1) throw cgt::ParseError("m > 1 required", 0);
  auto rows = cgt::density_table(n, m, kmax);
  if (csv) {
    std::cout << "k,f,bound,margin";
    if (decimals) std::cout << ",f_dec,bound_dec,margin_dec";
    std::cout << "\n";
  }
  for (const auto& row : rows) {
    cgt::Rational margin = row.bound - row.f;
    margin.canonicalize();
    if (csv) {
      std::cout << row.k << "," << exact(row.f) << "," << exact(row.bound) << ","
                << exact(margin);
      if (decimals)
        std::cout << "," << decimal(row.f) << "," << decimal(row.bound) << ","
                  << decimal(margin);
      std::cout << "\n";
    } else {
      std::cout << "k=" << row.k << " f=" << exact(row.f) << " bound=" << exact(row.bound)
                << " margin=" << exact(margin);
      if (decimals)
        std::cout << " f_dec=" << decimal(row.f) << " bound_dec=" << decimal(row.bound);
      std::cout << "\n";
    }
    if (row.k > 1 && !row.holds) {
      std::cerr << "bound violated at k=" << row.k << "\n";
      return 70;
    }
  }
  return 0;
}

int run_sample(const std::string& path, double sigma1, double sigma2, long long trials,
               std::uint64_t seed, bool serial, bool as_json) {
  if (!(sigma1 > 0.0) || sigma1 > 1.0 || !(sigma2 > 0.0) || sigma2 > 1.0)
    throw cgt::ParseError("sigma1 and sigma2 must lie in (0, 1]", 0);
  cgt::PresentationFile file = cgt::load_presentation(path);
  cgt::MillerGroup g = cgt::make_miller(file);
  long long singular = cgt::count_singular_samples(g, sigma1, sigma2, trials, seed, !serial);
  cgt::DensityEstimate est = cgt::wilson_interval(singular, trials);
  double sigma = std::sqrt(sigma1 * (1 - sigma1) / static_cast<double>(trials));
  double delta = std::abs(est.estimate - sigma1);
  if (as_json) {
    json out{{"trials", trials},
             {"singular", singular},
             {"fraction", est.estimate},
             {"ci_lo", est.lo},
             {"ci_hi", est.hi},
             {"sigma1", sigma1},
             {"delta", delta},
             {"within_3_sigma", delta < 3 * sigma}};
    std::cout << out.dump() << "\n";
  } else {
    char line[512];
    std::snprintf(line, sizeof line,
                  "trials=%lld singular=%lld fraction=%.6f ci=[%.6f,%.6f] sigma1=%.6f "
                  "delta=%.6f within3sigma=%s",
                  trials, singular, est.estimate, est.lo, est.hi, sigma1, delta,
                  delta < 3 * sigma ? "yes" : "no");
    std::cout << line << "\n";
  }
  return 0;
}

int run_hnn(const std::string& path, const std::string& sub,
            const std::vector<std::string>& words, int max_chain, int branch_cap) {
  cgt::PresentationFile file = cgt::load_presentation(path);
  cgt::HnnPresentation p = cgt::make_hnn(file);
  auto word = [&](size_t i) {
    if (i >= words.size()) throw cgt::ParseError("missing word argument", 0);
    return cgt::resolve_word(file, p.alphabet(), words[i]);
  };
  if (sub == "nf") {
    cgt::HnnNormalForm nf = cgt::normal_form(p, word(0));
    std::cout << "head=" << nf.head.str() << " k=" << nf.length();
    if (nf.length() > 0) std::cout << " syll=" << syllables_text(nf.syllables);
    std::cout << "\n";
    return 0;
  }
  if (sub == "cyc") {
    auto [nf, x] = cgt::cyc_reduce(p, word(0));
    std::cout << "head=" << nf.head.str() << " k=" << nf.length();
    if (nf.length() > 0) std::cout << " syll=" << syllables_text(nf.syllables);
    std::cout << " conjugator=" << x.str() << "\n";
    return 0;
  }
  if (sub == "regular") {
    bool reg = cgt::is_regular(p, word(0), branch_cap);
    std::cout << (reg ? "regular" : "singular") << "\n";
    return 0;
  }
  // conj
  cgt::HnnConjugacyResult res =
      cgt::conjugacy_search_regular(p, word(0), word(1), branch_cap, max_chain);
  switch (res.verdict) {
    case cgt::ConjugacyVerdict::Conjugate:
      std::cout << "verdict=conjugate conjugator=" << res.conjugator.str() << "\n";
      return 0;
    case cgt::ConjugacyVerdict::NotConjugate:
      std::cout << "verdict=not-conjugate\n";
      return 1;
    case cgt::ConjugacyVerdict::Unknown:
      std::cout << "verdict=unknown note=" << res.note << "\n";
      return 2;
  }
  return 70;
}

int run_solve(const std::string& alphabet_text, const std::string& a_text,
              const std::string& b_text, const std::string& d_text) {
  std::vector<std::string> names;
  std::istringstream is(alphabet_text);
  std::string tok;
  while (is >> tok) names.push_back(tok);
  cgt::AlphabetPtr alpha = cgt::Alphabet::make(names);
  cgt::FreeWord a = cgt::FreeWord::parse(alpha, a_text);
  cgt::FreeWord b = cgt::FreeWord::parse(alpha, b_text);
  cgt::FreeWord d = cgt::FreeWord::parse(alpha, d_text);
  cgt::PowerSolution sol = cgt::solve_power_equation(a, b, d);
  switch (sol.tag) {
    case cgt::PowerSolution::Tag::AllIntegers:
      std::cout << "all-integers\n";
      break;
    case cgt::PowerSolution::Tag::Unique:
      std::cout << "l=" << sol.exponent << "\n";
      break;
    case cgt::PowerSolution::Tag::NoSolution:
      std::cout << "no-solution\n";
      break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational toolkit for HNN-extensions"};
  app.require_subcommand(1);
  int code = 0;

  std::string pres, word1, word2, word3, alphabet_text, hnn_sub;
  std::vector<std::string> hnn_words;
  bool as_json = false, reverify = false, csv = false, decimals = false, serial = false;
  int n = 1, m = 2, kmax = 10, max_chain = -1, branch_cap = 16;
  double sigma1 = 0.1, sigma2 = 0.3;
  long long trials = 100000;
  std::uint64_t seed = 0;

  CLI::App* nf = app.add_subcommand("nf", "normal form of a word");
  nf->add_option("presentation", pres)->required();
  nf->add_option("word", word1)->required();
  nf->add_flag("--json", as_json);
  nf->callback([&]() { code = run_nf(pres, word1, as_json); });

  CLI::App* conj = app.add_subcommand("conj", "conjugacy search with certificate");
  conj->add_option("presentation", pres)->required();
  conj->add_option("g", word1)->required();
  conj->add_option("g2", word2)->required();
  conj->add_flag("--json", as_json);
  conj->add_flag("--verify", reverify);
  conj->callback([&]() { code = run_conj(pres, word1, word2, as_json, reverify); });

  CLI::App* density = app.add_subcommand("density", "exact sphere frequencies and bounds");
  density->add_option("--n", n)->required();
  density->add_option("--m", m)->required();
  density->add_option("--kmax", kmax)->required();
  density->add_flag("--csv", csv);
  density->add_flag("--decimals", decimals);
  density->callback([&]() { code = run_density(n, m, kmax, csv, decimals); });

  CLI::App* sample = app.add_subcommand("sample", "Monte-Carlo singular fraction");
  sample->add_option("presentation", pres)->required();
  sample->add_option("--sigma1", sigma1)->required();
  sample->add_option("--sigma2", sigma2)->required();
  sample->add_option("--trials", trials);
  sample->add_option("--seed", seed);
  sample->add_flag("--serial", serial);
  sample->add_flag("--json", as_json);
  sample->callback(
      [&]() { code = run_sample(pres, sigma1, sigma2, trials, seed, serial, as_json); });

  CLI::App* hnn = app.add_subcommand("hnn", "generic HNN engine over a free base");
  hnn->add_option("presentation", pres)->required();
  hnn->add_option("subcommand", hnn_sub)
      ->required()
      ->check(CLI::IsMember({"nf", "cyc", "regular", "conj"}));
  hnn->add_option("words", hnn_words);
  hnn->add_option("--max-chain", max_chain);
  hnn->add_option("--branch-cap", branch_cap);
  hnn->callback([&]() { code = run_hnn(pres, hnn_sub, hnn_words, max_chain, branch_cap); });

  CLI::App* solve = app.add_subcommand("solve-albl", "solve a^l b^l = d over a free group");
  solve->add_option("--alphabet", alphabet_text)->required();
  solve->add_option("a", word1)->required();
  solve->add_option("b", word2)->required();
  solve->add_option("d", word3)->required();
  solve->callback([&]() { code = run_solve(alphabet_text, word1, word2, word3); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  } catch (const cgt::ParseError& e) {
    std::cerr << "parse error";
    if (e.line) std::cerr << " (line " << e.line << ")";
    if (e.column) std::cerr << " (token " << e.column << ")";
    std::cerr << ": " << e.what() << "\n";
    return 65;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return code;
}
