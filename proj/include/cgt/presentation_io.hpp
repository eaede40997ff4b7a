#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "cgt/hnn.hpp"
#include "cgt/miller.hpp"

namespace cgt {

// Text format shared by both presentation kinds, line oriented:
//
//   kind: miller                      kind: hnn
//   generators: s1 s2                 base: a b
//   relators: s1 s1 ; s1 s2 s1^-1     stable: t
//   let g = t1 q                      agens: a
//                                     bgens: a a
//
// Words use the standard syntax (`name` or `name^-1`, `1` for the empty
// word); `;` separates words in a list. `#` starts a comment.
struct PresentationFile {
  enum class Kind { Miller, Hnn };
  Kind kind = Kind::Miller;
  std::vector<std::string> generators;
  std::vector<std::string> relators;
  std::vector<std::string> base;
  std::string stable;
  std::vector<std::string> a_generators;
  std::vector<std::string> b_generators;
  std::vector<std::pair<std::string, std::string>> definitions;
};

PresentationFile parse_presentation(std::istream& in);
PresentationFile parse_presentation_text(const std::string& text);
PresentationFile load_presentation(const std::string& path);

MillerGroup make_miller(const PresentationFile& file);
HnnPresentation make_hnn(const PresentationFile& file);

// A word argument is either the name bound by a `let` line or a literal word.
FreeWord resolve_word(const PresentationFile& file, const AlphabetPtr& alphabet,
                      const std::string& text);

}  // namespace cgt
