#include "cgt/presentation_io.hpp"

#include <fstream>
#include <sstream>

#include "cgt/errors.hpp"

namespace cgt {

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (c == ';') {
      out.push_back(strip(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(strip(current));
  return out;
}

}  // namespace

PresentationFile parse_presentation(std::istream& in) {
  PresentationFile file;
  bool kind_seen = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = strip(line);
    if (line.empty()) continue;
    size_t colon = line.find(':');
    std::string key, value;
    if (line.rfind("let ", 0) == 0) {
      size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("malformed let line (expected `let name = word`)", lineno);
      std::string name = strip(line.substr(4, eq - 4));
      if (name.empty()) throw ParseError("let line with empty name", lineno);
      file.definitions.emplace_back(name, strip(line.substr(eq + 1)));
      continue;
    }
    if (colon == std::string::npos)
      throw ParseError("expected `key: value` or `let name = word`", lineno);
    key = strip(line.substr(0, colon));
    value = strip(line.substr(colon + 1));
    if (key == "kind") {
      if (value == "miller") {
        file.kind = PresentationFile::Kind::Miller;
      } else if (value == "hnn") {
        file.kind = PresentationFile::Kind::Hnn;
      } else {
        throw ParseError("unknown kind '" + value + "' (expected miller or hnn)", lineno);
      }
      kind_seen = true;
    } else if (key == "generators") {
      file.generators = split_words(value);
    } else if (key == "relators") {
      file.relators = split_list(value);
    } else if (key == "base") {
      file.base = split_words(value);
    } else if (key == "stable") {
      file.stable = value;
    } else if (key == "agens") {
      file.a_generators = split_list(value);
    } else if (key == "bgens") {
      file.b_generators = split_list(value);
    } else {
      throw ParseError("unknown key '" + key + "'", lineno);
    }
  }
  if (!kind_seen) throw ParseError("missing `kind:` line", 0);
  return file;
}

PresentationFile parse_presentation_text(const std::string& text) {
  std::istringstream is(text);
  return parse_presentation(is);
}

PresentationFile load_presentation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open presentation file '" + path + "'", 0);
  return parse_presentation(in);
}

MillerGroup make_miller(const PresentationFile& file) {
  if (file.kind != PresentationFile::Kind::Miller)
    throw ParseError("presentation file is not of kind miller", 0);
  if (file.generators.empty()) throw ParseError("missing `generators:` line", 0);
  if (file.relators.empty()) throw ParseError("missing `relators:` line", 0);
  return MillerGroup::build(file.generators, file.relators);
}

HnnPresentation make_hnn(const PresentationFile& file) {
  if (file.kind != PresentationFile::Kind::Hnn)
    throw ParseError("presentation file is not of kind hnn", 0);
  if (file.base.empty()) throw ParseError("missing `base:` line", 0);
  if (file.stable.empty()) throw ParseError("missing `stable:` line", 0);
  if (file.a_generators.size() != file.b_generators.size())
    throw ParseError("agens and bgens must pair up", 0);
  AlphabetPtr base = Alphabet::make(file.base);
  std::vector<FreeWord> a, b;
  for (const std::string& text : file.a_generators) a.push_back(FreeWord::parse(base, text));
  for (const std::string& text : file.b_generators) b.push_back(FreeWord::parse(base, text));
  return make_free_base_hnn(base, file.stable, std::move(a), std::move(b));
}

FreeWord resolve_word(const PresentationFile& file, const AlphabetPtr& alphabet,
                      const std::string& text) {
  std::string trimmed = text;
  for (const auto& [name, body] : file.definitions) {
    if (name == trimmed) return FreeWord::parse(alphabet, body);
  }
  return FreeWord::parse(alphabet, trimmed);
}

}  // namespace cgt
