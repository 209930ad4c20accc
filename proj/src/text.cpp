#include "discoscore/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "discoscore/error.hpp"

namespace discoscore {

// Generated from data/*.txt at configure time.
extern const char* const kBundledStopwords;
extern const char* const kBundledNouns;

namespace {

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

}  // namespace

std::string normalize_surface(std::string_view surface,
                              const NormalizeOptions& options) {
  std::string_view core = surface;
  if (options.strip_punctuation) {
    while (!core.empty() && is_ascii_punct(core.front())) core.remove_prefix(1);
    while (!core.empty() && is_ascii_punct(core.back())) core.remove_suffix(1);
    if (core.empty()) core = surface;
  }
  return options.lowercase ? to_lower_ascii(core) : std::string(core);
}

bool is_punctuation(std::string_view surface) {
  if (surface.empty()) return false;
  for (char c : surface) {
    if (!is_ascii_punct(c)) return false;
  }
  return true;
}

WordSet parse_word_list(std::string_view text) {
  WordSet words;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    if (start == line.size() || line[start] == '#') continue;
    words.insert(to_lower_ascii(std::string_view(line).substr(start)));
  }
  return words;
}

WordSet load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word list: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_word_list(buffer.str());
}

const WordSet& default_stopwords() {
  static const WordSet words = parse_word_list(kBundledStopwords);
  return words;
}

const WordSet& default_noun_lexicon() {
  static const WordSet words = parse_word_list(kBundledNouns);
  return words;
}

}  // namespace discoscore
