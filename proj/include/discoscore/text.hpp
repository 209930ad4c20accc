#pragma once

#include <string>
#include <string_view>
#include <unordered_set>

namespace discoscore {

// Options for turning a surface form into a matching key.
struct NormalizeOptions {
  bool lowercase = true;
  bool strip_punctuation = true;
};

// ASCII lowercasing and stripping of leading/trailing ASCII punctuation.
// Falls back to the untouched surface if stripping leaves nothing.
std::string normalize_surface(std::string_view surface,
                              const NormalizeOptions& options = {});

// True when every byte is ASCII punctuation (and the string is non-empty).
bool is_punctuation(std::string_view surface);

using WordSet = std::unordered_set<std::string>;

// One word per line; blank lines and lines starting with '#' are ignored.
// Entries are lowercased.
WordSet load_word_list(const std::string& path);
WordSet parse_word_list(std::string_view text);

// Bundled lists compiled in from data/.
const WordSet& default_stopwords();
const WordSet& default_noun_lexicon();

}  // namespace discoscore
