#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "discoscore/text.hpp"

namespace discoscore {

enum class Pos { Noun, Other };

// Maps an exporter tag onto the coarse noun/other split. Accepts the
// universal tagset (NOUN, PROPN) and Penn tags (NN, NNS, NNP, NNPS).
Pos coarse_pos(std::string_view tag);

struct Token {
  std::string surface;
  Pos pos = Pos::Other;
  std::string tag;  // tag as supplied, e.g. "NOUN" or "NNP"
  std::size_t sentence_index = 0;
  std::size_t token_index = 0;
  std::optional<std::size_t> embedding_ref;

  bool is_noun() const { return pos == Pos::Noun; }
  bool operator==(const Token&) const = default;
};

// Half-open token range [begin, end).
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const SentenceSpan&) const = default;
};

enum class DocKind { Hypothesis, Reference };

std::string_view to_string(DocKind kind);

// A surface form paired with its tag, as read from annotated input.
struct TaggedWord {
  std::string surface;
  std::string tag;
};

class AnnotatedDocument {
 public:
  AnnotatedDocument() = default;

  // Builds the token/span tables from nested sentences. Throws Error if
  // there is no sentence or a sentence is empty.
  static AnnotatedDocument from_sentences(
      std::string doc_id, DocKind kind, std::optional<std::string> system_id,
      const std::vector<std::vector<TaggedWord>>& sentences);

  const std::string& doc_id() const { return doc_id_; }
  DocKind kind() const { return kind_; }
  const std::optional<std::string>& system_id() const { return system_id_; }
  const std::vector<SentenceSpan>& sentences() const { return sentences_; }
  const std::vector<Token>& tokens() const { return tokens_; }

  std::size_t sentence_count() const { return sentences_.size(); }
  std::size_t token_count() const { return tokens_.size(); }
  std::size_t noun_count() const;

  // Tokens joined by single spaces; used to detect identical hyp/ref texts.
  std::string text() const;

  // Re-tags every token: NOUN if its normalised surface is in `nouns`.
  void tag_nouns(const WordSet& nouns);

  bool operator==(const AnnotatedDocument&) const = default;

 private:
  std::string doc_id_;
  DocKind kind_ = DocKind::Hypothesis;
  std::optional<std::string> system_id_;
  std::vector<SentenceSpan> sentences_;
  std::vector<Token> tokens_;
};

using Ratings = std::map<std::string, double>;

struct RatedInstance {
  std::string doc_id;
  std::string system_id;
  AnnotatedDocument hypothesis;
  std::vector<AnnotatedDocument> references;
  Ratings ratings;

  bool operator==(const RatedInstance&) const = default;
};

// Naive segmenter for raw text: sentences end at a token ending in . ! or ?
// that is followed by whitespace or end of text; ASCII punctuation at word
// edges is detached into separate tokens. Every token is tagged OTHER.
AnnotatedDocument segment_plaintext(std::string_view text, std::string doc_id = {},
                                    DocKind kind = DocKind::Hypothesis,
                                    std::optional<std::string> system_id = std::nullopt);

struct LoadOptions {
  // Raw-text documents are tagged with this noun lexicon; null leaves them
  // all OTHER.
  const WordSet* noun_lexicon = &default_noun_lexicon();
};

// Reads the NDJSON dataset. Errors name the offending line and field.
std::vector<RatedInstance> load_dataset(const std::string& path, const LoadOptions& options = {});
std::vector<RatedInstance> parse_dataset(std::string_view ndjson, const LoadOptions& options = {});

// Serialises an instance in annotated form: one NDJSON line that
// parse_dataset reads back into an identical structure.
nlohmann::json to_json(const RatedInstance& instance);
nlohmann::json document_to_json(const AnnotatedDocument& doc);

}  // namespace discoscore
