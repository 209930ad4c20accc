#include "discoscore/corpus.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "discoscore/error.hpp"

namespace discoscore {

using nlohmann::json;

Pos coarse_pos(std::string_view tag) {
  if (tag == "NOUN" || tag == "PROPN") return Pos::Noun;
  if (tag.size() >= 2 && tag.substr(0, 2) == "NN") return Pos::Noun;
  return Pos::Other;
}

std::string_view to_string(DocKind kind) {
  return kind == DocKind::Hypothesis ? "hypothesis" : "reference";
}

AnnotatedDocument AnnotatedDocument::from_sentences(
    std::string doc_id, DocKind kind, std::optional<std::string> system_id,
    const std::vector<std::vector<TaggedWord>>& sentences) {
  if (sentences.empty()) throw Error("document '" + doc_id + "' has no sentence");
  AnnotatedDocument doc;
  doc.doc_id_ = std::move(doc_id);
  doc.kind_ = kind;
  doc.system_id_ = std::move(system_id);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (sentences[s].empty()) {
      throw Error("document '" + doc.doc_id_ + "': sentence " + std::to_string(s) + " is empty");
    }
    SentenceSpan span{doc.tokens_.size(), doc.tokens_.size()};
    for (const auto& word : sentences[s]) {
      Token token;
      token.surface = word.surface;
      token.tag = word.tag;
      token.pos = coarse_pos(word.tag);
      token.sentence_index = s;
      token.token_index = doc.tokens_.size();
      doc.tokens_.push_back(std::move(token));
    }
    span.end = doc.tokens_.size();
    doc.sentences_.push_back(span);
  }
  return doc;
}

std::size_t AnnotatedDocument::noun_count() const {
  std::size_t n = 0;
  for (const auto& t : tokens_) n += t.is_noun() ? 1 : 0;
  return n;
}

std::string AnnotatedDocument::text() const {
  std::string out;
  for (const auto& t : tokens_) {
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

void AnnotatedDocument::tag_nouns(const WordSet& nouns) {
  for (auto& t : tokens_) {
    const bool noun = !is_punctuation(t.surface) && nouns.count(normalize_surface(t.surface)) > 0;
    t.pos = noun ? Pos::Noun : Pos::Other;
    t.tag = noun ? "NOUN" : "OTHER";
  }
}

// ---------------------------------------------------------------------------
// Plain-text segmentation

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_edge_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

AnnotatedDocument segment_plaintext(std::string_view text, std::string doc_id, DocKind kind,
                                    std::optional<std::string> system_id) {
  std::vector<std::vector<TaggedWord>> sentences(1);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::string_view chunk = text.substr(i, j - i);
    i = j;

    std::size_t lead = 0;
    while (lead < chunk.size() && is_edge_punct(chunk[lead])) ++lead;
    std::size_t trail = chunk.size();
    while (trail > lead && is_edge_punct(chunk[trail - 1])) --trail;

    auto& sentence = sentences.back();
    for (std::size_t k = 0; k < lead; ++k) sentence.push_back({std::string(1, chunk[k]), "OTHER"});
    if (trail > lead) sentence.push_back({std::string(chunk.substr(lead, trail - lead)), "OTHER"});
    for (std::size_t k = std::max(trail, lead); k < chunk.size(); ++k) {
      sentence.push_back({std::string(1, chunk[k]), "OTHER"});
    }
    // The chunk is followed by whitespace or the end of the text here.
    if (is_terminal(chunk.back())) sentences.emplace_back();
  }
  if (sentences.back().empty()) sentences.pop_back();
  if (sentences.empty()) throw Error("cannot segment empty text");
  return AnnotatedDocument::from_sentences(std::move(doc_id), kind, std::move(system_id), sentences);
}

// ---------------------------------------------------------------------------
// NDJSON dataset

namespace {

const json& require(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(std::string("missing required field '") + field + "'", line);
  return *it;
}

std::string require_string(const json& obj, const char* field, std::size_t line) {
  const json& v = require(obj, field, line);
  if (!v.is_string()) throw ParseError(std::string("field '") + field + "' must be a string", line);
  return v.get<std::string>();
}

AnnotatedDocument parse_document(const json& v, const char* field, std::size_t line,
                                 const std::string& doc_id, DocKind kind,
                                 std::optional<std::string> system_id,
                                 const LoadOptions& options) {
  try {
    if (v.is_string()) {
      auto doc = segment_plaintext(v.get<std::string>(), doc_id, kind, std::move(system_id));
      if (options.noun_lexicon != nullptr) doc.tag_nouns(*options.noun_lexicon);
      return doc;
    }
    if (!v.is_object()) throw ParseError("expected string or annotated object", line);
    const json& sents = require(v, "sentences", line);
    if (!sents.is_array()) throw ParseError("'sentences' must be an array", line);
    std::vector<std::vector<TaggedWord>> sentences;
    for (const auto& s : sents) {
      if (!s.is_array()) throw ParseError("each sentence must be an array", line);
      auto& out = sentences.emplace_back();
      for (const auto& w : s) {
        if (!w.is_object()) throw ParseError("each token must be an object", line);
        out.push_back({require_string(w, "w", line), require_string(w, "p", line)});
      }
    }
    return AnnotatedDocument::from_sentences(doc_id, kind, std::move(system_id), sentences);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("field '") + field + "': " + e.what(), line);
  }
}

RatedInstance parse_instance(const json& obj, std::size_t line, const LoadOptions& options) {
  if (!obj.is_object()) throw ParseError("expected a JSON object", line);
  RatedInstance inst;
  inst.doc_id = require_string(obj, "doc_id", line);
  inst.system_id = require_string(obj, "system_id", line);
  inst.hypothesis = parse_document(require(obj, "hypothesis", line), "hypothesis", line,
                                   inst.doc_id, DocKind::Hypothesis, inst.system_id, options);
  const json& refs = require(obj, "references", line);
  if (!refs.is_array()) throw ParseError("field 'references' must be an array", line);
  if (refs.empty()) throw ParseError("field 'references' must not be empty", line);
  for (const auto& r : refs) {
    inst.references.push_back(parse_document(r, "references", line, inst.doc_id,
                                             DocKind::Reference, std::nullopt, options));
  }
  const json& ratings = require(obj, "ratings", line);
  if (!ratings.is_object()) throw ParseError("field 'ratings' must be an object", line);
  for (const auto& [aspect, value] : ratings.items()) {
    if (!value.is_number()) throw ParseError("rating '" + aspect + "' must be a number", line);
    const double x = value.get<double>();
    if (!std::isfinite(x)) throw ParseError("rating '" + aspect + "' is not finite", line);
    inst.ratings[aspect] = x;
  }
  return inst;
}

}  // namespace

std::vector<RatedInstance> parse_dataset(std::string_view ndjson, const LoadOptions& options) {
  std::vector<RatedInstance> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::optional<std::set<std::string>> aspects;
  std::istringstream in{std::string(ndjson)};
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
    auto inst = parse_instance(obj, line, options);
    if (!seen.emplace(inst.system_id, inst.doc_id).second) {
      throw ParseError("duplicate key (system_id='" + inst.system_id + "', doc_id='" +
                           inst.doc_id + "')",
                       line);
    }
    std::set<std::string> keys;
    for (const auto& [k, v] : inst.ratings) keys.insert(k);
    if (!aspects) {
      aspects = keys;
    } else if (*aspects != keys) {
      throw ParseError("rating aspects differ from the first record", line);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<RatedInstance> load_dataset(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), options);
}

json document_to_json(const AnnotatedDocument& doc) {
  json sentences = json::array();
  for (const auto& span : doc.sentences()) {
    json s = json::array();
    for (std::size_t t = span.begin; t < span.end; ++t) {
      const auto& tok = doc.tokens()[t];
      s.push_back({{"w", tok.surface}, {"p", tok.tag}});
    }
    sentences.push_back(std::move(s));
  }
  return json{{"sentences", std::move(sentences)}};
}

json to_json(const RatedInstance& instance) {
  json refs = json::array();
  for (const auto& r : instance.references) refs.push_back(document_to_json(r));
  json ratings = json::object();
  for (const auto& [k, v] : instance.ratings) ratings[k] = v;
  return json{{"doc_id", instance.doc_id},
              {"system_id", instance.system_id},
              {"hypothesis", document_to_json(instance.hypothesis)},
              {"references", std::move(refs)},
              {"ratings", std::move(ratings)}};
}

}  // namespace discoscore
