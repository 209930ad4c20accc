#include "discoscore/baselines.hpp"

#include <map>

#include "discoscore/features.hpp"
#include "discoscore/sentgraph.hpp"

namespace discoscore {

namespace {

struct ContentToken {
  std::string key;
  std::size_t sentence;
};

std::vector<ContentToken> content_tokens(const AnnotatedDocument& doc, const BaselineOptions& options) {
  std::vector<ContentToken> out;
  for (const auto& t : doc.tokens()) {
    if (is_punctuation(t.surface)) continue;
    std::string key = normalize_surface(t.surface, options.normalize);
    if (options.stopwords != nullptr && options.stopwords->count(key) > 0) continue;
    out.push_back({std::move(key), t.sentence_index});
  }
  return out;
}

// Equal surfaces, or both in the lexicon with cosine above the threshold.
class WordMatcher {
 public:
  WordMatcher(const StaticLexicon* lexicon, double threshold) : lexicon_(lexicon), threshold_(threshold) {}

  bool similar(const std::string& a, const std::string& b) const {
    if (lexicon_ == nullptr) return false;
    const Vector* va = lexicon_->find(a);
    const Vector* vb = lexicon_->find(b);
    return va != nullptr && vb != nullptr && cosine(*va, *vb) > threshold_;
  }

  bool matches(const std::string& a, const std::string& b) const { return a == b || similar(a, b); }

 private:
  const StaticLexicon* lexicon_;
  double threshold_;
};

std::map<std::string, std::set<std::size_t>> sentences_by_word(const std::vector<ContentToken>& tokens) {
  std::map<std::string, std::set<std::size_t>> out;
  for (const auto& t : tokens) out[t.key].insert(t.sentence);
  return out;
}

}  // namespace

CohesionRatios cohesion_ratios(const AnnotatedDocument& doc, const BaselineOptions& options) {
  const auto tokens = content_tokens(doc, options);
  if (tokens.empty()) return {};
  const auto by_word = sentences_by_word(tokens);
  const WordMatcher matcher(options.lexicon, options.synonym_threshold);

  std::set<std::string> devices;
  for (const auto& [word, sentences] : by_word) {
    if (sentences.size() >= 2) {
      devices.insert(word);
      continue;
    }
    const std::size_t home = *sentences.begin();
    for (const auto& other : tokens) {
      if (other.sentence != home && matcher.similar(word, other.key)) {
        devices.insert(word);
        break;
      }
    }
  }
  std::size_t device_tokens = 0;
  for (const auto& t : tokens) device_tokens += devices.count(t.key);

  CohesionRatios out;
  out.lc = static_cast<double>(devices.size()) / static_cast<double>(by_word.size());
  out.rc = static_cast<double>(device_tokens) / static_cast<double>(tokens.size());
  return out;
}

double lc(const AnnotatedDocument& doc, const BaselineOptions& options) {
  return cohesion_ratios(doc, options).lc;
}

double rc(const AnnotatedDocument& doc, const BaselineOptions& options) {
  return cohesion_ratios(doc, options).rc;
}

double entity_graph(const AnnotatedDocument& doc, const FocusOptions& options) {
  return conn(build_sentence_graph(doc, extract_nn_foci(doc, options), GraphVariant::Unweighted));
}

double lexical_graph(const AnnotatedDocument& doc, double threshold, const BaselineOptions& options) {
  const auto tokens = content_tokens(doc, options);
  const std::size_t n = doc.sentence_count();
  std::vector<std::set<std::string>> words(n);
  for (const auto& t : tokens) words[t.sentence].insert(t.key);

  const WordMatcher matcher(options.lexicon, threshold);
  SentenceGraph graph;
  graph.variant = GraphVariant::Unweighted;
  graph.adjacency = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool linked = false;
      for (auto a = words[i].begin(); !linked && a != words[i].end(); ++a) {
        for (auto b = words[j].begin(); !linked && b != words[j].end(); ++b) linked = matcher.matches(*a, *b);
      }
      if (linked) {
        graph.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 / static_cast<double>(j - i);
      }
    }
  }
  return conn(graph);
}

std::vector<LexicalChain> lexical_chains(const AnnotatedDocument& doc, const BaselineOptions& options) {
  std::vector<LexicalChain> chains;
  for (auto& [word, sentences] : sentences_by_word(content_tokens(doc, options))) {
    if (sentences.size() >= 2) chains.push_back({word, std::move(sentences)});
  }
  return chains;
}

double lexical_chain_score(const AnnotatedDocument& hyp, const AnnotatedDocument& ref,
                           const BaselineOptions& options) {
  const auto ref_chains = lexical_chains(ref, options);
  if (ref_chains.empty()) return 0.0;
  const auto hyp_chains = lexical_chains(hyp, options);
  const WordMatcher matcher(options.lexicon, options.synonym_threshold);

  double total = 0.0;
  for (const auto& rc : ref_chains) {
    double best = 0.0;
    for (const auto& hc : hyp_chains) {
      if (!matcher.matches(rc.word, hc.word)) continue;
      std::size_t common = 0;
      for (std::size_t p : rc.positions) common += hc.positions.count(p);
      const std::size_t united = rc.positions.size() + hc.positions.size() - common;
      best = std::max(best, static_cast<double>(common) / static_cast<double>(united));
    }
    total += best;
  }
  return total / static_cast<double>(ref_chains.size());
}

}  // namespace discoscore
