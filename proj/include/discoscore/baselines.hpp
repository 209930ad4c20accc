#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "discoscore/corpus.hpp"
#include "discoscore/embeddings.hpp"
#include "discoscore/focus.hpp"
#include "discoscore/text.hpp"

namespace discoscore {

// Shared knobs of the lexical baselines. A content word is a non-punctuation
// token whose normalised surface is not a stopword. Without a lexicon only
// exact surface repetition counts as a match.
struct BaselineOptions {
  const WordSet* stopwords = &default_stopwords();
  const StaticLexicon* lexicon = nullptr;
  double synonym_threshold = 0.8;
  NormalizeOptions normalize;
};

// Cohesion-device ratios. A content word type is a device when it occurs
// in two or more sentences, or its vector has cosine above the synonym
// threshold with a content word of another sentence.
struct CohesionRatios {
  double lc = 0.0;  // device types / content word types
  double rc = 0.0;  // device tokens / content word tokens
};

CohesionRatios cohesion_ratios(const AnnotatedDocument& doc, const BaselineOptions& options = {});
double lc(const AnnotatedDocument& doc, const BaselineOptions& options = {});
double rc(const AnnotatedDocument& doc, const BaselineOptions& options = {});

// Conn of the unweighted noun sentence graph.
double entity_graph(const AnnotatedDocument& doc, const FocusOptions& options = {});

// Mean of the distance-discounted adjacency where sentences are linked by a
// repeated content word or a pair with cosine above `threshold`.
double lexical_graph(const AnnotatedDocument& doc, double threshold, const BaselineOptions& options = {});

struct LexicalChain {
  std::string word;
  std::set<std::size_t> positions;  // sentence indices, at least two
};

// One chain per content word type found in more than one sentence,
// ordered by word.
std::vector<LexicalChain> lexical_chains(const AnnotatedDocument& doc, const BaselineOptions& options = {});

// Mean over reference chains of the best Jaccard overlap with a matching
// hypothesis chain; 0 when the reference has no chain.
double lexical_chain_score(const AnnotatedDocument& hyp, const AnnotatedDocument& ref,
                           const BaselineOptions& options = {});

}  // namespace discoscore
