#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "discoscore/embeddings.hpp"
#include "discoscore/focus.hpp"
#include "discoscore/focusdiff.hpp"

namespace discoscore {

enum class GraphVariant { Unweighted, Weighted };

std::string_view to_string(GraphVariant variant);

// Sentence adjacency driven by shared foci, discounted by distance.
// Strictly upper triangular: A(i, j) = 0 for j <= i.
struct SentenceGraph {
  Matrix adjacency;
  GraphVariant variant = GraphVariant::Unweighted;
  FocusChoice focus_choice = FocusChoice::Noun;

  std::size_t size() const { return static_cast<std::size_t>(adjacency.rows()); }
};

// Number of foci with a mention in both sentence i and sentence j, for
// every pair i < j (entry (i, j) of an upper-triangular matrix).
Matrix shared_focus_counts(const AnnotatedDocument& doc, const FocusBipartite& bipartite);

SentenceGraph build_sentence_graph(const AnnotatedDocument& doc, const FocusBipartite& bipartite,
                                   GraphVariant variant, FocusChoice choice = FocusChoice::Noun);

// Mean token embedding of every sentence. Throws ShapeError when Z is not
// aligned with the document and Error on an empty sentence span.
Matrix sentence_embeddings(const AnnotatedDocument& doc, const EmbeddingMatrix& z);

// Exporter-supplied sentence vectors, checked against the sentence count.
Matrix external_sentence_embeddings(const AnnotatedDocument& doc, const EmbeddingMatrix& external);

// (A + I) S.
Matrix aggregate(const Matrix& sentences, const Matrix& adjacency);

// Column-wise mean, max, min and sum of the rows, concatenated (4d).
Vector graph_embedding(const Matrix& aggregated);

struct SentGraphConfig {
  GraphVariant variant = GraphVariant::Unweighted;
  FocusChoice choice = FocusChoice::Noun;
  double threshold = kSentEntityThresholdSummarization;
  const StaticLexicon* lexicon = nullptr;
  FocusOptions focus;
};

// Token embeddings and, optionally, precomputed sentence vectors that
// replace the mean-pooled default.
struct SentenceInput {
  const AnnotatedDocument* doc;
  const EmbeddingMatrix* z;
  const EmbeddingMatrix* sentence_vectors = nullptr;
};

// Cosine between the graph embeddings of hypothesis and reference. Throws
// DomainError naming the document when a graph embedding is all zeros.
double ds_sent(const SentenceInput& hyp, const SentenceInput& ref, const SentGraphConfig& config);

double ds_sent_multi_ref(const SentenceInput& hyp, const std::vector<SentenceInput>& refs,
                         const SentGraphConfig& config, MultiRefMode mode);

}  // namespace discoscore
