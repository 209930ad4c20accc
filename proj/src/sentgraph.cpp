#include "discoscore/sentgraph.hpp"

#include <set>

#include "discoscore/error.hpp"

namespace discoscore {

std::string_view to_string(GraphVariant variant) {
  return variant == GraphVariant::Unweighted ? "u" : "w";
}

Matrix shared_focus_counts(const AnnotatedDocument& doc, const FocusBipartite& bipartite) {
  const auto n = static_cast<Eigen::Index>(doc.sentence_count());
  Matrix counts = Matrix::Zero(n, n);
  const auto& tokens = doc.tokens();
  for (const auto& focus : bipartite.foci) {
    std::set<std::size_t> sentences;
    for (std::size_t t : focus.members) {
      if (t >= tokens.size()) throw ShapeError("focus member outside the document");
      sentences.insert(tokens[t].sentence_index);
    }
    for (auto i = sentences.begin(); i != sentences.end(); ++i) {
      for (auto j = std::next(i); j != sentences.end(); ++j) {
        counts(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j)) += 1.0;
      }
    }
  }
  return counts;
}

SentenceGraph build_sentence_graph(const AnnotatedDocument& doc, const FocusBipartite& bipartite,
                                   GraphVariant variant, FocusChoice choice) {
  SentenceGraph graph;
  graph.variant = variant;
  graph.focus_choice = choice;
  graph.adjacency = shared_focus_counts(doc, bipartite);
  const Eigen::Index n = graph.adjacency.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double& a = graph.adjacency(i, j);
      if (a == 0.0) continue;
      const double distance = static_cast<double>(j - i);
      a = variant == GraphVariant::Unweighted ? 1.0 / distance : a / distance;
    }
  }
  return graph;
}

Matrix sentence_embeddings(const AnnotatedDocument& doc, const EmbeddingMatrix& z) {
  if (z.rows() != doc.token_count()) {
    throw ShapeError("embedding matrix has " + std::to_string(z.rows()) + " rows for " +
                     std::to_string(doc.token_count()) + " tokens");
  }
  Matrix s(static_cast<Eigen::Index>(doc.sentence_count()), static_cast<Eigen::Index>(z.dim()));
  for (std::size_t i = 0; i < doc.sentence_count(); ++i) {
    const SentenceSpan& span = doc.sentences()[i];
    if (span.size() == 0) throw Error("sentence " + std::to_string(i) + " is empty");
    const auto rows = z.matrix().middleRows(static_cast<Eigen::Index>(span.begin),
                                            static_cast<Eigen::Index>(span.size()));
    s.row(static_cast<Eigen::Index>(i)) = rows.colwise().mean();
  }
  return s;
}

Matrix external_sentence_embeddings(const AnnotatedDocument& doc, const EmbeddingMatrix& external) {
  if (external.rows() != doc.sentence_count()) {
    throw ShapeError("sentence vectors have " + std::to_string(external.rows()) + " rows for " +
                     std::to_string(doc.sentence_count()) + " sentences");
  }
  return external.matrix();
}

Matrix aggregate(const Matrix& sentences, const Matrix& adjacency) {
  const Eigen::Index n = sentences.rows();
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw ShapeError("adjacency is " + std::to_string(adjacency.rows()) + "x" +
                     std::to_string(adjacency.cols()) + " for " + std::to_string(n) + " sentences");
  }
  Matrix out = sentences;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = adjacency(i, j);
      if (a != 0.0) out.row(i) += a * sentences.row(j);
    }
  }
  return out;
}

Vector graph_embedding(const Matrix& aggregated) {
  if (aggregated.rows() == 0) throw ShapeError("graph embedding of an empty sentence matrix");
  const Eigen::Index d = aggregated.cols();
  Vector g(4 * d);
  g.segment(0, d) = aggregated.colwise().mean().transpose();
  g.segment(d, d) = aggregated.colwise().maxCoeff().transpose();
  g.segment(2 * d, d) = aggregated.colwise().minCoeff().transpose();
  g.segment(3 * d, d) = aggregated.colwise().sum().transpose();
  return g;
}

namespace {

Vector document_graph_embedding(const SentenceInput& input, const SentGraphConfig& config) {
  const AnnotatedDocument& doc = *input.doc;
  const FocusBipartite foci = extract_foci(doc, config.choice, config.threshold, config.lexicon, config.focus);
  const SentenceGraph graph = build_sentence_graph(doc, foci, config.variant, config.choice);
  const Matrix s = input.sentence_vectors != nullptr ? external_sentence_embeddings(doc, *input.sentence_vectors)
                                                     : sentence_embeddings(doc, *input.z);
  Vector g = graph_embedding(aggregate(s, graph.adjacency));
  if (!(g.norm() > 0.0)) {
    throw DomainError("zero graph embedding for " + std::string(to_string(doc.kind())) +
                      " doc_id=" + doc.doc_id());
  }
  return g;
}

}  // namespace

double ds_sent(const SentenceInput& hyp, const SentenceInput& ref, const SentGraphConfig& config) {
  const Vector gh = document_graph_embedding(hyp, config);
  const Vector gr = document_graph_embedding(ref, config);
  if (gh.size() != gr.size()) {
    throw ShapeError("graph embeddings of dimension " + std::to_string(gh.size()) + " and " +
                     std::to_string(gr.size()));
  }
  return cosine(gh, gr);
}

double ds_sent_multi_ref(const SentenceInput& hyp, const std::vector<SentenceInput>& refs,
                         const SentGraphConfig& config, MultiRefMode mode) {
  if (refs.empty()) throw Error("at least one reference is required");
  std::vector<std::optional<FocusScore>> per_ref;
  for (const auto& ref : refs) per_ref.push_back(FocusScore{ds_sent(hyp, ref, config), false});
  return combine_references(per_ref, mode, Polarity::HigherBetter).value;
}

}  // namespace discoscore
