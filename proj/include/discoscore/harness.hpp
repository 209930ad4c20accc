#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "discoscore/baselines.hpp"
#include "discoscore/corpus.hpp"
#include "discoscore/embeddings.hpp"
#include "discoscore/focusdiff.hpp"
#include "discoscore/sentgraph.hpp"

namespace discoscore {

struct MetricDescriptor {
  std::string name;
  Polarity polarity = Polarity::HigherBetter;
  bool needs_reference = true;
  bool needs_embeddings = false;
};

// ds_focus, ds_focus_recall, ds_focus_f, ds_sent, rc, lc, entity_graph,
// lexical_graph, lexical_chain.
const std::vector<MetricDescriptor>& metric_registry();
// Throws Error for an unknown name.
const MetricDescriptor& find_metric(const std::string& name);

// Higher-is-better view of a raw score.
inline double polarity_normalized(double value, Polarity polarity) {
  return polarity == Polarity::LowerBetter ? -value : value;
}

// Where contextual embeddings come from. Implementations must be safe to
// call from several threads at once.
class EmbeddingSource {
 public:
  virtual ~EmbeddingSource() = default;
  // nullopt when the source has nothing for this document.
  virtual std::optional<EmbeddingMatrix> token_embeddings(const DocKey& key,
                                                          const AnnotatedDocument& doc) const = 0;
  virtual std::optional<EmbeddingMatrix> sentence_vectors(const DocKey& key,
                                                          const AnnotatedDocument& doc) const;
};

class TableEmbeddingSource : public EmbeddingSource {
 public:
  explicit TableEmbeddingSource(const EmbeddingTable* tokens, const EmbeddingTable* sentences = nullptr)
      : tokens_(tokens), sentences_(sentences) {}
  std::optional<EmbeddingMatrix> token_embeddings(const DocKey& key, const AnnotatedDocument& doc) const override;
  std::optional<EmbeddingMatrix> sentence_vectors(const DocKey& key, const AnnotatedDocument& doc) const override;

 private:
  const EmbeddingTable* tokens_;
  const EmbeddingTable* sentences_;
};

class ServiceEmbeddingSource : public EmbeddingSource {
 public:
  ServiceEmbeddingSource(const EmbeddingClient* client, const EmbeddingTable* sentences = nullptr)
      : client_(client), sentences_(sentences) {}
  std::optional<EmbeddingMatrix> token_embeddings(const DocKey& key, const AnnotatedDocument& doc) const override;
  std::optional<EmbeddingMatrix> sentence_vectors(const DocKey& key, const AnnotatedDocument& doc) const override;

 private:
  const EmbeddingClient* client_;
  const EmbeddingTable* sentences_;
};

enum class EmptyOverlapPolicy { Zero, WorstRank };

struct ScoringOptions {
  FocusChoice focus = FocusChoice::Noun;
  GraphVariant variant = GraphVariant::Unweighted;
  // Entity clustering threshold; defaults to 0.8 for both metric families.
  std::optional<double> threshold;
  double synonym_threshold = 0.8;
  MultiRefMode multi_ref = MultiRefMode::Average;
  std::size_t max_tokens = 512;
  EmptyOverlapPolicy empty_overlap = EmptyOverlapPolicy::Zero;
  const StaticLexicon* lexicon = nullptr;
  const WordSet* stopwords = &default_stopwords();
  FocusOptions focus_options;
  const EmbeddingSource* embeddings = nullptr;
  unsigned jobs = 1;
};

struct InstanceKey {
  std::string system_id;
  std::string doc_id;
  auto operator<=>(const InstanceKey&) const = default;
  bool operator==(const InstanceKey&) const = default;
};

struct ScoredValue {
  double value = 0.0;
  bool empty_overlap = false;
};

struct SkipRecord {
  InstanceKey key;
  std::string reason;
};

struct ScoreTable {
  MetricDescriptor metric;
  std::map<InstanceKey, ScoredValue> scores;
  std::vector<SkipRecord> skips;  // sorted by key

  std::size_t empty_overlap_count() const;
};

// Scores one instance. Throws on any per-instance failure.
ScoredValue score_instance(const RatedInstance& instance, const MetricDescriptor& metric,
                           const ScoringOptions& options);

// Scores every instance, in parallel over `options.jobs` workers. Failures
// become skip records; output is independent of the worker count.
ScoreTable score_corpus(const std::vector<RatedInstance>& instances, const MetricDescriptor& metric,
                        const ScoringOptions& options);

struct SystemScore {
  std::string system_id;
  double metric_mean = 0.0;  // raw polarity
  std::map<std::string, double> rating_means;
  std::size_t n = 0;
};

// Per-system means over scored instances, sorted by system id. Throws
// Error naming a system that has no scored instance.
std::vector<SystemScore> system_scores(const ScoreTable& table, const std::vector<RatedInstance>& instances);

// Per-system rating means over every instance (no metric involved).
std::vector<SystemScore> rating_means_by_system(const std::vector<RatedInstance>& instances);

enum class CorrelationLevel { System, Instance };
enum class Grouping { Pooled, PerSystem };

std::string_view to_string(CorrelationLevel level);
std::string_view to_string(Grouping grouping);

struct CorrelationReport {
  CorrelationLevel level = CorrelationLevel::System;
  std::string aspect;
  std::string metric;
  std::optional<double> pearson;
  std::optional<double> kendall;
  std::size_t n = 0;
  std::size_t skipped = 0;        // skipped instances and groups
  std::size_t empty_overlap = 0;  // flagged scores that entered the statistic
  std::string note;
};

// One report per rating aspect, correlating polarity-normalised system
// means with rating means.
std::vector<CorrelationReport> system_level_correlation(const ScoreTable& table,
                                                        const std::vector<RatedInstance>& instances);

CorrelationReport instance_level_correlation(const ScoreTable& table, const std::vector<RatedInstance>& instances,
                                             const std::string& aspect, Grouping grouping);

struct AspectMatrix {
  std::vector<std::string> aspects;
  Matrix pearson;
};

AspectMatrix aspect_intercorrelation(const std::vector<SystemScore>& systems);

using ScoreMap = std::map<InstanceKey, double>;

// Both inputs are turned higher-is-better, min-max scaled to [0, 1], then
// averaged. Throws Error when the key sets differ.
ScoreMap ensemble_average(const ScoreMap& a, Polarity polarity_a, const ScoreMap& b, Polarity polarity_b);

ScoreMap values_of(const ScoreTable& table);

void write_report_csv(std::ostream& out, const std::vector<CorrelationReport>& rows);
void write_report_table(std::ostream& out, const std::vector<CorrelationReport>& rows);

}  // namespace discoscore
