#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "discoscore/harness.hpp"

namespace discoscore::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

struct RunConfig {
  std::string dataset;
  std::string embeddings;        // token embedding NDJSON
  std::string embed_url;         // POST /embed service
  std::string sentence_vectors;  // optional sentence-vector NDJSON
  std::string lexicon;           // word2vec text
  std::string stopwords;         // overrides the bundled list
  std::string nouns;             // overrides the bundled noun lexicon
  std::vector<std::string> metrics;
  std::string focus = "nn";      // nn | entity
  std::string variant = "u";     // u | w
  std::optional<double> threshold;
  double synonym_threshold = 0.8;
  std::string multi_ref = "average";  // average | max
  std::string empty_overlap = "zero";  // zero | worst
  std::string grouping = "pooled";     // pooled | per_system
  std::vector<std::string> ensemble;   // two metric names
  std::string scores;                  // correlate: read scores instead of scoring
  std::string out = ".";
  std::size_t max_tokens = 512;
  int retries = 3;
  unsigned jobs = 1;
};

// Writes <out>/scores.csv and <out>/skips.csv.
int cmd_score(const RunConfig& config, std::ostream& err);

// Writes <out>/correlation.csv, <out>/correlation.txt and, with two or more
// systems, <out>/aspects.csv.
int cmd_correlate(const RunConfig& config, std::ostream& err);

// Writes <out>/features.csv and <out>/discriminativeness.csv.
int cmd_features(const RunConfig& config, std::ostream& err);

// scores.csv round trip.
void write_scores_csv(std::ostream& out, const std::vector<ScoreTable>& tables);
std::vector<ScoreTable> read_scores_csv(const std::string& path, const std::vector<RatedInstance>& instances);

}  // namespace discoscore::cli
