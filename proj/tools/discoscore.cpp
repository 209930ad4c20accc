// discoscore: score, correlate and inspect discourse metrics from the shell.

#include <algorithm>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "discoscore/cli.hpp"

namespace {

void add_common(CLI::App* cmd, discoscore::cli::RunConfig& c) {
  cmd->add_option("--dataset", c.dataset, "NDJSON dataset")->required();
  cmd->add_option("--lexicon", c.lexicon, "static word vectors, word2vec text format");
  cmd->add_option("--stopwords", c.stopwords, "stopword list, one word per line");
  cmd->add_option("--nouns", c.nouns, "noun lexicon used to tag raw-text documents");
  cmd->add_option("--focus", c.focus, "focus choice")->check(CLI::IsMember({"nn", "entity"}));
  cmd->add_option("--threshold", c.threshold, "entity clustering threshold (default 0.8)");
  cmd->add_option("--max-tokens", c.max_tokens, "skip documents longer than this");
  cmd->add_option("--out", c.out, "output directory");
}

void add_scoring(CLI::App* cmd, discoscore::cli::RunConfig& c) {
  cmd->add_option("--embeddings", c.embeddings, "token embedding NDJSON");
  cmd->add_option("--embed-url", c.embed_url, "embedding service base URL");
  cmd->add_option("--sentence-vectors", c.sentence_vectors, "sentence vector NDJSON for ds_sent");
  cmd->add_option("--metric", c.metrics, "metric name (repeatable)");
  cmd->add_option("--variant", c.variant, "sentence graph variant")->check(CLI::IsMember({"u", "w"}));
  cmd->add_option("--syn-threshold", c.synonym_threshold, "synonym threshold of the lexical baselines");
  cmd->add_option("--multi-ref", c.multi_ref, "multi-reference aggregation")
      ->check(CLI::IsMember({"average", "max"}));
  cmd->add_option("--empty-overlap", c.empty_overlap, "scores with no shared focus: zero or worst")
      ->check(CLI::IsMember({"zero", "worst"}));
  cmd->add_option("--retries", c.retries, "embedding service retries");
  cmd->add_option("--jobs", c.jobs, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DiscoScore discourse metrics"};
  app.require_subcommand(1);

  discoscore::cli::RunConfig config;
  config.jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* score = app.add_subcommand("score", "score every instance with the selected metrics");
  add_common(score, config);
  add_scoring(score, config);

  auto* correlate = app.add_subcommand("correlate", "correlate metric scores with human ratings");
  add_common(correlate, config);
  add_scoring(correlate, config);
  correlate->add_option("--scores", config.scores, "scores.csv from a previous score run");
  correlate->add_option("--grouping", config.grouping, "instance-level grouping")
      ->check(CLI::IsMember({"pooled", "per_system"}));
  correlate->add_option("--ensemble", config.ensemble, "average two metrics")->expected(2);

  auto* features = app.add_subcommand("features", "discourse features and their discriminativeness");
  add_common(features, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : discoscore::cli::kExitFatal;
  }

  if (score->parsed()) return discoscore::cli::cmd_score(config, std::cerr);
  if (correlate->parsed()) return discoscore::cli::cmd_correlate(config, std::cerr);
  return discoscore::cli::cmd_features(config, std::cerr);
}
