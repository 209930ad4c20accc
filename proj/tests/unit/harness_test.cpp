#include "discoscore/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "discoscore/correlation.hpp"
#include "discoscore/error.hpp"
#include "synthetic_corpus.hpp"
#include "test_docs.hpp"

namespace discoscore {
namespace {

using testing::make_doc;

RatedInstance instance(const std::string& system, const std::string& doc, double coherence,
                       std::vector<std::vector<std::string>> hyp = {{"Chelsea/N", "won"}, {"Chelsea/N", "lost"}},
                       std::vector<std::vector<std::string>> ref = {{"Chelsea/N", "won", "the", "cup/N"}}) {
  RatedInstance inst;
  inst.system_id = system;
  inst.doc_id = doc;
  inst.hypothesis = make_doc(hyp, DocKind::Hypothesis, doc, system);
  inst.references.push_back(make_doc(ref, DocKind::Reference, doc));
  inst.ratings = {{"coherence", coherence}, {"fluency", 2.0 * coherence}};
  return inst;
}

// Token embeddings for every document of a corpus, generated from the token surfaces.
EmbeddingTable table_for(const std::vector<RatedInstance>& instances, std::size_t dim = 4) {
  EmbeddingTable table;
  auto emb = [&](const AnnotatedDocument& doc) {
    Matrix m(static_cast<Eigen::Index>(doc.token_count()), static_cast<Eigen::Index>(dim));
    for (std::size_t t = 0; t < doc.token_count(); ++t) {
      const auto h = std::hash<std::string>{}(doc.tokens()[t].surface);
      for (std::size_t c = 0; c < dim; ++c) {
        m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = static_cast<double>((h >> (4 * c)) % 13) - 6.0 + 0.5;
      }
    }
    return EmbeddingMatrix(std::move(m));
  };
  for (const auto& inst : instances) {
    table[hypothesis_key(inst)] = emb(inst.hypothesis);
    for (std::size_t r = 0; r < inst.references.size(); ++r) table[reference_key(inst, r)] = emb(inst.references[r]);
  }
  return table;
}

std::vector<RatedInstance> two_by_three() {
  std::vector<RatedInstance> out;
  for (const std::string s : {"A", "B"}) {
    for (int d = 0; d < 3; ++d) out.push_back(instance(s, "d" + std::to_string(d), d + (s == "A" ? 0.0 : 1.0)));
  }
  return out;
}

TEST(Registry, KnownMetrics) {
  EXPECT_EQ(metric_registry().size(), 9u);
  EXPECT_EQ(find_metric("ds_focus").polarity, Polarity::LowerBetter);
  EXPECT_EQ(find_metric("ds_sent").polarity, Polarity::HigherBetter);
  EXPECT_FALSE(find_metric("rc").needs_reference);
  EXPECT_TRUE(find_metric("lexical_chain").needs_reference);
  EXPECT_THROW(find_metric("bleu"), Error);
}

TEST(ScoreCorpus, OneScorePerInstance) {
  const auto instances = two_by_three();
  const auto embeddings = table_for(instances);
  TableEmbeddingSource source(&embeddings);
  ScoringOptions options;
  options.embeddings = &source;
  const auto table = score_corpus(instances, find_metric("ds_focus"), options);
  EXPECT_EQ(table.scores.size(), 6u);
  EXPECT_TRUE(table.skips.empty());
}

TEST(ScoreCorpus, OverLengthDocumentIsSkipped) {
  auto instances = two_by_three();
  std::vector<std::string> long_sentence(513, "w");
  long_sentence[0] = "n/N";
  instances[4].hypothesis = make_doc({long_sentence}, DocKind::Hypothesis, "d1", "B");
  const auto embeddings = table_for(instances);
  TableEmbeddingSource source(&embeddings);
  ScoringOptions options;
  options.embeddings = &source;
  const auto table = score_corpus(instances, find_metric("ds_focus"), options);
  EXPECT_EQ(table.scores.size(), 5u);
  ASSERT_EQ(table.skips.size(), 1u);
  EXPECT_EQ(table.skips[0].key, (InstanceKey{"B", "d1"}));
  EXPECT_NE(table.skips[0].reason.find("512"), std::string::npos);
}

TEST(ScoreCorpus, MissingEmbeddingsAreReportedNotSilent) {
  const auto instances = two_by_three();
  auto embeddings = table_for(instances);
  embeddings.erase(hypothesis_key(instances[2]));
  TableEmbeddingSource source(&embeddings);
  ScoringOptions options;
  options.embeddings = &source;
  const auto table = score_corpus(instances, find_metric("ds_sent"), options);
  EXPECT_EQ(table.scores.size(), 5u);
  ASSERT_EQ(table.skips.size(), 1u);
  EXPECT_NE(table.skips[0].reason.find("missing embeddings"), std::string::npos);
}

TEST(ScoreCorpus, ReferenceFreeMetricNeedsNoReference) {
  auto instances = two_by_three();
  for (auto& inst : instances) inst.references.clear();
  const auto table = score_corpus(instances, find_metric("rc"), {});
  EXPECT_EQ(table.scores.size(), 6u);
  const auto chain = score_corpus(instances, find_metric("lexical_chain"), {});
  EXPECT_EQ(chain.skips.size(), 6u);
}

TEST(ScoreCorpus, EntityFocusWithoutLexiconSkips) {
  const auto instances = two_by_three();
  const auto embeddings = table_for(instances);
  TableEmbeddingSource source(&embeddings);
  ScoringOptions options;
  options.embeddings = &source;
  options.focus = FocusChoice::Entity;
  const auto table = score_corpus(instances, find_metric("ds_focus"), options);
  EXPECT_EQ(table.skips.size(), 6u);
}

TEST(ScoreCorpus, EmptyOverlapPolicies) {
  std::vector<RatedInstance> instances = {
      instance("A", "d0", 1, {{"x/N", "y/N"}}, {{"x/N"}}),
      instance("A", "d1", 1, {{"p/N"}}, {{"q/N"}}),  // no shared focus
      instance("A", "d2", 1, {{"x/N"}}, {{"x/N", "z"}}),
  };
  const auto embeddings = table_for(instances);
  TableEmbeddingSource source(&embeddings);
  ScoringOptions options;
  options.embeddings = &source;
  const auto zero = score_corpus(instances, find_metric("ds_focus"), options);
  EXPECT_EQ(zero.empty_overlap_count(), 1u);
  EXPECT_EQ(zero.scores.at({"A", "d1"}).value, 0.0);

  options.empty_overlap = EmptyOverlapPolicy::WorstRank;
  const auto worst = score_corpus(instances, find_metric("ds_focus"), options);
  const double w = std::max(worst.scores.at({"A", "d0"}).value, worst.scores.at({"A", "d2"}).value);
  EXPECT_EQ(worst.scores.at({"A", "d1"}).value, w);
  EXPECT_TRUE(worst.scores.at({"A", "d1"}).empty_overlap);
}

TEST(ScoreCorpus, WorkerCountDoesNotChangeResults) {
  const auto corpus = testing::make_substitution_corpus(4, 10, 77);
  EmbeddingTable embeddings;
  for (const auto& inst : corpus.instances) {
    embeddings[hypothesis_key(inst)] = corpus.embeddings(inst.hypothesis);
    embeddings[reference_key(inst, 0)] = corpus.embeddings(inst.references[0]);
  }
  TableEmbeddingSource source(&embeddings);
  for (const auto& metric : metric_registry()) {
    ScoringOptions options;
    options.embeddings = &source;
    const auto one = score_corpus(corpus.instances, metric, options);
    options.jobs = 6;
    const auto many = score_corpus(corpus.instances, metric, options);
    ASSERT_EQ(one.scores.size(), many.scores.size()) << metric.name;
    for (const auto& [key, v] : one.scores) {
      EXPECT_EQ(v.value, many.scores.at(key).value) << metric.name;
    }
  }
}

TEST(SystemScores, Means) {
  ScoreTable table;
  table.metric = find_metric("rc");
  std::vector<RatedInstance> instances = {instance("A", "d0", 1), instance("A", "d1", 3)};
  table.scores[{"A", "d0"}] = {1.0, false};
  table.scores[{"A", "d1"}] = {3.0, false};
  const auto systems = system_scores(table, instances);
  ASSERT_EQ(systems.size(), 1u);
  EXPECT_EQ(systems[0].metric_mean, 2.0);
  EXPECT_EQ(systems[0].rating_means.at("coherence"), 2.0);
  EXPECT_EQ(systems[0].rating_means.at("fluency"), 4.0);
  EXPECT_EQ(systems[0].n, 2u);
}

TEST(SystemScores, TwelveSystemsAndTiesAreKept) {
  std::vector<RatedInstance> instances;
  ScoreTable table;
  table.metric = find_metric("rc");
  for (int s = 0; s < 12; ++s) {
    for (int d = 0; d < 100; ++d) {
      const std::string sys = "s" + std::to_string(s);
      instances.push_back(instance(sys, "d" + std::to_string(d), 1.0));
      table.scores[{sys, "d" + std::to_string(d)}] = {s < 2 ? 0.5 : static_cast<double>(d), false};
    }
  }
  const auto systems = system_scores(table, instances);
  ASSERT_EQ(systems.size(), 12u);
  EXPECT_EQ(systems[0].metric_mean, systems[1].metric_mean);
}

TEST(SystemScores, SystemWithoutScoresNamed) {
  ScoreTable table;
  std::vector<RatedInstance> instances = {instance("A", "d0", 1), instance("ghost", "d0", 1)};
  table.scores[{"A", "d0"}] = {1.0, false};
  try {
    system_scores(table, instances);
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(SystemLevel, PolarityIsNormalised) {
  // Lower-is-better metric that decreases as coherence rises: positive correlation after negation.
  ScoreTable table;
  table.metric = find_metric("ds_focus");
  std::vector<RatedInstance> instances;
  for (int s = 0; s < 4; ++s) {
    const std::string sys = "s" + std::to_string(s);
    instances.push_back(instance(sys, "d0", s));
    table.scores[{sys, "d0"}] = {10.0 - s, false};
  }
  const auto reports = system_level_correlation(table, instances);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].aspect, "coherence");
  EXPECT_NEAR(*reports[0].pearson, 1.0, 1e-12);
  EXPECT_EQ(*reports[0].kendall, 1.0);
  EXPECT_EQ(reports[0].n, 4u);
}

TEST(InstanceLevel, PooledAndPerSystem) {
  ScoreTable table;
  table.metric = find_metric("rc");
  std::vector<RatedInstance> instances;
  // system A: metric follows rating (tau 1); system B: tau 0
  const std::vector<double> a_metric{1, 2, 3}, a_rating{1, 2, 3};
  const std::vector<double> b_metric{1, 2, 3}, b_rating{2, 1, 2.5};
  for (int d = 0; d < 3; ++d) {
    instances.push_back(instance("A", "d" + std::to_string(d), a_rating[static_cast<std::size_t>(d)]));
    table.scores[{"A", "d" + std::to_string(d)}] = {a_metric[static_cast<std::size_t>(d)], false};
    instances.push_back(instance("B", "d" + std::to_string(d), b_rating[static_cast<std::size_t>(d)]));
    table.scores[{"B", "d" + std::to_string(d)}] = {b_metric[static_cast<std::size_t>(d)], false};
  }
  ASSERT_NEAR(kendall(b_metric, b_rating), 1.0 / 3.0, 1e-15);
  const auto per = instance_level_correlation(table, instances, "coherence", Grouping::PerSystem);
  EXPECT_NEAR(*per.kendall, (1.0 + 1.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(per.n, 6u);

  // pooled with metric identical to rating
  ScoreTable same;
  same.metric = find_metric("rc");
  for (const auto& inst : instances) same.scores[{inst.system_id, inst.doc_id}] = {inst.ratings.at("coherence"), false};
  const auto pooled = instance_level_correlation(same, instances, "coherence", Grouping::Pooled);
  EXPECT_EQ(*pooled.kendall, 1.0);
  EXPECT_EQ(pooled.n, 6u);
}

TEST(InstanceLevel, PerSystemMeanOfTaus) {
  ScoreTable table;
  table.metric = find_metric("rc");
  std::vector<RatedInstance> instances;
  // A: metric follows rating (tau 1); B: three concordant and three discordant pairs (tau 0)
  const std::vector<double> bx{1, 2, 3, 4}, by{3, 1, 4, 2};
  ASSERT_EQ(kendall(bx, by), 0.0);
  for (std::size_t d = 0; d < 4; ++d) {
    const std::string doc = "d" + std::to_string(d);
    instances.push_back(instance("A", doc, static_cast<double>(d)));
    table.scores[{"A", doc}] = {static_cast<double>(d), false};
    instances.push_back(instance("B", doc, by[d]));
    table.scores[{"B", doc}] = {bx[d], false};
  }
  const auto per = instance_level_correlation(table, instances, "coherence", Grouping::PerSystem);
  EXPECT_EQ(*per.kendall, 0.5);
  EXPECT_EQ(per.skipped, 0u);
}

TEST(InstanceLevel, SmallGroupIsSkippedAndNoted) {
  ScoreTable table;
  table.metric = find_metric("rc");
  std::vector<RatedInstance> instances;
  for (int d = 0; d < 3; ++d) {
    instances.push_back(instance("A", "d" + std::to_string(d), d));
    table.scores[{"A", "d" + std::to_string(d)}] = {static_cast<double>(d), false};
  }
  instances.push_back(instance("lonely", "d0", 1));
  table.scores[{"lonely", "d0"}] = {1.0, false};
  const auto per = instance_level_correlation(table, instances, "coherence", Grouping::PerSystem);
  EXPECT_EQ(*per.kendall, 1.0);
  EXPECT_EQ(per.skipped, 1u);
  EXPECT_NE(per.note.find("lonely"), std::string::npos);
}

TEST(AspectMatrix, IdenticalAndOpposedAspects) {
  std::vector<SystemScore> systems;
  for (int s = 0; s < 4; ++s) {
    SystemScore score;
    score.system_id = "s" + std::to_string(s);
    score.rating_means = {{"a", s * 1.0}, {"b", s * 3.0 + 1}, {"c", -s * 2.0}};
    systems.push_back(score);
  }
  const auto m = aspect_intercorrelation(systems);
  ASSERT_EQ(m.aspects, (std::vector<std::string>{"a", "b", "c"}));
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(m.pearson(i, i), 1.0);
  EXPECT_NEAR(m.pearson(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(m.pearson(0, 2), -1.0, 1e-12);
  EXPECT_EQ(m.pearson(1, 2), m.pearson(2, 1));
  EXPECT_THROW(aspect_intercorrelation({systems[0]}), DomainError);
}

TEST(Ensemble, Examples) {
  const InstanceKey k1{"s", "a"}, k2{"s", "b"};
  const ScoreMap same{{k1, 0.0}, {k2, 1.0}};
  EXPECT_EQ(ensemble_average(same, Polarity::HigherBetter, same, Polarity::HigherBetter), same);
  const ScoreMap flipped{{k1, 1.0}, {k2, 0.0}};
  const auto avg = ensemble_average(same, Polarity::HigherBetter, flipped, Polarity::HigherBetter);
  EXPECT_EQ(avg.at(k1), 0.5);
  EXPECT_EQ(avg.at(k2), 0.5);
  EXPECT_THROW(ensemble_average(same, Polarity::HigherBetter, {{k1, 1.0}}, Polarity::HigherBetter), Error);
}

// A lower-is-better metric enters the ensemble negated: ranks agree with an
// oracle that flips and rescales by hand.
TEST(Ensemble, LowerBetterIsFlippedBeforeScaling) {
  std::mt19937 rng(50);
  std::uniform_real_distribution<double> u(0, 10);
  ScoreMap distance, similarity;
  for (int i = 0; i < 40; ++i) {
    const InstanceKey k{"s", "d" + std::to_string(100 + i)};
    distance[k] = u(rng);
    similarity[k] = u(rng);
  }
  const auto avg = ensemble_average(distance, Polarity::LowerBetter, similarity, Polarity::HigherBetter);
  auto [dmin, dmax] = std::minmax_element(distance.begin(), distance.end(),
                                          [](auto& a, auto& b) { return a.second < b.second; });
  auto [smin, smax] = std::minmax_element(similarity.begin(), similarity.end(),
                                          [](auto& a, auto& b) { return a.second < b.second; });
  std::vector<double> got, expected;
  for (const auto& [k, v] : avg) {
    got.push_back(v);
    const double d = (dmax->second - distance.at(k)) / (dmax->second - dmin->second);
    const double s = (similarity.at(k) - smin->second) / (smax->second - smin->second);
    expected.push_back(0.5 * (d + s));
  }
  EXPECT_EQ(kendall(got, expected), 1.0);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
}

// Negating a lower-is-better metric flips the sign of Kendall when there are no ties.
TEST(Polarity, NormalisationNegatesKendall) {
  std::mt19937 rng(51);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> m(12), r(12), normalized(12);
    for (std::size_t i = 0; i < 12; ++i) {
      m[i] = g(rng);
      r[i] = g(rng);
      normalized[i] = polarity_normalized(m[i], Polarity::LowerBetter);
    }
    EXPECT_EQ(kendall(normalized, r), -kendall(m, r));
  }
}

// System-level Kendall is unchanged by any strictly increasing transform of the scores.
TEST(SystemLevel, KendallInvariantUnderMonotoneTransform) {
  std::mt19937 rng(52);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RatedInstance> instances;
    ScoreTable table, transformed;
    table.metric = transformed.metric = find_metric("rc");
    const double a = u(rng), b = g(rng), p = u(rng);
    for (int s = 0; s < 6; ++s) {
      const std::string sys = "s" + std::to_string(s);
      // one instance per system so that the transform commutes with the mean
      instances.push_back(instance(sys, "d0", g(rng)));
      const double x = g(rng);
      table.scores[{sys, "d0"}] = {x, false};
      transformed.scores[{sys, "d0"}] = {a * std::exp(p * x) + b, false};
    }
    const auto r1 = system_level_correlation(table, instances);
    const auto r2 = system_level_correlation(transformed, instances);
    EXPECT_EQ(r1[0].kendall, r2[0].kendall);
  }
}

TEST(Reports, CsvAndTable) {
  CorrelationReport r;
  r.level = CorrelationLevel::System;
  r.aspect = "coherence";
  r.metric = "ds_focus";
  r.pearson = 0.5;
  r.n = 12;
  r.skipped = 1;
  std::ostringstream csv, text;
  write_report_csv(csv, {r});
  EXPECT_EQ(csv.str(), "level,aspect,metric,pearson,kendall,n,skipped\nsystem,coherence,ds_focus,0.500000,NA,12,1\n");
  write_report_table(text, {r});
  EXPECT_NE(text.str().find("coherence"), std::string::npos);
  EXPECT_NE(text.str().find("0.500000"), std::string::npos);
}

}  // namespace
}  // namespace discoscore
