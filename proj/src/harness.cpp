#include "discoscore/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "discoscore/correlation.hpp"
#include "discoscore/error.hpp"
#include "discoscore/format.hpp"

namespace discoscore {

const std::vector<MetricDescriptor>& metric_registry() {
  static const std::vector<MetricDescriptor> registry = {
      {"ds_focus", Polarity::LowerBetter, true, true},
      {"ds_focus_recall", Polarity::LowerBetter, true, true},
      {"ds_focus_f", Polarity::LowerBetter, true, true},
      {"ds_sent", Polarity::HigherBetter, true, true},
      {"rc", Polarity::HigherBetter, false, false},
      {"lc", Polarity::HigherBetter, false, false},
      {"entity_graph", Polarity::HigherBetter, false, false},
      {"lexical_graph", Polarity::HigherBetter, false, false},
      {"lexical_chain", Polarity::HigherBetter, true, false},
  };
  return registry;
}

const MetricDescriptor& find_metric(const std::string& name) {
  for (const auto& m : metric_registry()) {
    if (m.name == name) return m;
  }
  throw Error("unknown metric '" + name + "'");
}

// ---------------------------------------------------------------------------
// Embedding sources

std::optional<EmbeddingMatrix> EmbeddingSource::sentence_vectors(const DocKey&, const AnnotatedDocument&) const {
  return std::nullopt;
}

std::optional<EmbeddingMatrix> TableEmbeddingSource::token_embeddings(const DocKey& key,
                                                                      const AnnotatedDocument&) const {
  if (tokens_ == nullptr) return std::nullopt;
  auto it = tokens_->find(key);
  if (it == tokens_->end()) return std::nullopt;
  return it->second;
}

std::optional<EmbeddingMatrix> TableEmbeddingSource::sentence_vectors(const DocKey& key,
                                                                      const AnnotatedDocument&) const {
  if (sentences_ == nullptr) return std::nullopt;
  auto it = sentences_->find(key);
  if (it == sentences_->end()) return std::nullopt;
  return it->second;
}

std::optional<EmbeddingMatrix> ServiceEmbeddingSource::token_embeddings(const DocKey&,
                                                                        const AnnotatedDocument& doc) const {
  return client_->fetch(doc);
}

std::optional<EmbeddingMatrix> ServiceEmbeddingSource::sentence_vectors(const DocKey& key,
                                                                        const AnnotatedDocument&) const {
  if (sentences_ == nullptr) return std::nullopt;
  auto it = sentences_->find(key);
  if (it == sentences_->end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

struct Embedded {
  const AnnotatedDocument* doc;
  DocKey key;
  EmbeddingMatrix z;
  std::optional<EmbeddingMatrix> sentences;
};

Embedded embed(const AnnotatedDocument& doc, DocKey key, const ScoringOptions& options, bool want_sentences) {
  if (options.embeddings == nullptr) throw Error("no embedding source configured");
  Embedded out{&doc, std::move(key), {}, std::nullopt};
  if (want_sentences) out.sentences = options.embeddings->sentence_vectors(out.key, doc);
  auto z = options.embeddings->token_embeddings(out.key, doc);
  if (!z) {
    if (!out.sentences) throw Error("missing embeddings for " + to_string(out.key));
    return out;
  }
  if (z->rows() != doc.token_count()) {
    throw ShapeError("embeddings for " + to_string(out.key) + " have " + std::to_string(z->rows()) +
                     " rows, document has " + std::to_string(doc.token_count()) + " tokens");
  }
  out.z = std::move(*z);
  return out;
}

FocusVariant focus_variant(const std::string& name) {
  if (name == "ds_focus_recall") return FocusVariant::Recall;
  if (name == "ds_focus_f") return FocusVariant::F;
  return FocusVariant::Precision;
}

BaselineOptions baseline_options(const ScoringOptions& options) {
  BaselineOptions b;
  b.stopwords = options.stopwords;
  b.lexicon = options.lexicon;
  b.synonym_threshold = options.synonym_threshold;
  b.normalize = options.focus_options.normalize;
  return b;
}

}  // namespace

ScoredValue score_instance(const RatedInstance& instance, const MetricDescriptor& metric,
                           const ScoringOptions& options) {
  const AnnotatedDocument& hyp = instance.hypothesis;
  if (hyp.token_count() > options.max_tokens) {
    throw Error("hypothesis has " + std::to_string(hyp.token_count()) + " tokens, over the " +
                std::to_string(options.max_tokens) + "-token limit");
  }
  if (metric.needs_reference) {
    if (instance.references.empty()) throw Error("instance has no reference");
    for (std::size_t r = 0; r < instance.references.size(); ++r) {
      if (instance.references[r].token_count() > options.max_tokens) {
        throw Error("reference " + std::to_string(r) + " has " +
                    std::to_string(instance.references[r].token_count()) + " tokens, over the " +
                    std::to_string(options.max_tokens) + "-token limit");
      }
    }
  }
  if (options.focus == FocusChoice::Entity && options.lexicon == nullptr &&
      (metric.name.starts_with("ds_focus") || metric.name == "ds_sent")) {
    throw Error("entity foci need a static lexicon");
  }
  const double threshold = options.threshold.value_or(kFocusEntityThreshold);
  const BaselineOptions baseline = baseline_options(options);

  if (metric.name.starts_with("ds_focus")) {
    FocusDiffConfig config{options.focus, threshold, options.lexicon, options.focus_options};
    Embedded h = embed(hyp, hypothesis_key(instance), options, false);
    std::vector<Embedded> refs;
    for (std::size_t r = 0; r < instance.references.size(); ++r) {
      refs.push_back(embed(instance.references[r], reference_key(instance, r), options, false));
    }
    std::vector<EmbeddedDocument> ref_docs;
    for (const auto& r : refs) ref_docs.push_back({r.doc, &r.z});
    const FocusScore s = ds_focus_multi_ref({h.doc, &h.z}, ref_docs, config, options.multi_ref,
                                            focus_variant(metric.name));
    return {s.value, s.empty_overlap};
  }
  if (metric.name == "ds_sent") {
    SentGraphConfig config{options.variant, options.focus, threshold, options.lexicon, options.focus_options};
    Embedded h = embed(hyp, hypothesis_key(instance), options, true);
    std::vector<Embedded> refs;
    for (std::size_t r = 0; r < instance.references.size(); ++r) {
      refs.push_back(embed(instance.references[r], reference_key(instance, r), options, true));
    }
    auto input = [](const Embedded& e) {
      return SentenceInput{e.doc, &e.z, e.sentences ? &*e.sentences : nullptr};
    };
    std::vector<SentenceInput> ref_inputs;
    for (const auto& r : refs) ref_inputs.push_back(input(r));
    return {ds_sent_multi_ref(input(h), ref_inputs, config, options.multi_ref), false};
  }
  if (metric.name == "rc") return {rc(hyp, baseline), false};
  if (metric.name == "lc") return {lc(hyp, baseline), false};
  if (metric.name == "entity_graph") return {entity_graph(hyp, options.focus_options), false};
  if (metric.name == "lexical_graph") return {lexical_graph(hyp, options.synonym_threshold, baseline), false};
  if (metric.name == "lexical_chain") {
    std::vector<std::optional<FocusScore>> per_ref;
    for (const auto& ref : instance.references) {
      per_ref.push_back(FocusScore{lexical_chain_score(hyp, ref, baseline), false});
    }
    return {combine_references(per_ref, options.multi_ref, Polarity::HigherBetter).value, false};
  }
  throw Error("unknown metric '" + metric.name + "'");
}

std::size_t ScoreTable::empty_overlap_count() const {
  std::size_t n = 0;
  for (const auto& [key, v] : scores) n += v.empty_overlap ? 1 : 0;
  return n;
}

ScoreTable score_corpus(const std::vector<RatedInstance>& instances, const MetricDescriptor& metric,
                        const ScoringOptions& options) {
  struct Outcome {
    std::optional<ScoredValue> value;
    std::string failure;
  };
  std::vector<Outcome> outcomes(instances.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      try {
        outcomes[i].value = score_instance(instances[i], metric, options);
      } catch (const Error& e) {
        outcomes[i].failure = e.what();
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(std::max<std::size_t>(1, instances.size()))));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::jthread> workers;
    for (unsigned j = 0; j < jobs; ++j) workers.emplace_back(work);
  }
  if (fatal) std::rethrow_exception(fatal);

  ScoreTable table;
  table.metric = metric;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    InstanceKey key{instances[i].system_id, instances[i].doc_id};
    if (outcomes[i].value) {
      table.scores.emplace(key, *outcomes[i].value);
    } else {
      table.skips.push_back({key, outcomes[i].failure});
    }
  }
  std::sort(table.skips.begin(), table.skips.end(),
            [](const SkipRecord& a, const SkipRecord& b) { return a.key < b.key; });

  if (options.empty_overlap == EmptyOverlapPolicy::WorstRank) {
    std::optional<double> worst;
    for (const auto& [key, v] : table.scores) {
      if (v.empty_overlap) continue;
      const double x = polarity_normalized(v.value, metric.polarity);
      if (!worst || x < polarity_normalized(*worst, metric.polarity)) worst = v.value;
    }
    if (worst) {
      for (auto& [key, v] : table.scores) {
        if (v.empty_overlap) v.value = *worst;
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Aggregation and correlation

std::string_view to_string(CorrelationLevel level) {
  return level == CorrelationLevel::System ? "system" : "instance";
}

std::string_view to_string(Grouping grouping) {
  return grouping == Grouping::Pooled ? "pooled" : "per_system";
}

std::vector<SystemScore> system_scores(const ScoreTable& table, const std::vector<RatedInstance>& instances) {
  std::map<std::string, SystemScore> by_system;
  for (const auto& inst : instances) {
    SystemScore& s = by_system[inst.system_id];
    s.system_id = inst.system_id;
    auto it = table.scores.find({inst.system_id, inst.doc_id});
    if (it == table.scores.end()) continue;
    s.metric_mean += it->second.value;
    for (const auto& [aspect, rating] : inst.ratings) s.rating_means[aspect] += rating;
    ++s.n;
  }
  std::vector<SystemScore> out;
  for (auto& [id, s] : by_system) {
    if (s.n == 0) throw Error("system '" + id + "' has no scored instance");
    const double n = static_cast<double>(s.n);
    s.metric_mean /= n;
    for (auto& [aspect, total] : s.rating_means) total /= n;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SystemScore> rating_means_by_system(const std::vector<RatedInstance>& instances) {
  ScoreTable all;
  for (const auto& inst : instances) all.scores[{inst.system_id, inst.doc_id}] = {};
  return system_scores(all, instances);
}

namespace {

std::vector<std::string> aspects_of(const std::vector<RatedInstance>& instances) {
  std::set<std::string> names;
  for (const auto& inst : instances) {
    for (const auto& [aspect, v] : inst.ratings) names.insert(aspect);
  }
  return {names.begin(), names.end()};
}

// Fills pearson/kendall, recording a note instead of throwing on
// degenerate input.
void correlate_into(CorrelationReport& report, const std::vector<double>& x, const std::vector<double>& y) {
  report.n = x.size();
  std::string note;
  try {
    report.pearson = pearson(x, y);
  } catch (const Error& e) {
    note = std::string("pearson: ") + e.what();
  }
  try {
    report.kendall = kendall(x, y);
  } catch (const Error& e) {
    note += (note.empty() ? "" : "; ") + std::string("kendall: ") + e.what();
  }
  if (!note.empty()) report.note = note;
}

}  // namespace

std::vector<CorrelationReport> system_level_correlation(const ScoreTable& table,
                                                        const std::vector<RatedInstance>& instances) {
  const auto systems = system_scores(table, instances);
  std::vector<CorrelationReport> out;
  for (const auto& aspect : aspects_of(instances)) {
    CorrelationReport report;
    report.level = CorrelationLevel::System;
    report.aspect = aspect;
    report.metric = table.metric.name;
    report.skipped = table.skips.size();
    report.empty_overlap = table.empty_overlap_count();
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& s : systems) {
      x.push_back(polarity_normalized(s.metric_mean, table.metric.polarity));
      y.push_back(s.rating_means.at(aspect));
    }
    correlate_into(report, x, y);
    out.push_back(std::move(report));
  }
  return out;
}

CorrelationReport instance_level_correlation(const ScoreTable& table, const std::vector<RatedInstance>& instances,
                                             const std::string& aspect, Grouping grouping) {
  CorrelationReport report;
  report.level = CorrelationLevel::Instance;
  report.aspect = aspect;
  report.metric = table.metric.name;
  report.skipped = table.skips.size();

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& inst : instances) {
    auto it = table.scores.find({inst.system_id, inst.doc_id});
    if (it == table.scores.end()) continue;
    auto rating = inst.ratings.find(aspect);
    if (rating == inst.ratings.end()) throw Error("instance lacks rating aspect '" + aspect + "'");
    const std::string group = grouping == Grouping::Pooled ? std::string() : inst.system_id;
    groups[group].first.push_back(polarity_normalized(it->second.value, table.metric.polarity));
    groups[group].second.push_back(rating->second);
    report.empty_overlap += it->second.empty_overlap ? 1 : 0;
  }

  if (grouping == Grouping::Pooled) {
    const auto& [x, y] = groups[""];
    if (x.size() < 2) {
      report.n = x.size();
      report.note = "fewer than two scored instances";
      return report;
    }
    correlate_into(report, x, y);
    return report;
  }

  double pearson_sum = 0.0;
  double kendall_sum = 0.0;
  std::size_t pearson_groups = 0;
  std::size_t kendall_groups = 0;
  std::vector<std::string> skipped_groups;
  for (const auto& [system, xy] : groups) {
    const auto& [x, y] = xy;
    if (x.size() < 2) {
      ++report.skipped;
      skipped_groups.push_back(system);
      continue;
    }
    CorrelationReport inner;
    correlate_into(inner, x, y);
    if (inner.pearson) {
      pearson_sum += *inner.pearson;
      ++pearson_groups;
    }
    if (inner.kendall) {
      kendall_sum += *inner.kendall;
      ++kendall_groups;
    }
    if (!inner.pearson || !inner.kendall) {
      ++report.skipped;
      skipped_groups.push_back(system);
    }
    report.n += x.size();
  }
  if (pearson_groups > 0) report.pearson = pearson_sum / static_cast<double>(pearson_groups);
  if (kendall_groups > 0) report.kendall = kendall_sum / static_cast<double>(kendall_groups);
  if (!skipped_groups.empty()) {
    report.note = "skipped systems:";
    for (const auto& s : skipped_groups) report.note += " " + s;
  }
  return report;
}

AspectMatrix aspect_intercorrelation(const std::vector<SystemScore>& systems) {
  if (systems.size() < 2) throw DomainError("aspect inter-correlation needs at least two systems");
  AspectMatrix out;
  for (const auto& [aspect, v] : systems.front().rating_means) out.aspects.push_back(aspect);
  const auto k = static_cast<Eigen::Index>(out.aspects.size());
  std::vector<std::vector<double>> columns(out.aspects.size());
  for (std::size_t a = 0; a < out.aspects.size(); ++a) {
    for (const auto& s : systems) columns[a].push_back(s.rating_means.at(out.aspects[a]));
  }
  out.pearson = Matrix::Identity(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const double r = pearson(columns[static_cast<std::size_t>(a)], columns[static_cast<std::size_t>(b)]);
      out.pearson(a, b) = out.pearson(b, a) = r;
    }
  }
  return out;
}

namespace {

ScoreMap min_max_scaled(const ScoreMap& scores, Polarity polarity) {
  ScoreMap out;
  if (scores.empty()) return out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [key, v] : scores) {
    const double x = polarity_normalized(v, polarity);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  for (const auto& [key, v] : scores) {
    const double x = polarity_normalized(v, polarity);
    out[key] = hi > lo ? (x - lo) / (hi - lo) : 0.0;
  }
  return out;
}

}  // namespace

ScoreMap ensemble_average(const ScoreMap& a, Polarity polarity_a, const ScoreMap& b, Polarity polarity_b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw Error("ensemble inputs cover different instances");
  }
  const ScoreMap sa = min_max_scaled(a, polarity_a);
  const ScoreMap sb = min_max_scaled(b, polarity_b);
  ScoreMap out;
  for (const auto& [key, v] : sa) out[key] = 0.5 * (v + sb.at(key));
  return out;
}

ScoreMap values_of(const ScoreTable& table) {
  ScoreMap out;
  for (const auto& [key, v] : table.scores) out[key] = v.value;
  return out;
}

// ---------------------------------------------------------------------------
// Report output

void write_report_csv(std::ostream& out, const std::vector<CorrelationReport>& rows) {
  out << "level,aspect,metric,pearson,kendall,n,skipped\n";
  for (const auto& r : rows) {
    out << to_string(r.level) << ',' << csv_field(r.aspect) << ',' << csv_field(r.metric) << ','
        << format_optional(r.pearson) << ',' << format_optional(r.kendall) << ',' << r.n << ','
        << r.skipped << '\n';
  }
}

void write_report_table(std::ostream& out, const std::vector<CorrelationReport>& rows) {
  const std::vector<std::string> header = {"level", "aspect", "metric", "pearson", "kendall", "n", "skipped"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::string(to_string(r.level)), r.aspect, r.metric, format_optional(r.pearson),
                     format_optional(r.kendall), std::to_string(r.n), std::to_string(r.skipped)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  auto print = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      // text columns left-aligned, numbers right-aligned
      if (c < 3) {
        out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        out << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    out << '\n';
  };
  print(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : cells) print(row);
  out << std::left;
}

}  // namespace discoscore
