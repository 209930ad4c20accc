#include "discoscore/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "discoscore/error.hpp"
#include "discoscore/features.hpp"
#include "discoscore/format.hpp"

namespace discoscore::cli {

namespace fs = std::filesystem;

namespace {

// Everything a command needs that outlives ScoringOptions' raw pointers.
struct Resources {
  std::vector<RatedInstance> instances;
  std::optional<StaticLexicon> lexicon;
  std::optional<WordSet> stopwords;
  std::optional<WordSet> nouns;
  EmbeddingTable token_table;
  EmbeddingTable sentence_table;
  std::unique_ptr<EmbeddingClient> client;
  std::unique_ptr<EmbeddingSource> source;
  ScoringOptions options;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

void check_threshold(double t, const char* flag) {
  if (!(t >= -1.0 && t <= 1.0)) {
    throw UsageError(std::string(flag) + " must lie in [-1, 1], got " + format_double(t));
  }
}

bool is_ds_metric(const std::string& name) { return name.starts_with("ds_"); }

std::vector<std::string> metric_names(const RunConfig& config) {
  std::vector<std::string> names = config.metrics;
  if (names.empty()) names.push_back("ds_focus");
  for (const auto& n : names) {
    try {
      find_metric(n);
    } catch (const Error& e) {
      throw UsageError(std::string("--metric: ") + e.what());
    }
  }
  return names;
}

// Parses flags into options and loads every input the metrics need.
void prepare(const RunConfig& config, const std::vector<std::string>& metrics, bool need_embeddings_for_metrics,
             Resources& res) {
  ScoringOptions& o = res.options;
  if (config.focus == "nn") {
    o.focus = FocusChoice::Noun;
  } else if (config.focus == "entity") {
    o.focus = FocusChoice::Entity;
  } else {
    throw UsageError("--focus must be nn or entity");
  }
  if (config.variant == "u") {
    o.variant = GraphVariant::Unweighted;
  } else if (config.variant == "w") {
    o.variant = GraphVariant::Weighted;
  } else {
    throw UsageError("--variant must be u or w");
  }
  if (config.multi_ref == "average") {
    o.multi_ref = MultiRefMode::Average;
  } else if (config.multi_ref == "max") {
    o.multi_ref = MultiRefMode::MaxScore;
  } else {
    throw UsageError("--multi-ref must be average or max");
  }
  if (config.empty_overlap == "zero") {
    o.empty_overlap = EmptyOverlapPolicy::Zero;
  } else if (config.empty_overlap == "worst") {
    o.empty_overlap = EmptyOverlapPolicy::WorstRank;
  } else {
    throw UsageError("--empty-overlap must be zero or worst");
  }
  if (config.threshold) check_threshold(*config.threshold, "--threshold");
  check_threshold(config.synonym_threshold, "--syn-threshold");
  o.threshold = config.threshold;
  o.synonym_threshold = config.synonym_threshold;
  o.max_tokens = config.max_tokens;
  o.jobs = std::max(1u, config.jobs);

  if (config.dataset.empty()) throw UsageError("--dataset is required");

  bool entity_needed = false;
  bool embeddings_needed = false;
  for (const auto& m : metrics) {
    if (is_ds_metric(m) && o.focus == FocusChoice::Entity) entity_needed = true;
    if (find_metric(m).needs_embeddings) embeddings_needed = true;
  }
  if (entity_needed && config.lexicon.empty()) {
    throw UsageError("--lexicon is required for --focus entity");
  }
  embeddings_needed = embeddings_needed && need_embeddings_for_metrics;
  if (embeddings_needed && config.embeddings.empty() && config.embed_url.empty() &&
      config.sentence_vectors.empty()) {
    throw UsageError("--embeddings or --embed-url is required for " + metrics.front());
  }

  if (!config.nouns.empty()) res.nouns = load_word_list(config.nouns);
  LoadOptions load;
  if (res.nouns) load.noun_lexicon = &*res.nouns;
  res.instances = load_dataset(config.dataset, load);

  if (!config.stopwords.empty()) {
    res.stopwords = load_word_list(config.stopwords);
    o.stopwords = &*res.stopwords;
  }
  if (!config.lexicon.empty()) {
    res.lexicon = load_static_lexicon(config.lexicon);
    o.lexicon = &*res.lexicon;
  }
  if (embeddings_needed) {
    if (!config.sentence_vectors.empty()) res.sentence_table = load_sentence_vector_file(config.sentence_vectors);
    if (!config.embed_url.empty()) {
      ServiceOptions service;
      service.retries = config.retries;
      res.client = std::make_unique<EmbeddingClient>(config.embed_url, service);
      res.source = std::make_unique<ServiceEmbeddingSource>(res.client.get(), &res.sentence_table);
    } else {
      if (!config.embeddings.empty()) res.token_table = load_embedding_file(config.embeddings);
      res.source = std::make_unique<TableEmbeddingSource>(&res.token_table, &res.sentence_table);
    }
    o.embeddings = res.source.get();
  }
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory " + out + ": " + ec.message());
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void report_skips(std::ostream& err, const ScoreTable& table) {
  for (const auto& s : table.skips) {
    err << "skipped [" << table.metric.name << "] system_id=" << s.key.system_id << " doc_id=" << s.key.doc_id
        << ": " << s.reason << '\n';
  }
}

void write_skips_csv(std::ostream& out, const std::vector<ScoreTable>& tables) {
  out << "metric,system_id,doc_id,reason\n";
  for (const auto& t : tables) {
    for (const auto& s : t.skips) {
      out << csv_field(t.metric.name) << ',' << csv_field(s.key.system_id) << ',' << csv_field(s.key.doc_id)
          << ',' << csv_field(s.reason) << '\n';
    }
  }
}

template <typename Fn>
int run_guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

void write_scores_csv(std::ostream& out, const std::vector<ScoreTable>& tables) {
  out << "metric,system_id,doc_id,score,empty_overlap\n";
  for (const auto& t : tables) {
    for (const auto& [key, v] : t.scores) {
      out << csv_field(t.metric.name) << ',' << csv_field(key.system_id) << ',' << csv_field(key.doc_id) << ','
          << format_double(v.value) << ',' << (v.empty_overlap ? 1 : 0) << '\n';
    }
  }
}

std::vector<ScoreTable> read_scores_csv(const std::string& path, const std::vector<RatedInstance>& instances) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scores file: " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 5) {
    throw ParseError("scores file lacks the metric,system_id,doc_id,score,empty_overlap header", 1);
  }
  std::vector<ScoreTable> tables;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw ParseError("expected 5 fields", line_no);
    const MetricDescriptor& metric = find_metric(f[0]);
    auto it = std::find_if(tables.begin(), tables.end(), [&](const ScoreTable& t) { return t.metric.name == f[0]; });
    if (it == tables.end()) {
      tables.emplace_back().metric = metric;
      it = std::prev(tables.end());
    }
    double value = 0.0;
    try {
      value = std::stod(f[3]);
    } catch (const std::exception&) {
      throw ParseError("non-numeric score '" + f[3] + "'", line_no);
    }
    it->scores[{f[1], f[2]}] = {value, f[4] == "1"};
  }
  for (auto& t : tables) {
    for (const auto& inst : instances) {
      if (!t.scores.contains({inst.system_id, inst.doc_id})) {
        t.skips.push_back({{inst.system_id, inst.doc_id}, "not present in scores file"});
      }
    }
    std::sort(t.skips.begin(), t.skips.end(), [](const SkipRecord& a, const SkipRecord& b) { return a.key < b.key; });
  }
  return tables;
}

int cmd_score(const RunConfig& config, std::ostream& err) {
  return run_guarded(err, [&] {
    const auto metrics = metric_names(config);
    Resources res;
    prepare(config, metrics, true, res);
    if (res.lexicon) {
      for (const auto& w : res.lexicon->warnings()) err << "warning: lexicon " << w << '\n';
    }
    std::vector<ScoreTable> tables;
    for (const auto& name : metrics) {
      tables.push_back(score_corpus(res.instances, find_metric(name), res.options));
      report_skips(err, tables.back());
    }
    ensure_out_dir(config.out);
    auto scores = open_out(config.out, "scores.csv");
    write_scores_csv(scores, tables);
    auto skips = open_out(config.out, "skips.csv");
    write_skips_csv(skips, tables);
    for (const auto& t : tables) {
      if (!t.skips.empty()) return kExitPartial;
    }
    return kExitOk;
  });
}

int cmd_correlate(const RunConfig& config, std::ostream& err) {
  return run_guarded(err, [&] {
    const auto metrics = metric_names(config);
    Resources res;
    prepare(config, metrics, config.scores.empty(), res);
    Grouping grouping = Grouping::Pooled;
    if (config.grouping == "per_system") {
      grouping = Grouping::PerSystem;
    } else if (config.grouping != "pooled") {
      throw UsageError("--grouping must be pooled or per_system");
    }

    std::vector<ScoreTable> tables;
    if (!config.scores.empty()) {
      tables = read_scores_csv(config.scores, res.instances);
      if (!config.metrics.empty()) {
        std::erase_if(tables, [&](const ScoreTable& t) {
          return std::find(metrics.begin(), metrics.end(), t.metric.name) == metrics.end();
        });
      }
    } else {
      for (const auto& name : metrics) tables.push_back(score_corpus(res.instances, find_metric(name), res.options));
    }

    std::string header_note;
    if (!config.ensemble.empty()) {
      if (config.ensemble.size() != 2) throw UsageError("--ensemble takes exactly two metric names");
      const ScoreTable* a = nullptr;
      const ScoreTable* b = nullptr;
      for (const auto& t : tables) {
        if (t.metric.name == config.ensemble[0]) a = &t;
        if (t.metric.name == config.ensemble[1]) b = &t;
      }
      if (a == nullptr || b == nullptr) throw UsageError("--ensemble metrics must also be scored");
      ScoreMap va;
      ScoreMap vb;
      for (const auto& [key, v] : a->scores) {
        if (b->scores.contains(key)) {
          va[key] = v.value;
          vb[key] = b->scores.at(key).value;
        }
      }
      ScoreTable ens;
      ens.metric = {a->metric.name + "+" + b->metric.name, Polarity::HigherBetter, true, false};
      for (const auto& [key, v] : ensemble_average(va, a->metric.polarity, vb, b->metric.polarity)) {
        ens.scores[key] = {v, false};
      }
      for (const auto& inst : res.instances) {
        if (!ens.scores.contains({inst.system_id, inst.doc_id})) {
          ens.skips.push_back({{inst.system_id, inst.doc_id}, "not scored by both ensemble members"});
        }
      }
      tables.push_back(std::move(ens));
      header_note = "# ensemble scores are min-max scaled per corpus before averaging\n";
    }

    std::vector<CorrelationReport> rows;
    bool partial = false;
    for (const auto& t : tables) {
      report_skips(err, t);
      partial = partial || !t.skips.empty();
      if (t.scores.empty()) {
        err << "error: metric " << t.metric.name << " scored no instance\n";
        partial = true;
        continue;
      }
      try {
        for (auto& r : system_level_correlation(t, res.instances)) rows.push_back(std::move(r));
      } catch (const Error& e) {
        err << "error: " << t.metric.name << ": " << e.what() << '\n';
        partial = true;
      }
      std::set<std::string> aspects;
      for (const auto& inst : res.instances) {
        for (const auto& [aspect, v] : inst.ratings) aspects.insert(aspect);
      }
      for (const auto& aspect : aspects) {
        rows.push_back(instance_level_correlation(t, res.instances, aspect, grouping));
      }
    }
    for (const auto& r : rows) {
      if (!r.note.empty()) err << "note [" << r.metric << "/" << r.aspect << "/" << to_string(r.level) << "]: " << r.note << '\n';
    }

    ensure_out_dir(config.out);
    {
      auto csv = open_out(config.out, "correlation.csv");
      write_report_csv(csv, rows);
      auto txt = open_out(config.out, "correlation.txt");
      txt << header_note;
      txt << "# instance-level grouping: " << to_string(grouping) << '\n';
      write_report_table(txt, rows);
    }
    const auto systems = rating_means_by_system(res.instances);
    if (systems.size() >= 2) {
      try {
        const AspectMatrix m = aspect_intercorrelation(systems);
        auto csv = open_out(config.out, "aspects.csv");
        csv << "aspect";
        for (const auto& a : m.aspects) csv << ',' << csv_field(a);
        csv << '\n';
        for (std::size_t i = 0; i < m.aspects.size(); ++i) {
          csv << csv_field(m.aspects[i]);
          for (std::size_t j = 0; j < m.aspects.size(); ++j) {
            csv << ',' << format_double(m.pearson(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
          }
          csv << '\n';
        }
      } catch (const DomainError& e) {
        err << "note: aspect inter-correlation unavailable: " << e.what() << '\n';
      }
    }
    return partial ? kExitPartial : kExitOk;
  });
}

int cmd_features(const RunConfig& config, std::ostream& err) {
  return run_guarded(err, [&] {
    Resources res;
    prepare(config, {"entity_graph"}, false, res);
    const double threshold = config.threshold.value_or(kFocusEntityThreshold);
    const bool with_entity = res.lexicon.has_value();
    if (config.focus == "entity" && !with_entity) throw UsageError("--lexicon is required for --focus entity");

    std::vector<FeatureRow> rows;
    std::size_t identical = 0;
    std::size_t skipped = 0;
    for (const auto& inst : res.instances) {
      if (inst.hypothesis.token_count() > config.max_tokens) {
        err << "skipped system_id=" << inst.system_id << " doc_id=" << inst.doc_id << ": over the "
            << config.max_tokens << "-token limit\n";
        ++skipped;
        continue;
      }
      for (std::size_t r = 0; r < inst.references.size(); ++r) {
        const AnnotatedDocument& ref = inst.references[r];
        if (ref.token_count() > config.max_tokens) {
          ++skipped;
          continue;
        }
        if (inst.hypothesis.text() == ref.text()) {
          ++identical;
          continue;
        }
        const std::string pair_id = inst.system_id + "/" + inst.doc_id + "/" + std::to_string(r);
        const StaticLexicon* lexicon = res.lexicon ? &*res.lexicon : nullptr;
        auto add = [&](FocusChoice choice, Feature f, Feature cu, Feature cw) {
          const FocusOptions fo = res.options.focus_options;
          const FocusBipartite hb = extract_foci(inst.hypothesis, choice, threshold, lexicon, fo);
          const FocusBipartite rb = extract_foci(ref, choice, threshold, lexicon, fo);
          rows.push_back({pair_id, f, freq(hb), freq(rb)});
          rows.push_back({pair_id, cu, conn(build_sentence_graph(inst.hypothesis, hb, GraphVariant::Unweighted, choice)),
                          conn(build_sentence_graph(ref, rb, GraphVariant::Unweighted, choice))});
          rows.push_back({pair_id, cw, conn(build_sentence_graph(inst.hypothesis, hb, GraphVariant::Weighted, choice)),
                          conn(build_sentence_graph(ref, rb, GraphVariant::Weighted, choice))});
        };
        add(FocusChoice::Noun, Feature::FreqNN, Feature::ConnUNN, Feature::ConnWNN);
        if (with_entity) add(FocusChoice::Entity, Feature::FreqEntity, Feature::ConnUEntity, Feature::ConnWEntity);
      }
    }
    if (identical > 0) err << "note: excluded " << identical << " pairs whose hypothesis equals the reference\n";

    ensure_out_dir(config.out);
    {
      auto csv = open_out(config.out, "features.csv");
      write_feature_csv(csv, rows);
    }
    auto summary = open_out(config.out, "discriminativeness.csv");
    summary << "feature,n,d_pos,d_zero,d_neg\n";
    std::map<Feature, std::vector<std::pair<double, double>>> by_feature;
    for (const auto& row : rows) {
      if (row.hyp_value && row.ref_value) by_feature[row.feature].emplace_back(*row.hyp_value, *row.ref_value);
    }
    for (const auto& [feature, pairs] : by_feature) {
      const Discriminativeness d = discriminativeness(pairs);
      summary << to_string(feature) << ',' << d.n << ',' << format_double(d.ref_greater) << ','
              << format_double(d.equal) << ',' << format_double(d.ref_less) << '\n';
    }
    return skipped > 0 ? kExitPartial : kExitOk;
  });
}

}  // namespace discoscore::cli
