#include "discoscore/focusdiff.hpp"

#include <algorithm>
#include <limits>

#include "discoscore/error.hpp"

namespace discoscore {

Matrix focus_embeddings(const FocusBipartite& bipartite, const EmbeddingMatrix& z) {
  if (z.rows() != bipartite.token_count) {
    throw ShapeError("embedding matrix has " + std::to_string(z.rows()) + " rows for " +
                     std::to_string(bipartite.token_count) + " tokens");
  }
  Matrix f = Matrix::Zero(static_cast<Eigen::Index>(bipartite.foci.size()), static_cast<Eigen::Index>(z.dim()));
  for (std::size_t v = 0; v < bipartite.foci.size(); ++v) {
    for (std::size_t u : bipartite.foci[v].members) f.row(static_cast<Eigen::Index>(v)) += z.row(u);
  }
  return f;
}

namespace {

double matched_distance_sum(const Matrix& hyp_f, const Matrix& ref_f, const FocusMatching& common) {
  if (hyp_f.cols() != ref_f.cols()) {
    throw ShapeError("focus embeddings of dimension " + std::to_string(hyp_f.cols()) + " and " +
                     std::to_string(ref_f.cols()));
  }
  double sum = 0.0;
  for (const auto& [h, r] : common) {
    if (h >= static_cast<std::size_t>(hyp_f.rows()) || r >= static_cast<std::size_t>(ref_f.rows())) {
      throw ShapeError("focus matching indexes past the focus embeddings");
    }
    sum += (hyp_f.row(static_cast<Eigen::Index>(h)) - ref_f.row(static_cast<Eigen::Index>(r))).norm();
  }
  return sum;
}

}  // namespace

FocusScore ds_focus(const Matrix& hyp_f, const Matrix& ref_f, const FocusMatching& common,
                    std::size_t normalizer) {
  if (normalizer == 0) throw NoFociError("hypothesis has no focus");
  const double sum = matched_distance_sum(hyp_f, ref_f, common);
  return {sum / static_cast<double>(normalizer), common.empty()};
}

FocusDistances ds_focus_recall_and_f(const Matrix& hyp_f, const Matrix& ref_f,
                                     const FocusMatching& common, std::size_t hyp_foci,
                                     std::size_t ref_foci) {
  if (hyp_foci == 0) throw NoFociError("hypothesis has no focus");
  if (ref_foci == 0) throw NoFociError("reference has no focus");
  const double sum = matched_distance_sum(hyp_f, ref_f, common);
  const bool empty = common.empty();
  FocusDistances out;
  out.precision = {sum / static_cast<double>(hyp_foci), empty};
  out.recall = {sum / static_cast<double>(ref_foci), empty};
  out.f = {0.5 * (out.precision.value + out.recall.value), empty};
  return out;
}

FocusScore combine_references(const std::vector<std::optional<FocusScore>>& per_ref,
                              MultiRefMode mode, Polarity polarity) {
  std::vector<double> clean;
  std::vector<double> flagged;
  for (const auto& s : per_ref) {
    if (!s) continue;
    (s->empty_overlap ? flagged : clean).push_back(s->value);
  }
  if (clean.empty() && flagged.empty()) throw NoFociError("no reference produced a score");
  const bool all_flagged = clean.empty();
  const std::vector<double>& values = all_flagged ? flagged : clean;
  double out = 0.0;
  if (mode == MultiRefMode::Average) {
    for (double v : values) out += v;
    out /= static_cast<double>(values.size());
  } else if (polarity == Polarity::LowerBetter) {
    out = *std::min_element(values.begin(), values.end());
  } else {
    out = *std::max_element(values.begin(), values.end());
  }
  return {out, all_flagged};
}

FocusBipartite extract_foci(const AnnotatedDocument& doc, FocusChoice choice, double threshold,
                            const StaticLexicon* lexicon, const FocusOptions& options) {
  if (choice == FocusChoice::Noun) return extract_nn_foci(doc, options);
  if (lexicon == nullptr) throw Error("entity foci need a static lexicon");
  return extract_entity_foci(doc, *lexicon, threshold, options);
}

FocusScore ds_focus_pair(const AnnotatedDocument& hyp, const EmbeddingMatrix& z_hyp,
                         const AnnotatedDocument& ref, const EmbeddingMatrix& z_ref,
                         const FocusDiffConfig& config, FocusVariant variant) {
  const FocusBipartite hb = extract_foci(hyp, config.choice, config.threshold, config.lexicon, config.focus);
  const FocusBipartite rb = extract_foci(ref, config.choice, config.threshold, config.lexicon, config.focus);
  const Matrix hf = focus_embeddings(hb, z_hyp);
  const Matrix rf = focus_embeddings(rb, z_ref);
  const FocusMatching common = common_foci(hb, rb, config.choice);
  switch (variant) {
    case FocusVariant::Precision:
      return ds_focus(hf, rf, common, hb.size());
    case FocusVariant::Recall:
      return ds_focus_recall_and_f(hf, rf, common, hb.size(), rb.size()).recall;
    case FocusVariant::F:
      return ds_focus_recall_and_f(hf, rf, common, hb.size(), rb.size()).f;
  }
  return {};
}

FocusScore ds_focus_multi_ref(const EmbeddedDocument& hyp, const std::vector<EmbeddedDocument>& refs,
                              const FocusDiffConfig& config, MultiRefMode mode, FocusVariant variant) {
  if (refs.empty()) throw Error("at least one reference is required");
  std::vector<std::optional<FocusScore>> per_ref;
  per_ref.reserve(refs.size());
  for (const auto& ref : refs) {
    try {
      per_ref.push_back(ds_focus_pair(*hyp.doc, *hyp.z, *ref.doc, *ref.z, config, variant));
    } catch (const NoFociError&) {
      per_ref.push_back(std::nullopt);
    }
  }
  return combine_references(per_ref, mode, Polarity::LowerBetter);
}

}  // namespace discoscore
