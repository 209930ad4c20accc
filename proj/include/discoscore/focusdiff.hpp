#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "discoscore/embeddings.hpp"
#include "discoscore/focus.hpp"

namespace discoscore {

// How scores against several references collapse into one.
enum class MultiRefMode { Average, MaxScore };

enum class Polarity { HigherBetter, LowerBetter };

// One distance with a flag raised when hypothesis and reference shared no
// focus (the empty sum would otherwise read as a perfect score).
struct FocusScore {
  double value = 0.0;
  bool empty_overlap = false;
};

// Row v is the sum of the embeddings of the tokens mentioning focus v.
// Throws ShapeError when Z does not have one row per token.
Matrix focus_embeddings(const FocusBipartite& bipartite, const EmbeddingMatrix& z);

// Sum of L2 distances between matched focus embeddings, divided by
// `normalizer` (the hypothesis focus count). Throws NoFociError when the
// normalizer is zero.
FocusScore ds_focus(const Matrix& hyp_f, const Matrix& ref_f, const FocusMatching& common,
                    std::size_t normalizer);

struct FocusDistances {
  FocusScore precision;  // normalised by hypothesis foci
  FocusScore recall;     // normalised by reference foci
  FocusScore f;          // arithmetic mean of the two
};

FocusDistances ds_focus_recall_and_f(const Matrix& hyp_f, const Matrix& ref_f,
                                     const FocusMatching& common, std::size_t hyp_foci,
                                     std::size_t ref_foci);

// Collapses per-reference scores (nullopt = that reference failed).
// Flagged scores are only used when every usable score is flagged.
// Throws NoFociError when no reference produced a score.
FocusScore combine_references(const std::vector<std::optional<FocusScore>>& per_ref,
                              MultiRefMode mode, Polarity polarity);

struct FocusDiffConfig {
  FocusChoice choice = FocusChoice::Noun;
  double threshold = kFocusEntityThreshold;
  const StaticLexicon* lexicon = nullptr;  // required for FocusChoice::Entity
  FocusOptions focus;
};

FocusBipartite extract_foci(const AnnotatedDocument& doc, FocusChoice choice, double threshold,
                            const StaticLexicon* lexicon, const FocusOptions& options = {});

enum class FocusVariant { Precision, Recall, F };

// End-to-end DS-Focus for one hypothesis/reference pair.
FocusScore ds_focus_pair(const AnnotatedDocument& hyp, const EmbeddingMatrix& z_hyp,
                         const AnnotatedDocument& ref, const EmbeddingMatrix& z_ref,
                         const FocusDiffConfig& config, FocusVariant variant = FocusVariant::Precision);

struct EmbeddedDocument {
  const AnnotatedDocument* doc;
  const EmbeddingMatrix* z;
};

FocusScore ds_focus_multi_ref(const EmbeddedDocument& hyp, const std::vector<EmbeddedDocument>& refs,
                              const FocusDiffConfig& config, MultiRefMode mode,
                              FocusVariant variant = FocusVariant::Precision);

}  // namespace discoscore
