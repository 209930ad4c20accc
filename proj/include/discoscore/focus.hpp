#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "discoscore/corpus.hpp"
#include "discoscore/embeddings.hpp"
#include "discoscore/text.hpp"

namespace discoscore {

enum class FocusChoice { Noun, Entity };

std::string_view to_string(FocusChoice choice);

// A focus of attention: a noun surface (NN) or a cluster of related noun
// surfaces (Entity) together with every token that mentions it.
struct Focus {
  std::string label;               // lowercased surface, or "a|b|c" for entities
  std::set<std::string> surfaces;  // normalised noun surfaces covered
  std::vector<std::size_t> members;  // sorted token indices, never empty

  std::size_t frequency() const { return members.size(); }
  bool is_good() const { return frequency() >= 2; }
};

// Focus/token incidence of one document. Foci are ordered by first mention.
struct FocusBipartite {
  std::vector<Focus> foci;
  std::size_t token_count = 0;

  std::size_t size() const { return foci.size(); }
  bool empty() const { return foci.empty(); }

  // Dense n x m 0/1 matrix, A(i, j) = 1 iff token j belongs to focus i.
  Matrix adjacency() const;
};

struct FocusOptions {
  NormalizeOptions normalize;
};

FocusBipartite extract_nn_foci(const AnnotatedDocument& doc, const FocusOptions& options = {});

// NN foci merged by single-link clustering: two noun surfaces share an
// entity when their lexicon vectors have cosine > threshold. Surfaces
// missing from the lexicon stay on their own.
FocusBipartite extract_entity_foci(const AnnotatedDocument& doc, const StaticLexicon& lexicon,
                                   double threshold, const FocusOptions& options = {});

// Matched (hyp focus index, ref focus index) pairs.
using FocusMatching = std::vector<std::pair<std::size_t, std::size_t>>;

// NN: foci with equal labels. Entity: greedy matching on shared noun
// surfaces, heaviest overlap first, each focus used at most once.
FocusMatching common_foci(const FocusBipartite& hyp, const FocusBipartite& ref, FocusChoice choice);

// Default similarity thresholds for entity clustering.
inline constexpr double kFocusEntityThreshold = 0.8;
inline constexpr double kSentEntityThresholdSummarization = 0.8;
inline constexpr double kSentEntityThresholdTranslation = 0.5;

}  // namespace discoscore
