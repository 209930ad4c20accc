#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "discoscore/focus.hpp"
#include "discoscore/sentgraph.hpp"

namespace discoscore {

enum class Feature { FreqNN, FreqEntity, ConnUNN, ConnUEntity, ConnWNN, ConnWEntity };

std::string_view to_string(Feature feature);

// Mean frequency of the foci mentioned at least twice; nullopt when no
// focus repeats.
std::optional<double> freq(const FocusBipartite& bipartite);

// Mean of the n(n-1)/2 strictly upper triangular entries; 0 for n = 1.
double conn(const SentenceGraph& graph);

struct Discriminativeness {
  double ref_greater = 0.0;  // fraction with ref > hyp
  double equal = 0.0;
  double ref_less = 0.0;     // fraction with ref < hyp
  std::size_t n = 0;
};

// (hyp_value, ref_value) pairs. Throws DomainError on an empty list.
Discriminativeness discriminativeness(const std::vector<std::pair<double, double>>& pairs);

struct FeatureRow {
  std::string pair_id;
  Feature feature;
  std::optional<double> hyp_value;
  std::optional<double> ref_value;
};

// Columns pair_id,feature,hyp_value,ref_value; undefined values as "NA".
void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows);

}  // namespace discoscore
