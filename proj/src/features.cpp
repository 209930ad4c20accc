#include "discoscore/features.hpp"

#include "discoscore/error.hpp"
#include "discoscore/format.hpp"

namespace discoscore {

std::string_view to_string(Feature feature) {
  switch (feature) {
    case Feature::FreqNN: return "FREQ_NN";
    case Feature::FreqEntity: return "FREQ_Entity";
    case Feature::ConnUNN: return "Conn_u_NN";
    case Feature::ConnUEntity: return "Conn_u_Entity";
    case Feature::ConnWNN: return "Conn_w_NN";
    case Feature::ConnWEntity: return "Conn_w_Entity";
  }
  return "?";
}

std::optional<double> freq(const FocusBipartite& bipartite) {
  std::size_t total = 0;
  std::size_t count = 0;
  for (const auto& focus : bipartite.foci) {
    if (focus.frequency() < 2) continue;
    total += focus.frequency();
    ++count;
  }
  if (count == 0) return std::nullopt;
  return static_cast<double>(total) / static_cast<double>(count);
}

double conn(const SentenceGraph& graph) {
  const Eigen::Index n = graph.adjacency.rows();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) sum += graph.adjacency(i, j);
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return sum / pairs;
}

Discriminativeness discriminativeness(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw DomainError("discriminativeness of an empty pair list");
  std::size_t greater = 0;
  std::size_t equal = 0;
  for (const auto& [hyp, ref] : pairs) {
    if (ref > hyp) {
      ++greater;
    } else if (ref == hyp) {
      ++equal;
    }
  }
  const double n = static_cast<double>(pairs.size());
  const double d_pos = static_cast<double>(greater) / n;
  const double d_zero = static_cast<double>(equal) / n;
  const std::size_t less = pairs.size() - greater - equal;
  double d_neg = static_cast<double>(less) / n;
  // Rounding can leave the sum an ulp off 1; the complement closes it.
  if (d_pos + d_zero + d_neg != 1.0) d_neg = 1.0 - (d_pos + d_zero);
  return {d_pos, d_zero, d_neg, pairs.size()};
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  out << "pair_id,feature,hyp_value,ref_value\n";
  for (const auto& row : rows) {
    out << csv_field(row.pair_id) << ',' << to_string(row.feature) << ','
        << format_optional(row.hyp_value) << ',' << format_optional(row.ref_value) << '\n';
  }
}

}  // namespace discoscore
