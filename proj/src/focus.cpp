#include "discoscore/focus.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

namespace discoscore {

std::string_view to_string(FocusChoice choice) {
  return choice == FocusChoice::Noun ? "nn" : "entity";
}

Matrix FocusBipartite::adjacency() const {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(foci.size()), static_cast<Eigen::Index>(token_count));
  for (std::size_t i = 0; i < foci.size(); ++i) {
    for (std::size_t j : foci[i].members) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return a;
}

FocusBipartite extract_nn_foci(const AnnotatedDocument& doc, const FocusOptions& options) {
  FocusBipartite out;
  out.token_count = doc.token_count();
  std::map<std::string, std::size_t> index;
  for (const auto& token : doc.tokens()) {
    if (!token.is_noun()) continue;
    std::string key = normalize_surface(token.surface, options.normalize);
    auto [it, inserted] = index.try_emplace(key, out.foci.size());
    if (inserted) {
      Focus f;
      f.label = key;
      f.surfaces.insert(std::move(key));
      out.foci.push_back(std::move(f));
    }
    out.foci[it->second].members.push_back(token.token_index);
  }
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Keeps the smaller index as root so roots stay in first-mention order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

FocusBipartite extract_entity_foci(const AnnotatedDocument& doc, const StaticLexicon& lexicon,
                                   double threshold, const FocusOptions& options) {
  FocusBipartite nn = extract_nn_foci(doc, options);
  const std::size_t n = nn.foci.size();

  std::vector<const Vector*> vecs(n);
  for (std::size_t i = 0; i < n; ++i) vecs[i] = lexicon.find(nn.foci[i].label);

  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (vecs[i] == nullptr) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (vecs[j] == nullptr) continue;
      if (cosine(*vecs[i], *vecs[j]) > threshold) sets.unite(i, j);
    }
  }

  FocusBipartite out;
  out.token_count = nn.token_count;
  std::map<std::size_t, std::size_t> root_to_entity;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = root_to_entity.try_emplace(sets.find(i), out.foci.size());
    if (inserted) out.foci.emplace_back();
    Focus& entity = out.foci[it->second];
    entity.surfaces.insert(nn.foci[i].surfaces.begin(), nn.foci[i].surfaces.end());
    entity.members.insert(entity.members.end(), nn.foci[i].members.begin(), nn.foci[i].members.end());
  }
  for (auto& entity : out.foci) {
    std::sort(entity.members.begin(), entity.members.end());
    for (const auto& s : entity.surfaces) {
      if (!entity.label.empty()) entity.label += '|';
      entity.label += s;
    }
  }
  return out;
}

FocusMatching common_foci(const FocusBipartite& hyp, const FocusBipartite& ref, FocusChoice choice) {
  FocusMatching out;
  if (choice == FocusChoice::Noun) {
    std::map<std::string_view, std::size_t> ref_index;
    for (std::size_t j = 0; j < ref.foci.size(); ++j) ref_index.emplace(ref.foci[j].label, j);
    for (std::size_t i = 0; i < hyp.foci.size(); ++i) {
      auto it = ref_index.find(hyp.foci[i].label);
      if (it != ref_index.end()) out.emplace_back(i, it->second);
    }
    return out;
  }

  struct Candidate {
    std::size_t shared;
    std::string_view low, high;  // labels in lexicographic order
    std::size_t hyp, ref;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < hyp.foci.size(); ++i) {
    for (std::size_t j = 0; j < ref.foci.size(); ++j) {
      const auto& a = hyp.foci[i].surfaces;
      const auto& b = ref.foci[j].surfaces;
      std::size_t shared = 0;
      for (const auto& s : a) shared += b.count(s);
      if (shared == 0) continue;
      std::string_view la = hyp.foci[i].label;
      std::string_view lb = ref.foci[j].label;
      candidates.push_back({shared, std::min(la, lb), std::max(la, lb), i, j});
    }
  }
  // Tie-break on the orientation-free label pair, so that swapping the
  // roles of hypothesis and reference mirrors the matching.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(y.shared, x.low, x.high) < std::tie(x.shared, y.low, y.high);
  });
  std::vector<bool> hyp_used(hyp.foci.size(), false);
  std::vector<bool> ref_used(ref.foci.size(), false);
  for (const auto& c : candidates) {
    if (hyp_used[c.hyp] || ref_used[c.ref]) continue;
    hyp_used[c.hyp] = ref_used[c.ref] = true;
    out.emplace_back(c.hyp, c.ref);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace discoscore
