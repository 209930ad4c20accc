#include "discoscore/sentgraph.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "discoscore/error.hpp"
#include "test_docs.hpp"

namespace discoscore {
namespace {

using testing::make_doc;
using testing::make_z;
using testing::vec;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

// s1-s2 share "chelsea", s2-s3 share "offer", s1-s3 share "fee".
AnnotatedDocument sharing_doc() {
  return make_doc({{"Chelsea/N", "set", "a", "fee/N"},
                   {"Chelsea/N", "made", "an", "offer/N"},
                   {"The", "offer/N", "matched", "the", "fee/N"}});
}

TEST(SentenceGraph, GoldenUnweighted) {
  const auto doc = sharing_doc();
  const auto g = build_sentence_graph(doc, extract_nn_foci(doc), GraphVariant::Unweighted);
  EXPECT_EQ(g.adjacency, mat({{0, 1, 0.5}, {0, 0, 1}, {0, 0, 0}}));
}

TEST(SentenceGraph, WeightedCountsSharedFoci) {
  const auto doc = make_doc({{"Chelsea/N", "fee/N"}, {"Chelsea/N", "fee/N", "offer/N"}, {"offer/N", "Chelsea/N"}});
  const auto g = build_sentence_graph(doc, extract_nn_foci(doc), GraphVariant::Weighted);
  EXPECT_EQ(g.adjacency, mat({{0, 2, 0.5}, {0, 0, 2}, {0, 0, 0}}));
  const auto u = build_sentence_graph(doc, extract_nn_foci(doc), GraphVariant::Unweighted);
  EXPECT_EQ(u.adjacency, mat({{0, 1, 0.5}, {0, 0, 1}, {0, 0, 0}}));
}

TEST(SentenceGraph, NoSharedFociGivesZeroMatrix) {
  const auto doc = make_doc({{"a/N"}, {"b/N"}, {"c/N", "c/N"}});
  const auto g = build_sentence_graph(doc, extract_nn_foci(doc), GraphVariant::Weighted);
  EXPECT_TRUE(g.adjacency.isZero(0.0));
  EXPECT_EQ(g.size(), 3u);
}

// Oracle: entries from the definition, counting shared foci by set intersection.
TEST(SentenceGraph, MatchesDefinitionAndIsStrictlyUpperTriangular) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const auto doc = testing::random_doc(rng);
    const auto b = extract_nn_foci(doc);
    const auto n = static_cast<Eigen::Index>(doc.sentence_count());
    std::vector<std::set<std::string>> per_sentence(static_cast<std::size_t>(n));
    for (const auto& f : b.foci) {
      for (std::size_t t : f.members) per_sentence[doc.tokens()[t].sentence_index].insert(f.label);
    }
    for (auto variant : {GraphVariant::Unweighted, GraphVariant::Weighted}) {
      const auto g = build_sentence_graph(doc, b, variant);
      ASSERT_EQ(g.adjacency.rows(), n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          double expected = 0.0;
          if (j > i) {
            std::size_t shared = 0;
            for (const auto& l : per_sentence[static_cast<std::size_t>(i)]) {
              shared += per_sentence[static_cast<std::size_t>(j)].count(l);
            }
            if (shared > 0) {
              const double num = variant == GraphVariant::Unweighted ? 1.0 : static_cast<double>(shared);
              expected = num / static_cast<double>(j - i);
            }
          }
          EXPECT_EQ(g.adjacency(i, j), expected);
        }
      }
    }
  }
}

TEST(SentenceEmbeddings, MeansAndPassThrough) {
  const auto doc = make_doc({{"a", "b"}, {"c"}});
  const Matrix s = sentence_embeddings(doc, make_z({{1, 0}, {0, 2}, {3, 4}}));
  EXPECT_EQ(s, mat({{0.5, 1}, {3, 4}}));
  const auto ext = make_z({{9, 8, 7}, {6, 5, 4}});
  EXPECT_EQ(external_sentence_embeddings(doc, ext), ext.matrix());
  EXPECT_THROW(external_sentence_embeddings(doc, make_z({{1, 2}})), ShapeError);
  EXPECT_THROW(sentence_embeddings(doc, make_z({{1, 0}})), ShapeError);
}

TEST(Aggregate, Examples) {
  const Matrix s = mat({{1, 0}, {0, 1}});
  EXPECT_EQ(aggregate(s, mat({{0, 1}, {0, 0}})), mat({{1, 1}, {0, 1}}));
  EXPECT_EQ(aggregate(s, Matrix::Zero(2, 2)), s);
  EXPECT_EQ(aggregate(mat({{3, 4}}), Matrix::Zero(1, 1)), mat({{3, 4}}));
  EXPECT_THROW(aggregate(s, Matrix::Zero(3, 3)), ShapeError);
}

TEST(Aggregate, AgreesWithMatrixProduct) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + trial % 7;
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) a(i, j) = u(rng);
    }
    const Matrix s = testing::random_embeddings(rng, static_cast<std::size_t>(n), 5).matrix();
    const Matrix expected = (a + Matrix::Identity(n, n)) * s;
    EXPECT_LE((aggregate(s, a) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GraphEmbedding, ColumnStatistics) {
  EXPECT_EQ(graph_embedding(mat({{1, 2}})), vec({1, 2, 1, 2, 1, 2, 1, 2}));
  EXPECT_EQ(graph_embedding(mat({{1, 0}, {3, 2}})), vec({2, 1, 3, 2, 1, 0, 4, 2}));
  EXPECT_TRUE(graph_embedding(Matrix::Zero(3, 2)).isZero(0.0));
  EXPECT_EQ(graph_embedding(Matrix::Zero(3, 2)).size(), 8);
}

TEST(DsSent, IdentityIsOne) {
  std::mt19937 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto doc = testing::random_doc(rng);
    const auto z = testing::random_embeddings(rng, doc.token_count(), trial % 2 ? 4 : 16);
    for (auto variant : {GraphVariant::Unweighted, GraphVariant::Weighted}) {
      SentGraphConfig config;
      config.variant = variant;
      EXPECT_NEAR(ds_sent({&doc, &z}, {&doc, &z}, config), 1.0, 1e-12);
    }
  }
}

TEST(DsSent, AntipodalIsMinusOne) {
  const auto doc = make_doc({{"a/N", "b"}});
  const auto sv = make_z({{1, -2, 3}});
  const auto neg = EmbeddingMatrix(-sv.matrix());
  const auto z = make_z({{0, 1}, {1, 0}});
  EXPECT_NEAR(ds_sent({&doc, &z, &sv}, {&doc, &z, &neg}, {}), -1.0, 1e-12);
}

TEST(DsSent, CosineOfConstructedEmbeddings) {
  // One-sentence documents: the graph embedding repeats the sentence vector four times.
  const auto doc = make_doc({{"x"}});
  const auto a = make_z({{1, 0}});
  const auto b = make_z({{1, 1}});
  EXPECT_NEAR(ds_sent({&doc, &a}, {&doc, &b}, {}), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(DsSent, ZeroGraphEmbeddingNamesDocument) {
  const auto doc = make_doc({{"x"}}, DocKind::Hypothesis, "doc-42");
  const auto zero = make_z({{0, 0}});
  const auto one = make_z({{1, 0}});
  try {
    ds_sent({&doc, &zero}, {&doc, &one}, {});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("doc-42"), std::string::npos);
  }
}

TEST(DsSent, InvariantToEmbeddingScale) {
  std::mt19937 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto hyp = testing::random_doc(rng);
    const auto ref = testing::random_doc(rng, {}, DocKind::Reference);
    const auto zh = testing::random_embeddings(rng, hyp.token_count(), 4);
    const auto zr = testing::random_embeddings(rng, ref.token_count(), 4);
    const double base = ds_sent({&hyp, &zh}, {&ref, &zr}, {});
    EXPECT_LE(std::abs(base), 1.0);
    for (double c : {0.5, 2.0, 10.0}) {
      const EmbeddingMatrix sh(c * zh.matrix()), sr(c * zr.matrix());
      EXPECT_NEAR(ds_sent({&hyp, &sh}, {&ref, &sr}, {}), base, 1e-12);
    }
  }
}

TEST(DsSent, MultiReference) {
  const auto hyp = make_doc({{"x"}});
  const auto zh = make_z({{1, 0}});
  const auto r1 = make_doc({{"y"}}, DocKind::Reference);
  const auto z1 = make_z({{1, 0}});
  const auto z2 = make_z({{0, 1}});
  const std::vector<SentenceInput> refs{{&r1, &z1}, {&r1, &z2}};
  EXPECT_NEAR(ds_sent_multi_ref({&hyp, &zh}, refs, {}, MultiRefMode::Average), 0.5, 1e-12);
  EXPECT_NEAR(ds_sent_multi_ref({&hyp, &zh}, refs, {}, MultiRefMode::MaxScore), 1.0, 1e-12);
}

}  // namespace
}  // namespace discoscore
