#include <gtest/gtest.h>

#include <cmath>

#include "eiginf/centrality.hpp"
#include "support.hpp"

using namespace eiginf;
using eiginf::fixtures::max_abs;

TEST(Graph, CycleAdjacency) {
  const DirectedGraph g({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}});
  Mat expected(3, 3);
  expected << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  EXPECT_EQ(adjacency(g), expected);
  EXPECT_EQ(g.vertex_labels(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Graph, DuplicateEdgesAggregate) {
  const DirectedGraph g({{"a", "b", 1}, {"a", "b", 2}, {"b", "a", -0.5}});
  const Mat a = adjacency(g);
  EXPECT_EQ(a(0, 1), 3.0);
  EXPECT_EQ(a(1, 0), -0.5);
  EXPECT_EQ(g.edges().size(), 2u);
}

TEST(Graph, EmptyEdgeListAndUnknownVertex) {
  DirectedGraph g({}, {"x", "y"});
  EXPECT_EQ(adjacency(g), Mat::Zero(2, 2));
  EXPECT_THROW(g.add_edge("x", "z", 1.0), InputError);
  EXPECT_THROW(graph_from_json(Json::parse(R"({"vertices":["a"],"edges":[["a","b",1]]})")),
               InputError);
}

TEST(Graph, LabelOrderIsLexicographic) {
  const DirectedGraph g({{"zeta", "alpha", 2}, {"mid", "zeta", 1}});
  EXPECT_EQ(g.vertex_labels(), (std::vector<std::string>{"alpha", "mid", "zeta"}));
  EXPECT_EQ(adjacency(g)(2, 0), 2.0);
}

TEST(Graph, SeriesUsesVertexUnion) {
  std::vector<DirectedGraph> gs{DirectedGraph({{"a", "b", 1}}), DirectedGraph({{"b", "c", 2}})};
  std::vector<std::string> labels;
  const auto mats = adjacency_series(gs, &labels);
  EXPECT_EQ(labels.size(), 3u);
  EXPECT_EQ(mats[0](0, 1), 1.0);
  EXPECT_EQ(mats[1](1, 2), 2.0);
  EXPECT_EQ(mats[0].rows(), 3);
}

TEST(GraphIo, CsvWithHeaderAndErrors) {
  const DirectedGraph g = parse_edge_list_csv("from,to,weight\na,b,1.5\nb,a,2\n");
  EXPECT_EQ(adjacency(g)(0, 1), 1.5);
  try {
    parse_edge_list_csv("a,b,1\nb,a,oops\n", "trade.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("trade.csv:2:3"), std::string::npos);
  }
  EXPECT_THROW(parse_edge_list_csv("a,b\n"), InputError);
}

TEST(GraphIo, JsonForms) {
  const DirectedGraph g1 = graph_from_json(Json::parse(R"([["a","b",2],["b","a",1]])"));
  const DirectedGraph g2 =
      graph_from_json(Json::parse(R"({"edges":[{"from":"a","to":"b","weight":2},{"from":"b","to":"a"}]})"));
  EXPECT_EQ(adjacency(g1), adjacency(g2));
}

TEST(Katz, SwapPairResolvesToPositiveRoot) {
  Mat a(2, 2);
  a << 0, 1, 1, 0;
  const CentralityResult r = katz_scores(a);
  EXPECT_NEAR(r.dominant_root, 1.0, 1e-12);
  EXPECT_NEAR(r.scores[0], 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.scores[1], 1 / std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Katz, StarHubIsSqrtThreeTimesSpoke) {
  DirectedGraph g({{"hub", "s1", 1}, {"hub", "s2", 1}, {"hub", "s3", 1},
                   {"s1", "hub", 1}, {"s2", "hub", 1}, {"s3", "hub", 1}});
  const CentralityResult r = katz_scores(adjacency(g));
  const Index hub = g.vertex_index("hub");
  const Index spoke = g.vertex_index("s2");
  EXPECT_NEAR(r.dominant_root, std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(r.scores[hub] / r.scores[spoke], std::sqrt(3.0), 1e-12);
}

TEST(Katz, UnitCycleTies) {
  const DirectedGraph g({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}});
  EXPECT_THROW(katz_scores(adjacency(g)), DominantRootTieError);
  // A chord makes the real root strictly dominant.
  const DirectedGraph chord({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}, {"a", "c", 1}});
  const Mat a = adjacency(chord);
  const CentralityResult r = katz_scores(a);
  EXPECT_FALSE(r.used_modulus);
  EXPECT_LE((a * r.scores - r.dominant_root * r.scores).norm(), 1e-8);
}

TEST(Katz, ComplexDominantPairUsesModuli) {
  Mat a = Mat::Zero(3, 3);
  a(0, 1) = -1;
  a(1, 0) = 1;
  a(2, 2) = 0.5;
  a(2, 0) = 0.3;
  const CentralityResult r = katz_scores(a);
  EXPECT_TRUE(r.used_modulus);
  EXPECT_NEAR(r.dominant_root, 1.0, 1e-12);
  EXPECT_TRUE((r.scores.array() >= 0).all());
  EXPECT_NEAR(r.scores.norm(), 1.0, 1e-12);
}

TEST(Katz, EigenResidualAndPermutation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Mat a(5, 5);
    for (Index i = 0; i < 25; ++i) a.data()[i] = u(rng);
    const CentralityResult r = katz_scores(a);
    EXPECT_LE((a * r.scores - r.dominant_root * r.scores).norm(), 1e-8);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
    perm.indices() << 3, 0, 4, 1, 2;
    const Mat pm = perm.toDenseMatrix().cast<double>();
    const CentralityResult rp = katz_scores(pm * a * pm.transpose());
    EXPECT_LE((rp.scores - pm * r.scores).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Membership, ExactVectorInsideAndScaleInvariance) {
  std::mt19937_64 rng(2);
  Mat m(3, 3);
  m << 0.2, 0.5, 0.1, 0.3, 0.1, 0.6, 0.4, 0.2, 0.3;
  const MatrixSample s = sample_from_moments(m, fixtures::random_pd(rng, 9), 400);
  const CentralityResult c = katz_scores(m);
  const MembershipResult in = score_in_confidence_set(s, c.scores, 0.05);
  EXPECT_TRUE(in.inside);
  EXPECT_EQ(in.report.statistic, 0.0);
  EXPECT_EQ(in.report.df, 2);

  const Vec other = (Vec(3) << 1, -2, 0.5).finished();
  const MembershipResult a = score_in_confidence_set(s, other, 0.05);
  const MembershipResult b = score_in_confidence_set(s, 2.0 * other, 0.05);
  EXPECT_EQ(a.report.statistic, b.report.statistic);
  EXPECT_FALSE(a.inside);
  EXPECT_THROW(score_in_confidence_set(s, Vec::Zero(3), 0.05), InvalidArgumentError);
}

TEST(Intervals, ZeroNoiseIsDegenerate) {
  Mat m(3, 3);
  m << 0.2, 0.5, 0.1, 0.3, 0.1, 0.6, 0.4, 0.2, 0.3;
  const auto cis = score_intervals(sample_from_moments(m, Mat::Zero(9, 9), 100), 0.05);
  ASSERT_EQ(cis.size(), 2u);
  const CentralityResult c = katz_scores(m);
  for (const auto& ci : cis) {
    EXPECT_EQ(ci.lo, ci.hi);
    EXPECT_NEAR(ci.estimate, c.scores[ci.index] / c.scores[2], 1e-12);
  }
}

TEST(Intervals, SymmetricPairCentredAtOne) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 0.1);
  std::vector<Mat> draws;
  for (int i = 0; i < 200; ++i) {
    const double a = 0.3 + z(rng), b = 1.0 + z(rng);
    draws.push_back((Mat(2, 2) << a, b, b, a).finished());
  }
  const auto cis = score_intervals(estimate_from_sample(draws), 0.05);
  ASSERT_EQ(cis.size(), 1u);
  EXPECT_NEAR(cis[0].estimate, 1.0, 1e-12);
  EXPECT_NEAR(0.5 * (cis[0].lo + cis[0].hi), 1.0, 1e-12);
}
