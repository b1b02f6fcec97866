#include <random>

#include "doctest.h"
#include "etcons/errors.h"
#include "etcons/graph.h"
#include "etcons/matlib.h"
#include "oracles.h"

using namespace etcons;
using Mat = Eigen::MatrixXd;

TEST_SUITE("graph") {

TEST_CASE("Laplacian of the six-agent example") {
  const graph::DirectedGraph g(oracle::ExampleWeights());
  const Mat l = graph::Laplacian(g);
  Mat expected(6, 6);
  expected << 3, 0, 0, -1, -1, -1,
             -1, 1, 0, 0, 0, 0,
             -1, -1, 2, 0, 0, 0,
             -1, 0, 0, 1, 0, 0,
              0, 0, 0, -1, 1, 0,
              0, 0, 0, 0, -1, 1;
  CHECK((l - expected).norm() == 0.0);
  CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("neighbor sets") {
  const graph::DirectedGraph g(oracle::ExampleWeights());
  CHECK(graph::InNeighbors(g, 0) == std::vector<int>{3, 4, 5});
  CHECK(graph::InNeighbors(g, 1) == std::vector<int>{0});
  CHECK(graph::OutNeighbors(g, 0) == std::vector<int>{1, 2, 3});
  CHECK(graph::OutNeighbors(g, 2).empty());
  CHECK_THROWS_AS(graph::InNeighbors(g, 6), std::out_of_range);
}

TEST_CASE("edge list construction") {
  const auto g = graph::DirectedGraph::FromEdges(3, {{1, 0, 2.0}, {2, 1}});
  CHECK(g.weight(1, 0) == 2.0);
  CHECK(g.weight(2, 1) == 1.0);
  CHECK(g.weight(0, 1) == 0.0);
  CHECK_THROWS(graph::DirectedGraph::FromEdges(3, {{1, 1}}));
  CHECK_THROWS(graph::DirectedGraph::FromEdges(3, {{3, 0}}));
}

TEST_CASE("weight validation") {
  Mat w = Mat::Zero(2, 2);
  w(0, 1) = -1.0;
  CHECK_THROWS(graph::DirectedGraph(w));
  Mat self = Mat::Zero(2, 2);
  self(1, 1) = 1.0;
  CHECK_THROWS(graph::DirectedGraph(self));
  CHECK_THROWS(graph::DirectedGraph(Mat::Zero(2, 3)));
}

TEST_CASE("spanning tree detection") {
  CHECK(graph::HasSpanningTree(graph::DirectedGraph(oracle::ExampleWeights())));
  // Two isolated agents.
  CHECK_FALSE(graph::HasSpanningTree(graph::DirectedGraph(Mat::Zero(2, 2))));
  // Directed path 0 -> 1 -> 2.
  CHECK(graph::HasSpanningTree(graph::DirectedGraph::FromEdges(3, {{1, 0}, {2, 1}})));
  // Two roots feeding one agent: no single root reaches both.
  CHECK_FALSE(graph::HasSpanningTree(graph::DirectedGraph::FromEdges(3, {{2, 0}, {2, 1}})));
  CHECK(graph::HasSpanningTree(graph::DirectedGraph(Mat::Zero(1, 1))));
}

TEST_CASE("spanning tree agrees with transitive closure on random graphs") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 6;
    Mat w = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && coin(rng) < 0.3) w(i, j) = 1.0;
    CHECK(graph::HasSpanningTree(graph::DirectedGraph(w)) == oracle::SpanningTreeByClosure(w));
  }
}

TEST_CASE("spanning tree implies a simple zero Laplacian eigenvalue with the rest in the right half plane") {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::RandomSpanningGraph(rng, 2 + trial % 7);
    const auto spectrum = matlib::Eigenvalues(graph::Laplacian(g));
    int zeros = 0;
    for (const auto& z : spectrum) {
      if (std::abs(z) < 1e-8) {
        ++zeros;
      } else {
        CHECK(z.real() > 0.0);
      }
    }
    CHECK(zeros == 1);
  }
}

}
