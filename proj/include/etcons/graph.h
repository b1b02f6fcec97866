#pragma once

#include <vector>

#include <Eigen/Dense>

namespace etcons::graph {

// Weighted directed communication topology over N agents. weight(i, j) > 0
// means agent i receives information from agent j. Agent indices are
// 0-based here; user-facing files are 1-based.
class DirectedGraph {
 public:
  // Validates: square, finite, nonnegative, zero diagonal, N >= 1.
  explicit DirectedGraph(Eigen::MatrixXd weights);

  struct Edge {
    int receiver;
    int sender;
    double weight = 1.0;
  };
  static DirectedGraph FromEdges(int n_agents, const std::vector<Edge>& edges);

  int n_agents() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double weight(int i, int j) const { return weights_(i, j); }

 private:
  Eigen::MatrixXd weights_;
};

// l_ii = sum_j a_ij, l_ij = -a_ij.
Eigen::MatrixXd Laplacian(const DirectedGraph& g);

// True iff some root reaches every agent along information flow (j -> i
// whenever a_ij > 0).
bool HasSpanningTree(const DirectedGraph& g);

// Agents whose broadcasts agent i receives: { j : a_ij > 0 }, ascending.
std::vector<int> InNeighbors(const DirectedGraph& g, int i);

// Agents that receive agent j's broadcasts: { i : a_ij > 0 }, ascending.
std::vector<int> OutNeighbors(const DirectedGraph& g, int j);

}  // namespace etcons::graph
