#include "etcons/graph.h"

#include <cmath>
#include <string>

#include "etcons/errors.h"

namespace etcons::graph {
namespace {

void CheckIndex(const DirectedGraph& g, int i, const char* what) {
  if (i < 0 || i >= g.n_agents()) {
    throw std::out_of_range(std::string(what) + ": agent index " +
                            std::to_string(i) + " out of range for " +
                            std::to_string(g.n_agents()) + " agents");
  }
}

}  // namespace

DirectedGraph::DirectedGraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols() || weights_.rows() < 1) {
    throw DimensionError("graph: weight matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw PreconditionError("graph: weight a_" + std::to_string(i + 1) +
                                std::to_string(j + 1) +
                                " must be finite and nonnegative");
      }
    }
    if (weights_(i, i) != 0.0) {
      throw PreconditionError("graph: self-loop at agent " + std::to_string(i + 1) +
                              " (a_ii must be 0)");
    }
  }
}

DirectedGraph DirectedGraph::FromEdges(int n_agents, const std::vector<Edge>& edges) {
  if (n_agents < 1) throw DimensionError("graph: need at least one agent");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_agents, n_agents);
  for (const Edge& e : edges) {
    if (e.receiver < 0 || e.receiver >= n_agents || e.sender < 0 ||
        e.sender >= n_agents) {
      throw std::out_of_range("graph: edge endpoint out of range");
    }
    w(e.receiver, e.sender) = e.weight;
  }
  return DirectedGraph(std::move(w));
}

Eigen::MatrixXd Laplacian(const DirectedGraph& g) {
  Eigen::MatrixXd l = -g.weights();
  for (int i = 0; i < g.n_agents(); ++i) l(i, i) = g.weights().row(i).sum();
  return l;
}

bool HasSpanningTree(const DirectedGraph& g) {
  const int n = g.n_agents();
  std::vector<char> seen(n);
  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[root] = 1;
    stack.assign(1, root);
    int reached = 1;
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      for (int i = 0; i < n; ++i) {
        if (!seen[i] && g.weight(i, j) > 0.0) {
          seen[i] = 1;
          ++reached;
          stack.push_back(i);
        }
      }
    }
    if (reached == n) return true;
  }
  return false;
}

std::vector<int> InNeighbors(const DirectedGraph& g, int i) {
  CheckIndex(g, i, "in_neighbors");
  std::vector<int> out;
  for (int j = 0; j < g.n_agents(); ++j) {
    if (g.weight(i, j) > 0.0) out.push_back(j);
  }
  return out;
}

std::vector<int> OutNeighbors(const DirectedGraph& g, int j) {
  CheckIndex(g, j, "out_neighbors");
  std::vector<int> out;
  for (int i = 0; i < g.n_agents(); ++i) {
    if (g.weight(i, j) > 0.0) out.push_back(i);
  }
  return out;
}

}  // namespace etcons::graph
