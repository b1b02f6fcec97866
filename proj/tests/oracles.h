#pragma once

// Reference computations used only by the tests. None of these call into the
// library; they are deliberately naive so they can serve as oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "etcons/graph.h"

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Complex = std::complex<double>;

// Truncated power series after halving the argument until it is small.
inline Mat TaylorExp(const Mat& m, double t, int terms = 30) {
  Mat x = m * t;
  int squarings = 0;
  while (x.cwiseAbs().sum() > 0.25) {
    x /= 2.0;
    ++squarings;
  }
  Mat term = Mat::Identity(x.rows(), x.cols());
  Mat sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Characteristic polynomial coefficients c_0..c_n of det(zI - m), c_n = 1.
inline std::vector<double> CharPoly(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Mat mk = Mat::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    mk = m * mk + c[n - k + 1] * Mat::Identity(n, n);
    c[n - k] = -(m * mk).trace() / static_cast<double>(k);
  }
  return c;
}

inline Complex EvalPoly(const std::vector<double>& c, Complex z) {
  Complex acc = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * z + c[k];
  return acc;
}

// Classical RK4 on y' = f(y) with a fixed step.
inline Vec Rk4(const std::function<Vec(const Vec&)>& f, Vec y, double t_end, double h) {
  const long steps = std::lround(t_end / h);
  for (long s = 0; s < steps; ++s) {
    const Vec k1 = f(y);
    const Vec k2 = f(y + 0.5 * h * k1);
    const Vec k3 = f(y + 0.5 * h * k2);
    const Vec k4 = f(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

// Element-wise assembly of the linear map X -> a^T X + X a.
inline Mat LyapunovByElements(const Mat& a, const Mat& q) {
  const int n = static_cast<int>(a.rows());
  Mat op = Mat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      for (int k = 0; k < n; ++k) {
        op(row, k * n + j) += a(k, i);
        op(row, i * n + k) += a(k, j);
      }
    }
  }
  Vec rhs(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rhs(i * n + j) = -q(i, j);
  const Vec sol = op.colPivHouseholderQr().solve(rhs);
  Mat x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = sol(i * n + j);
  return x;
}

// Greedy nearest-neighbour matching distance between two multisets.
inline double MultisetDistance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const Complex& z : a) {
    auto best = std::min_element(b.begin(), b.end(), [&](const Complex& p, const Complex& q) {
      return std::abs(p - z) < std::abs(q - z);
    });
    worst = std::max(worst, std::abs(*best - z));
    b.erase(best);
  }
  return worst;
}

inline std::vector<Complex> EigenSpectrum(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Reachability by repeated boolean products, independent of the DFS in the
// library.
inline bool SpanningTreeByClosure(const Mat& w) {
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXi reach = Eigen::MatrixXi::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w(i, j) > 0.0) reach(j, i) = 1;  // j informs i
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach(i, k) && reach(k, j)) reach(i, j) = 1;
  for (int r = 0; r < n; ++r) {
    if (reach.row(r).sum() == n) return true;
  }
  return false;
}

// Random weighted digraph that contains a directed spanning tree rooted at a
// random agent, plus extra random edges.
inline etcons::graph::DirectedGraph RandomSpanningGraph(std::mt19937& rng, int n_agents) {
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<int> order(n_agents);
  for (int i = 0; i < n_agents; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Mat w = Mat::Zero(n_agents, n_agents);
  for (int k = 1; k < n_agents; ++k) {
    std::uniform_int_distribution<int> parent(0, k - 1);
    w(order[k], order[parent(rng)]) = weight(rng);
  }
  for (int i = 0; i < n_agents; ++i)
    for (int j = 0; j < n_agents; ++j)
      if (i != j && coin(rng) < 0.25) w(i, j) = weight(rng);
  return etcons::graph::DirectedGraph(w);
}

inline Mat RandomMat(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

// Scenario constants of the six-agent oscillator example.
inline Mat ExampleA() { return (Mat(2, 2) << 0, 1, -1, 0).finished(); }
inline Mat ExampleB() { return (Mat(2, 1) << 1, 1).finished(); }
inline Mat ExampleK() { return (Mat(1, 2) << -2.2, -1.1).finished(); }
inline Mat ExampleWeights() {
  Mat w(6, 6);
  w << 0, 0, 0, 1, 1, 1,
       1, 0, 0, 0, 0, 0,
       1, 1, 0, 0, 0, 0,
       1, 0, 0, 0, 0, 0,
       0, 0, 0, 1, 0, 0,
       0, 0, 0, 0, 1, 0;
  return w;
}

}  // namespace oracle
