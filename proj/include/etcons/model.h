#pragma once

// Closed-loop analysis objects for event-triggered consensus: the per-agent
// difference generators, the disagreement generator and its error input
// matrix, Hurwitz and stabilizability tests, and the Riccati-based gain
// recipe.

#include <vector>

#include <Eigen/Dense>

#include "etcons/graph.h"
#include "etcons/matlib.h"

namespace etcons::model {

using matlib::Complex;
using matlib::Mat;
using matlib::Spectrum;

// Strict Hurwitz margin: max Re(lambda) must be below -kHurwitzMargin.
inline constexpr double kHurwitzMargin = 1e-9;
// |lambda| at or below this identifies the Laplacian's zero eigenvalue.
inline constexpr double kZeroEigenvalueTol = 1e-8;
inline constexpr double kDefaultCMargin = 0.5;

// Agent dynamics x' = A x + B u with consensus gain K over graph.
class SystemModel {
 public:
  SystemModel(Mat a, Mat b, Mat k, graph::DirectedGraph graph);

  const Mat& a() const { return a_; }
  const Mat& b() const { return b_; }
  const Mat& k() const { return k_; }
  const graph::DirectedGraph& graph() const { return graph_; }

  int n() const { return static_cast<int>(a_.rows()); }
  int m() const { return static_cast<int>(b_.cols()); }
  int n_agents() const { return graph_.n_agents(); }
  Mat bk() const { return b_ * k_; }

  // Same system and graph with a different gain.
  SystemModel WithGain(Mat k) const;

 private:
  Mat a_;
  Mat b_;
  Mat k_;
  graph::DirectedGraph graph_;
};

struct ClosedLoopMatrices {
  std::vector<Mat> omega;  // one per agent, (N-1)n square
  Mat pi;                  // (N-1)n square
  Mat w;                   // (N-1)n x Nn
};

// Generator of agent i's stacked differences theta_i = [x_i - x_p]_{p != i}
// under the continuous protocol:
//   I (x) A + (d_i + 1 a_i^* - A_i^*) (x) BK.
Mat BuildOmega(const SystemModel& model, int i);

// The (N-1)x(N-1) coefficient d_i + 1 a_i^* - A_i^* that multiplies BK.
Mat OmegaCoupling(const graph::DirectedGraph& g, int i);

// Disagreement dynamics delta' = Pi delta + W e with delta_i = x_i - x_1.
ClosedLoopMatrices BuildPiW(const SystemModel& model);

bool IsHurwitz(const Mat& m);

struct EigenvalueCheck {
  Complex lambda;        // nonzero Laplacian eigenvalue
  double max_real_part;  // spectral abscissa of A + lambda BK
  bool hurwitz = false;
  bool marginal = false;  // abscissa within [-kHurwitzMargin, 0]
};

struct ConsensusConditionReport {
  bool holds = false;
  Spectrum laplacian_spectrum;
  std::vector<EigenvalueCheck> per_eigenvalue;
};

// Checks that A + lambda_s(L) BK is Hurwitz for every nonzero Laplacian
// eigenvalue. Throws AssumptionError without a spanning tree.
ConsensusConditionReport CheckConsensusCondition(const SystemModel& model);

// Real 2n embedding [[A + re BK, -im BK], [im BK, A + re BK]]; its spectrum
// is spec(A + lambda BK) united with its conjugate.
Mat RealEmbedding(const Mat& a, const Mat& bk, Complex lambda);

// Multiset union over nonzero Laplacian eigenvalues of spec(A + lambda BK),
// computed with the real eigensolver only.
Spectrum ShiftedSpectrumUnion(const Mat& a, const Mat& bk,
                              const Spectrum& laplacian_spectrum);

// PBH test on eigenvalues with Re >= 0.
bool CheckStabilizable(const Mat& a, const Mat& b);

struct GainDesign {
  Mat p;        // CARE solution
  double c;     // coupling scale
  Mat k;        // -c B^T P
  double care_residual;
};

// P from the CARE with Q = I, R = I; c = c_margin + 1 / min Re(lambda != 0);
// K = -c B^T P. Verifies the Hurwitz condition on the result.
GainDesign DesignGain(const Mat& a, const Mat& b, const graph::DirectedGraph& g,
                      double c_margin = kDefaultCMargin);

// True iff 0 < alpha < -max Re(spec(pi)). Throws if pi is not Hurwitz.
bool ValidateAlpha(double alpha, const Mat& pi);

struct AbscissaReport {
  double mu_pi;
  std::vector<double> mu_omega;
};

AbscissaReport SpectralAbscissaReport(const ClosedLoopMatrices& clm);

// Greedy nearest matching of two multisets; returns the largest matched
// distance, or +inf if sizes differ.
double SpectrumDistance(const Spectrum& lhs, const Spectrum& rhs);

}  // namespace etcons::model
