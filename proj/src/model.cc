#include "etcons/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "etcons/errors.h"

namespace etcons::model {
namespace {

int CheckAgent(const SystemModel& model, int i) {
  if (i < 0 || i >= model.n_agents()) {
    throw std::out_of_range("agent index " + std::to_string(i) + " out of range");
  }
  return i;
}

// Indices 0..n-1 with `skip` removed.
std::vector<int> Without(int n, int skip) {
  std::vector<int> idx;
  idx.reserve(n - 1);
  for (int p = 0; p < n; ++p) {
    if (p != skip) idx.push_back(p);
  }
  return idx;
}

}  // namespace

SystemModel::SystemModel(Mat a, Mat b, Mat k, graph::DirectedGraph graph)
    : a_(std::move(a)), b_(std::move(b)), k_(std::move(k)), graph_(std::move(graph)) {
  matlib::RequireSquare(a_, "system A");
  matlib::RequireFinite(a_, "system A");
  matlib::RequireFinite(b_, "system B");
  matlib::RequireFinite(k_, "gain K");
  if (b_.rows() != a_.rows() || b_.cols() < 1) {
    throw DimensionError("system: B must be n x m with n = " + std::to_string(a_.rows()));
  }
  if (k_.rows() != b_.cols() || k_.cols() != a_.rows()) {
    throw DimensionError("system: K must be m x n (" + std::to_string(b_.cols()) + "x" +
                         std::to_string(a_.rows()) + "), got " +
                         std::to_string(k_.rows()) + "x" + std::to_string(k_.cols()));
  }
}

SystemModel SystemModel::WithGain(Mat k) const { return {a_, b_, std::move(k), graph_}; }

Mat OmegaCoupling(const graph::DirectedGraph& g, int i) {
  const int n_agents = g.n_agents();
  const Mat lap = graph::Laplacian(g);
  const std::vector<int> rest = Without(n_agents, i);
  const int dim = n_agents - 1;
  Mat c(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int s = 0; s < dim; ++s) {
      const int p = rest[r];
      const int q = rest[s];
      const double d = (r == s) ? lap(p, p) : 0.0;
      c(r, s) = d + g.weight(i, q) - g.weight(p, q);
    }
  }
  return c;
}

Mat BuildOmega(const SystemModel& model, int i) {
  CheckAgent(model, i);
  const int dim = model.n_agents() - 1;
  if (dim < 1) throw PreconditionError("build_omega: need at least two agents");
  return matlib::Kron(Mat::Identity(dim, dim), model.a()) +
         matlib::Kron(OmegaCoupling(model.graph(), i), model.bk());
}

ClosedLoopMatrices BuildPiW(const SystemModel& model) {
  const int n_agents = model.n_agents();
  if (n_agents < 2) throw PreconditionError("build_pi_w: need at least two agents");
  const int dim = n_agents - 1;
  const Mat lap = graph::Laplacian(model.graph());
  const Mat bk = model.bk();

  ClosedLoopMatrices out;
  const Mat l22 = lap.bottomRightCorner(dim, dim);
  const Mat a1_star = model.graph().weights().block(0, 1, 1, dim);
  out.pi = matlib::Kron(Mat::Identity(dim, dim), model.a()) +
           matlib::Kron(l22 + Eigen::VectorXd::Ones(dim) * a1_star, bk);
  // delta_i' picks up BK (l_i - l_1) e for every i >= 2.
  const Mat coupling = lap.bottomRows(dim) - Eigen::VectorXd::Ones(dim) * lap.row(0);
  out.w = matlib::Kron(coupling, bk);
  out.omega.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i) out.omega.push_back(BuildOmega(model, i));
  return out;
}

bool IsHurwitz(const Mat& m) {
  matlib::RequireSquare(m, "is_hurwitz");
  return matlib::SpectralAbscissa(m) < -kHurwitzMargin;
}

Mat RealEmbedding(const Mat& a, const Mat& bk, Complex lambda) {
  const Eigen::Index n = a.rows();
  Mat out(2 * n, 2 * n);
  const Mat diag = a + lambda.real() * bk;
  const Mat off = lambda.imag() * bk;
  out << diag, -off, off, diag;
  return out;
}

namespace {

// Laplacian eigenvalues with the (unique) zero removed.
Spectrum NonzeroEigenvalues(const Spectrum& lap_spec) {
  Spectrum out;
  int zeros = 0;
  for (const Complex& z : lap_spec) {
    if (std::abs(z) <= kZeroEigenvalueTol) {
      ++zeros;
    } else {
      out.push_back(z);
    }
  }
  if (zeros != 1) {
    throw NumericalError("laplacian has " + std::to_string(zeros) +
                         " eigenvalues within 1e-8 of zero; expected exactly one");
  }
  return out;
}

bool IsEffectivelyReal(Complex z) {
  return std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z));
}

}  // namespace

Spectrum ShiftedSpectrumUnion(const Mat& a, const Mat& bk, const Spectrum& lap_spec) {
  Spectrum out;
  for (const Complex& z : NonzeroEigenvalues(lap_spec)) {
    if (IsEffectivelyReal(z)) {
      const Spectrum s = matlib::Eigenvalues(a + z.real() * bk);
      out.insert(out.end(), s.begin(), s.end());
    } else if (z.imag() > 0.0) {
      // The embedding already carries the conjugate partner's spectrum.
      const Spectrum s = matlib::Eigenvalues(RealEmbedding(a, bk, z));
      out.insert(out.end(), s.begin(), s.end());
    }
  }
  return out;
}

ConsensusConditionReport CheckConsensusCondition(const SystemModel& model) {
  if (!graph::HasSpanningTree(model.graph())) {
    throw AssumptionError(
        "consensus condition: graph has no directed spanning tree, so the Laplacian's "
        "zero eigenvalue is not guaranteed simple");
  }
  ConsensusConditionReport report;
  report.laplacian_spectrum = matlib::Eigenvalues(graph::Laplacian(model.graph()));
  const Mat bk = model.bk();
  report.holds = true;
  for (const Complex& z : NonzeroEigenvalues(report.laplacian_spectrum)) {
    EigenvalueCheck check;
    check.lambda = z;
    const Mat m = IsEffectivelyReal(z) ? Mat(model.a() + z.real() * bk)
                                       : RealEmbedding(model.a(), bk, z);
    check.max_real_part = matlib::SpectralAbscissa(m);
    check.hurwitz = check.max_real_part < -kHurwitzMargin;
    check.marginal = !check.hurwitz && check.max_real_part <= 0.0;
    report.holds = report.holds && check.hurwitz;
    report.per_eigenvalue.push_back(check);
  }
  return report;
}

bool CheckStabilizable(const Mat& a, const Mat& b) {
  matlib::RequireSquare(a, "check_stabilizable");
  const Eigen::Index n = a.rows();
  if (b.rows() != n) throw DimensionError("check_stabilizable: B must have n rows");
  for (const Complex& lambda : matlib::Eigenvalues(a)) {
    if (lambda.real() < -kHurwitzMargin) continue;
    Eigen::MatrixXcd pbh(n, n + b.cols());
    pbh.leftCols(n) = a.cast<Complex>() - lambda * Eigen::MatrixXcd::Identity(n, n);
    pbh.rightCols(b.cols()) = b.cast<Complex>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pbh);
    const auto& sv = svd.singularValues();
    if (sv(n - 1) <= 1e-9 * std::max(sv(0), std::numeric_limits<double>::min())) {
      return false;
    }
  }
  return true;
}

GainDesign DesignGain(const Mat& a, const Mat& b, const graph::DirectedGraph& g,
                      double c_margin) {
  if (!(c_margin > 0.0) || !std::isfinite(c_margin)) {
    throw PreconditionError("design_gain: c_margin must be positive");
  }
  if (!CheckStabilizable(a, b)) {
    throw AssumptionError("design_gain: (A, B) is not stabilizable");
  }
  if (!graph::HasSpanningTree(g)) {
    throw AssumptionError("design_gain: graph has no directed spanning tree");
  }
  GainDesign out;
  out.p = matlib::SolveCare(a, b);
  out.care_residual = matlib::CareResidual(a, b, out.p);

  double min_re = std::numeric_limits<double>::infinity();
  for (const Complex& z : NonzeroEigenvalues(matlib::Eigenvalues(graph::Laplacian(g)))) {
    min_re = std::min(min_re, z.real());
  }
  out.c = c_margin + 1.0 / min_re;
  out.k = -out.c * b.transpose() * out.p;

  const SystemModel designed(a, b, out.k, g);
  if (!CheckConsensusCondition(designed).holds) {
    throw NumericalError(
        "design_gain: synthesized K does not satisfy the Hurwitz condition");
  }
  return out;
}

bool ValidateAlpha(double alpha, const Mat& pi) {
  const double mu = matlib::SpectralAbscissa(pi);
  if (!(mu < -kHurwitzMargin)) {
    throw PreconditionError("validate_alpha: Pi is not Hurwitz (max Re = " +
                            std::to_string(mu) + "), the decay bound is vacuous");
  }
  return alpha > 0.0 && alpha < -mu;
}

AbscissaReport SpectralAbscissaReport(const ClosedLoopMatrices& clm) {
  AbscissaReport out;
  out.mu_pi = matlib::SpectralAbscissa(clm.pi);
  for (const Mat& om : clm.omega) out.mu_omega.push_back(matlib::SpectralAbscissa(om));
  return out;
}

double SpectrumDistance(const Spectrum& lhs, const Spectrum& rhs) {
  if (lhs.size() != rhs.size()) return std::numeric_limits<double>::infinity();
  std::vector<char> used(rhs.size(), 0);
  double worst = 0.0;
  for (const Complex& z : lhs) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z - rhs[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    used[arg] = 1;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace etcons::model
