#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "etcons/errors.h"
#include "etcons/matlib.h"
#include "oracles.h"

using namespace etcons;
using matlib::Mat;
using matlib::Vec;

TEST_SUITE("matlib") {

TEST_CASE("eigenvalues of the quarter-turn generator are +-i") {
  const auto s = matlib::Eigenvalues(oracle::ExampleA());
  CHECK(oracle::MultisetDistance(s, {{0, 1}, {0, -1}}) < 1e-12);
}

TEST_CASE("eigenvalues of the identity") {
  const auto s = matlib::Eigenvalues(Mat::Identity(4, 4));
  CHECK(oracle::MultisetDistance(s, {1, 1, 1, 1}) < 1e-12);
}

TEST_CASE("eigenvalues agree with an independent solver on random matrices") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 8;
    const Mat m = oracle::RandomMat(rng, n, n);
    const auto ours = matlib::Eigenvalues(m);
    CHECK(oracle::MultisetDistance(ours, oracle::EigenSpectrum(m)) < 1e-8);
  }
}

TEST_CASE("eigenvalues are roots of the characteristic polynomial of the example Laplacian") {
  Mat w = oracle::ExampleWeights();
  Mat l = -w;
  for (int i = 0; i < 6; ++i) l(i, i) = w.row(i).sum();
  const auto c = oracle::CharPoly(l);
  for (const auto& z : matlib::Eigenvalues(l)) {
    CHECK(std::abs(oracle::EvalPoly(c, z)) < 1e-9);
  }
}

TEST_CASE("eigenvalues are closed under conjugation and satisfy the singular residual") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    const Mat m = oracle::RandomMat(rng, n, n);
    const auto s = matlib::Eigenvalues(m);
    std::vector<matlib::Complex> conj;
    for (auto z : s) conj.push_back(std::conj(z));
    CHECK(oracle::MultisetDistance(s, conj) < 1e-8);
    for (auto z : s) {
      Eigen::MatrixXcd shifted = m.cast<matlib::Complex>();
      shifted.diagonal().array() -= z;
      CHECK(matlib::MinSingularValue(shifted) < 1e-8 * std::max(1.0, m.norm()));
    }
  }
}

TEST_CASE("eigenvalue input validation") {
  CHECK_THROWS_AS(matlib::Eigenvalues(Mat(2, 3)), DimensionError);
  Mat bad = Mat::Identity(2, 2);
  bad(0, 1) = NAN;
  CHECK_THROWS_AS(matlib::Eigenvalues(bad), PreconditionError);
}

TEST_CASE("matrix exponential of the rotation generator") {
  const double t = 0.7;
  const Mat e = matlib::MatExp(oracle::ExampleA(), t);
  Mat rot(2, 2);
  rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  CHECK((e - rot).cwiseAbs().maxCoeff() < 1e-10);
  const Mat quarter = matlib::MatExp(oracle::ExampleA(), std::numbers::pi / 2);
  CHECK((quarter - (Mat(2, 2) << 0, 1, -1, 0).finished()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("matrix exponential matches a truncated Taylor series") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const Mat m = oracle::RandomMat(rng, n, n);
    const double t = 0.1 + 0.2 * trial;
    const Mat ours = matlib::MatExp(m, t);
    const Mat ref = oracle::TaylorExp(m, t);
    CHECK((ours - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("matrix exponential semigroup and inverse identities") {
  std::mt19937 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const Mat m = oracle::RandomMat(rng, n, n, 0.7);
    const double s = 0.3, t = 0.45;
    const Mat lhs = matlib::MatExp(m, s + t);
    const Mat rhs = matlib::MatExp(m, s) * matlib::MatExp(m, t);
    CHECK((lhs - rhs).norm() <= 1e-8 * std::max(1.0, lhs.norm()));
    const Mat id = matlib::MatExp(m, t) * matlib::MatExp(m, -t);
    CHECK((id - Mat::Identity(n, n)).norm() <= 1e-8);
  }
  CHECK((matlib::MatExp(Mat::Zero(3, 3), 5.0) - Mat::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("Kronecker product identities") {
  std::mt19937 rng(15);
  const Mat a = oracle::RandomMat(rng, 2, 3);
  const Mat b = oracle::RandomMat(rng, 3, 2);
  const Mat c = oracle::RandomMat(rng, 3, 4);
  const Mat d = oracle::RandomMat(rng, 2, 3);
  const Mat ab = matlib::Kron(a, b);
  CHECK(ab.rows() == 6);
  CHECK(ab.cols() == 6);
  CHECK(ab(4, 3) == doctest::Approx(a(1, 1) * b(1, 1)));
  // (A x B)(C x D) = AC x BD
  CHECK((matlib::Kron(a, b) * matlib::Kron(c, d) - matlib::Kron(a * c, b * d)).norm() < 1e-12);
  const Mat sq1 = oracle::RandomMat(rng, 3, 3), sq2 = oracle::RandomMat(rng, 2, 2);
  CHECK(matlib::Kron(sq1, sq2).trace() == doctest::Approx(sq1.trace() * sq2.trace()));
}

TEST_CASE("Lyapunov solve on known cases") {
  // -2x + 1 = 0 for a = -1, q = 1.
  const Mat x = matlib::SolveLyapunov(Mat::Constant(1, 1, -1.0), Mat::Constant(1, 1, 1.0));
  CHECK(x(0, 0) == doctest::Approx(0.5));
  const Mat a = -Mat::Identity(3, 3);
  const Mat q = Mat::Identity(3, 3);
  CHECK((matlib::SolveLyapunov(a, q) - 0.5 * Mat::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("Lyapunov solve matches element-wise assembly and has small residual") {
  std::mt19937 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    Mat a = oracle::RandomMat(rng, n, n);
    a.diagonal().array() -= matlib::SpectralAbscissa(a) + 1.0;
    Mat q = oracle::RandomMat(rng, n, n);
    q = q * q.transpose() + Mat::Identity(n, n);
    const Mat x = matlib::SolveLyapunov(a, q);
    const Mat ref = oracle::LyapunovByElements(a, q);
    CHECK((x - ref).norm() <= 1e-8 * std::max(1.0, ref.norm()));
    const Mat res = a.transpose() * x + x * a + q;
    CHECK(res.norm() <= 1e-9 * q.norm());
    CHECK((x - x.transpose()).norm() < 1e-12 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("Lyapunov solve rejects a non-Hurwitz matrix and asymmetric q") {
  CHECK_THROWS_AS(matlib::SolveLyapunov(Mat::Identity(2, 2), Mat::Identity(2, 2)),
                  PreconditionError);
  Mat q = Mat::Identity(2, 2);
  q(0, 1) = 1.0;
  CHECK_THROWS_AS(matlib::SolveLyapunov(-Mat::Identity(2, 2), q), PreconditionError);
}

TEST_CASE("CARE scalar cases") {
  // a = 0, b = 1: -p^2 + 1 = 0 -> p = 1.
  CHECK(matlib::SolveCare(Mat::Zero(1, 1), Mat::Ones(1, 1))(0, 0) == doctest::Approx(1.0));
  // a = -1, b = 1: -2p - p^2 + 1 = 0 -> p = sqrt(2) - 1.
  CHECK(matlib::SolveCare(-Mat::Ones(1, 1), Mat::Ones(1, 1))(0, 0) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-9));
  // a = 1, b = 1: 2p - p^2 + 1 = 0 -> p = 1 + sqrt(2).
  CHECK(matlib::SolveCare(Mat::Ones(1, 1), Mat::Ones(1, 1))(0, 0) ==
        doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("CARE on the oscillator example") {
  const Mat a = oracle::ExampleA(), b = oracle::ExampleB();
  const Mat p = matlib::SolveCare(a, b);
  CHECK(matlib::CareResidual(a, b, p) <= 1e-10);
  CHECK((p - p.transpose()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(p);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(matlib::SpectralAbscissa(a - b * b.transpose() * p) < 0.0);
}

TEST_CASE("norm helpers") {
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 3, -5, 1;
  CHECK(matlib::Norm2(d) == doctest::Approx(5.0));
  CHECK(matlib::MinSingularValue(d.cast<matlib::Complex>()) == doctest::Approx(1.0));
  CHECK(matlib::SpectralAbscissa(d) == doctest::Approx(3.0));
}

}
