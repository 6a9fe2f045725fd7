#include <gtest/gtest.h>

#include <random>

#include <tsdp/sdp.hpp>

namespace {

using namespace tsdp;

CsdpProblem real_diag_problem(const Eigen::VectorXd& c, const std::vector<Eigen::VectorXd>& a,
                              const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  CsdpProblem prob;
  prob.block_sizes = {n};
  prob.is_real = {true};
  prob.C = {Eigen::MatrixXcd(c.asDiagonal().toDenseMatrix().cast<Cplx>())};
  for (const auto& ai : a) prob.A.push_back({Eigen::MatrixXcd(ai.asDiagonal().toDenseMatrix().cast<Cplx>())});
  prob.b = b;
  return prob;
}

CsdpProblem trace_one_problem() {
  Eigen::VectorXd c(3), a(3), b(1);
  c << 3, 1, 2;
  a << 1, 1, 1;
  b << 1;
  return real_diag_problem(c, {a}, b);
}

Eigen::MatrixXcd hermitian_fixture(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = Cplx(u(gen), u(gen));
  return 0.5 * (h + h.adjoint());
}

TEST(Solver, TraceOneExtremalEigenvalue) {
  CsdpProblem prob = trace_one_problem();
  CsdpSolution sol = solve(prob);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  // min <C, X> over trace-one PSD X is the smallest eigenvalue of C
  EXPECT_NEAR(sol.primal_obj, 1.0, 1e-7);
  EXPECT_NEAR(sol.dual_obj, 1.0, 1e-7);
  EXPECT_NEAR(sol.y(0), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(sol.X[0](1, 1)), 1.0, 1e-5);
  EXPECT_LT(std::abs(sol.X[0](0, 0)), 1e-5);

  // obj_scale multiplies the reported objective values only
  prob.obj_scale = 2.0;
  CsdpSolution scaled = solve(prob);
  EXPECT_NEAR(scaled.primal_obj, 2.0, 1e-6);
  EXPECT_NEAR(scaled.dual_obj, 2.0, 1e-6);
}

TEST(Solver, ZeroObjective) {
  CsdpProblem prob = trace_one_problem();
  prob.C[0].setZero();
  CsdpSolution sol = solve(prob);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.primal_obj, 0.0, 1e-7);
}

TEST(Solver, DiagonalLpAgainstVertexEnumeration) {
  Eigen::VectorXd c(4), a1(4), a2(4), b(2);
  c << 2, -1, 3, 0.5;
  a1 << 1, 2, 0, 1;
  a2 << 0, 1, 1, 3;
  b << 2, 1.5;
  // the SDP restricted to diagonal X is the LP min c.x, a1.x = b1, a2.x = b2,
  // x >= 0, and the diagonal data keeps the SDP optimum equal to the LP one
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      Eigen::Matrix2d basis;
      basis << a1(i), a1(j), a2(i), a2(j);
      if (std::abs(basis.determinant()) < 1e-12) continue;
      Eigen::Vector2d xb = basis.inverse() * b;
      if (xb.minCoeff() < -1e-12) continue;
      best = std::min(best, c(i) * xb(0) + c(j) * xb(1));
    }
  ASSERT_TRUE(std::isfinite(best));

  CsdpProblem prob = real_diag_problem(c, {a1, a2}, b);
  for (SolveAlgorithm alg : {SolveAlgorithm::kInteriorPoint, SolveAlgorithm::kFirstOrder}) {
    SolveOptions opts;
    opts.algorithm = alg;
    CsdpSolution sol = solve(prob, opts);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    EXPECT_NEAR(sol.primal_obj, best, 1e-6 * (1.0 + std::abs(best)));
    CertifyReport rep = certify(prob, sol);
    EXPECT_LE(rep.primal_res, 1e-7);
    EXPECT_LE(rep.dual_res, 1e-7);
    EXPECT_TRUE(rep.weak_duality_ok);
  }
}

TEST(Solver, RealifyRoundTripAndScaling) {
  Eigen::MatrixXcd h = hermitian_fixture(4, 7);
  Eigen::MatrixXd r = realify(h);
  EXPECT_LE((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((derealify(r) - h).cwiseAbs().maxCoeff(), 1e-14);

  // eigenvalues double up and inner products double
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(r);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(er.eigenvalues()(2 * i), eh.eigenvalues()(i), 1e-12);
    EXPECT_NEAR(er.eigenvalues()(2 * i + 1), eh.eigenvalues()(i), 1e-12);
  }
  Eigen::MatrixXcd g = hermitian_fixture(4, 8);
  const double complex_inner = h.cwiseProduct(g.conjugate()).sum().real();
  EXPECT_NEAR(realify(h).cwiseProduct(realify(g)).sum(), 2.0 * complex_inner, 1e-12);

  EXPECT_THROW(realify(Eigen::MatrixXcd::Random(3, 3)), std::invalid_argument);
  EXPECT_THROW(derealify(Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST(Solver, ComplexBlockMatchesManualRealification) {
  Eigen::MatrixXcd c = hermitian_fixture(3, 11) + 4.0 * Eigen::MatrixXcd::Identity(3, 3);
  Eigen::MatrixXcd a2 = hermitian_fixture(3, 12);
  CsdpProblem prob;
  prob.block_sizes = {3};
  prob.is_real = {false};
  prob.C = {c};
  prob.A = {{Eigen::MatrixXcd::Identity(3, 3)}, {a2}};
  prob.b = Eigen::VectorXd(2);
  prob.b << 1, 0.1;
  CsdpSolution sol = solve(prob);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_LE((sol.X[0] - sol.X[0].adjoint()).cwiseAbs().maxCoeff(), 1e-9);

  // same problem hand-embedded over real blocks: <(1/2) realify(H), realify(X)>
  // reproduces <H, X>, and the optimum is unchanged
  CsdpProblem real_prob;
  real_prob.block_sizes = {6};
  real_prob.is_real = {true};
  real_prob.C = {Eigen::MatrixXcd(0.5 * realify(c).cast<Cplx>())};
  real_prob.A = {{Eigen::MatrixXcd(0.5 * realify(Eigen::MatrixXcd::Identity(3, 3)).cast<Cplx>())},
                 {Eigen::MatrixXcd(0.5 * realify(a2).cast<Cplx>())}};
  real_prob.b = prob.b;
  CsdpSolution real_sol = solve(real_prob);
  ASSERT_EQ(real_sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(real_sol.primal_obj, sol.primal_obj, 1e-6 * (1.0 + std::abs(sol.primal_obj)));
}

TEST(Solver, DeterministicAcrossRuns) {
  CsdpProblem prob = trace_one_problem();
  for (SolveAlgorithm alg : {SolveAlgorithm::kInteriorPoint, SolveAlgorithm::kFirstOrder}) {
    SolveOptions opts;
    opts.algorithm = alg;
    CsdpSolution s1 = solve(prob, opts);
    CsdpSolution s2 = solve(prob, opts);
    EXPECT_EQ(s1.iterations, s2.iterations);
    EXPECT_EQ(s1.primal_obj, s2.primal_obj);
    ASSERT_EQ(s1.gap_history.size(), s2.gap_history.size());
    for (size_t i = 0; i < s1.gap_history.size(); ++i) EXPECT_EQ(s1.gap_history[i], s2.gap_history[i]);
  }
}

TEST(Solver, InteriorPointGapShrinks) {
  SolveOptions opts;
  opts.algorithm = SolveAlgorithm::kInteriorPoint;
  CsdpSolution sol = solve(trace_one_problem(), opts);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  ASSERT_GE(sol.gap_history.size(), 2u);
  EXPECT_LE(sol.gap_history.back(), 1e-7);
  for (size_t i = 1; i < sol.gap_history.size(); ++i)
    EXPECT_LE(sol.gap_history[i], 1.5 * sol.gap_history[i - 1] + 1e-12);
}

TEST(Solver, CertifyFlagsCorruptedSolutions) {
  CsdpProblem prob = trace_one_problem();
  CsdpSolution sol = solve(prob);
  CertifyReport clean = certify(prob, sol);
  EXPECT_LE(clean.primal_res, 1e-7);
  EXPECT_LE(clean.dual_res, 1e-7);
  EXPECT_GE(clean.min_eig_X, -1e-9);
  EXPECT_GE(clean.min_eig_S, -1e-9);
  EXPECT_TRUE(clean.weak_duality_ok);

  CsdpSolution bad_x = sol;
  bad_x.X[0] += Eigen::MatrixXcd::Identity(3, 3);
  EXPECT_GT(certify(prob, bad_x).primal_res, 0.1);

  CsdpSolution bad_y = sol;
  bad_y.y(0) += 5.0;
  CertifyReport rep_y = certify(prob, bad_y);
  EXPECT_GT(rep_y.dual_res, 0.1);
  EXPECT_FALSE(rep_y.weak_duality_ok);  // dual objective jumped above the primal

  CsdpSolution bad_s = sol;
  bad_s.S[0] -= 2.0 * Eigen::MatrixXcd::Identity(3, 3);
  EXPECT_LT(certify(prob, bad_s).min_eig_S, -1.0);
}

TEST(Solver, ZeroRowInfeasibility) {
  CsdpProblem prob = trace_one_problem();
  prob.A.push_back({Eigen::MatrixXcd::Zero(3, 3)});
  Eigen::VectorXd b(2);
  b << 1, 0.5;  // 0 = 0.5 is unsatisfiable
  prob.b = b;
  CsdpSolution sol = solve(prob);
  EXPECT_EQ(sol.status, SolveStatus::kInfeasibleSuspected);
  EXPECT_EQ(sol.iterations, 0);
}

TEST(Solver, UnboundedObjectiveSuspected) {
  CsdpProblem prob;
  prob.block_sizes = {2};
  prob.is_real = {true};
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
  c(1, 1) = -1;  // X22 is unconstrained, so the objective dives
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 1;
  prob.C = {c};
  prob.A = {{a}};
  prob.b = Eigen::VectorXd::Ones(1);
  SolveOptions opts;
  opts.algorithm = SolveAlgorithm::kInteriorPoint;
  CsdpSolution sol = solve(prob, opts);
  EXPECT_EQ(sol.status, SolveStatus::kUnboundedSuspected);
}

TEST(Solver, InconsistentConstraintsDoNotPassAsOptimal) {
  CsdpProblem prob = trace_one_problem();
  prob.A.push_back(prob.A[0]);  // same constraint, contradictory right side
  Eigen::VectorXd b(2);
  b << 1, 2;
  prob.b = b;

  SolveOptions ipm;
  ipm.algorithm = SolveAlgorithm::kInteriorPoint;
  try {
    CsdpSolution sol = solve(prob, ipm);
    EXPECT_NE(sol.status, SolveStatus::kOptimal);
  } catch (const SchurDegenerateError&) {
    // equally acceptable: the duplicated row makes the Schur system singular
  }

  CsdpSolution rescued = solve(prob);  // kAuto must survive without throwing
  EXPECT_NE(rescued.status, SolveStatus::kOptimal);
}

TEST(Solver, ValidationRejectsMalformedProblems) {
  CsdpProblem prob = trace_one_problem();
  prob.C[0](0, 1) = Cplx(0.3, 0.0);  // breaks symmetry
  EXPECT_THROW(solve(prob), std::invalid_argument);

  prob = trace_one_problem();
  prob.C[0](0, 1) = Cplx(0, 0.5);
  prob.C[0](1, 0) = Cplx(0, -0.5);  // Hermitian but flagged real
  EXPECT_THROW(solve(prob), std::invalid_argument);

  prob = trace_one_problem();
  prob.obj_scale = 0.0;
  EXPECT_THROW(solve(prob), std::invalid_argument);

  prob = trace_one_problem();
  prob.A.clear();
  prob.b.resize(0);
  EXPECT_THROW(solve(prob), std::invalid_argument);

  prob = trace_one_problem();
  prob.A[0].push_back(Eigen::MatrixXcd::Zero(2, 2));
  EXPECT_THROW(solve(prob), std::invalid_argument);
}

TEST(Solver, IterationBudgetIsHonored) {
  SolveOptions opts;
  opts.algorithm = SolveAlgorithm::kInteriorPoint;
  opts.max_iter = 1;
  CsdpSolution sol = solve(trace_one_problem(), opts);
  EXPECT_EQ(sol.status, SolveStatus::kMaxIter);
  EXPECT_EQ(sol.iterations, 1);

  opts.algorithm = SolveAlgorithm::kFirstOrder;
  opts.first_order_max_iter = 3;
  CsdpSolution fo = solve(trace_one_problem(), opts);
  EXPECT_EQ(fo.status, SolveStatus::kMaxIter);
}

}  // namespace
