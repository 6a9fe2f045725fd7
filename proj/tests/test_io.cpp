#include <gtest/gtest.h>

#include <random>

#include <tsdp/json_io.hpp>
#include <tsdp/polyopt.hpp>

namespace {

using namespace tsdp;

Tensor3 rnd_tensor(int m, int n, int p, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor3 t(m, n, p);
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) t(i, j, k) = u(gen);
  return t;
}

TEST(Io, PolynomialParseBasics) {
  const std::string text =
      "# comment line\n"
      "2 x1^2 x2\n"
      "\n"
      "-1.5 x2^3\n"
      "4\n"
      "1 x1\n"
      "2 x1\n";
  Polynomial f = Polynomial::parse(text);
  EXPECT_EQ(f.n(), 2);
  EXPECT_EQ(f.degree(), 3);
  EXPECT_EQ(f.coeff({2, 1}), 2.0);
  EXPECT_EQ(f.coeff({0, 3}), -1.5);
  EXPECT_EQ(f.constant_term(), 4.0);
  EXPECT_EQ(f.coeff({1, 0}), 3.0);  // duplicate terms accumulate

  Eigen::VectorXd x(2);
  x << 2.0, -1.0;
  EXPECT_NEAR(f(x), 2 * 4 * (-1.0) - 1.5 * (-1.0) + 4 + 3 * 2.0, 1e-12);

  // n_min widens the variable count beyond what the text mentions
  Polynomial g = Polynomial::parse("3 x1^2\n", 4);
  EXPECT_EQ(g.n(), 4);
  EXPECT_EQ(g.coeff({2, 0, 0, 0}), 3.0);
}

TEST(Io, PolynomialParseErrorsCarryLineNumbers) {
  auto expect_line = [](const std::string& text, const std::string& needle) {
    try {
      Polynomial::parse(text);
      FAIL() << "expected invalid_argument for: " << text;
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_line("bogus\n", "line 1");
  expect_line("1 x1\n2 x2\n3 x^\n", "line 3");
  expect_line("2 x1^-3\n", "line 1");
}

TEST(Io, TensorRoundTripIsExact) {
  Tensor3 t = rnd_tensor(2, 3, 4, 7);
  nlohmann::json j = t;
  EXPECT_EQ(j.at("m"), 2);
  EXPECT_EQ(j.at("n"), 3);
  EXPECT_EQ(j.at("p"), 4);
  // through text and back: doubles survive bit for bit
  Tensor3 back = nlohmann::json::parse(j.dump()).get<Tensor3>();
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 2; ++i)
      for (int c = 0; c < 3; ++c) EXPECT_EQ(back(i, c, k), t(i, c, k));

  nlohmann::json bad = j;
  bad["p"] = 5;
  EXPECT_THROW(bad.get<Tensor3>(), std::invalid_argument);
  bad = j;
  bad["slices"][0][0] = nlohmann::json::array({1.0});  // ragged row
  EXPECT_THROW(bad.get<Tensor3>(), std::invalid_argument);
}

TEST(Io, TsdpProblemRoundTrip) {
  TsdpProblem prob;
  prob.C = symmetrize(rnd_tensor(2, 2, 3, 11));
  prob.A = {identity(2, 3), symmetrize(rnd_tensor(2, 2, 3, 12))};
  prob.b = Eigen::VectorXd(2);
  prob.b << 1.0, -0.5;

  nlohmann::json j = prob;
  TsdpProblem back = j.get<TsdpProblem>();
  EXPECT_NO_THROW(back.validate());
  EXPECT_EQ(back.m(), 2);
  EXPECT_EQ((back.b - prob.b).cwiseAbs().maxCoeff(), 0.0);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ((back.C.slice(k) - prob.C.slice(k)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((back.A[1].slice(k) - prob.A[1].slice(k)).cwiseAbs().maxCoeff(), 0.0);
  }

  nlohmann::json bad = j;
  bad["p"] = 7;  // disagrees with the embedded C
  EXPECT_THROW(bad.get<TsdpProblem>(), std::invalid_argument);
}

TEST(Io, CsdpProblemRoundTrip) {
  CsdpProblem prob;
  prob.block_sizes = {2, 1};
  prob.is_real = {false, true};
  Eigen::MatrixXcd c(2, 2);
  c << Cplx(1, 0), Cplx(0.5, 0.25), Cplx(0.5, -0.25), Cplx(2, 0);
  prob.C = {c, Eigen::MatrixXcd::Identity(1, 1)};
  prob.A = {{Eigen::MatrixXcd::Identity(2, 2), Eigen::MatrixXcd::Identity(1, 1)}};
  prob.b = Eigen::VectorXd::Ones(1);
  prob.obj_scale = 0.25;

  CsdpProblem back = nlohmann::json(prob).get<CsdpProblem>();
  EXPECT_NO_THROW(back.validate());
  EXPECT_EQ(back.block_sizes, prob.block_sizes);
  ASSERT_EQ(back.is_real.size(), 2u);
  EXPECT_FALSE(back.is_real[0]);
  EXPECT_TRUE(back.is_real[1]);
  EXPECT_EQ(back.obj_scale, 0.25);
  EXPECT_EQ((back.C[0] - prob.C[0]).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((back.A[0][1] - prob.A[0][1]).cwiseAbs().maxCoeff(), 0.0);

  nlohmann::json bad = nlohmann::json(prob);
  bad["C"][0]["im"] = nlohmann::json::array({{0.0}});  // re/im shapes disagree
  EXPECT_THROW(bad.get<CsdpProblem>(), std::invalid_argument);
}

TEST(Io, ReportSerializationKeys) {
  TsdpProblem prob;
  prob.C = symmetrize(rnd_tensor(2, 2, 2, 21));
  prob.A = {identity(2, 2)};
  prob.b = Eigen::VectorXd::Ones(1);
  TsdpSolution sol = solve_tsdp(prob);
  nlohmann::json j = sol;
  EXPECT_EQ(j.at("status"), "OPTIMAL");
  for (const char* key : {"primal_obj", "dual_obj", "gap", "primal_residual", "dual_residual",
                          "min_eig_X", "min_eig_S", "iterations", "X", "S", "y"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("X").at("p"), 2);

  auto [csdp, map] = reduce_to_csdp(prob);
  nlohmann::json cj = certify(csdp, solve(csdp));
  for (const char* key : {"primal_obj", "dual_obj", "rel_gap", "primal_res", "dual_res",
                          "min_eig_X", "min_eig_S", "weak_duality_ok"})
    EXPECT_TRUE(cj.contains(key)) << key;
  EXPECT_TRUE(cj.at("weak_duality_ok").get<bool>());

  nlohmann::json sj = spectral_report(identity(2, 3));
  EXPECT_EQ(sj.at("eigenvalues").size(), 6u);
  EXPECT_EQ(sj.at("lambda_max"), 1.0);
  EXPECT_EQ(sj.at("lambda_min"), 1.0);
  EXPECT_EQ(sj.at("trace"), 6.0);
  EXPECT_TRUE(sj.at("is_psd").get<bool>());
  EXPECT_TRUE(sj.at("is_pd").get<bool>());
}

}  // namespace
