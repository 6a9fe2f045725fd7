#pragma once

#include <json.hpp>

#include "tsdp/sdp.hpp"
#include "tsdp/spectral.hpp"
#include "tsdp/tsdp.hpp"

/// JSON schemas for the exchange types. Doubles are emitted in shortest
/// round-trip form, so serialize/parse cycles are lossless.
namespace tsdp {

namespace detail {

inline nlohmann::json to_json_rows(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON must be a nonempty array of rows");
  const size_t rows = j.size();
  const size_t cols = j.at(0).size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || row.size() != cols) throw std::invalid_argument("matrix JSON rows have uneven lengths");
    for (size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.at(c).get<double>();
  }
  return m;
}

inline nlohmann::json to_json_complex(const Eigen::MatrixXcd& m) {
  return {{"re", to_json_rows(m.real())}, {"im", to_json_rows(m.imag())}};
}

inline Eigen::MatrixXcd complex_from_json(const nlohmann::json& j) {
  Eigen::MatrixXd re = matrix_from_json(j.at("re"));
  Eigen::MatrixXd im = matrix_from_json(j.at("im"));
  if (re.rows() != im.rows() || re.cols() != im.cols())
    throw std::invalid_argument("complex matrix JSON: re/im shapes disagree");
  return re.cast<Cplx>() + Cplx(0, 1) * im.cast<Cplx>();
}

inline nlohmann::json to_json_vector(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

}  // namespace detail

/// {"m":_, "n":_, "p":_, "slices": [slice][row][col]}
inline void to_json(nlohmann::json& j, const Tensor3& t) {
  nlohmann::json slices = nlohmann::json::array();
  for (int k = 0; k < t.p(); ++k) slices.push_back(detail::to_json_rows(t.slice(k)));
  j = {{"m", t.m()}, {"n", t.n()}, {"p", t.p()}, {"slices", std::move(slices)}};
}

inline void from_json(const nlohmann::json& j, Tensor3& t) {
  const int m = j.at("m").get<int>(), n = j.at("n").get<int>(), p = j.at("p").get<int>();
  const auto& slices = j.at("slices");
  if (m < 1 || n < 1 || p < 1 || static_cast<int>(slices.size()) != p)
    throw std::invalid_argument("Tensor3 JSON: declared sizes do not match slices");
  std::vector<Eigen::MatrixXd> data;
  data.reserve(static_cast<size_t>(p));
  for (int k = 0; k < p; ++k) {
    Eigen::MatrixXd s = detail::matrix_from_json(slices.at(static_cast<size_t>(k)));
    if (s.rows() != m || s.cols() != n) throw std::invalid_argument("Tensor3 JSON: slice shape mismatch");
    data.push_back(std::move(s));
  }
  t = Tensor3(std::move(data));
}

/// {"n":_, "p":_, "C": Tensor3, "A": [Tensor3...], "b": [...]}
inline void to_json(nlohmann::json& j, const TsdpProblem& prob) {
  nlohmann::json amats = nlohmann::json::array();
  for (const Tensor3& a : prob.A) amats.push_back(a);
  j = {{"n", prob.n()}, {"p", prob.p()}, {"C", prob.C}, {"A", std::move(amats)}, {"b", detail::to_json_vector(prob.b)}};
}

inline void from_json(const nlohmann::json& j, TsdpProblem& prob) {
  prob.C = j.at("C").get<Tensor3>();
  prob.A.clear();
  for (const auto& a : j.at("A")) prob.A.push_back(a.get<Tensor3>());
  prob.b = detail::vector_from_json(j.at("b"));
  if (j.contains("n") && j.at("n").get<int>() != prob.n())
    throw std::invalid_argument("TsdpProblem JSON: declared n disagrees with C");
  if (j.contains("p") && j.at("p").get<int>() != prob.p())
    throw std::invalid_argument("TsdpProblem JSON: declared p disagrees with C");
}

/// Export schema for cross-checking against third-party solvers.
inline void to_json(nlohmann::json& j, const CsdpProblem& prob) {
  nlohmann::json cblocks = nlohmann::json::array();
  for (const auto& c : prob.C) cblocks.push_back(detail::to_json_complex(c));
  nlohmann::json amats = nlohmann::json::array();
  for (const auto& ai : prob.A) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& blk : ai) blocks.push_back(detail::to_json_complex(blk));
    amats.push_back(std::move(blocks));
  }
  j = {{"block_sizes", prob.block_sizes}, {"is_real", std::vector<int>(prob.is_real.begin(), prob.is_real.end())},
       {"C", std::move(cblocks)},         {"A", std::move(amats)},
       {"b", detail::to_json_vector(prob.b)}, {"obj_scale", prob.obj_scale}};
}

inline void from_json(const nlohmann::json& j, CsdpProblem& prob) {
  prob.block_sizes = j.at("block_sizes").get<std::vector<int>>();
  std::vector<int> real_flags = j.at("is_real").get<std::vector<int>>();
  prob.is_real.assign(real_flags.begin(), real_flags.end());
  prob.C.clear();
  for (const auto& c : j.at("C")) prob.C.push_back(detail::complex_from_json(c));
  prob.A.clear();
  for (const auto& ai : j.at("A")) {
    std::vector<Eigen::MatrixXcd> blocks;
    for (const auto& blk : ai) blocks.push_back(detail::complex_from_json(blk));
    prob.A.push_back(std::move(blocks));
  }
  prob.b = detail::vector_from_json(j.at("b"));
  prob.obj_scale = j.at("obj_scale").get<double>();
}

inline void to_json(nlohmann::json& j, const SpectralReport& r) {
  j = {{"eigenvalues", r.eigenvalues}, {"lambda_max", r.lambda_max}, {"lambda_min", r.lambda_min},
       {"trace", r.trace},             {"is_psd", r.is_psd},         {"is_pd", r.is_pd},
       {"atol", r.atol},               {"rtol", r.rtol}};
}

inline void to_json(nlohmann::json& j, const TsdpSolution& sol) {
  j = {{"status", to_string(sol.status)},
       {"primal_obj", sol.primal_obj},
       {"dual_obj", sol.dual_obj},
       {"gap", sol.gap},
       {"primal_residual", sol.primal_residual},
       {"dual_residual", sol.dual_residual},
       {"min_eig_X", sol.min_eig_X},
       {"min_eig_S", sol.min_eig_S},
       {"iterations", sol.iterations},
       {"X", sol.X},
       {"S", sol.S},
       {"y", detail::to_json_vector(sol.y)}};
}

inline void to_json(nlohmann::json& j, const CertifyReport& r) {
  j = {{"primal_obj", r.primal_obj},   {"dual_obj", r.dual_obj},   {"rel_gap", r.rel_gap},
       {"primal_res", r.primal_res},   {"dual_res", r.dual_res},   {"min_eig_X", r.min_eig_X},
       {"min_eig_S", r.min_eig_S},     {"weak_duality_ok", r.weak_duality_ok}};
}

}  // namespace tsdp
