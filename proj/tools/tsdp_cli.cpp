#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "tsdp/json_io.hpp"
#include "tsdp/polyopt.hpp"
#include "tsdp/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNonOptimal = 1;
constexpr int kExitInputError = 2;
constexpr std::uint64_t kDefaultSeed = 20240814;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

tsdp::Tensor3 load_tensor(const std::string& path) {
  return nlohmann::json::parse(read_file(path)).get<tsdp::Tensor3>();
}

/// Shortest round-trip decimal form, shared by text and JSON output so both
/// report bit-identical numbers.
std::string num(double v) { return nlohmann::json(v).dump(); }

struct CommonOpts {
  double gap_tol = tsdp::SolveOptions{}.gap_tol;
  double feas_tol = tsdp::SolveOptions{}.feas_tol;
  bool json = false;

  tsdp::SolveOptions solve_options() const {
    tsdp::SolveOptions o;
    o.gap_tol = gap_tol;
    o.feas_tol = feas_tol;
    return o;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--gap-tol", gap_tol, "relative duality gap tolerance");
    cmd->add_option("--feas-tol", feas_tol, "primal/dual feasibility tolerance");
    cmd->add_flag("--json", json, "emit a JSON report instead of text");
  }
};

int status_code(const tsdp::TsdpSolution& sol) { return tsdp::near_optimal(sol) ? kExitOk : kExitNonOptimal; }

int run_polymin(const std::string& path, int p, const CommonOpts& common) {
  tsdp::Polynomial f = tsdp::Polynomial::parse(read_file(path));
  tsdp::SosResult r = tsdp::sos_lower_bound(f, p, common.solve_options());
  nlohmann::json rep{{"schema_version", 1},
                     {"bound", r.bound},
                     {"p", r.p},
                     {"blocks", r.block_sizes},
                     {"constraints", r.constraints},
                     {"constraints_with_constant", r.constraints_with_constant},
                     {"status", tsdp::to_string(r.sol.status)},
                     {"time_build", r.time_build},
                     {"time_solve", r.time_solve}};
  if (common.json) {
    std::cout << rep.dump(2) << "\n";
  } else {
    std::cout << "variables       " << f.n() << "\n"
              << "degree          " << f.degree() << "\n"
              << "p               " << r.p << "\n"
              << "basis           " << r.basis_size << " monomials, chunks of " << r.m << "\n"
              << "blocks          " << r.block_count << " x " << r.m << "\n"
              << "constraints     " << r.constraints << " (" << r.constraints_with_constant
              << " counting the constant term)\n"
              << "status          " << tsdp::to_string(r.sol.status) << "\n"
              << "iterations      " << r.sol.iterations << "\n"
              << "bound           " << num(r.bound) << "\n"
              << "gap             " << num(r.sol.gap) << "\n"
              << "time_build      " << num(r.time_build) << " s\n"
              << "time_solve      " << num(r.time_solve) << " s\n"
              << "time_total      " << num(r.time_build + r.time_solve) << " s\n";
  }
  return status_code(r.sol);
}

int run_tnorm(const std::string& path, const CommonOpts& common) {
  tsdp::Tensor3 a = load_tensor(path);
  tsdp::TsdpSolution nuc = tsdp::nuclear_norm_solve(a, common.solve_options());
  const double nuc_oracle = tsdp::nuclear_norm_oracle(a);
  tsdp::MinimaxResult sp = tsdp::min_spectral_norm(a, {}, common.solve_options());
  const double sp_oracle = tsdp::spectral_norm_oracle(a);
  nlohmann::json rep{{"schema_version", 1},
                     {"nuclear", {{"tsdp", nuc.primal_obj}, {"oracle", nuc_oracle}, {"gap", nuc.primal_obj - nuc_oracle}}},
                     {"spectral", {{"tsdp", sp.value}, {"oracle", sp_oracle}, {"gap", sp.value - sp_oracle}}},
                     {"status",
                      {{"nuclear", tsdp::to_string(nuc.status)}, {"spectral", tsdp::to_string(sp.sol.status)}}}};
  if (common.json) {
    std::cout << rep.dump(2) << "\n";
  } else {
    std::cout << "nuclear  tsdp " << num(nuc.primal_obj) << "  oracle " << num(nuc_oracle) << "  gap "
              << num(nuc.primal_obj - nuc_oracle) << "  [" << tsdp::to_string(nuc.status) << "]\n"
              << "spectral tsdp " << num(sp.value) << "  oracle " << num(sp_oracle) << "  gap "
              << num(sp.value - sp_oracle) << "  [" << tsdp::to_string(sp.sol.status) << "]\n";
  }
  return std::max(status_code(nuc), status_code(sp.sol));
}

int run_teig(const std::string& path, const CommonOpts& common) {
  tsdp::Tensor3 a = load_tensor(path);
  tsdp::SpectralReport spec = tsdp::spectral_report(a);
  tsdp::MinimaxResult mm = tsdp::min_max_teigenvalue(a, {}, common.solve_options());
  const double oracle = tsdp::max_teig_oracle(a);
  nlohmann::json rep{{"schema_version", 1},
                     {"report", spec},
                     {"max_eigenvalue", {{"tsdp", mm.value}, {"oracle", oracle}, {"gap", mm.value - oracle}}},
                     {"status", tsdp::to_string(mm.sol.status)}};
  if (common.json) {
    std::cout << rep.dump(2) << "\n";
  } else {
    std::cout << "eigenvalue range  [" << num(spec.lambda_min) << ", " << num(spec.lambda_max) << "]\n"
              << "trace             " << num(spec.trace) << "\n"
              << "T-PSD             " << (spec.is_psd ? "yes" : "no") << "\n"
              << "T-PD              " << (spec.is_pd ? "yes" : "no") << "\n"
              << "max eig tsdp " << num(mm.value) << "  oracle " << num(oracle) << "  gap " << num(mm.value - oracle)
              << "  [" << tsdp::to_string(mm.sol.status) << "]\n";
  }
  return status_code(mm.sol);
}

int run_iqp(const std::string& path, const CommonOpts& common) {
  tsdp::Tensor3 a = load_tensor(path);
  tsdp::IqpResult r = tsdp::integer_quartic_relaxation(a, common.solve_options());
  nlohmann::json rep{{"schema_version", 1},
                     {"upper_bound", r.upper_bound},
                     {"status", tsdp::to_string(r.sol.status)}};
  const bool oracle_feasible = a.n() <= 20;
  double oracle = 0;
  if (oracle_feasible) {
    oracle = tsdp::iqp_oracle(a);
    rep["oracle"] = oracle;
    rep["gap"] = r.upper_bound - oracle;
  }
  if (common.json) {
    std::cout << rep.dump(2) << "\n";
  } else {
    std::cout << "relaxation upper bound  " << num(r.upper_bound) << "  [" << tsdp::to_string(r.sol.status) << "]\n";
    if (oracle_feasible)
      std::cout << "exhaustive optimum      " << num(oracle) << "\n"
                << "gap                     " << num(r.upper_bound - oracle) << "\n";
  }
  return status_code(r.sol);
}

int run_selftest_cmd(std::uint64_t seed, const std::string& filter, bool json) {
  std::vector<tsdp::SuiteResult> results = tsdp::run_selftest(seed, filter);
  if (results.empty()) {
    std::cerr << "no suite matches filter '" << filter << "'\n";
    return kExitInputError;
  }
  bool all_ok = true;
  if (json) {
    nlohmann::json rep = nlohmann::json::array();
    for (const auto& r : results) {
      rep.push_back({{"name", r.name}, {"checks", r.checks}, {"failures", r.failures}, {"messages", r.messages}});
      all_ok = all_ok && r.passed();
    }
    std::cout << nlohmann::json{{"schema_version", 1}, {"seed", seed}, {"suites", rep}}.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      std::cout << (r.passed() ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.checks << " checks";
      if (!r.passed()) std::cout << ", " << r.failures << " failures";
      std::cout << ")\n";
      for (const auto& m : r.messages) std::cout << "      " << m << "\n";
      all_ok = all_ok && r.passed();
    }
  }
  return all_ok ? kExitOk : kExitNonOptimal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor semidefinite programming toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  auto* polymin = app.add_subcommand("polymin", "certified lower bound of an even-degree polynomial");
  static std::string poly_path;
  static int poly_p = 1;
  static CommonOpts poly_opts;
  polymin->add_option("file", poly_path, "polynomial file: one 'coeff x1^a1 x2^a2 ...' term per line")->required();
  polymin->add_option("--p", poly_p, "number of Fourier blocks; must divide the basis size");
  poly_opts.attach(polymin);
  polymin->callback([&] { action = [&] { return run_polymin(poly_path, poly_p, poly_opts); }; });

  auto* tnorm = app.add_subcommand("tnorm", "tensor nuclear and spectral norms vs oracles");
  static std::string tnorm_path;
  static CommonOpts tnorm_opts;
  tnorm->add_option("file", tnorm_path, "tensor JSON file")->required();
  tnorm_opts.attach(tnorm);
  tnorm->callback([&] { action = [&] { return run_tnorm(tnorm_path, tnorm_opts); }; });

  auto* teig = app.add_subcommand("teig", "T-eigenvalue report and largest-eigenvalue minimization");
  static std::string teig_path;
  static CommonOpts teig_opts;
  teig->add_option("file", teig_path, "symmetric tensor JSON file")->required();
  teig_opts.attach(teig);
  teig->callback([&] { action = [&] { return run_teig(teig_path, teig_opts); }; });

  auto* iqp = app.add_subcommand("iqp", "quartic relaxation of a sign-vector quadratic maximization");
  static std::string iqp_path;
  static CommonOpts iqp_opts;
  iqp->add_option("file", iqp_path, "n x n x n tensor JSON file")->required();
  iqp_opts.attach(iqp);
  iqp->callback([&] { action = [&] { return run_iqp(iqp_path, iqp_opts); }; });

  auto* selftest = app.add_subcommand("selftest", "run the seeded property suites");
  static std::uint64_t seed = kDefaultSeed;
  static std::string filter;
  static bool selftest_json = false;
  selftest->add_option("--seed", seed, "seed for the randomized suites");
  selftest->add_option("--filter", filter, "run only suites whose name contains this substring");
  selftest->add_flag("--json", selftest_json, "emit a JSON report instead of text");
  selftest->callback([&] { action = [&] { return run_selftest_cmd(seed, filter, selftest_json); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    return action();
  } catch (const tsdp::SchurDegenerateError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitNonOptimal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
