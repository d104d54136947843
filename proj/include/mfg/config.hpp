#pragma once

#include <string>
#include <vector>

#include "mfg/continuation.hpp"

namespace mfg {

// Aggregated, itemized validation failure.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> items);
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
};

// Plain-value mirror of the JSON config file. Strict schema: unknown keys are
// rejected, missing keys take the defaults below, every numeric field is
// range-checked on load.
struct RunConfig {
  int grid_dim = 1;
  int grid_n = 64;

  std::string family = "power";  // power | congestion | weak
  double alpha = 2.0;
  double beta = 1.0;
  double tau = 0.0;
  std::string a_profile = "const:1.0";
  std::string b_profile = "const:1.0";
  std::string g_profile = "const:1.0";
  std::string h_kernel = "exp";  // exp | cosh

  std::string potential = "const:0.0";

  double eps0 = 0.1;
  double ratio = 0.1;
  int stages = 4;
  double tol_hj_pos = 1e-4;
  double tol_hj_support = 1e-4;
  double tol_transport_l1 = 1e-4;
  double tol_mass_gap = 1e-5;
  double tol_weak_certificate = 1e-5;
  double congestion_floor_min = 1e-6;
  bool warm_start = true;

  double step0 = 0.1;
  double backtrack_ratio = 0.5;
  int max_iter = 500000;
  double tol_natural = 1e-9;
  double m_floor = 0.0;

  bool use_envelope = false;
  std::string output_dir = "out";
  uint64_t seed = 0;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& text, const std::string& origin);
std::string save_config_json(const RunConfig& cfg);

// Coefficient profiles: "const:c" or "sin1:c0,c1" meaning c0 + c1 sin(2 pi x0).
ScalarField parse_profile(const std::string& profile, const TorusGrid& grid);

// Materialized problem pieces from a validated config. Coefficient positivity
// (essinf a > 0 etc.) is deliberately not enforced here so that the
// certificate battery can exhibit witnesses on broken couplings; the solve
// path re-validates.
struct BuiltProblem {
  TorusGrid grid;
  ProblemData data;
  ContinuationSchedule schedule;
  SolverConfig solver;
};

BuiltProblem build_problem(const RunConfig& cfg);

int cli_main(int argc, const char* const* argv);

}  // namespace mfg
