#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mfg/config.hpp"

namespace mfg {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitCertificate = 4;

json stage_to_json(const StageRecord& r) {
  return json{{"epsilon", r.epsilon},
              {"delta", r.delta},
              {"iterations", r.iterations},
              {"natural_residual", r.natural_residual},
              {"hj_max_pos", r.hj_max_pos},
              {"hj_max_on_support", r.hj_max_on_support},
              {"transport_l1", r.transport_l1},
              {"mass_gap", r.mass_gap},
              {"M", r.M},
              {"mean_m", r.mean_m},
              {"min_m", r.min_m},
              {"floored_fraction", r.floored_fraction},
              {"solver_converged", r.solver_converged}};
}

json sample_to_json(const SamplePoint& s, int dim) {
  json p = json::array();
  for (int k = 0; k < dim; ++k) p.push_back(s.p[k]);
  return json{{"node", s.node}, {"p", p}, {"m", s.m}};
}

struct SolveOverrides {
  std::string out;
  uint64_t seed = 0;
  bool seed_set = false;
  double tol_hj = 0.0;
  bool tol_hj_set = false;
  double tol_transport = 0.0;
  bool tol_transport_set = false;
  int stages = 0;
  bool stages_set = false;
  bool quiet = false;
};

void apply_overrides(RunConfig& cfg, const SolveOverrides& ov) {
  if (!ov.out.empty()) cfg.output_dir = ov.out;
  if (ov.seed_set) cfg.seed = ov.seed;
  if (ov.tol_hj_set) {
    cfg.tol_hj_pos = ov.tol_hj;
    cfg.tol_hj_support = ov.tol_hj;
  }
  if (ov.tol_transport_set) cfg.tol_transport_l1 = ov.tol_transport;
  if (ov.stages_set) cfg.stages = ov.stages;
}

void write_trace_csv(const std::string& path,
                     const std::vector<std::vector<TraceRow>>& stage_traces,
                     const AprioriTrack& track) {
  std::ofstream os(path);
  os << "iteration,sigma,natural_residual,pairing_check\n";
  long offset = 0;
  for (size_t k = 0; k < stage_traces.size(); ++k) {
    for (const TraceRow& row : stage_traces[k]) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%d\n", offset + row.iteration,
                    row.sigma, row.natural_residual, row.pairing_check);
      os << buf;
    }
    if (k < track.stages.size()) offset += track.stages[k].iterations;
  }
}

int run_solve(const std::string& config_path, const SolveOverrides& ov) {
  RunConfig cfg = load_config(config_path);
  apply_overrides(cfg, ov);
  BuiltProblem built = build_problem(cfg);
  built.data.spec.validate_for_solve();

  built.solver.trace_stride = std::max(1, built.solver.max_iter / 20000);
  const ContinuationResult res =
      run_continuation(built.data, built.schedule, built.solver);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  write_csv_file((fs::path(cfg.output_dir) / "fields_m.csv").string(), res.final_state.m);
  write_csv_file((fs::path(cfg.output_dir) / "fields_u.csv").string(), res.final_state.u);
  write_trace_csv((fs::path(cfg.output_dir) / "residual_trace.csv").string(),
                  res.stage_traces, res.track);

  json report;
  report["config"] = json::parse(save_config_json(cfg));
  report["verdict"] = to_string(res.verdict);
  report["stages"] = json::array();
  for (const StageRecord& r : res.track.stages) report["stages"].push_back(stage_to_json(r));
  report["weak_certificate_min"] = res.weak_certificate_min;
  if (res.track.stages.size() >= 2) {
    const AprioriMonitor mon = apriori_monitor(res.track);
    report["apriori"] = {{"max_over_min_ratio", mon.max_over_min_ratio},
                         {"alarm", mon.alarm}};
  }
  {
    std::ofstream os(fs::path(cfg.output_dir) / "report.json");
    os << report.dump(2) << '\n';
  }

  if (!ov.quiet) {
    std::cout << "verdict: " << to_string(res.verdict) << '\n';
    for (const StageRecord& r : res.track.stages) {
      std::printf("  stage eps=%.3e delta=%.1e iters=%d res=%.3e hj+=%.3e hj|supp=%.3e "
                  "l1=%.3e gap=%.3e M=%.6g\n",
                  r.epsilon, r.delta, r.iterations, r.natural_residual, r.hj_max_pos,
                  r.hj_max_on_support, r.transport_l1, r.mass_gap, r.M);
    }
    std::cout << "report: " << (fs::path(cfg.output_dir) / "report.json").string() << '\n';
  }
  if (res.solver_failed) return kExitSolverFailure;
  return res.verdict == Verdict::Unconverged ? kExitSolverFailure : kExitOk;
}

int run_check(const std::string& config_path, int samples, bool quiet,
              const SolveOverrides& ov) {
  RunConfig cfg = load_config(config_path);
  if (ov.seed_set) cfg.seed = ov.seed;
  const BuiltProblem built = build_problem(cfg);
  const HamiltonianSpec& spec = built.data.spec;
  const int dim = built.grid.dim;

  json report;
  bool violated = false;

  const double m_floor =
      spec.family == Family::Congestion ? std::max(1e-3, built.solver.m_floor) : 0.0;
  const MonotonicityReport mono = check_monotonicity(spec, samples, m_floor, cfg.seed);
  const bool mono_ok = mono.min_lhs >= -1e-10;
  violated |= !mono_ok;
  report["monotonicity"] = {{"min_lhs", mono.min_lhs},
                            {"pass", mono_ok},
                            {"samples", samples},
                            {"witness",
                             {{"first", sample_to_json(mono.witness.s1, dim)},
                              {"second", sample_to_json(mono.witness.s2, dim)}}}};

  report["growth"] = json::array();
  for (GrowthInequality id :
       {GrowthInequality::HUpperAtZero, GrowthInequality::DpHUpper,
        GrowthInequality::HLower, GrowthInequality::LagrangianLower,
        GrowthInequality::HUpper, GrowthInequality::LagrangianPair,
        GrowthInequality::HUpperCongestion}) {
    if (!growth_applicable(spec.family, id)) continue;
    const GrowthCertificate cert = default_certificate(spec, id);
    const GrowthReport rep = check_growth(spec, cert, samples, cfg.seed);
    const bool ok = rep.worst_slack >= 0.0;
    violated |= !ok;
    report["growth"].push_back({{"inequality", to_string(id)},
                                {"C", cert.C},
                                {"worst_slack", rep.worst_slack},
                                {"pass", ok},
                                {"witness", sample_to_json(rep.witness, dim)}});
  }

  const bool envelope_applicable =
      spec.family != Family::Congestion && spec.b_min() > 0.0 && spec.a_min() > 0.0 &&
      (spec.family != Family::Weak || min_value(spec.g) >= 0.0);
  if (envelope_applicable) {
    const EnvelopeSpec env(spec, std::min(1.0, std::max(cfg.eps0, 1e-6)));
    const EnvelopeBoundsReport rep = check_envelope_bounds(env, std::min(samples, 2000), cfg.seed);
    const bool ok = rep.worst_slack >= 0.0;
    violated |= !ok;
    report["envelope_bounds"] = {{"epsilon", env.epsilon},
                                 {"worst_slack", rep.worst_slack},
                                 {"pass", ok},
                                 {"inequality_index", rep.witness.inequality},
                                 {"witness", sample_to_json(rep.witness.sample, dim)}};
  }

  report["pass"] = !violated;
  if (!quiet) std::cout << report.dump(2) << '\n';
  return violated ? kExitCertificate : kExitOk;
}

int run_infconv_table(const std::string& config_path, const std::string& out_path) {
  RunConfig cfg = load_config(config_path);
  const BuiltProblem built = build_problem(cfg);
  const HamiltonianSpec& spec = built.data.spec;
  spec.validate_for_solve();

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError({"cannot open output file: " + out_path});
    os = &file;
  }
  *os << "p,m,epsilon,q_star,H_eps,H,oracle_gap\n";
  const int node = 0;
  for (double eps : {1.0, 0.1, 0.01}) {
    const EnvelopeSpec env(spec, eps);
    for (double m : {0.25, 1.0, 4.0}) {
      for (double pv : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const Vec p{pv, 0.0};
        const EnvelopeValue ev = envelope(env, node, p, m);
        const double h = eval_H(spec, node, p, m);
        // the radial minimizer lies in [0, |p|], so a unit margin suffices
        // and keeps the oracle grid resolution meaningful for fast kernels
        const double oracle = envelope_oracle(env, node, p, m, pv + 1.0, 801);
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      pv, m, eps, norm(ev.q_star, built.grid.dim), ev.value, h,
                      ev.value - oracle);
        *os << buf;
      }
    }
  }
  return kExitOk;
}

int run_sweep(const std::string& config_path, const std::string& out_path,
              std::vector<int> n_list, bool quiet) {
  RunConfig cfg = load_config(config_path);
  if (n_list.empty()) n_list = {16, 32, 64};

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError({"cannot open output file: " + out_path});
    os = &file;
  }
  *os << "n,stage,epsilon,iterations,natural_residual,hj_max_pos,transport_l1,mass_gap,M,verdict\n";
  for (int n : n_list) {
    RunConfig c = cfg;
    c.grid_n = n;
    BuiltProblem built = build_problem(c);
    built.data.spec.validate_for_solve();
    const ContinuationResult res =
        run_continuation(built.data, built.schedule, built.solver);
    for (size_t k = 0; k < res.track.stages.size(); ++k) {
      const StageRecord& r = res.track.stages[k];
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.6g,%d,%.6g,%.6g,%.6g,%.6g,%.9g,%s\n", n,
                    k, r.epsilon, r.iterations, r.natural_residual, r.hj_max_pos,
                    r.transport_l1, r.mass_gap, r.M, to_string(res.verdict).c_str());
      *os << buf;
    }
    if (!quiet && os != &std::cout)
      std::cout << "n=" << n << " verdict=" << to_string(res.verdict) << '\n';
  }
  return kExitOk;
}

int run_diagnose(const std::string& config_path, const std::string& m_path,
                 const std::string& u_path, double epsilon) {
  RunConfig cfg = load_config(config_path);
  BuiltProblem built = build_problem(cfg);
  built.data.epsilon = epsilon;
  if (built.data.spec.family == Family::Congestion)
    built.data.m_floor = std::max(built.schedule.congestion_floor_min, epsilon);
  else
    built.data.m_floor = 0.0;

  MFGState z(built.grid, 0.0, 0.0);
  z.m = read_scalar_csv(m_path, built.grid);
  z.u = read_scalar_csv(u_path, built.grid);
  if (built.data.spec.family == Family::Congestion) {
    for (double& v : z.m.values) v = std::max(v, built.data.m_floor);
  }

  const HJResidual hj = hj_residual(built.data, z);
  const TransportResidual tr = transport_residual(built.data, z);
  const WeakCertificate wc =
      weak_solution_certificate(built.data, z, standard_test_battery(built.grid));

  json report{{"epsilon", epsilon},
              {"hj_max_pos", hj.max_pos},
              {"hj_max_on_support", hj.max_on_support},
              {"transport_l1", tr.l1},
              {"mass_gap", tr.mass_gap},
              {"weak_certificate_min", wc.min_value},
              {"min_m", min_value(z.m)}};
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Stationary mean-field game solver on the flat torus"};
  app.require_subcommand(1);

  std::string config_path;
  SolveOverrides ov;

  auto add_config_option = [&config_path](CLI::App* sub) {
    sub->add_option("config,--config", config_path, "JSON config file")->required();
  };

  CLI::App* solve = app.add_subcommand("solve", "full continuation run");
  add_config_option(solve);
  solve->add_option("--out", ov.out, "output directory");
  solve->add_option("--seed", ov.seed)->each([&ov](const std::string&) { ov.seed_set = true; });
  solve->add_option("--tol-hj", ov.tol_hj)->each([&ov](const std::string&) { ov.tol_hj_set = true; });
  solve->add_option("--tol-transport", ov.tol_transport)
      ->each([&ov](const std::string&) { ov.tol_transport_set = true; });
  solve->add_option("--stages", ov.stages)->each([&ov](const std::string&) { ov.stages_set = true; });
  solve->add_flag("--quiet", ov.quiet);

  int samples = 10000;
  CLI::App* check = app.add_subcommand("check", "certificate battery");
  add_config_option(check);
  check->add_option("--samples", samples, "samples per inequality");
  check->add_option("--seed", ov.seed)->each([&ov](const std::string&) { ov.seed_set = true; });
  check->add_flag("--quiet", ov.quiet);

  std::string out_file;
  CLI::App* table = app.add_subcommand("infconv-table", "envelope sample table");
  add_config_option(table);
  table->add_option("--out", out_file, "CSV output path (default stdout)");

  std::vector<int> n_list;
  CLI::App* sweep = app.add_subcommand("sweep", "grid/epsilon sweep");
  add_config_option(sweep);
  sweep->add_option("--out", out_file, "CSV output path (default stdout)");
  sweep->add_option("--n", n_list, "grid sizes (default 16 32 64)");
  sweep->add_flag("--quiet", ov.quiet);

  std::string m_path, u_path;
  double diag_eps = 0.0;
  CLI::App* diagnose = app.add_subcommand("diagnose", "residuals of supplied fields");
  add_config_option(diagnose);
  diagnose->add_option("--m", m_path, "density CSV")->required();
  diagnose->add_option("--u", u_path, "value CSV")->required();
  diagnose->add_option("--epsilon", diag_eps, "regularization weight (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << '\n';
    return kExitValidation;
  }

  try {
    if (solve->parsed()) return run_solve(config_path, ov);
    if (check->parsed()) return run_check(config_path, samples, ov.quiet, ov);
    if (table->parsed()) return run_infconv_table(config_path, out_file);
    if (sweep->parsed()) return run_sweep(config_path, out_file, n_list, ov.quiet);
    if (diagnose->parsed()) return run_diagnose(config_path, m_path, u_path, diag_eps);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitValidation;
}

}  // namespace mfg
