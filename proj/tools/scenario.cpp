#include "scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <optional>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "svg.hpp"

namespace dlqr::tools {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Classic LQR on x' = E^{-1}A x + E^{-1}B u through the Hamiltonian flow, for
// problems whose E is invertible.
struct ClassicLqr {
  Eigen::MatrixXd H, Bi, R, G;
  double t_f;

  ClassicLqr(const Problem& p) : R(p.weights.R), G(p.weights.G), t_f(p.weights.t_f) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(p.sys.E());
    const Eigen::MatrixXd Ai = lu.solve(p.sys.A());
    Bi = lu.solve(p.sys.B());
    const Eigen::Index n = Ai.rows();
    H.resize(2 * n, 2 * n);
    H << Ai, -Bi * R.ldlt().solve(Bi.transpose()), -p.weights.Q, -Ai.transpose();
  }

  Eigen::MatrixXd P(double t) const {
    const Eigen::Index n = G.rows();
    Eigen::MatrixXd init(2 * n, n);
    init << Eigen::MatrixXd::Identity(n, n), G;
    const Eigen::MatrixXd Ht = H * (t - t_f);
    const Eigen::MatrixXd XY = Ht.exp() * init;
    return XY.topRows(n).transpose().partialPivLu().solve(XY.bottomRows(n).transpose()).transpose();
  }
};

struct Metrics {
  double projector_residual = 0.0;
  double algebraic_residual = 0.0;
  double dre_residual = 0.0;
  double pf_full = 0.0;
  double pf_on_manifold = 0.0;
  double zu_sup = 0.0;
  double u_sup = 0.0;
  double consistency = 0.0;
  std::vector<double> restart_times;
  RestartDeviation restart;
  double cost_gap = 0.0;
  int perturbations = 0;
  int perturbations_increasing = 0;
  double min_increase = 0.0;
  std::optional<double> J_picard, picard_diff;
  std::optional<double> J_oracle, oracle_gap;
  std::optional<double> leading_rate;
  std::optional<double> lqr_gain_err, lqr_cost_err;
};

std::size_t NearestNode(const TimeGrid& g, double t) {
  const std::size_t k = g.Locate(t);
  return (k + 1 < g.size() && g[k + 1] - t < t - g[k]) ? k + 1 : k;
}

ControlSignal Perturbed(const ControlSignal& u, std::mt19937_64& rng, double amp) {
  // Vanishes at t0, so the consistency condition at t0 is unchanged.
  std::normal_distribution<double> nd;
  const TimeGrid& g = u.grid();
  std::vector<Eigen::VectorXd> out(g.size());
  const Eigen::Index m = u.n_u();
  Eigen::MatrixXd a(m, 3);
  for (Eigen::Index i = 0; i < m; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = nd(rng);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = (g[k] - g.t0()) / (g.tf() - g.t0()) * std::numbers::pi;
    const Eigen::Vector3d basis(std::sin(s), std::sin(2 * s), std::sin(1.5 * s));
    out[k] = u.node(k) + amp * a * basis;
  }
  return ControlSignal(g, std::move(out));
}

Metrics Measure(const ScenarioConfig& cfg, const PipelineOptions& opts,
                const PipelineResult& r) {
  const Problem& p = *cfg.problem;
  const Trajectory& cl = *r.closed_loop;
  const TimeGrid& g = *r.grid;
  Metrics m;
  m.projector_residual = r.projector_residuals.max();
  m.algebraic_residual = r.algebraic.residual;
  m.dre_residual = DreMidpointResidual(*r.riccati, r.wf, r.split).max_scaled;
  for (int k = 1; k <= 5; ++k) {
    const double t = g.t0() + k * (g.tf() - g.t0()) / 6.0;
    const auto pf = MeasureProjectionFreeResidual(*r.riccati, p.sys, p.weights, r.wf, r.split, t);
    m.pf_full = std::max(m.pf_full, pf.full);
    m.pf_on_manifold = std::max(m.pf_on_manifold, pf.on_manifold);
  }
  const ControlSignal u = cl.Control();
  m.u_sup = u.SupNorm();
  m.zu_sup = VariationGradient(u, cl, r.wf, r.split, p.weights, opts.sim.bdf).SupNorm();
  m.consistency = ConsistencyResidual(cl, r.wf);
  for (double f : {0.25, 0.5, 0.75}) {
    const std::size_t k = NearestNode(g, g.t0() + f * (g.tf() - g.t0()));
    m.restart_times.push_back(g[k]);
    const RestartDeviation d = OptimalityRestartDeviation(cl, g[k], r.wf, *r.gains, opts.sim);
    m.restart.x1 = std::max(m.restart.x1, d.x1);
    m.restart.x0 = std::max(m.restart.x0, d.x0);
  }
  m.cost_gap = std::abs(r.J_feedback - r.J_min_formula) / std::max(std::abs(r.J_feedback), 1e-300);

  const double J = EvaluateCost(SimulateOpenLoop(r.wf, u, p.x_i, g, opts.sim), p.weights);
  std::mt19937_64 rng(cfg.seed);
  m.perturbations = 10;
  m.min_increase = INFINITY;
  for (int i = 0; i < m.perturbations; ++i) {
    const ControlSignal uh = Perturbed(u, rng, 0.05 * (1.0 + m.u_sup));
    const double Jh = EvaluateCost(SimulateOpenLoop(r.wf, uh, p.x_i, g, opts.sim), p.weights);
    if (Jh > J) ++m.perturbations_increasing;
    m.min_increase = std::min(m.min_increase, Jh - J);
  }

  if (r.picard) {
    m.picard_diff = SupDistance(r.picard->u, u);
    m.J_picard = EvaluateCost(SimulateOpenLoop(r.wf, r.picard->u, p.x_i, g, opts.sim), p.weights);
  }
  if (r.oracle) {
    m.J_oracle = r.oracle->J_star;
    m.oracle_gap = std::abs(r.oracle->J_star - r.J_feedback) / r.J_feedback;
  }
  if (p.fem) m.leading_rate = InstabilityIndicator(*p.fem);
  if (r.wf.rank_0() == 0) {
    const ClassicLqr ref(p);
    double ge = 0.0;
    const Eigen::LLT<Eigen::MatrixXd> Rl(p.weights.R);
    for (std::size_t k = 0; k < g.size(); k += std::max<std::size_t>(1, g.size() / 50)) {
      const Eigen::MatrixXd Kr = Rl.solve(ref.Bi.transpose() * ref.P(g[k]));
      ge = std::max(ge, ((*r.gains)(g[k]) - Kr).norm() / std::max(Kr.norm(), 1e-300));
    }
    m.lqr_gain_err = ge;
    const double Jr = p.x_i.dot(ref.P(g.t0()) * p.x_i);
    m.lqr_cost_err = std::abs(r.J_min_formula - Jr) / std::max(std::abs(Jr), 1e-300);
  }
  return m;
}

std::vector<CheckResult> Evaluate(const ScenarioConfig& cfg, const Metrics& m) {
  const Tolerances& t = cfg.tol;
  std::vector<CheckResult> c;
  c.push_back({"projector algebra", m.projector_residual, t.tol_proj,
               m.projector_residual <= t.tol_proj, "idempotency and commutation"});
  c.push_back({"algebraic Riccati part", m.algebraic_residual, t.tol_alg,
               m.algebraic_residual <= t.tol_alg, ""});
  c.push_back({"DRE midpoint residual", m.dre_residual, t.tol_dre, m.dre_residual <= t.tol_dre, ""});
  c.push_back({"projection-free residual", m.pf_full, t.tol_pf, m.pf_full <= t.tol_pf,
               "5 interior times"});
  const double zt = t.tol_opt * (1.0 + m.u_sup);
  c.push_back({"z_u certificate", m.zu_sup, zt, m.zu_sup <= zt, "sup norm along the optimal control"});
  c.push_back({"algebraic consistency", m.consistency, t.tol_consist, m.consistency <= t.tol_consist,
               "every output node"});
  const double rd = std::max(m.restart.x1, m.restart.x0);
  c.push_back({"optimality-principle restart", rd, t.tol_restart, rd <= t.tol_restart,
               "t_f/4, t_f/2, 3t_f/4"});
  c.push_back({"minimum-cost formula", m.cost_gap, t.tol_cost, m.cost_gap <= t.tol_cost,
               "relative to simulated cost"});
  c.push_back({"perturbations increase cost", static_cast<double>(m.perturbations_increasing),
               static_cast<double>(m.perturbations),
               m.perturbations_increasing == m.perturbations, "count of 10"});
  if (m.picard_diff) {
    const double pt = t.tol_picard * m.u_sup;
    c.push_back({"fixed point vs feedback", *m.picard_diff, pt, *m.picard_diff <= pt, "sup norm"});
  }
  if (m.oracle_gap) {
    c.push_back({"oracle gap", *m.oracle_gap, t.tol_oracle, *m.oracle_gap <= t.tol_oracle,
                 "relative to feedback cost"});
  }
  if (m.lqr_gain_err) {
    const double e = std::max(*m.lqr_gain_err, *m.lqr_cost_err);
    c.push_back({"classic LQR agreement", e, t.tol_lqr, e <= t.tol_lqr, "gains and minimum cost"});
  }
  return c;
}

json ToJson(const ScenarioConfig& cfg, const PipelineResult& r, const Metrics& m) {
  json s;
  s["name"] = cfg.name;
  s["seed"] = cfg.seed;
  if (cfg.instance_seed) s["instance_seed"] = *cfg.instance_seed;
  s["n_output_nodes"] = cfg.n_output_nodes;
  s["J_feedback"] = r.J_feedback;
  s["J_min_formula"] = r.J_min_formula;
  s["J_min_projected"] = r.J_min_projected;
  if (r.open_loop_zero) s["J_uncontrolled"] = r.open_loop_zero->J;
  if (m.J_oracle) {
    s["J_oracle"] = *m.J_oracle;
    s["oracle_rel_gap"] = *m.oracle_gap;
    s["oracle_steps"] = cfg.checks.oracle_steps;
  }
  if (m.J_picard) {
    s["J_picard"] = *m.J_picard;
    s["picard_sup_difference"] = *m.picard_diff;
    s["picard_iterations"] = r.picard->iterations;
  }
  s["zu_sup"] = m.zu_sup;
  s["u_sup"] = m.u_sup;
  s["consistency_residual"] = m.consistency;
  s["initial_admissibility_gap"] = r.closed_loop->initial_admissibility_gap;
  s["restart_deviation"] = {{"t0", m.restart_times}, {"x1", m.restart.x1}, {"x0", m.restart.x0}};
  if (m.leading_rate) s["leading_open_loop_rate"] = *m.leading_rate;
  s["state_decay"] = r.closed_loop->x.back().norm() / std::max(r.closed_loop->x.front().norm(), 1e-300);
  const DreStats& st = r.riccati->stats;
  s["dre"] = {{"method", st.method == DreMethod::kImplicit ? "implicit" : "explicit"},
              {"accepted_steps", st.accepted},
              {"rejected_steps", st.rejected},
              {"stiffness", st.stiffness},
              {"midpoint_residual", m.dre_residual}};
  s["projection_free_residual"] = {{"full", m.pf_full}, {"on_manifold", m.pf_on_manifold}};
  s["projector_residual"] = m.projector_residual;
  s["algebraic_residual"] = m.algebraic_residual;
  s["perturbations_increasing_cost"] = m.perturbations_increasing;
  if (m.lqr_gain_err) {
    s["lqr_reference"] = {{"gain_rel_err", *m.lqr_gain_err}, {"cost_rel_err", *m.lqr_cost_err}};
  }
  return s;
}

void WriteJson(const fs::path& file, const json& j) {
  std::ofstream out(file);
  out << j.dump(2) << '\n';
}

void Row(std::FILE* f, double t, std::initializer_list<const Eigen::VectorXd*> parts) {
  std::fprintf(f, "%.16e", t);
  for (const Eigen::VectorXd* v : parts) {
    for (Eigen::Index i = 0; i < v->size(); ++i) std::fprintf(f, ",%.16e", (*v)(i));
  }
  std::fputc('\n', f);
}

std::FILE* OpenCsv(const fs::path& file) {
  std::FILE* f = std::fopen(file.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + file.string());
  return f;
}

void WriteArtifacts(const ScenarioConfig& cfg, const PipelineResult& r) {
  const fs::path& dir = cfg.output_dir;
  const Problem& p = *cfg.problem;
  const Trajectory& cl = *r.closed_loop;
  const TimeGrid& g = *r.grid;
  const Eigen::Index n = p.sys.n_x(), m = p.sys.n_u();

  std::FILE* f = OpenCsv(dir / "trajectory.csv");
  std::fprintf(f, "t");
  for (Eigen::Index i = 1; i <= n; ++i) std::fprintf(f, ",x_%ld", static_cast<long>(i));
  for (Eigen::Index i = 1; i <= m; ++i) std::fprintf(f, ",u_%ld", static_cast<long>(i));
  std::fputc('\n', f);
  for (std::size_t k = 0; k < g.size(); ++k) Row(f, g[k], {&cl.x[k], &cl.u[k]});
  std::fclose(f);

  f = OpenCsv(dir / "control.csv");
  std::fprintf(f, "t");
  for (Eigen::Index i = 1; i <= m; ++i) std::fprintf(f, ",u_%ld", static_cast<long>(i));
  std::fputc('\n', f);
  for (std::size_t k = 0; k < g.size(); ++k) Row(f, g[k], {&cl.u[k]});
  std::fclose(f);

  f = OpenCsv(dir / "riccati.csv");
  std::fprintf(f, "t,cost_to_go_xi,frobenius_Pit1\n");
  const Eigen::VectorXd Ex = p.sys.E() * p.x_i;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Eigen::MatrixXd P = r.riccati->Pit1(g[k]);
    std::fprintf(f, "%.16e,%.16e,%.16e\n", g[k], Ex.dot(P * Ex), P.norm());
  }
  std::fclose(f);

  const std::vector<double> t(g.nodes().begin(), g.nodes().end());
  std::vector<Series> us;
  for (Eigen::Index i = 0; i < m; ++i) {
    Series s{m == 1 ? "u(t)" : "u_" + std::to_string(i + 1), {}};
    for (const auto& uk : cl.u) s.y.push_back(uk(i));
    us.push_back(std::move(s));
  }
  WriteLinePlot(dir / "control.svg", cfg.name + ": optimal control", t, us);

  if (p.fem) {
    const Eigen::Index nn = p.fem->n_elements + 1;
    const Eigen::VectorXd xs = AssembleLinearElements(p.fem->n_elements).nodes;
    auto fields = [&](const Trajectory& tr, const std::string& tag) {
      Eigen::MatrixXd w(nn, g.size()), v(nn, g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        w.col(k) = tr.x[k].head(nn);
        v.col(k) = tr.x[k].tail(nn);
      }
      WriteHeatmap(dir / ("w_" + tag + ".svg"), "w(x,t), " + tag, t, xs, w);
      WriteHeatmap(dir / ("v_" + tag + ".svg"), "v(x,t), " + tag, t, xs, v);
    };
    fields(cl, "controlled");
    if (r.open_loop_zero) fields(*r.open_loop_zero, "uncontrolled");
  }
}

int ExitFor(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig: return kExitConfig;
    case ErrorCategory::kAssumption: return kExitAssumption;
    default: return kExitNumerical;
  }
}

std::string AssumptionName(ErrorCode c) {
  switch (c) {
    case ErrorCode::kIncompatibleWeights: return "weight-compatibility check";
    case ErrorCode::kHigherIndex: return "index-0 pencil";
    case ErrorCode::kSingularPencil: return "regular pencil";
    case ErrorCode::kNonSquare: return "square pencil";
    case ErrorCode::kInconsistentInitialData:
    case ErrorCode::kInconsistentInput: return "consistent initial data";
    default: return "model assumptions";
  }
}

template <class Body>
int Guarded(const ScenarioConfig& cfg, std::ostream& log, Body body) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    log << cfg.name << ": cannot create " << cfg.output_dir << ": " << ec.message() << '\n';
    return kExitConfig;
  }
  try {
    return body();
  } catch (const ConfigError& e) {
    log << cfg.name << ": config error: " << e.what() << '\n';
    WriteDiagnostics(cfg.output_dir, cfg.name, kExitConfig, "Config", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    const int code = ExitFor(e.category());
    if (code == kExitAssumption) {
      log << cfg.name << ": assumption violated (" << AssumptionName(e.code()) << "): " << e.what() << '\n';
    } else {
      log << cfg.name << ": " << (code == kExitConfig ? "config error: " : "numerical failure: ")
          << e.what() << '\n';
    }
    WriteDiagnostics(cfg.output_dir, cfg.name, code, std::string(ToString(e.code())), e.what());
    return code;
  } catch (const std::exception& e) {
    log << cfg.name << ": numerical failure: " << e.what() << '\n';
    WriteDiagnostics(cfg.output_dir, cfg.name, kExitNumerical, "Unexpected", e.what());
    return kExitNumerical;
  }
}

}  // namespace

void WriteDiagnostics(const fs::path& dir, const std::string& scenario, int exit_code,
                      const std::string& error, const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  json d{{"scenario", scenario}, {"exit_code", exit_code}, {"error", error}, {"message", message}};
  d["category"] = exit_code == kExitConfig ? "config"
                  : exit_code == kExitAssumption ? "assumption"
                                                 : "numerical";
  WriteJson(dir / "diagnostics.json", d);
}

int RunScenario(const ScenarioConfig& cfg, std::ostream& log) {
  return Guarded(cfg, log, [&] {
    const PipelineOptions opts = cfg.Options();
    const PipelineResult r = RunPipeline(*cfg.problem, opts);
    const Metrics m = Measure(cfg, opts, r);
    WriteArtifacts(cfg, r);
    WriteJson(cfg.output_dir / "summary.json", ToJson(cfg, r, m));
    log << cfg.name << ": J_feedback " << r.J_feedback << ", J_min " << r.J_min_formula
        << ", outputs in " << cfg.output_dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int VerifyScenario(const ScenarioConfig& cfg, std::ostream& log) {
  return Guarded(cfg, log, [&] {
    const PipelineOptions opts = cfg.Options();
    const PipelineResult r = RunPipeline(*cfg.problem, opts);
    const Metrics m = Measure(cfg, opts, r);
    const std::vector<CheckResult> checks = Evaluate(cfg, m);
    json report = json::array();
    bool all = true;
    char line[256];
    for (const CheckResult& c : checks) {
      std::snprintf(line, sizeof line, "%s  %-30s %.3e  (tol %.3e)%s%s", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.value, c.tol, c.note.empty() ? "" : "  ", c.note.c_str());
      log << cfg.name << ": " << line << '\n';
      report.push_back({{"check", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}});
      all = all && c.pass;
    }
    WriteJson(cfg.output_dir / "verify.json",
              {{"scenario", cfg.name}, {"pass", all}, {"checks", report},
               {"summary", ToJson(cfg, r, m)}});
    return static_cast<int>(all ? kExitOk : kExitCheckFailed);
  });
}

}  // namespace dlqr::tools
