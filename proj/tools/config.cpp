#include "config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace dlqr::tools {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void Bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void CheckKeys(const json& j, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!j.is_object()) Bad(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) Bad(where, "unknown field '" + key + "'");
  }
}

double Number(const json& j, const std::string& where) {
  if (!j.is_number()) Bad(where, "expected a number");
  return j.get<double>();
}

int Integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) Bad(where, "expected an integer");
  return j.get<int>();
}

bool Bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) Bad(where, "expected true or false");
  return j.get<bool>();
}

Eigen::MatrixXd ReadCsv(const fs::path& file, const std::string& where) {
  std::ifstream in(file);
  if (!in) Bad(where, "cannot open " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw 0;
      } catch (...) {
        Bad(where, "bad number '" + cell + "' in " + file.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      Bad(where, "ragged rows in " + file.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) Bad(where, file.string() + " is empty");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

/// Row-major nested array, a flat array (column vector), or {"csv": file}.
Eigen::MatrixXd Matrix(const json& j, const std::string& where,
                       const fs::path& base) {
  if (j.is_object()) {
    CheckKeys(j, where, {"csv"});
    if (!j.contains("csv") || !j["csv"].is_string()) Bad(where, "expected {\"csv\": path}");
    fs::path f = j["csv"].get<std::string>();
    if (f.is_relative()) f = base / f;
    return ReadCsv(f, where);
  }
  if (!j.is_array() || j.empty()) Bad(where, "expected a non-empty array");
  if (!j.front().is_array()) {
    Eigen::MatrixXd v(j.size(), 1);
    for (std::size_t i = 0; i < j.size(); ++i) v(i, 0) = Number(j[i], where);
    return v;
  }
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) Bad(where, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = Number(j[i][c], where);
  }
  return m;
}

/// A matrix, a scalar multiple of the identity, or a named preset.
Eigen::MatrixXd Weight(const json& j, const std::string& where,
                       const fs::path& base, Eigen::Index n,
                       const Eigen::MatrixXd* mass) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "zero") return Eigen::MatrixXd::Zero(n, n);
    if (s == "identity") return Eigen::MatrixXd::Identity(n, n);
    if (s == "mass" && mass) {
      Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
      Q.topLeftCorner(mass->rows(), mass->cols()) = *mass;
      return Q;
    }
    Bad(where, "unknown preset '" + s + "'");
  }
  if (j.is_number()) return j.get<double>() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd m = Matrix(j, where, base);
  if (m.rows() != n || m.cols() != n) {
    Bad(where, "expected " + std::to_string(n) + "x" + std::to_string(n));
  }
  return m;
}

void ReadTolerances(const json& j, Tolerances& t) {
  CheckKeys(j, "tolerances",
            {"tol_proj", "rank_tol", "cond_max", "tol_weights", "tol_alg",
             "tol_dre", "dre_rtol", "dre_atol", "tol_opt", "tol_fp",
             "picard_max_iter", "tol_consist", "tol_pf", "tol_restart",
             "tol_cost", "tol_picard", "tol_oracle", "tol_lqr"});
  auto num = [&](const char* key, double& v) {
    if (j.contains(key)) {
      v = Number(j[key], std::string("tolerances.") + key);
      if (!(v > 0)) Bad(std::string("tolerances.") + key, "must be positive");
    }
  };
  num("tol_proj", t.tol_proj);
  num("rank_tol", t.rank_tol);
  num("cond_max", t.cond_max);
  num("tol_weights", t.tol_weights);
  num("tol_alg", t.tol_alg);
  num("tol_dre", t.tol_dre);
  num("dre_rtol", t.dre_rtol);
  num("dre_atol", t.dre_atol);
  num("tol_opt", t.tol_opt);
  num("tol_fp", t.tol_fp);
  num("tol_consist", t.tol_consist);
  num("tol_pf", t.tol_pf);
  num("tol_restart", t.tol_restart);
  num("tol_cost", t.tol_cost);
  num("tol_picard", t.tol_picard);
  num("tol_oracle", t.tol_oracle);
  num("tol_lqr", t.tol_lqr);
  if (j.contains("picard_max_iter")) {
    t.picard_max_iter = Integer(j["picard_max_iter"], "tolerances.picard_max_iter");
    if (t.picard_max_iter < 1) Bad("tolerances.picard_max_iter", "must be >= 1");
  }
}

ScenarioConfig FromJson(const json& doc, const fs::path& base) {
  CheckKeys(doc, "config",
            {"name", "problem", "weights", "horizon", "checks", "tolerances",
             "output_dir", "semi_explicit", "seed"});
  ScenarioConfig c;
  c.name = doc.value("name", std::string("scenario"));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) Bad("seed", "expected a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("semi_explicit")) c.semi_explicit = Bool(doc["semi_explicit"], "semi_explicit");
  if (doc.contains("tolerances")) ReadTolerances(doc["tolerances"], c.tol);

  double t_f = 0.0;
  if (doc.contains("horizon")) {
    const json& h = doc["horizon"];
    CheckKeys(h, "horizon", {"t_f", "n_output_nodes"});
    if (h.contains("t_f")) t_f = Number(h["t_f"], "horizon.t_f");
    if (h.contains("n_output_nodes")) {
      const int n = Integer(h["n_output_nodes"], "horizon.n_output_nodes");
      if (n < 3) Bad("horizon.n_output_nodes", "at least 3 nodes are required");
      c.n_output_nodes = static_cast<std::size_t>(n);
    }
  }
  if (doc.contains("horizon") && doc["horizon"].contains("t_f") && !(t_f > 0)) {
    Bad("horizon.t_f", "must be positive");
  }

  if (doc.contains("checks")) {
    const json& k = doc["checks"];
    CheckKeys(k, "checks", {"picard", "oracle", "oracle_steps"});
    if (k.contains("picard")) c.checks.picard = Bool(k["picard"], "checks.picard");
    if (k.contains("oracle")) c.checks.oracle = Bool(k["oracle"], "checks.oracle");
    if (k.contains("oracle_steps")) {
      c.checks.oracle_steps = Integer(k["oracle_steps"], "checks.oracle_steps");
      if (c.checks.oracle_steps < 1) Bad("checks.oracle_steps", "must be >= 1");
    }
  }

  if (!doc.contains("problem")) Bad("config", "missing 'problem'");
  const json& pj = doc["problem"];
  if (!pj.is_object() || !pj.contains("kind") || !pj["kind"].is_string()) {
    Bad("problem", "expected {\"kind\": \"matrices\" | \"parabolic-elliptic\", ...}");
  }
  const std::string kind = pj["kind"].get<std::string>();
  const json weights = doc.value("weights", json::object());
  CheckKeys(weights, "weights", {"Q", "R", "G"});

  if (kind == "parabolic-elliptic") {
    CheckKeys(pj, "problem", {"kind", "params"});
    ParabolicEllipticParams p;
    if (pj.contains("params")) {
      const json& q = pj["params"];
      CheckKeys(q, "problem.params", {"rho", "gamma", "alpha", "beta", "n_elements"});
      if (q.contains("rho")) p.rho = Number(q["rho"], "problem.params.rho");
      if (q.contains("gamma")) p.gamma = Number(q["gamma"], "problem.params.gamma");
      if (q.contains("alpha")) p.alpha = Number(q["alpha"], "problem.params.alpha");
      if (q.contains("beta")) p.beta = Number(q["beta"], "problem.params.beta");
      if (q.contains("n_elements")) {
        p.n_elements = Integer(q["n_elements"], "problem.params.n_elements");
        if (p.n_elements < 1) Bad("problem.params.n_elements", "must be >= 1");
      }
    }
    if (t_f > 0) p.t_f = t_f;
    c.problem = ParabolicEllipticProblem(p);
    const Eigen::Index n = c.problem->sys.n_x();
    const Eigen::MatrixXd M = AssembleLinearElements(p.n_elements).M;
    if (weights.contains("Q")) c.problem->weights.Q = Weight(weights["Q"], "weights.Q", base, n, &M);
    if (weights.contains("G")) c.problem->weights.G = Weight(weights["G"], "weights.G", base, n, &M);
    if (weights.contains("R")) c.problem->weights.R = Weight(weights["R"], "weights.R", base, 1, nullptr);
  } else if (kind == "matrices") {
    CheckKeys(pj, "problem", {"kind", "matrices", "x_i", "random_seed"});
    if (pj.contains("random_seed")) {
      if (!pj["random_seed"].is_number_unsigned()) Bad("problem.random_seed", "expected a non-negative integer");
      const auto s = pj["random_seed"].get<std::uint64_t>();
      c.instance_seed = s;
      c.problem = RandomLqrProblem(s, 4, 2, t_f > 0 ? t_f : 2.0);
      if (pj.contains("matrices")) Bad("problem", "give either matrices or random_seed");
    } else {
      if (!pj.contains("matrices")) Bad("problem", "missing 'matrices'");
      const json& mj = pj["matrices"];
      CheckKeys(mj, "problem.matrices", {"E", "A", "B"});
      for (const char* k : {"E", "A", "B"}) {
        if (!mj.contains(k)) Bad("problem.matrices", std::string("missing ") + k);
      }
      const Eigen::MatrixXd E = Matrix(mj["E"], "problem.matrices.E", base);
      const Eigen::MatrixXd A = Matrix(mj["A"], "problem.matrices.A", base);
      const Eigen::MatrixXd B = Matrix(mj["B"], "problem.matrices.B", base);
      if (E.rows() != A.rows() || E.cols() != A.cols() || B.rows() != E.rows()) {
        Bad("problem.matrices", "E, A must share a shape and B must have as many rows");
      }
      if (!pj.contains("x_i")) Bad("problem", "missing 'x_i'");
      const Eigen::MatrixXd x = Matrix(pj["x_i"], "problem.x_i", base);
      if (x.cols() != 1 || x.rows() != E.cols()) Bad("problem.x_i", "wrong length");
      c.problem = Problem{c.name, DescriptorSystem(E, A, B), {}, x.col(0), std::nullopt};
      c.problem->weights.t_f = t_f > 0 ? t_f : 1.0;
      for (const char* k : {"Q", "R", "G"}) {
        if (!weights.contains(k)) Bad("weights", std::string("missing ") + k);
      }
    }
    const Eigen::Index n = c.problem->sys.n_x(), m = c.problem->sys.n_u();
    if (weights.contains("Q")) c.problem->weights.Q = Weight(weights["Q"], "weights.Q", base, n, nullptr);
    if (weights.contains("G")) c.problem->weights.G = Weight(weights["G"], "weights.G", base, n, nullptr);
    if (weights.contains("R")) c.problem->weights.R = Weight(weights["R"], "weights.R", base, m, nullptr);
  } else {
    Bad("problem.kind", "unknown kind '" + kind + "'");
  }
  c.problem->name = c.name;

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) Bad("output_dir", "expected a path");
    fs::path o = doc["output_dir"].get<std::string>();
    c.output_dir = o.is_relative() ? base / o : o;
  } else {
    c.output_dir = fs::path("out") / c.name;
  }
  return c;
}

}  // namespace

PipelineOptions ScenarioConfig::Options() const {
  PipelineOptions o;
  o.pencil.rank_tol = tol.rank_tol;
  o.pencil.tol_proj = tol.tol_proj;
  o.pencil.cond_max = tol.cond_max;
  o.pencil.seed = seed;
  o.weierstrass.tol_proj = tol.tol_proj;
  o.weierstrass.cond_max = tol.cond_max;
  o.tol_weights = tol.tol_weights;
  o.dre.rtol = tol.dre_rtol;
  o.dre.atol = tol.dre_atol;
  o.sim.tol_consist = tol.tol_consist;
  o.n_output_nodes = n_output_nodes;
  o.semi_explicit = semi_explicit;
  o.picard = checks.picard;
  o.picard_options.tol_fp = tol.tol_fp;
  o.picard_options.max_iter = tol.picard_max_iter;
  o.picard_options.tol_consist = tol.tol_consist;
  o.oracle = checks.oracle;
  o.oracle_steps = checks.oracle_steps;
  return o;
}

ScenarioConfig ParseConfig(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return FromJson(doc, base_dir);
}

ScenarioConfig LoadConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.parent_path());
}

std::vector<std::string> BuiltinScenarioNames() {
  return {"paper-example", "paper-example-small", "lqr-reduction", "scalar"};
}

ScenarioConfig BuiltinScenario(const std::string& name) {
  if (name == "paper-example") {
    return ParseConfig(R"({"name": "paper-example",
      "problem": {"kind": "parabolic-elliptic",
                  "params": {"rho": 1, "gamma": 2, "alpha": 2, "beta": 2, "n_elements": 27}},
      "horizon": {"t_f": 6, "n_output_nodes": 2001}})", {});
  }
  if (name == "paper-example-small") {
    return ParseConfig(R"({"name": "paper-example-small",
      "problem": {"kind": "parabolic-elliptic", "params": {"n_elements": 4}},
      "horizon": {"t_f": 6, "n_output_nodes": 2001},
      "checks": {"picard": true, "oracle": true, "oracle_steps": 400}})", {});
  }
  if (name == "lqr-reduction") {
    return ParseConfig(R"({"name": "lqr-reduction",
      "problem": {"kind": "matrices", "random_seed": 1},
      "horizon": {"t_f": 2, "n_output_nodes": 401},
      "checks": {"picard": true, "oracle": true, "oracle_steps": 400}})", {});
  }
  if (name == "scalar") {
    return ParseConfig(R"({"name": "scalar",
      "problem": {"kind": "matrices",
                  "matrices": {"E": [[1, 0], [0, 0]], "A": [[-1, 0], [0, -2]], "B": [1, 1]},
                  "x_i": [1, 0]},
      "weights": {"Q": [[1, 0], [0, 0]], "R": 1, "G": "zero"},
      "horizon": {"t_f": 6, "n_output_nodes": 2001},
      "checks": {"picard": true, "oracle": true, "oracle_steps": 400}})", {});
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace dlqr::tools
