#include "kinuq/bench/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "kinuq/error.hpp"

namespace kinuq::bench {

using nlohmann::json;

namespace {

template <class E, std::size_t N>
E parse_enum(const std::string& s, const std::array<E, N>& values, const char* what) {
  for (E v : values) {
    if (s == to_string(v)) return v;
  }
  throw Error(ErrorKind::Config, std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array kCases = {CaseId::SodDeterministic, CaseId::BlastWave,   CaseId::SodUncertain,
                               CaseId::MixedRegimeA,     CaseId::MixedRegimeB, CaseId::MixedRegimeC,
                               CaseId::Custom};
constexpr std::array kSolvers = {SolverKind::FullKinetic, SolverKind::FullFluid, SolverKind::Hybrid};
constexpr std::array kEstimators = {EstimatorKind::None, EstimatorKind::MC, EstimatorKind::MLMC,
                                    EstimatorKind::BiFidelity, EstimatorKind::TriFidelity};

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::Config, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw Error(ErrorKind::Config, "unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, where + "." + key + ": " + e.what());
  }
}

double domain_length(const ExperimentConfig& c) {
  switch (c.case_id) {
    case CaseId::Custom: return c.custom.x_max - c.custom.x_min;
    default: return 1.0;
  }
}

}  // namespace

const char* to_string(CaseId c) noexcept {
  switch (c) {
    case CaseId::SodDeterministic: return "SodDeterministic";
    case CaseId::BlastWave: return "BlastWave";
    case CaseId::SodUncertain: return "SodUncertain";
    case CaseId::MixedRegimeA: return "MixedRegimeA";
    case CaseId::MixedRegimeB: return "MixedRegimeB";
    case CaseId::MixedRegimeC: return "MixedRegimeC";
    case CaseId::Custom: return "Custom";
  }
  return "?";
}

const char* to_string(SolverKind s) noexcept {
  switch (s) {
    case SolverKind::FullKinetic: return "FullKinetic";
    case SolverKind::FullFluid: return "FullFluid";
    case SolverKind::Hybrid: return "Hybrid";
  }
  return "?";
}

const char* to_string(EstimatorKind e) noexcept {
  switch (e) {
    case EstimatorKind::None: return "None";
    case EstimatorKind::MC: return "MC";
    case EstimatorKind::MLMC: return "MLMC";
    case EstimatorKind::BiFidelity: return "BiFidelity";
    case EstimatorKind::TriFidelity: return "TriFidelity";
  }
  return "?";
}

CaseId parse_case(const std::string& s) { return parse_enum(s, kCases, "case"); }
SolverKind parse_solver(const std::string& s) { return parse_enum(s, kSolvers, "solver"); }
EstimatorKind parse_estimator(const std::string& s) { return parse_enum(s, kEstimators, "estimator"); }

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return name == o.name && case_id == o.case_id && solver == o.solver && estimator == o.estimator &&
         nx == o.nx && nv == o.nv && l_max == o.l_max && t_final == o.t_final && dt == o.dt &&
         cfl == o.cfl && knudsen == o.knudsen && thresholds.eta0 == o.thresholds.eta0 &&
         thresholds.delta0 == o.thresholds.delta0 && transport.mu == o.transport.mu &&
         transport.kappa == o.transport.kappa && collision == o.collision && uq == o.uq &&
         custom == o.custom && seed == o.seed && workers == o.workers &&
         record_history == o.record_history && paper_scale == o.paper_scale &&
         output_dir == o.output_dir;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (nx < 4) fail("nx must be >= 4");
  if (nv < 4 || nv % 2 != 0) fail("nv must be even and >= 4");
  if (!(l_max > 0.0)) fail("l_max must be > 0");
  if (!(t_final > 0.0)) fail("t_final must be > 0");
  if (dt < 0.0 || !(cfl > 0.0)) fail("dt must be >= 0 and cfl > 0");
  if (knudsen.kind == KnudsenSpec::Kind::Constant && !(knudsen.value > 0.0)) fail("epsilon must be > 0");
  if (knudsen.kind == KnudsenSpec::Kind::MixedProfile && !(knudsen.eps0 > 0.0)) fail("eps0 must be > 0");
  thresholds.validate();
  if (!(transport.mu > 0.0) || !(transport.kappa > 0.0)) fail("mu and kappa must be > 0");
  collision.validate();
  if (workers < 1) fail("workers must be >= 1");
  if (uq.samples < 1 || uq.candidates < 1 || uq.held_out < 1 || uq.repetitions < 1) {
    fail("sample counts must be >= 1");
  }
  if (uq.reference_nx < 4 || uq.reference_order < 1) fail("reference plan must be positive");
  if (!(uq.ridge_factor >= 0.0)) fail("ridge_factor must be >= 0");
  for (int k : uq.k) {
    if (k < 1) fail("basis sizes must be >= 1");
  }
  for (const auto& l : uq.levels) {
    if (l.n_cells < 4 || l.samples < 1) fail("level plan must be positive");
  }
  if (estimator == EstimatorKind::MLMC && uq.levels.empty()) fail("MLMC needs a level plan");
  if (case_id == CaseId::Custom) {
    if (!(custom.x_max > custom.x_min)) fail("custom domain is empty");
    if (custom.regions.empty()) fail("custom case needs at least one region");
    for (const auto& r : custom.regions) {
      if (!(r.rho > 0.0) || !(r.temp > 0.0)) fail("custom region needs rho, T > 0");
    }
  }
}

double ExperimentConfig::step_size(int n_cells) const {
  return t_final / static_cast<double>(step_count(n_cells));
}

int ExperimentConfig::step_count(int n_cells) const {
  const double dx = domain_length(*this) / static_cast<double>(n_cells);
  const double nominal = dt > 0.0 ? dt * static_cast<double>(nx) / static_cast<double>(n_cells)
                                  : cfl * dx;
  return std::max(1, static_cast<int>(std::ceil(t_final / nominal - 1e-9)));
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["case"] = to_string(c.case_id);
  j["solver"] = to_string(c.solver);
  j["estimator"] = to_string(c.estimator);
  j["grid"] = {{"nx", c.nx}, {"nv", c.nv}, {"l_max", c.l_max}};
  j["time"] = {{"t_final", c.t_final}, {"dt", c.dt}, {"cfl", c.cfl}};
  if (c.knudsen.kind == KnudsenSpec::Kind::Constant) {
    j["knudsen"] = {{"kind", "constant"}, {"value", c.knudsen.value}};
  } else {
    j["knudsen"] = {{"kind", "mixed_profile"}, {"eps0", c.knudsen.eps0}};
  }
  j["thresholds"] = {{"eta0", c.thresholds.eta0}, {"delta0", c.thresholds.delta0}};
  j["transport"] = {{"mu", c.transport.mu}, {"kappa", c.transport.kappa}};
  j["collision"] = {{"b", c.collision.b},
                    {"gamma", c.collision.gamma},
                    {"n_angular", c.collision.n_angular},
                    {"n_radial", c.collision.n_radial},
                    {"r_support", c.collision.r_support},
                    {"beta0", c.collision.beta0}};
  json levels = json::array();
  for (const auto& l : c.uq.levels) levels.push_back({{"n_cells", l.n_cells}, {"samples", l.samples}});
  j["uq"] = {{"samples", c.uq.samples},
             {"levels", levels},
             {"k", c.uq.k},
             {"candidates", c.uq.candidates},
             {"held_out", c.uq.held_out},
             {"repetitions", c.uq.repetitions},
             {"lambda", c.uq.scalar_lambda ? "scalar" : "cell"},
             {"normalize_fields", c.uq.normalize_fields},
             {"ridge_factor", c.uq.ridge_factor},
             {"reference_nx", c.uq.reference_nx},
             {"reference_order", c.uq.reference_order}};
  {
    json regions = json::array();
    for (const auto& r : c.custom.regions) {
      regions.push_back(
          {{"x_end", r.x_end}, {"rho", r.rho}, {"ux", r.ux}, {"uy", r.uy}, {"T", r.temp}});
    }
    j["custom"] = {{"x_min", c.custom.x_min},
                   {"x_max", c.custom.x_max},
                   {"boundary", c.custom.boundary == Boundary::Periodic ? "periodic" : "specular"},
                   {"regions", regions}};
  }
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["record_history"] = c.record_history;
  j["paper_scale"] = c.paper_scale;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j,
             {"name", "case", "solver", "estimator", "grid", "time", "knudsen", "thresholds",
              "transport", "collision", "uq", "custom", "seed", "workers", "record_history",
              "paper_scale", "output_dir", "comment"},
             "config");
  ExperimentConfig c;
  std::string s;
  read(j, "name", c.name, "config");
  if (j.contains("case")) c.case_id = parse_case(j.at("case").get<std::string>());
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver").get<std::string>());
  if (j.contains("estimator")) c.estimator = parse_estimator(j.at("estimator").get<std::string>());
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, {"nx", "nv", "l_max"}, "grid");
    read(g, "nx", c.nx, "grid");
    read(g, "nv", c.nv, "grid");
    read(g, "l_max", c.l_max, "grid");
  }
  if (j.contains("time")) {
    const auto& t = j.at("time");
    check_keys(t, {"t_final", "dt", "cfl"}, "time");
    read(t, "t_final", c.t_final, "time");
    read(t, "dt", c.dt, "time");
    read(t, "cfl", c.cfl, "time");
  }
  if (j.contains("knudsen")) {
    const auto& k = j.at("knudsen");
    check_keys(k, {"kind", "value", "eps0"}, "knudsen");
    std::string kind = "constant";
    read(k, "kind", kind, "knudsen");
    if (kind == "constant") {
      c.knudsen.kind = KnudsenSpec::Kind::Constant;
    } else if (kind == "mixed_profile") {
      c.knudsen.kind = KnudsenSpec::Kind::MixedProfile;
    } else {
      throw Error(ErrorKind::Config, "unknown knudsen kind '" + kind + "'");
    }
    read(k, "value", c.knudsen.value, "knudsen");
    read(k, "eps0", c.knudsen.eps0, "knudsen");
  }
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    check_keys(t, {"eta0", "delta0"}, "thresholds");
    read(t, "eta0", c.thresholds.eta0, "thresholds");
    read(t, "delta0", c.thresholds.delta0, "thresholds");
  }
  if (j.contains("transport")) {
    const auto& t = j.at("transport");
    check_keys(t, {"mu", "kappa"}, "transport");
    read(t, "mu", c.transport.mu, "transport");
    read(t, "kappa", c.transport.kappa, "transport");
  }
  if (j.contains("collision")) {
    const auto& t = j.at("collision");
    check_keys(t, {"b", "gamma", "n_angular", "n_radial", "r_support", "beta0"}, "collision");
    read(t, "b", c.collision.b, "collision");
    read(t, "gamma", c.collision.gamma, "collision");
    read(t, "n_angular", c.collision.n_angular, "collision");
    read(t, "n_radial", c.collision.n_radial, "collision");
    read(t, "r_support", c.collision.r_support, "collision");
    read(t, "beta0", c.collision.beta0, "collision");
  }
  if (j.contains("uq")) {
    const auto& u = j.at("uq");
    check_keys(u,
               {"samples", "levels", "k", "candidates", "held_out", "repetitions", "lambda",
                "normalize_fields", "ridge_factor", "reference_nx", "reference_order"},
               "uq");
    read(u, "samples", c.uq.samples, "uq");
    if (u.contains("levels")) {
      c.uq.levels.clear();
      for (const auto& l : u.at("levels")) {
        check_keys(l, {"n_cells", "samples"}, "uq.levels[]");
        LevelPlan p;
        read(l, "n_cells", p.n_cells, "uq.levels[]");
        read(l, "samples", p.samples, "uq.levels[]");
        c.uq.levels.push_back(p);
      }
    }
    read(u, "k", c.uq.k, "uq");
    read(u, "candidates", c.uq.candidates, "uq");
    read(u, "held_out", c.uq.held_out, "uq");
    read(u, "repetitions", c.uq.repetitions, "uq");
    std::string lam = "cell";
    read(u, "lambda", lam, "uq");
    if (lam != "cell" && lam != "scalar") throw Error(ErrorKind::Config, "uq.lambda is cell or scalar");
    c.uq.scalar_lambda = lam == "scalar";
    read(u, "normalize_fields", c.uq.normalize_fields, "uq");
    read(u, "ridge_factor", c.uq.ridge_factor, "uq");
    read(u, "reference_nx", c.uq.reference_nx, "uq");
    read(u, "reference_order", c.uq.reference_order, "uq");
  }
  if (j.contains("custom")) {
    const auto& u = j.at("custom");
    check_keys(u, {"x_min", "x_max", "boundary", "regions"}, "custom");
    read(u, "x_min", c.custom.x_min, "custom");
    read(u, "x_max", c.custom.x_max, "custom");
    std::string b = "periodic";
    read(u, "boundary", b, "custom");
    if (b == "periodic") {
      c.custom.boundary = Boundary::Periodic;
    } else if (b == "specular") {
      c.custom.boundary = Boundary::Specular;
    } else {
      throw Error(ErrorKind::Config, "unknown boundary '" + b + "'");
    }
    if (u.contains("regions")) {
      for (const auto& r : u.at("regions")) {
        check_keys(r, {"x_end", "rho", "ux", "uy", "T"}, "custom.regions[]");
        Region g;
        read(r, "x_end", g.x_end, "custom.regions[]");
        read(r, "rho", g.rho, "custom.regions[]");
        read(r, "ux", g.ux, "custom.regions[]");
        read(r, "uy", g.uy, "custom.regions[]");
        read(r, "T", g.temp, "custom.regions[]");
        c.custom.regions.push_back(g);
      }
    }
  }
  read(j, "seed", c.seed, "config");
  read(j, "workers", c.workers, "config");
  read(j, "record_history", c.record_history, "config");
  read(j, "paper_scale", c.paper_scale, "config");
  read(j, "output_dir", c.output_dir, "config");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_paper_scale(ExperimentConfig& c) {
  c.nx = 100;
  c.nv = 32;
  c.paper_scale = true;
}

}  // namespace kinuq::bench
