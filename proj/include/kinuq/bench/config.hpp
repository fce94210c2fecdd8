#pragma once

// Experiment description: one JSON file per run, with strict key checking.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinuq/collision.hpp"
#include "kinuq/fluid_solver.hpp"
#include "kinuq/hybrid.hpp"
#include "kinuq/phase_space.hpp"

namespace kinuq::bench {

enum class CaseId {
  SodDeterministic,
  BlastWave,
  SodUncertain,
  MixedRegimeA,
  MixedRegimeB,
  MixedRegimeC,
  Custom,
};
enum class SolverKind { FullKinetic, FullFluid, Hybrid };
enum class EstimatorKind { None, MC, MLMC, BiFidelity, TriFidelity };

const char* to_string(CaseId c) noexcept;
const char* to_string(SolverKind s) noexcept;
const char* to_string(EstimatorKind e) noexcept;
CaseId parse_case(const std::string& s);
SolverKind parse_solver(const std::string& s);
EstimatorKind parse_estimator(const std::string& s);

struct KnudsenSpec {
  enum class Kind { Constant, MixedProfile } kind = Kind::Constant;
  double value = 1e-4;  // Constant
  double eps0 = 1e-3;   // MixedProfile floor
  bool operator==(const KnudsenSpec&) const = default;
};

struct Region {
  double x_end = 1.0;  // region covers cells with center <= x_end
  double rho = 1.0;
  double ux = 0.0;
  double uy = 0.0;
  double temp = 1.0;
  bool operator==(const Region&) const = default;
};

struct CustomCase {
  double x_min = 0.0;
  double x_max = 1.0;
  Boundary boundary = Boundary::Periodic;
  std::vector<Region> regions;
  bool operator==(const CustomCase&) const = default;
};

struct LevelPlan {
  int n_cells = 25;
  int samples = 32;
  bool operator==(const LevelPlan&) const = default;
};

struct UqPlan {
  int samples = 32;                 // MC
  std::vector<LevelPlan> levels;    // MLMC, coarsest first
  std::vector<int> k = {3, 5, 10};  // bi/tri-fidelity basis sizes
  int candidates = 100;
  int held_out = 20;
  int repetitions = 1;
  bool scalar_lambda = false;
  bool normalize_fields = false;
  double ridge_factor = 1e-10;
  int reference_nx = 400;
  int reference_order = 4;  // Gauss points per random direction
  bool operator==(const UqPlan&) const = default;
};

struct ExperimentConfig {
  std::string name = "run";
  CaseId case_id = CaseId::SodDeterministic;
  SolverKind solver = SolverKind::Hybrid;
  EstimatorKind estimator = EstimatorKind::None;
  int nx = 50;
  int nv = 16;
  double l_max = 8.0;
  double t_final = 0.15;
  double dt = 0.0;    // 0: derived as cfl * dx
  double cfl = 0.08;  // dt / dx
  KnudsenSpec knudsen;
  CriterionThresholds thresholds;
  TransportCoeffs transport;
  // S = 2 rather than the library's 2 L / (3 + sqrt 2): on [-8, 8] the
  // larger radius aliases the tails of T >= 1 states, which shows up as a
  // Q(M) residual that no velocity refinement removes.
  CollisionParams collision{.r_support = 2.0};
  UqPlan uq;
  CustomCase custom;
  std::uint64_t seed = 1;
  int workers = 1;
  bool record_history = false;
  bool paper_scale = false;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const;
  void validate() const;
  // Time step on a mesh of n cells, shrunk so t_final is hit exactly.
  double step_size(int n_cells) const;
  int step_count(int n_cells) const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Restores Nx = 100, Nv = 32.
void apply_paper_scale(ExperimentConfig& c);

}  // namespace kinuq::bench
