#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "helmdef/deflation.hpp"

namespace helmdef {

enum class ProblemKind { MP2a, MP2b, Wedge, VelocityFile };
ProblemKind parse_problem(const std::string& s);
const char* to_string(ProblemKind p);

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::MP2b;
  double k = 40.0;  // constant-wavenumber problems
  double f = 10.0;  // wedge / velocity-file, Hz
  int nx = 0;       // 0: derived from kh
  int ny = 0;
  double kh = 0.625;
  bool allow_large_kh = false;
  std::optional<BcKind> bc;  // default: Dirichlet for mp2a, Sommerfeld otherwise
  DeflationVariant deflation = DeflationVariant::APD;
  CoarseOpVariant coarse_op = CoarseOpVariant::StrGlk;
  CoarseSolveMode coarse_mode = CoarseSolveMode::Cslp;
  CoarseScale coarse_scale = CoarseScale::Literal;
  std::optional<TransferOrder> transfer;
  OuterSolver outer_solver = OuterSolver::Gmres;
  double outer_tol = 1e-6;
  int outer_maxit = 1000;
  int restart = 0;
  std::optional<double> coarse_tol;  // default 1e-6 for gmres, 1e-1 for gcr/fgmres
  int coarse_maxit = 0;
  Shift shift{1.0, -0.5};
  double gamma = 1.0;
  int gamma_sign = 1;
  int coarsest_maxit = 500;
  int mg_levels = 0;  // CSLP V-cycle depth, 0 = as deep as possible
  int px = 1;
  int py = 1;
  int threads = 0;  // 0: one per worker, capped by the host
  std::uint64_t seed = 12345;
  bool zero_rhs = false;
  std::optional<double> source_x;
  std::optional<double> source_y;
  std::string velocity_file;
  bool resample = false;
  Extents extents{0.0, 0.0, 1.0, 1.0};  // velocity-file domain
  std::string output;  // file prefix; empty writes nothing

  double effective_coarse_tol() const;
  BcKind effective_bc() const;
};

/// Apply one key=value pair. Throws ConfigError naming the key.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// Flat key=value text, '#' starts a comment. Errors carry the line number.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// "key=value" override as given on the command line.
void apply_override(ExperimentConfig& cfg, const std::string& kv);
/// Range and consistency checks; throws ConfigError.
void validate(const ExperimentConfig& cfg);
/// All keys with their current values, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

/// Grid and wavenumber field of the configured problem.
struct Problem {
  Grid2D grid;
  WavenumberField k;
  BcKind bc;
  double source_x;
  double source_y;
};
Problem build_problem(const ExperimentConfig& cfg);

struct ExperimentResult {
  ExperimentConfig cfg;
  Grid2D grid;
  double kh = 0.0;
  ConvergenceReport report;
  double avg_coarse_iters = 0.0;
  int max_coarse_iters = 0;
  long fine_vcycles = 0;
  double setup_time = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const ExperimentResult& r);
std::string json_report(const ExperimentResult& r);
/// Append the CSV row (header first if the file is new), write the
/// residual history and the JSON report next to cfg.output.
void write_outputs(const ExperimentResult& r);

enum class ScalingMode { Strong, Weak };
ScalingMode parse_scaling_mode(const std::string& s);

struct ScalingRecord {
  int workers = 0;
  int px = 0;
  int py = 0;
  int nx = 0;
  int ny = 0;
  double wall_time = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
  int outer_iters = 0;
};

/// Near-square px x py with px * py = p, px <= py.
std::pair<int, int> worker_grid(int p);

/// Runs cfg once per worker count, the first count being the reference.
/// Weak mode grows the grid with sqrt(p / p_ref). Throws InfeasiblePartition.
std::vector<ScalingRecord> scaling_harness(const ExperimentConfig& cfg, const std::vector<int>& workers,
                                           ScalingMode mode);
std::string scaling_csv(const std::vector<ScalingRecord>& recs);

}  // namespace helmdef
