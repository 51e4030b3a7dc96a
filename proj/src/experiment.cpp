#include "helmdef/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "helmdef/media.hpp"

namespace helmdef {

ProblemKind parse_problem(const std::string& s) {
  if (s == "mp2a") return ProblemKind::MP2a;
  if (s == "mp2b") return ProblemKind::MP2b;
  if (s == "wedge") return ProblemKind::Wedge;
  if (s == "velocity-file") return ProblemKind::VelocityFile;
  throw Error(ErrorKind::ConfigError, "unknown problem '" + s + "'");
}

const char* to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::MP2a: return "mp2a";
    case ProblemKind::MP2b: return "mp2b";
    case ProblemKind::Wedge: return "wedge";
    case ProblemKind::VelocityFile: return "velocity-file";
  }
  return "?";
}

double ExperimentConfig::effective_coarse_tol() const {
  if (coarse_tol) return *coarse_tol;
  return outer_solver == OuterSolver::Gmres ? 1e-6 : 1e-1;
}

BcKind ExperimentConfig::effective_bc() const {
  if (bc) return *bc;
  return problem == ProblemKind::MP2a ? BcKind::Dirichlet : BcKind::Sommerfeld;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "': '" + v + "' is not a number");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9)
    throw Error(ErrorKind::ConfigError, "key '" + key + "': '" + v + "' is not an integer");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::ConfigError, "key '" + key + "': '" + v + "' is not a boolean");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    if (key == "problem") c.problem = parse_problem(v);
    else if (key == "k") c.k = to_double(key, v);
    else if (key == "f") c.f = to_double(key, v);
    else if (key == "nx") c.nx = to_int(key, v);
    else if (key == "ny") c.ny = to_int(key, v);
    else if (key == "grid") {
      const int n = to_int(key, v);
      c.nx = n;
      c.ny = n;
    }
    else if (key == "kh") c.kh = to_double(key, v);
    else if (key == "allow_large_kh") c.allow_large_kh = to_bool(key, v);
    else if (key == "bc") c.bc = v == "auto" ? std::nullopt : std::optional<BcKind>(parse_bc(v));
    else if (key == "deflation") c.deflation = parse_deflation(v);
    else if (key == "coarse_op") c.coarse_op = parse_coarse_op(v);
    else if (key == "coarse_mode") c.coarse_mode = parse_coarse_mode(v);
    else if (key == "coarse_scale") c.coarse_scale = parse_coarse_scale(v);
    else if (key == "transfer") {
      if (v == "auto") c.transfer.reset();
      else if (v == "low") c.transfer = TransferOrder::Low;
      else if (v == "high") c.transfer = TransferOrder::High;
      else throw Error(ErrorKind::ConfigError, "transfer must be auto, low or high");
    }
    else if (key == "outer_solver") c.outer_solver = parse_outer_solver(v);
    else if (key == "outer_tol") c.outer_tol = to_double(key, v);
    else if (key == "outer_maxit") c.outer_maxit = to_int(key, v);
    else if (key == "restart") c.restart = to_int(key, v);
    else if (key == "coarse_tol") c.coarse_tol = v == "auto" ? std::nullopt : std::optional<double>(to_double(key, v));
    else if (key == "coarse_maxit") c.coarse_maxit = to_int(key, v);
    else if (key == "beta1") c.shift.b1 = to_double(key, v);
    else if (key == "beta2") c.shift.b2 = to_double(key, v);
    else if (key == "gamma") c.gamma = to_double(key, v);
    else if (key == "gamma_sign") c.gamma_sign = to_int(key, v);
    else if (key == "coarsest_maxit") c.coarsest_maxit = to_int(key, v);
    else if (key == "mg_levels") c.mg_levels = to_int(key, v);
    else if (key == "px") c.px = to_int(key, v);
    else if (key == "py") c.py = to_int(key, v);
    else if (key == "threads") c.threads = to_int(key, v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "zero_rhs") c.zero_rhs = to_bool(key, v);
    else if (key == "source_x") c.source_x = to_double(key, v);
    else if (key == "source_y") c.source_y = to_double(key, v);
    else if (key == "velocity_file") c.velocity_file = v;
    else if (key == "resample") c.resample = to_bool(key, v);
    else if (key == "x0") c.extents.x0 = to_double(key, v);
    else if (key == "x1") c.extents.x1 = to_double(key, v);
    else if (key == "y0") c.extents.y0 = to_double(key, v);
    else if (key == "y1") c.extents.y1 = to_double(key, v);
    else if (key == "output") c.output = v;
    else throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, "key '" + key + "': " + e.what());
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key=value");
    try {
      set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void apply_override(ExperimentConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "override '" + kv + "' is not key=value");
  set_config_value(cfg, trim(kv.substr(0, eq)), kv.substr(eq + 1));
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigError, m); };
  if ((c.problem == ProblemKind::MP2a || c.problem == ProblemKind::MP2b) && !(c.k >= 0.0)) fail("k must be >= 0");
  if ((c.problem == ProblemKind::Wedge || c.problem == ProblemKind::VelocityFile) && !(c.f > 0.0)) fail("f must be > 0");
  if (c.nx < 0 || c.ny < 0) fail("nx, ny must be positive");
  if (!(c.kh > 0.0)) fail("kh must be > 0");
  if (!(c.outer_tol > 0.0 && c.outer_tol < 1.0)) fail("outer_tol must lie in (0, 1)");
  const double ct = c.effective_coarse_tol();
  if (!(ct > 0.0 && ct < 1.0)) fail("coarse_tol must lie in (0, 1)");
  if (c.outer_maxit < 1) fail("outer_maxit must be >= 1");
  if (c.px < 1 || c.py < 1) fail("px, py must be >= 1");
  if (c.gamma_sign != 1 && c.gamma_sign != -1) fail("gamma_sign must be +1 or -1");
  if (!std::isfinite(c.gamma)) fail("gamma must be finite");
  if (c.problem == ProblemKind::VelocityFile && c.velocity_file.empty()) fail("velocity_file is required");
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  auto tr = [&]() -> std::string { return c.transfer ? to_string(*c.transfer) : "auto"; };
  return {
      {"problem", to_string(c.problem)},
      {"k", fmt(c.k)},
      {"f", fmt(c.f)},
      {"nx", std::to_string(c.nx)},
      {"ny", std::to_string(c.ny)},
      {"kh", fmt(c.kh)},
      {"allow_large_kh", c.allow_large_kh ? "true" : "false"},
      {"bc", to_string(c.effective_bc())},
      {"deflation", to_string(c.deflation)},
      {"coarse_op", to_string(c.coarse_op)},
      {"coarse_mode", to_string(c.coarse_mode)},
      {"coarse_scale", to_string(c.coarse_scale)},
      {"transfer", tr()},
      {"outer_solver", to_string(c.outer_solver)},
      {"outer_tol", fmt(c.outer_tol)},
      {"outer_maxit", std::to_string(c.outer_maxit)},
      {"restart", std::to_string(c.restart)},
      {"coarse_tol", fmt(c.effective_coarse_tol())},
      {"coarse_maxit", std::to_string(c.coarse_maxit)},
      {"beta1", fmt(c.shift.b1)},
      {"beta2", fmt(c.shift.b2)},
      {"gamma", fmt(c.gamma)},
      {"gamma_sign", std::to_string(c.gamma_sign)},
      {"coarsest_maxit", std::to_string(c.coarsest_maxit)},
      {"mg_levels", std::to_string(c.mg_levels)},
      {"px", std::to_string(c.px)},
      {"py", std::to_string(c.py)},
      {"threads", std::to_string(c.threads)},
      {"seed", std::to_string(c.seed)},
      {"zero_rhs", c.zero_rhs ? "true" : "false"},
      {"velocity_file", c.velocity_file},
      {"resample", c.resample ? "true" : "false"},
      {"output", c.output},
  };
}

namespace {

// Smallest interval counts in the domain's aspect ratio, both even, with
// h <= h_max.
std::pair<int, int> grid_for_h(const Extents& e, double h_max) {
  const double lx = e.x1 - e.x0;
  const double ly = e.y1 - e.y0;
  int a = 0, b = 0;
  for (int q = 1; q <= 1000 && a == 0; ++q) {
    const double p = lx / ly * q;
    if (std::abs(p - std::round(p)) < 1e-9 && std::round(p) >= 1) {
      a = static_cast<int>(std::round(p));
      b = q;
    }
  }
  if (a == 0) throw Error(ErrorKind::ConfigError, "domain aspect ratio is not rational; give nx and ny");
  // kh is usually quoted to three digits; do not refine for the rounding
  int m = std::max(1, static_cast<int>(std::ceil(lx / (a * h_max) * (1.0 - 1e-3))));
  while ((a * m) % 2 || (b * m) % 2) ++m;
  return {a * m + 1, b * m + 1};
}

}  // namespace

Problem build_problem(const ExperimentConfig& c) {
  validate(c);
  Problem p;
  p.bc = c.effective_bc();
  switch (c.problem) {
    case ProblemKind::MP2a:
    case ProblemKind::MP2b: {
      const Extents e{0.0, 0.0, 1.0, 1.0};
      int nx = c.nx, ny = c.ny;
      if (nx == 0 && ny == 0) {
        if (c.k <= 0.0) throw Error(ErrorKind::ConfigError, "nx/ny are required when k = 0");
        const int n = static_cast<int>(std::ceil(c.k / c.kh - 1e-9));
        nx = ny = n + (n % 2) + 1;
      } else if (nx == 0 || ny == 0) {
        nx = ny = std::max(nx, ny);
      }
      p.grid = build_grid(nx, ny, e);
      p.k = constant_k(p.grid, c.k);
      p.source_x = c.source_x.value_or(0.5);
      p.source_y = c.source_y.value_or(0.5);
      break;
    }
    case ProblemKind::Wedge: {
      const Extents e = wedge_extents();
      const LayeredVelocityModel m = default_wedge();
      int nx = c.nx, ny = c.ny;
      if (nx == 0 || ny == 0) {
        const double cmin = *std::min_element(m.velocities.begin(), m.velocities.end());
        const double kmax = 2.0 * M_PI * c.f / cmin;
        std::tie(nx, ny) = grid_for_h(e, c.kh / kmax);
      }
      p.grid = build_grid(nx, ny, e);
      p.k = layered_k(p.grid, m, c.f);
      p.source_x = c.source_x.value_or(300.0);
      p.source_y = c.source_y.value_or(0.0);
      break;
    }
    case ProblemKind::VelocityFile: {
      const VelocityGrid v = read_velocity_grid(c.velocity_file);
      int nx = c.nx ? c.nx : v.nx;
      int ny = c.ny ? c.ny : v.ny;
      p.grid = build_grid(nx, ny, c.extents);
      p.k = velocity_to_k(v, p.grid, c.f, c.resample);
      p.source_x = c.source_x.value_or(0.5 * (c.extents.x0 + c.extents.x1));
      p.source_y = c.source_y.value_or(c.extents.y1);
      break;
    }
  }
  if (!c.allow_large_kh && p.k.kh() > 0.7 + 1e-12)
    throw Error(ErrorKind::ConfigError, "kh = " + fmt(p.k.kh()) + " exceeds 0.7 (set allow_large_kh)");
  return p;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const Problem prob = build_problem(cfg);
  const int hw = std::max(1, omp_get_num_procs());
  const int threads = cfg.threads > 0 ? cfg.threads : std::min(cfg.px * cfg.py, hw);
  omp_set_num_threads(threads);

  LayoutPtr L = make_layout(prob.grid, partition(prob.grid, cfg.px, cfg.py), 3);
  DeflationConfig dc;
  dc.variant = cfg.deflation;
  dc.gamma = cfg.gamma;
  dc.gamma_sign = cfg.gamma_sign;
  dc.coarse_op = cfg.coarse_op;
  dc.coarse_scale = cfg.coarse_scale;
  dc.coarse_tol = cfg.effective_coarse_tol();
  dc.coarse_maxit = cfg.coarse_maxit;
  dc.coarse_mode = cfg.coarse_mode;
  dc.shift = cfg.shift;
  dc.transfer = cfg.transfer;
  dc.mg.coarsest_maxit = cfg.coarsest_maxit;
  dc.mg.max_levels = cfg.mg_levels;
  Deflation d(L, prob.k, prob.bc, dc);

  Field b(L);
  if (!cfg.zero_rhs) b = point_source_rhs(L, prob.source_x, prob.source_y);
  Field x(L);
  KrylovOptions ko;
  ko.tol = cfg.outer_tol;
  ko.maxit = cfg.outer_maxit;
  ko.restart = cfg.restart;

  ExperimentResult r;
  r.cfg = cfg;
  r.grid = prob.grid;
  r.kh = prob.k.kh();
  r.setup_time = std::chrono::duration<double>(Clock::now() - t0).count();
  r.report = solve_deflated(d, cfg.outer_solver, b, x, ko);  // wall time covers the solve only
  const auto& ci = r.report.coarse_iterations;
  if (!ci.empty()) {
    r.avg_coarse_iters = std::accumulate(ci.begin(), ci.end(), 0.0) / static_cast<double>(ci.size());
    r.max_coarse_iters = *std::max_element(ci.begin(), ci.end());
  }
  r.fine_vcycles = d.fine_vcycles();
  return r;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "problem",        "k_or_f",          "nx",          "ny",          "kh",
      "bc",             "deflation",       "coarse_op",   "outer_solver", "outer_tol",
      "coarse_tol",     "px",              "py",          "outer_iters", "avg_coarse_iters",
      "max_coarse_iters", "wall_time_s",   "final_relres_precond", "final_relres_true"};
  return cols;
}

std::string csv_header() {
  std::string s;
  for (const auto& c : csv_columns()) s += (s.empty() ? "" : ",") + c;
  return s;
}

std::string csv_row(const ExperimentResult& r) {
  const ExperimentConfig& c = r.cfg;
  const bool const_k = c.problem == ProblemKind::MP2a || c.problem == ProblemKind::MP2b;
  std::ostringstream os;
  os.precision(6);
  os << to_string(c.problem) << ',' << (const_k ? c.k : c.f) << ',' << r.grid.nx << ',' << r.grid.ny << ','
     << r.kh << ',' << to_string(c.effective_bc()) << ',' << to_string(c.deflation) << ','
     << to_string(c.coarse_op) << ',' << to_string(c.outer_solver) << ',' << c.outer_tol << ','
     << c.effective_coarse_tol() << ',' << c.px << ',' << c.py << ',' << r.report.iterations << ','
     << r.avg_coarse_iters << ',' << r.max_coarse_iters << ',' << r.report.wall_time << ','
     << r.report.final_relres_precond << ',' << r.report.final_relres_true;
  return os.str();
}

std::string json_report(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : config_entries(r.cfg)) cfg[k] = v;
  j["config"] = cfg;
  j["grid"] = {{"nx", r.grid.nx}, {"ny", r.grid.ny}, {"h", r.grid.h}};
  j["kh"] = r.kh;
  const ConvergenceReport& rep = r.report;
  j["report"] = {
      {"outer_iterations", rep.iterations},
      {"converged", rep.converged},
      {"breakdown", rep.breakdown},
      {"final_relres_precond", rep.final_relres_precond},
      {"final_relres_true", rep.final_relres_true},
      {"wall_time_s", rep.wall_time},
      {"setup_time_s", r.setup_time},
      {"avg_coarse_iters", r.avg_coarse_iters},
      {"max_coarse_iters", r.max_coarse_iters},
      {"coarse_iterations", rep.coarse_iterations},
      {"fine_vcycles", r.fine_vcycles},
      {"flops", rep.flops},
      {"reorthogonalisations", rep.reorthogonalisations},
      {"history", rep.history},
      {"warnings", rep.warnings},
  };
  return j.dump(2);
}

void write_outputs(const ExperimentResult& r) {
  const std::string& p = r.cfg.output;
  if (p.empty()) return;
  const std::filesystem::path base(p);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  const std::string csv = p + ".csv";
  const bool fresh = !std::filesystem::exists(csv);
  std::ofstream c(csv, std::ios::app);
  if (fresh) c << csv_header() << '\n';
  c << csv_row(r) << '\n';
  std::ofstream h(p + ".history");
  h.precision(17);
  for (double v : r.report.history) h << v << '\n';
  std::ofstream js(p + ".json");
  js << json_report(r) << '\n';
  if (!c || !h || !js) throw Error(ErrorKind::ConfigError, "cannot write outputs at '" + p + "'");
}

ScalingMode parse_scaling_mode(const std::string& s) {
  if (s == "strong") return ScalingMode::Strong;
  if (s == "weak") return ScalingMode::Weak;
  throw Error(ErrorKind::ConfigError, "scaling mode must be strong or weak");
}

std::pair<int, int> worker_grid(int p) {
  if (p < 1) throw Error(ErrorKind::InfeasiblePartition, "worker count must be >= 1");
  int px = static_cast<int>(std::sqrt(static_cast<double>(p)));
  while (p % px) --px;
  return {px, p / px};
}

std::vector<ScalingRecord> scaling_harness(const ExperimentConfig& cfg, const std::vector<int>& workers,
                                           ScalingMode mode) {
  if (workers.empty()) throw Error(ErrorKind::InfeasiblePartition, "no worker counts");
  const Problem ref = build_problem(cfg);
  std::vector<ScalingRecord> out;
  const int p_ref = workers.front();
  for (int p : workers) {
    ExperimentConfig c = cfg;
    const auto [px, py] = worker_grid(p);
    c.px = px;
    c.py = py;
    c.threads = 0;
    c.output.clear();
    if (mode == ScalingMode::Weak) {
      const double s = std::sqrt(static_cast<double>(p) / p_ref);
      auto grow = [s](int n) {
        int m = static_cast<int>(std::lround((n - 1) * s));
        return m + (m % 2) + 1;
      };
      c.nx = grow(ref.grid.nx);
      c.ny = grow(ref.grid.ny);
    } else {
      c.nx = ref.grid.nx;
      c.ny = ref.grid.ny;
    }
    const Grid2D g = build_grid(c.nx, c.ny, ref.grid.extents);
    const auto blocks = partition(g, c.px, c.py).min_block();
    if (blocks.first < 2 || blocks.second < 2)
      throw Error(ErrorKind::InfeasiblePartition, std::to_string(p) + " workers on " + std::to_string(c.nx) + "x" +
                                                      std::to_string(c.ny));
    const ExperimentResult r = run_experiment(c);
    ScalingRecord rec;
    rec.workers = p;
    rec.px = c.px;
    rec.py = c.py;
    rec.nx = c.nx;
    rec.ny = c.ny;
    rec.wall_time = r.report.wall_time;
    rec.outer_iters = r.report.iterations;
    out.push_back(rec);
  }
  for (ScalingRecord& r : out) {
    r.speedup = out.front().wall_time / r.wall_time;
    r.efficiency = r.speedup / (static_cast<double>(r.workers) / p_ref);
  }
  return out;
}

std::string scaling_csv(const std::vector<ScalingRecord>& recs) {
  std::ostringstream os;
  os << "workers,px,py,nx,ny,wall_time_s,speedup,efficiency,outer_iters\n";
  for (const auto& r : recs)
    os << r.workers << ',' << r.px << ',' << r.py << ',' << r.nx << ',' << r.ny << ',' << r.wall_time << ','
       << r.speedup << ',' << r.efficiency << ',' << r.outer_iters << '\n';
  return os.str();
}

}  // namespace helmdef
