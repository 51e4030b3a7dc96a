#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "helmdef/experiment.hpp"

using namespace helmdef;

namespace {

ExperimentConfig cfg_of(const std::string& text) { return parse_config(text); }

std::optional<ErrorKind> kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST(Config, ParseAndDefaults) {
  const ExperimentConfig c = cfg_of("# comment\nproblem = mp2a\nk=40\n\ncoarse_op=red-o4  # trailing\nbeta2=0.5\n");
  EXPECT_EQ(c.problem, ProblemKind::MP2a);
  EXPECT_EQ(c.k, 40.0);
  EXPECT_EQ(c.coarse_op, CoarseOpVariant::ReD_O4);
  EXPECT_EQ(c.shift.b2, 0.5);
  EXPECT_EQ(c.effective_bc(), BcKind::Dirichlet);
  EXPECT_EQ(cfg_of("problem=mp2b").effective_bc(), BcKind::Sommerfeld);
  EXPECT_EQ(c.effective_coarse_tol(), 1e-6);
  EXPECT_EQ(cfg_of("outer_solver=gcr").effective_coarse_tol(), 1e-1);
  const ExperimentConfig d;
  EXPECT_EQ(d.shift.b1, 1.0);
  EXPECT_EQ(d.shift.b2, -0.5);
}

TEST(Config, Errors) {
  EXPECT_EQ(kind_of([] { cfg_of("kk=1"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { cfg_of("k=abc"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { cfg_of("px=1.5"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { cfg_of("k=1\nnot a pair"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { cfg_of("coarse_op=nope"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { validate(cfg_of("outer_tol=2")); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { validate(cfg_of("gamma_sign=0")); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { build_problem(cfg_of("k=40\nkh=1.0")); }), ErrorKind::ConfigError);
  try {
    cfg_of("k=1\n\nbogus=3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  ExperimentConfig c;
  apply_override(c, "k=80");
  EXPECT_EQ(c.k, 80.0);
  EXPECT_THROW(apply_override(c, "k"), Error);
}

TEST(Config, EntriesRoundTrip) {
  ExperimentConfig c = cfg_of("problem=mp2a\nk=20\ncoarse_op=red-glk2\ndeflation=tlkm\nmg_levels=3");
  ExperimentConfig back;
  for (const auto& [k, v] : config_entries(c))
    if (!v.empty()) set_config_value(back, k, v);
  EXPECT_EQ(config_entries(back), config_entries(c));
}

TEST(Problem, GridFromKh) {
  EXPECT_EQ(build_problem(cfg_of("k=20\nkh=0.625")).grid.nx, 33);
  EXPECT_EQ(build_problem(cfg_of("k=80\nkh=0.3125")).grid.nx, 257);
  const Problem w = build_problem(cfg_of("problem=wedge\nf=10\nkh=0.349"));
  EXPECT_EQ(w.grid.nx, 73);
  EXPECT_EQ(w.grid.ny, 121);
  EXPECT_LE(w.k.kh(), 0.3491);
}

TEST(Csv, HeaderAndRow) {
  const auto cols = split(csv_header());
  ASSERT_EQ(cols.size(), 19u);
  EXPECT_EQ(cols.front(), "problem");
  EXPECT_EQ(cols[13], "outer_iters");
  EXPECT_EQ(cols.back(), "final_relres_true");
  const ExperimentResult r = run_experiment(cfg_of("problem=mp2a\nk=10\nnx=17\ncoarse_mode=direct"));
  const auto row = split(csv_row(r));
  ASSERT_EQ(row.size(), 19u);
  EXPECT_EQ(row[0], "mp2a");
  EXPECT_EQ(row[2], "17");
  EXPECT_EQ(std::stoi(row[13]), r.report.iterations);
}

TEST(Experiment, ZeroRhs) {
  const ExperimentResult r = run_experiment(cfg_of("problem=mp2b\nk=20\nzero_rhs=true"));
  EXPECT_EQ(r.report.iterations, 0);
}

TEST(Experiment, WritesOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "helmdef_out_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = cfg_of("problem=mp2a\nk=10\nnx=17\ncoarse_mode=direct");
  c.output = (dir / "run").string();
  const ExperimentResult r = run_experiment(c);
  write_outputs(r);
  write_outputs(r);
  std::ifstream csv(c.output + ".csv");
  int lines = 0;
  for (std::string l; std::getline(csv, l);) ++lines;
  EXPECT_EQ(lines, 3);
  std::ifstream h(c.output + ".history");
  int hl = 0;
  for (std::string l; std::getline(h, l);) ++hl;
  EXPECT_EQ(hl, static_cast<int>(r.report.history.size()));
  EXPECT_TRUE(std::filesystem::exists(c.output + ".json"));
  std::filesystem::remove_all(dir);
}

TEST(Experiment, SmallReferenceCounts) {
  // coarse systems solved exactly
  EXPECT_NEAR(run_experiment(cfg_of("problem=mp2a\nk=20\ndeflation=adef1\ncoarse_mode=direct")).report.iterations,
              8, 2);
  EXPECT_NEAR(run_experiment(cfg_of("problem=mp2a\nk=20\ndeflation=tlkm\ncoarse_op=red-o2\ncoarse_mode=plain\ncoarse_tol=1e-12\n"
                                  "coarse_maxit=5000"))
                  .report.iterations,
              9, 1);
  EXPECT_NEAR(run_experiment(cfg_of("problem=mp2b\nk=40\ndeflation=adef1\ncoarse_mode=direct\nbeta2=0.5"))
                  .report.iterations,
              13, 2);
}

TEST(Experiment, PartitionDoesNotChangeHistory) {
  const ExperimentConfig base = cfg_of("problem=mp2b\nk=20\ncoarse_mode=direct\nmg_levels=3\nbeta2=0.5");
  const ExperimentResult a = run_experiment(base);
  ExperimentConfig c = base;
  c.px = 2;
  c.py = 3;
  const ExperimentResult b = run_experiment(c);
  ASSERT_EQ(a.report.history.size(), b.report.history.size());
  for (std::size_t i = 0; i < a.report.history.size(); ++i)
    EXPECT_NEAR(a.report.history[i], b.report.history[i], 1e-10 * a.report.history[i]);
}

TEST(Scaling, WorkerGridAndReference) {
  EXPECT_EQ(worker_grid(1), std::make_pair(1, 1));
  EXPECT_EQ(worker_grid(6), std::make_pair(2, 3));
  EXPECT_EQ(worker_grid(7), std::make_pair(1, 7));
  const auto recs = scaling_harness(cfg_of("problem=mp2b\nk=10\nnx=33\ncoarse_mode=direct"), {1, 2}, ScalingMode::Strong);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].speedup, 1.0);
  EXPECT_EQ(recs[0].efficiency, 1.0);
  EXPECT_EQ(recs[1].outer_iters, recs[0].outer_iters);
  const auto weak = scaling_harness(cfg_of("problem=mp2b\nk=10\nnx=33\ncoarse_mode=direct"), {1, 4}, ScalingMode::Weak);
  EXPECT_EQ(weak[1].nx, 65);
  EXPECT_EQ(kind_of([] { scaling_harness(cfg_of("problem=mp2b\nk=2\nnx=9"), {64}, ScalingMode::Strong); }),
            ErrorKind::InfeasiblePartition);
}
