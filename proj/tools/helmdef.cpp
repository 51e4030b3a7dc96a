#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "helmdef/experiment.hpp"
#include "helmdef/optimize9pt.hpp"
#include "helmdef/stencil.hpp"

using namespace helmdef;

namespace {

void print_stencil(const char* title, const IStencil& s) {
  std::cout << title << '\n';
  for (int y = s.ry; y >= -s.ry; --y) {
    for (int x = -s.rx; x <= s.rx; ++x) std::printf("%7lld", static_cast<long long>(s.at(x, y)));
    std::cout << '\n';
  }
}

std::vector<int> parse_workers(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad worker count '" + tok + "'");
    }
  }
  return out;
}

ExperimentConfig make_config(const std::string& file, const std::vector<std::string>& sets) {
  ExperimentConfig cfg;
  if (!file.empty()) cfg = load_config(file);
  for (const auto& kv : sets) apply_override(cfg, kv);
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deflated CSLP solver for the 2D Helmholtz equation"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "solve one configured problem");
  run->add_option("--config", config, "key=value config file");
  run->add_option("--set", sets, "key=value override (repeatable)");
  run->add_flag("--quiet", quiet, "no CSV row on stdout");

  std::string workers = "1";
  std::string mode = "strong";
  auto* scale = app.add_subcommand("scale", "strong or weak scaling sweep");
  scale->add_option("--config", config, "key=value config file");
  scale->add_option("--set", sets, "key=value override (repeatable)");
  scale->add_option("--workers", workers, "comma separated worker counts, first is the reference");
  scale->add_option("--mode", mode, "strong or weak");

  auto* derive = app.add_subcommand("derive-stencils", "print the Galerkin-derived 5x5 stencils");

  double k9 = 80.0;
  double href = 1e-4;
  bool raw = false;
  auto* opt9 = app.add_subcommand("optimize-9pt", "fit the eigenvalue-aligned nine-point scheme");
  opt9->add_option("--k", k9, "wavenumber");
  opt9->add_option("--h-ref", href, "reference mesh width (coarse width is twice this)");
  opt9->add_flag("--raw", raw, "print the unrounded fit only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = make_config(config, sets);
      const ExperimentResult r = run_experiment(cfg);
      write_outputs(r);
      if (!quiet) std::cout << csv_header() << '\n' << csv_row(r) << '\n';
      for (const auto& w : r.report.warnings) std::cerr << "warning: " << w << '\n';
    } else if (*scale) {
      ExperimentConfig cfg = make_config(config, sets);
      const auto recs = scaling_harness(cfg, parse_workers(workers), parse_scaling_mode(mode));
      std::cout << scaling_csv(recs);
    } else if (*derive) {
      const ComposedStencil s = derive_red_glk_stencils();
      print_stencil("Laplacian part, times 1/(256 (2h)^2):", s.lap);
      print_stencil("mass part, times k^2/64^2:", s.mass);
    } else if (*opt9) {
      const MinMode m = find_min_mode(k9);
      std::printf("min mode i=%d j=%d value=%.4f\n", m.i, m.j, m.value);
      const NinePointCoeffs c = optimize_9pt_coefficients(k9, href, m.i, m.j);
      const NinePointCoeffs r = raw ? c : round_9pt_coefficients(c, 3);
      std::printf("a0=%.6g as=%.6g ac=%.6g b0=%.6g bs=%.6g bc=%.6g\n", r.a0, r.as, r.ac, r.b0, r.bs, r.bc);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::InfeasiblePartition ||
                   e.kind() == ErrorKind::TooManyWorkers
               ? 2
               : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
