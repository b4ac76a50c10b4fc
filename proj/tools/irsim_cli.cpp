// Command-line front end for the simulation experiments.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "irsim/harness.hpp"
#include "irsim/numerics.hpp"
#include "irsim/stcode.hpp"

namespace {

using namespace irsim;

struct CommonArgs {
  std::string configPath;
  std::optional<std::uint64_t> seed;
  std::string outPath;
  std::string schemesArg;
  std::string sweepArg;
  int trials = 100;
  int threads = 1;
  int pairs = 2000;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.configPath, "experiment config file");
  cmd->add_option("--seed", args.seed, "RNG seed override");
  cmd->add_option("--out", args.outPath, "output CSV path (default stdout)");
  cmd->add_option("--trials", args.trials, "Monte Carlo drops per point");
  cmd->add_option("--threads", args.threads, "worker threads");
}

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig cfg = args.configPath.empty()
                             ? parse_config_text("")
                             : parse_config(args.configPath);
  if (args.seed) cfg.seed = *args.seed;
  return cfg;
}

std::vector<SchemeId> parse_schemes(const std::string& arg,
                                    const std::vector<SchemeId>& defaults) {
  if (arg.empty()) return defaults;
  std::vector<SchemeId> out;
  size_t pos = 0;
  while (pos <= arg.size()) {
    const size_t comma = arg.find(',', pos);
    const std::string tok =
        arg.substr(pos, comma == std::string::npos ? std::string::npos
                                                   : comma - pos);
    if (!tok.empty()) out.push_back(parse_scheme(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw InvalidInput("--schemes: empty list");
  return out;
}

struct SweepSpec {
  SweepKind kind;
  std::vector<double> grid;
};

SweepSpec parse_sweep(const std::string& arg) {
  const size_t eq = arg.find('=');
  if (eq == std::string::npos)
    throw InvalidInput("--sweep expects name=start:stop:step");
  SweepSpec spec;
  spec.kind = parse_sweep_kind(arg.substr(0, eq));
  const std::string range = arg.substr(eq + 1);
  double start = 0, stop = 0, step = 0;
  if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3)
    throw InvalidInput("--sweep expects name=start:stop:step");
  spec.grid = sweep_grid(start, stop, step);
  return spec;
}

int finish(const ExperimentResult& result, const CommonArgs& args) {
  if (args.outPath.empty())
    std::cout << to_csv(result);
  else
    emit_csv(result, args.outPath);
  return infeasible_everywhere(result) ? 2 : 0;
}

bool report(const char* name, bool ok) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
  return ok;
}

int run_validate(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args);
  // Shrink to a fast self-check instance unless the config says otherwise.
  if (args.configPath.empty()) {
    cfg.M = 4;
    cfg.N = 16;
    cfg.groupEdge = 2;
    cfg.L = 2;
    cfg.K = 1;
    cfg.sinrTargetsLow = RealVector::Constant(2, 4.0);
    cfg.validate();
  }
  Rng rng(cfg.seed);
  const SystemGeometry geom = build_geometry(cfg, rng);
  const ChannelSet channels = realize_channels(cfg, geom, rng);
  bool ok = true;

  {  // Equivalent-channel orthogonality of the two-slot code.
    bool pass = true;
    for (int i = 0; i < 32; ++i) {
      const Complex h = rng.cnormal(), g = rng.cnormal();
      Eigen::Matrix2cd big;
      big << h, g, std::conj(g), -std::conj(h);
      const Eigen::Matrix2cd gram = big.adjoint() * big;
      const double want = std::norm(h) + std::norm(g);
      pass = pass &&
             (gram - want * Eigen::Matrix2cd::Identity()).norm() <
                 1e-12 * (1.0 + want);
    }
    ok &= report("equivalent-channel orthogonality", pass);
  }
  {  // Reflected (passive precoding) gain is invariant to the common phase.
    const ComplexVector theta = ComplexVector::Ones(cfg.N);
    const ComplexVector zero = ComplexVector::Zero(cfg.M);
    bool pass = true;
    for (int l = 0; l < cfg.L; ++l) {
      const auto& g = channels.irsLow[static_cast<size_t>(l)];
      const double base =
          effective_low_channel(zero, g, theta, channels.bsIrs, 0.0)
              .squaredNorm();
      for (double phi : {0.7, 2.1, 5.9}) {
        const double rot =
            effective_low_channel(zero, g, theta, channels.bsIrs, phi)
                .squaredNorm();
        pass = pass && std::abs(rot - base) <= 1e-9 * base;
      }
    }
    ok &= report("common-phase invariance", pass);
  }
  std::vector<ComplexVector> eff;
  for (int l = 0; l < cfg.L; ++l)
    eff.push_back(effective_low_channel(
        channels.directLow[static_cast<size_t>(l)],
        channels.irsLow[static_cast<size_t>(l)], ComplexVector::Ones(cfg.N),
        channels.bsIrs, 0.0));
  const RealVector distances = RealVector::Constant(cfg.K, cfg.userDistance);
  const CorrelationSet corr =
      build_correlations(eff, channels.bsIrs, cfg.noisePower, distances,
                         cfg.alphaUser, cfg.beta);
  RealVector targets(cfg.L + (cfg.K > 0 ? 1 : 0));
  targets.head(cfg.L) = cfg.sinrTargetsLow;
  if (cfg.K > 0) targets(cfg.L) = cfg.sinrTargetHigh;
  {  // Strong duality and SINR constraint activity of the MMSE design.
    bool pass = true;
    try {
      const DualVariables duals = mmse_fixed_point(corr, targets);
      const PrecoderSet set = mmse_precode(corr, eff, targets);
      double primal = 0.0;
      for (const auto& w : set.lowBeams) primal += w.squaredNorm();
      primal += set.highBeam.squaredNorm();
      const double dual = duals.lambdas.sum();
      pass = std::abs(primal - dual) <= 1e-5 * dual;
      const RealVector sinr = achieved_sinrs(set, corr, eff);
      for (Eigen::Index i = 0; i < sinr.size(); ++i)
        pass = pass && std::abs(sinr(i) - targets(i)) <= 1e-5 * targets(i);
    } catch (const std::runtime_error&) {
      pass = false;
    }
    ok &= report("uplink-downlink duality", pass);
  }
  {  // ZF beams cause no cross-user interference.
    bool pass = true;
    try {
      const auto beams = zf_precode(eff, cfg.sinrTargetsLow, cfg.noisePower);
      for (int l = 0; l < cfg.L; ++l)
        for (int j = 0; j < cfg.L; ++j)
          if (l != j)
            pass = pass && std::abs(eff[static_cast<size_t>(l)].dot(
                               beams[static_cast<size_t>(j)])) < 1e-9;
    } catch (const std::runtime_error&) {
      pass = false;
    }
    ok &= report("zero-forcing interference", pass);
  }
  {  // Repeated runs produce byte-identical CSV.
    HarnessOptions opt;
    opt.trials = 2;
    opt.threads = std::max(1, args.threads);
    const std::vector<SchemeId> schemes = {SchemeId::RandomPhase_MMSE,
                                           SchemeId::NoIrs_MMSE};
    const std::vector<double> grid = {cfg.userDistance};
    const std::string a =
        to_csv(run_power_sweep(cfg, SweepKind::Distance, grid, schemes, opt));
    opt.threads = 1;
    const std::string b =
        to_csv(run_power_sweep(cfg, SweepKind::Distance, grid, schemes, opt));
    ok &= report("deterministic output", a == b);
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS-integrated base station simulation experiments"};
  app.require_subcommand(1);

  CommonArgs convArgs, powerArgs, serArgs, valArgs;
  CLI::App* conv = app.add_subcommand(
      "convergence", "per-iteration transmit power of the AO schemes");
  add_common(conv, convArgs);

  CLI::App* power = app.add_subcommand(
      "power-sweep", "converged transmit power over a parameter sweep");
  add_common(power, powerArgs);
  power->add_option("--schemes", powerArgs.schemesArg, "comma-separated list");
  power->add_option("--sweep", powerArgs.sweepArg,
                    "name=start:stop:step (distance|sinrTarget|irsElements)");

  CLI::App* ser = app.add_subcommand(
      "ser-sweep", "symbol error rate over a transmit-power grid");
  add_common(ser, serArgs);
  ser->add_option("--schemes", serArgs.schemesArg, "comma-separated list");
  ser->add_option("--sweep", serArgs.sweepArg, "power=start:stop:step (dBm)");
  ser->add_option("--pairs", serArgs.pairs, "coded pairs per drop per point");

  CLI::App* val =
      app.add_subcommand("validate", "run the runtime invariant suite");
  add_common(val, valArgs);

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      ExperimentConfig cfg = load_config(convArgs);
      HarnessOptions opt;
      opt.trials = convArgs.trials;
      opt.threads = convArgs.threads;
      return finish(run_convergence(cfg, opt), convArgs);
    }
    if (power->parsed()) {
      ExperimentConfig cfg = load_config(powerArgs);
      HarnessOptions opt;
      opt.trials = powerArgs.trials;
      opt.threads = powerArgs.threads;
      const std::vector<SchemeId> defaults = {
          SchemeId::ProposedAO_MMSE,  SchemeId::ProposedAO_ZF,
          SchemeId::RandomPhase_MMSE, SchemeId::DftCodebook_MMSE,
          SchemeId::NoIrs_MMSE,       SchemeId::NoIrs_ZF};
      const auto schemes = parse_schemes(powerArgs.schemesArg, defaults);
      SweepSpec spec = powerArgs.sweepArg.empty()
                           ? SweepSpec{SweepKind::Distance,
                                       {cfg.userDistance}}
                           : parse_sweep(powerArgs.sweepArg);
      if (spec.kind == SweepKind::Power)
        throw InvalidInput("power-sweep: sweep must be "
                           "distance|sinrTarget|irsElements");
      return finish(run_power_sweep(cfg, spec.kind, spec.grid, schemes, opt),
                    powerArgs);
    }
    if (ser->parsed()) {
      ExperimentConfig cfg = load_config(serArgs);
      HarnessOptions opt;
      opt.trials = serArgs.trials;
      opt.threads = serArgs.threads;
      opt.pairsPerPoint = serArgs.pairs;
      const std::vector<SchemeId> defaults = {
          SchemeId::ProposedDiversity, SchemeId::NullSpaceNoIrs,
          SchemeId::NullSpaceDumbIrs, SchemeId::NullSpaceAlamouti,
          SchemeId::BeamformedAlamoutiNoIrs};
      const auto schemes = parse_schemes(serArgs.schemesArg, defaults);
      SweepSpec spec = serArgs.sweepArg.empty()
                           ? SweepSpec{SweepKind::Power, sweep_grid(0, 24, 4)}
                           : parse_sweep(serArgs.sweepArg);
      if (spec.kind != SweepKind::Power)
        throw InvalidInput("ser-sweep: sweep must be power=start:stop:step");
      return finish(run_ser_sweep(cfg, spec.grid, schemes, opt), serArgs);
    }
    if (val->parsed()) return run_validate(valArgs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
