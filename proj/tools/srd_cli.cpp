// Command-line harness for simple-random-density estimation:
// data generation, posterior fitting, empirical-Bayes selection,
// Bernstein smoothing, and QQ tables.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srd/pipeline.hpp"

namespace {

struct CliOptions {
  srd::RunConfig cfg;
  std::string generator;
  long n = 1000;
  std::string reference;
  // eb grid flags
  int eb_k_min = 4;
  int eb_k_max = 20;
  std::vector<double> eb_rhos = {0.1, 0.32, 1.0, 3.2, 10.0};
  long eb_mc_draws = 1000;
  // random theta flags
  bool random_theta = false;
  double rt_offset = 20000.0;
  double rt_shape = 2.0;
  double rt_rate_or_scale = 0.001;
  bool rt_by_scale = false;
};

void add_common_model_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--a", opt.cfg.a, "Left endpoint of the support");
  cmd->add_option("--b", opt.cfg.b, "Right endpoint of the support");
  cmd->add_option("--k", opt.cfg.k, "Number of cells (0 = select by empirical Bayes)");
  cmd->add_option("--rho", opt.cfg.rho, "Kernel dispersion (0 = select by empirical Bayes)");
  cmd->add_option("--theta", opt.cfg.theta, "Kernel scale (0 = default rule 2k^2)");
  cmd->add_option("--m-fill", opt.cfg.m_fill, "Constant prior log-mean");
  cmd->add_option("--gamma", opt.cfg.gamma, "Credibility level");
  cmd->add_option("--iterations", opt.cfg.chain.iterations, "Chain length");
  cmd->add_option("--burn-in", opt.cfg.chain.burn_in, "Burn-in iterations");
  cmd->add_option("--thin", opt.cfg.chain.thin, "Thinning stride");
  cmd->add_option("--step-scale", opt.cfg.chain.step_scale, "Proposal std dev (0 = auto)");
  cmd->add_option("--seed", opt.cfg.chain.seed, "RNG seed");
  cmd->add_flag("--no-adapt", [&opt](std::size_t) { opt.cfg.chain.adapt = false; },
                "Disable burn-in step adaptation");
  cmd->add_option("--eb-k-min", opt.eb_k_min, "Smallest k in the EB grid");
  cmd->add_option("--eb-k-max", opt.eb_k_max, "Largest k in the EB grid");
  cmd->add_option("--eb-rho", opt.eb_rhos, "EB grid rho values");
  cmd->add_option("--eb-mc-draws", opt.eb_mc_draws, "Prior draws per EB grid point");
  cmd->add_flag("--random-theta", opt.random_theta,
                "Draw theta = offset + Gamma once per chain");
  cmd->add_option("--random-theta-offset", opt.rt_offset, "Offset of the random theta");
  cmd->add_option("--random-theta-shape", opt.rt_shape, "Gamma shape");
  cmd->add_option("--random-theta-rate", opt.rt_rate_or_scale, "Gamma rate (or scale)");
  cmd->add_flag("--random-theta-by-scale", opt.rt_by_scale,
                "Interpret the Gamma parameter as a scale instead of a rate");
}

void finalize_config(CliOptions& opt) {
  srd::EBGrid grid;
  grid.a = opt.cfg.a;
  grid.b = opt.cfg.b;
  for (int k = opt.eb_k_min; k <= opt.eb_k_max; ++k) grid.k_values.push_back(k);
  grid.rho_values = opt.eb_rhos;
  grid.mc_draws = opt.eb_mc_draws;
  grid.seed = opt.cfg.chain.seed;
  opt.cfg.eb_grid = grid;
  if (opt.random_theta)
    opt.cfg.random_theta = srd::RandomThetaSpec{opt.rt_offset, opt.rt_shape,
                                                opt.rt_rate_or_scale, !opt.rt_by_scale};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian density estimation with simple random densities"};
  app.require_subcommand(1);

  CliOptions opt;

  auto* gen = app.add_subcommand("gen-data", "Generate synthetic benchmark data");
  gen->add_option("--name", opt.generator,
                  "Generator: beta-mixture-ex1, beta42, trunc-exp, triangular, "
                  "trunc-normal-mixture")
      ->required();
  gen->add_option("--n", opt.n, "Sample size")->required();
  gen->add_option("--seed", opt.cfg.chain.seed, "RNG seed");
  gen->add_option("--output", opt.cfg.output_path, "Output CSV")->required();

  auto* fit = app.add_subcommand("fit", "Posterior fit and summaries");
  add_common_model_flags(fit, opt);
  fit->add_option("--input", opt.cfg.input_path, "Input CSV (one value per line)");
  fit->add_option("--output", opt.cfg.output_path, "Summary JSON")->required();
  fit->add_option("--draws", opt.cfg.draws_path, "Chain draws CSV");
  fit->add_option("--curve", opt.cfg.curve_path, "Density and band curve CSV");

  auto* sim = app.add_subcommand("simulate-prior", "Prior summaries, no data");
  add_common_model_flags(sim, opt);
  sim->add_option("--output", opt.cfg.output_path, "Summary JSON")->required();
  sim->add_option("--draws", opt.cfg.draws_path, "Chain draws CSV");
  sim->add_option("--curve", opt.cfg.curve_path, "Density and band curve CSV");

  auto* eb = app.add_subcommand("eb", "Empirical-Bayes grid search over (k, rho)");
  add_common_model_flags(eb, opt);
  eb->add_option("--input", opt.cfg.input_path, "Input CSV");
  eb->add_option("--output", opt.cfg.output_path, "EB result JSON")->required();

  auto* smooth = app.add_subcommand("smooth", "Smooth Bernstein-mixture estimate");
  add_common_model_flags(smooth, opt);
  smooth->add_option("--input", opt.cfg.input_path, "Input CSV");
  smooth->add_option("--N", opt.cfg.smooth_N, "Bernstein degree");
  smooth->add_option("--output", opt.cfg.output_path, "Mixture JSON")->required();
  smooth->add_option("--curve", opt.cfg.curve_path, "Density curve CSV");

  auto* qq = app.add_subcommand("qq", "Quantile table against a reference distribution");
  add_common_model_flags(qq, opt);
  qq->add_option("--input", opt.cfg.input_path, "Input CSV");
  qq->add_option("--reference", opt.reference,
                 "Reference: trunc-exp, triangular, beta42, or beta:a,b")
      ->required();
  qq->add_option("--output", opt.cfg.output_path, "QQ table CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    finalize_config(opt);
    if (gen->parsed()) {
      srd::write_data_csv(srd::gen_data(opt.generator, opt.n, opt.cfg.chain.seed),
                          opt.cfg.output_path);
    } else if (fit->parsed()) {
      srd::run_fit(opt.cfg);
    } else if (sim->parsed()) {
      srd::run_simulate_prior(opt.cfg);
    } else if (eb->parsed()) {
      srd::run_eb(opt.cfg);
    } else if (smooth->parsed()) {
      srd::run_smooth(opt.cfg);
    } else if (qq->parsed()) {
      srd::run_qq(opt.cfg, opt.reference);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const srd::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
