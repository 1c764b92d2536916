// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run simulations, compare architectures, and check
// closed forms against Monte Carlo.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cfmimo/harness.hpp"

namespace fs = std::filesystem;
using namespace cfmimo;

namespace {

struct SimulateArgs {
  std::string config_path;
  std::string arch = "multi_level";
  std::string receiver = "mrc";
  int draws = 10000;
  int moments = 2000;
  int layouts = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool as_published = false;
};

int run_simulate(const SimulateArgs& args) {
  Scenario sc;
  sc.config = load_config(args.config_path);
  if (args.seed) sc.config.rng_seed = *args.seed;
  sc.architecture = architecture_from_string(args.arch);
  sc.receiver = receiver_from_string(args.receiver);
  sc.n_channel_draws = args.draws;
  sc.n_moment_samples = args.moments;
  sc.n_layout_realizations = args.layouts;
  sc.mrc_scaling =
      args.as_published ? MrcScaling::AsPublished : MrcScaling::Consistent;

  const ExperimentResult result = run_experiment(sc);

  fs::create_directories(args.out_dir);
  const std::string tag = to_string(sc.architecture) + "_" + to_string(sc.receiver);
  const fs::path rates_path = fs::path(args.out_dir) / ("rates_" + tag + ".csv");
  const fs::path cdf_path = fs::path(args.out_dir) / ("cdf_" + tag + ".csv");
  write_rates_csv(rates_path.string(), result.reports);
  write_cdf_csv(cdf_path.string(), result.cdf);
  write_cluster_plan_csv(
      (fs::path(args.out_dir) / ("cluster_plan_" + to_string(sc.architecture) + ".csv")).string(),
      build_arch_instance(sc.config, sc.architecture, 0));

  const Real sum_mc = result.pooled_mc.sum() / sc.n_layout_realizations;
  const Real sum_cf = result.pooled_cf.sum() / sc.n_layout_realizations;
  std::cout << tag << ": sum rate " << sum_mc << " (simulated) vs " << sum_cf
            << " (closed form) bit/s/Hz over " << sc.config.num_ues << " UEs\n"
            << "wrote " << rates_path.string() << " and " << cdf_path.string() << "\n";
  return 0;
}

struct CompareArgs {
  std::vector<std::string> config_paths;
  int draws = 2000;
  int moments = 1000;
  int layouts = 1;
  std::string receiver = "both";
};

int run_compare(const CompareArgs& args) {
  std::vector<std::string> labels;
  std::vector<Vec> cdfs;
  std::vector<Receiver> receivers;
  if (args.receiver == "both") {
    receivers = {Receiver::Mrc, Receiver::Zf};
  } else {
    receivers = {receiver_from_string(args.receiver)};
  }

  for (const std::string& path : args.config_paths) {
    const SimConfig cfg = load_config(path);
    const std::string stem = fs::path(path).stem().string();
    for (Architecture arch : {Architecture::MultiLevel, Architecture::OriginalCellfree,
                              Architecture::FullyDistributed}) {
      for (Receiver rx : receivers) {
        Scenario sc;
        sc.config = cfg;
        sc.architecture = arch;
        sc.receiver = rx;
        sc.n_channel_draws = args.draws;
        sc.n_moment_samples = args.moments;
        sc.n_layout_realizations = args.layouts;
        try {
          const ExperimentResult result = run_experiment(sc);
          labels.push_back(stem + "_" + to_string(arch) + "_" + to_string(rx));
          cdfs.push_back(result.cdf);
        } catch (const std::exception& e) {
          std::cerr << "warning: skipping " << stem << "/" << to_string(arch) << "/"
                    << to_string(rx) << ": " << e.what() << "\n";
        }
      }
    }
  }
  if (cdfs.empty()) {
    std::cerr << "error: no comparable runs succeeded\n";
    return 1;
  }

  std::cout << "quantile";
  for (const auto& label : labels) std::cout << ',' << label;
  std::cout << '\n';
  for (int qi = 0; qi <= 100; ++qi) {
    std::printf("%.2f", qi / 100.0);
    for (const auto& cdf : cdfs) std::printf(",%.6g", cdf(qi));
    std::printf("\n");
  }
  return 0;
}

struct ValidateArgs {
  std::optional<std::string> config_path;
  int draws = 10000;
  int moments = 2000;
};

int run_validate(const ValidateArgs& args) {
  SimConfig cfg = args.config_path ? load_config(*args.config_path) : desk_config();
  bool ok = true;
  for (Receiver rx : {Receiver::Mrc, Receiver::Zf}) {
    SimInstance inst = build_instance(cfg);
    const LsfdWeights weights = lsfd_weights(inst, rx, args.moments);
    const Vec cf = rx == Receiver::Mrc ? rate_mrc_closed_form(inst, weights)
                                       : rate_zf_closed_form(inst, weights);
    McOptions opts;
    opts.n_draws = args.draws;
    opts.form = SinrForm::PerSeu;  // the quantity the closed forms bound
    const McResult mc = rate_monte_carlo(inst, rx, weights, opts);
    opts.form = SinrForm::Coherent;
    const McResult mc_coh = rate_monte_carlo(inst, rx, weights, opts);

    Real max_rel = 0.0;
    int within = 0;
    int within_coh = 0;
    for (int k = 0; k < cfg.num_ues; ++k) {
      const Real diff = std::abs(cf(k) - mc.rate(k));
      const Real rel = diff / std::max(mc.rate(k), 1e-12);
      max_rel = std::max(max_rel, rel);
      if (diff <= std::max(0.05 * mc.rate(k), 0.1)) ++within;
      if (std::abs(cf(k) - mc_coh.rate(k)) <= std::max(0.05 * mc_coh.rate(k), 0.1))
        ++within_coh;
    }
    const Real frac = static_cast<Real>(within) / cfg.num_ues;
    const bool pass = frac >= 0.9;
    ok = ok && pass;
    std::cout << to_string(rx) << ": max relative deviation " << max_rel * 100.0 << "% "
              << "(per-SEU SINR form), " << within << "/" << cfg.num_ues
              << " UEs within max(5%, 0.1 bit/s/Hz); coherent form " << within_coh << "/"
              << cfg.num_ues << " -> " << (pass ? "ok" : "FAIL") << "\n";
    if (rx == Receiver::Zf)
      std::cout << "zf: max orthogonality residual " << mc.max_zf_residual << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink spectral efficiency for multi-level cooperative cell-free massive MIMO"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one architecture/receiver experiment");
  simulate->add_option("--config", sim.config_path, "key = value config file")->required();
  simulate->add_option("--arch", sim.arch,
                       "multi_level | original_cellfree | fully_distributed");
  simulate->add_option("--receiver", sim.receiver, "mrc | zf");
  simulate->add_option("--draws", sim.draws, "Monte Carlo channel draws");
  simulate->add_option("--moments", sim.moments, "LSFD moment-estimation draws");
  simulate->add_option("--layouts", sim.layouts, "independent layout realizations");
  simulate->add_option("--seed", sim.seed, "override rng_seed from the config");
  simulate->add_option("--out", sim.out_dir, "output directory for CSV files");
  simulate->add_flag("--as-published", sim.as_published,
                     "evaluate the MRC closed form with the alternate published scaling");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Joined CDF table across configs/architectures");
  compare->add_option("--configs", cmp.config_paths, "config files")->required()
      ->expected(-1);
  compare->add_option("--draws", cmp.draws, "Monte Carlo channel draws");
  compare->add_option("--moments", cmp.moments, "LSFD moment-estimation draws");
  compare->add_option("--layouts", cmp.layouts, "independent layout realizations");
  compare->add_option("--receiver", cmp.receiver, "mrc | zf | both");

  ValidateArgs val;
  auto* validate = app.add_subcommand("validate", "Closed form vs Monte Carlo agreement check");
  validate->add_option("--config", val.config_path, "config file (default: built-in desk scale)");
  validate->add_option("--draws", val.draws, "Monte Carlo channel draws");
  validate->add_option("--moments", val.moments, "LSFD moment-estimation draws");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (compare->parsed()) return run_compare(cmp);
    if (validate->parsed()) return run_validate(val);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
