#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <string>

#include "afm/commands.hpp"
#include "afm/csv.hpp"
#include "afm/errors.hpp"
#include "afm/version.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  try {
    return json::parse(afm::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw afm::ConfigError(path + ": " + e.what());
  }
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int workers = 0;
  bool seed_set = false;
  bool workers_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override config seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--workers", opts.workers, "override worker count")
      ->each([&](const std::string&) { opts.workers_set = true; });
}

json resolve(const CommonOpts& opts) {
  json config = load_config(opts.config_path);
  if (opts.seed_set) config["seed"] = opts.seed;
  if (opts.workers_set) config["workers"] = opts.workers;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric additive factor models: simulation, estimation, "
               "evaluation, and Monte Carlo experiments"};
  app.set_version_flag("--version", std::string("afm ") + afm::kVersion);
  app.require_subcommand(1);

  CommonOpts simulate_opts, fit_opts, eval_opts, mc_opts, transform_opts;
  add_common(app.add_subcommand("simulate", "generate a synthetic panel"), simulate_opts);
  add_common(app.add_subcommand("fit", "estimate factors and loadings from a panel"),
             fit_opts);
  add_common(app.add_subcommand("eval", "score estimates against the generating truth"),
             eval_opts);
  add_common(app.add_subcommand("mc", "run a simulate-fit-eval replication grid"), mc_opts);
  add_common(app.add_subcommand("transform", "retarget estimated factors"), transform_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("simulate")) {
      afm::run_simulate(resolve(simulate_opts), simulate_opts.out_dir);
    } else if (app.got_subcommand("fit")) {
      afm::run_fit(resolve(fit_opts), fit_opts.out_dir);
    } else if (app.got_subcommand("eval")) {
      std::cout << afm::run_eval(resolve(eval_opts), eval_opts.out_dir).dump(2) << "\n";
    } else if (app.got_subcommand("mc")) {
      afm::run_mc_cmd(resolve(mc_opts), mc_opts.out_dir);
    } else if (app.got_subcommand("transform")) {
      std::cout << afm::run_transform(resolve(transform_opts), transform_opts.out_dir).dump(2)
                << "\n";
    }
  } catch (const afm::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const afm::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
