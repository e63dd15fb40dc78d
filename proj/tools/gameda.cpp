#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gameda/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dual-averaging learning in continuous games: experiments and checks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the trials described by a config file");
  run->add_option("config", config_path, "Experiment config (key = value)")->required();

  std::vector<int> n_list{2, 5, 10, 50, 100};
  long samples = 10000;
  std::uint64_t seed = 1;
  bool symmetric = false;
  auto* mc = app.add_subcommand("montecarlo-hessian", "Fraction of random Cournot Hessians that are negative definite");
  mc->add_option("--n-list", n_list, "Numbers of firms")->delimiter(',');
  mc->add_option("--samples", samples, "Samples per N");
  mc->add_option("--seed", seed, "Master seed");
  mc->add_flag("--symmetric", symmetric, "Force b_1 = ... = b_N");

  std::string suite;
  std::uint64_t validate_seed = 20170;
  auto* validate = app.add_subcommand("validate", "Run a property suite");
  validate->add_option("suite", suite, "fenchel | gradients | cones | noise | descent | lyapunov | all")->required();
  validate->add_option("--seed", validate_seed, "Seed");

  std::string doc;
  auto* parse = app.add_subcommand("parse-check", "Parse a game document and report its shape");
  parse->add_option("document", doc, "Game document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gameda::cli::kConfigError;
  }

  using namespace gameda::cli;
  if (*run) return cmd_run(config_path, std::cout, std::cerr);
  if (*mc) return cmd_montecarlo_hessian(n_list, samples, seed, symmetric, std::cout, std::cerr);
  if (*validate) return cmd_validate(suite, validate_seed, std::cout, std::cerr);
  if (*parse) return cmd_parse_check(doc, std::cout, std::cerr);
  return kConfigError;
}
