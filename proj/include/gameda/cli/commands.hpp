#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gameda/cli/config.hpp"
#include "gameda/cli/experiment.hpp"
#include "gameda/cli/game_document.hpp"
#include "gameda/montecarlo.hpp"
#include "gameda/validate.hpp"

namespace gameda::cli {

inline int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  Experiment e;
  try {
    e = build_experiment(load_config(config_path));
  } catch (const UsageError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kConfigError;
  }
  try {
    const ExperimentResult r = run_experiment(e, out);
    for (const auto& a : r.assertions) {
      if (!a.pass) return kAssertionFailed;
    }
    return kOk;
  } catch (const NumericAbort& ex) {
    err << "numeric abort: " << ex.what() << " (partial outputs removed)\n";
    return kNumericAbort;
  } catch (const UsageError& ex) {
    err << "config error: " << ex.what() << "\n";
    return kConfigError;
  }
}

inline int cmd_montecarlo_hessian(const std::vector<int>& n_list, long samples, std::uint64_t seed, bool symmetric,
                                  std::ostream& out, std::ostream& err) {
  if (samples < 1) {
    err << "samples must be >= 1\n";
    return kConfigError;
  }
  if (n_list.empty()) {
    err << "--n-list is empty\n";
    return kConfigError;
  }
  out << "N,samples,negative_definite,fraction\n";
  for (int n : n_list) {
    if (n < 1) {
      err << "N must be >= 1 (got " << n << ")\n";
      return kConfigError;
    }
    const auto r = montecarlo_hessian(n, samples, seed, symmetric);
    out << n << "," << r.samples << "," << r.negative_definite << "," << format_double(r.fraction()) << "\n";
  }
  return kOk;
}

inline int cmd_validate(const std::string& suite, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const auto result = validate::run_suite(suite, seed);
  if (!result) {
    std::string names;
    for (const auto& n : validate::suite_names()) names += n + ", ";
    err << "unknown suite '" << suite << "' (expected one of: " << names << "all)\n";
    return kConfigError;
  }
  for (const auto& p : *result) {
    char slack[32];
    std::snprintf(slack, sizeof slack, "%.3e", p.worst_slack);
    out << (p.pass ? "PASS " : "FAIL ") << "worst slack " << slack << "  " << p.name << "\n";
  }
  const bool ok = validate::all_pass(*result);
  out << (ok ? "all properties hold" : "some properties FAILED") << "\n";
  return ok ? kOk : kAssertionFailed;
}

inline int cmd_parse_check(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const GamePtr g = load_game_document(path);
    out << g->name() << " game: " << g->players() << " players, joint dimension " << g->dim() << "\n";
    return kOk;
  } catch (const UsageError& ex) {
    err << "parse error: " << ex.what() << "\n";
    return kConfigError;
  }
}

}  // namespace gameda::cli
