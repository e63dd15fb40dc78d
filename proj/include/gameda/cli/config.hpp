#pragma once

// Experiment configuration: a flat "key = value" document with dotted keys.
//
//   game.kind = cournot          # cournot | bilinear | nonconcave | document
//   game.players = 3
//   regularizer = euclidean      # one kind, or one per player: euclidean,entropic
//   step.kind = power            # constant | power | horizon-optimal
//   run.horizon = 100000
//
// Lists are comma-separated; matrix rows are separated by ';'. Unknown keys are
// rejected. to_text() writes every field, so parse(to_text(c)) == c.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gameda/cli/game_document.hpp"
#include "gameda/types.hpp"

namespace gameda::cli {

struct ExperimentConfig {
  // game
  std::string game_kind = "cournot";
  int players = 2;
  double a = 5.0;
  std::vector<double> b{1.0};
  std::vector<double> c{1.0};
  std::vector<double> capacity{10.0};
  std::vector<std::vector<double>> matrix;
  std::string sets = "simplex";  // bilinear: simplex | box
  std::vector<double> box{0.0, 1.0};
  int dim = 2;
  std::string document;

  std::vector<std::string> regularizer{"euclidean"};
  std::string step_kind = "power";
  double gamma = 1.0;
  double beta = 0.6;
  std::string noise_kind = "none";
  double sigma = 0.0;

  long horizon = 1000;
  long trials = 1;
  std::uint64_t seed = 1;
  long stride = 0;  // extra checkpoints every `stride` stages; 0 = powers of two only
  std::vector<double> init;  // empty: Y_1 = 0

  std::string candidate_source = "closed-form";  // closed-form | oracle | explicit | none
  std::string candidate_oracle = "best-response-grid";
  std::vector<double> candidate_point;

  std::vector<std::string> metrics{"gap", "fenchel", "distance", "length", "ergodic-gap"};
  std::string output_dir = "out";
  std::string output_prefix = "trial";

  std::optional<double> bound_epsilon;
  std::optional<double> bound_strong_stability;

  std::map<std::string, double> assertions;

  // Directory of the config file; relative game documents resolve against it.
  std::string base_dir;

  bool has_metric(const std::string& m) const {
    for (const auto& x : metrics) {
      if (x == m) return true;
    }
    return false;
  }

  bool operator==(const ExperimentConfig& o) const {
    return game_kind == o.game_kind && players == o.players && a == o.a && b == o.b && c == o.c &&
           capacity == o.capacity && matrix == o.matrix && sets == o.sets && box == o.box && dim == o.dim &&
           document == o.document && regularizer == o.regularizer && step_kind == o.step_kind &&
           gamma == o.gamma && beta == o.beta && noise_kind == o.noise_kind && sigma == o.sigma &&
           horizon == o.horizon && trials == o.trials && seed == o.seed && stride == o.stride && init == o.init &&
           candidate_source == o.candidate_source && candidate_oracle == o.candidate_oracle &&
           candidate_point == o.candidate_point && metrics == o.metrics && output_dir == o.output_dir &&
           output_prefix == o.output_prefix && bound_epsilon == o.bound_epsilon &&
           bound_strong_stability == o.bound_strong_stability && assertions == o.assertions;
  }
};

inline const std::set<std::string>& known_assertions() {
  static const std::set<std::string> names{
      "assert.final_distance.median",    // median final distance <= value
      "assert.final_distance.threshold", // with .fraction: fraction of trials below threshold >= fraction
      "assert.final_distance.fraction",
      "assert.ergodic_gap.within_bound",  // nonzero: mean + 2 s.e. of the ergodic gap <= bound at every checkpoint
      "assert.length.within_bound",       // nonzero: mean stopping length <= length bound
  };
  return names;
}

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

// 17 significant digits: round-trips every double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_double(v[k]);
  return s;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

class ConfigReader {
 public:
  ConfigReader(std::string source, int line, std::string key, std::string value)
      : source_(std::move(source)), line_(line), key_(std::move(key)), value_(std::move(value)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": field '" + key_ + "': " + what);
  }

  const std::string& text() const { return value_; }

  double real() const {
    const auto v = to_double(value_);
    if (!v) fail("'" + value_ + "' is not a finite number");
    return *v;
  }

  long integer() const {
    const auto v = to_long(value_);
    if (!v) fail("'" + value_ + "' is not an integer");
    return *v;
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    for (const auto& item : split(value_, ',')) {
      const auto v = to_double(item);
      if (!v) fail("'" + item + "' is not a finite number");
      out.push_back(*v);
    }
    return out;
  }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out;
    for (const auto& row : split(value_, ';')) {
      ConfigReader r(source_, line_, key_, row);
      out.push_back(r.reals());
      if (out.back().empty()) fail("empty matrix row");
    }
    return out;
  }

  std::string choice(std::initializer_list<const char*> allowed) const {
    for (const char* a : allowed) {
      if (value_ == a) return value_;
    }
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail("'" + value_ + "' is not one of: " + list);
  }

 private:
  std::string source_;
  int line_;
  std::string key_;
  std::string value_;
};

}  // namespace detail

inline std::string to_text(const ExperimentConfig& c) {
  using detail::join;
  std::ostringstream out;
  out << "game.kind = " << c.game_kind << "\n";
  out << "game.players = " << c.players << "\n";
  out << "game.a = " << format_double(c.a) << "\n";
  out << "game.b = " << join(c.b) << "\n";
  out << "game.c = " << join(c.c) << "\n";
  out << "game.capacity = " << join(c.capacity) << "\n";
  out << "game.matrix = ";
  for (std::size_t r = 0; r < c.matrix.size(); ++r) out << (r ? ";" : "") << join(c.matrix[r]);
  out << "\n";
  out << "game.sets = " << c.sets << "\n";
  out << "game.box = " << join(c.box) << "\n";
  out << "game.dim = " << c.dim << "\n";
  out << "game.document = " << c.document << "\n";
  out << "regularizer = " << join(c.regularizer) << "\n";
  out << "step.kind = " << c.step_kind << "\n";
  out << "step.gamma = " << format_double(c.gamma) << "\n";
  out << "step.beta = " << format_double(c.beta) << "\n";
  out << "noise.kind = " << c.noise_kind << "\n";
  out << "noise.sigma = " << format_double(c.sigma) << "\n";
  out << "run.horizon = " << c.horizon << "\n";
  out << "run.trials = " << c.trials << "\n";
  out << "run.seed = " << c.seed << "\n";
  out << "run.stride = " << c.stride << "\n";
  out << "run.init = " << (c.init.empty() ? "zero" : join(c.init)) << "\n";
  out << "candidate.source = " << c.candidate_source << "\n";
  out << "candidate.oracle = " << c.candidate_oracle << "\n";
  out << "candidate.point = " << join(c.candidate_point) << "\n";
  out << "metrics = " << join(c.metrics) << "\n";
  out << "output.dir = " << c.output_dir << "\n";
  out << "output.prefix = " << c.output_prefix << "\n";
  out << "bound.epsilon = " << (c.bound_epsilon ? format_double(*c.bound_epsilon) : "") << "\n";
  out << "bound.strong_stability = "
      << (c.bound_strong_stability ? format_double(*c.bound_strong_stability) : "") << "\n";
  for (const auto& [k, v] : c.assertions) out << k << " = " << format_double(v) << "\n";
  return out.str();
}

inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = detail::strip_comment(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    const std::string key = detail::strip_comment(line.substr(0, eq));
    const std::string value = detail::strip_comment(line.substr(eq + 1));
    const detail::ConfigReader r(source, number, key, value);
    if (!seen.insert(key).second) r.fail("given more than once");

    if (key == "game.kind") c.game_kind = r.choice({"cournot", "bilinear", "nonconcave", "document"});
    else if (key == "game.players") c.players = static_cast<int>(r.integer());
    else if (key == "game.a") c.a = r.real();
    else if (key == "game.b") c.b = r.reals();
    else if (key == "game.c") c.c = r.reals();
    else if (key == "game.capacity") c.capacity = r.reals();
    else if (key == "game.matrix") c.matrix = r.rows();
    else if (key == "game.sets") c.sets = r.choice({"simplex", "box"});
    else if (key == "game.box") {
      c.box = r.reals();
      if (c.box.size() != 2 || !(c.box[0] <= c.box[1])) r.fail("expected 'lower,upper' with lower <= upper");
    } else if (key == "game.dim") c.dim = static_cast<int>(r.integer());
    else if (key == "game.document") c.document = value;
    else if (key == "regularizer") {
      c.regularizer = detail::split(value, ',');
      for (const auto& k : c.regularizer) {
        if (k != "euclidean" && k != "entropic") r.fail("'" + k + "' is not one of: euclidean, entropic");
      }
      if (c.regularizer.empty()) r.fail("empty");
    } else if (key == "step.kind") c.step_kind = r.choice({"constant", "power", "horizon-optimal"});
    else if (key == "step.gamma") c.gamma = r.real();
    else if (key == "step.beta") c.beta = r.real();
    else if (key == "noise.kind") c.noise_kind = r.choice({"none", "gaussian", "uniform", "state-scaled", "sampling"});
    else if (key == "noise.sigma") c.sigma = r.real();
    else if (key == "run.horizon") c.horizon = r.integer();
    else if (key == "run.trials") c.trials = r.integer();
    else if (key == "run.seed") {
      const auto v = r.integer();
      if (v < 0) r.fail("must be >= 0");
      c.seed = static_cast<std::uint64_t>(v);
    } else if (key == "run.stride") c.stride = r.integer();
    else if (key == "run.init") c.init = value == "zero" ? std::vector<double>{} : r.reals();
    else if (key == "candidate.source") c.candidate_source = r.choice({"closed-form", "oracle", "explicit", "none"});
    else if (key == "candidate.oracle")
      c.candidate_oracle = r.choice({"closed-form", "best-response-grid", "fixed-point-projection"});
    else if (key == "candidate.point") c.candidate_point = r.reals();
    else if (key == "metrics") {
      c.metrics = detail::split(value, ',');
      for (const auto& m : c.metrics) {
        if (m != "gap" && m != "fenchel" && m != "distance" && m != "length" && m != "ergodic-gap")
          r.fail("'" + m + "' is not one of: gap, fenchel, distance, length, ergodic-gap");
      }
    } else if (key == "output.dir") c.output_dir = value;
    else if (key == "output.prefix") c.output_prefix = value;
    else if (key == "bound.epsilon") {
      if (value.empty()) c.bound_epsilon.reset();
      else c.bound_epsilon = r.real();
    } else if (key == "bound.strong_stability") {
      if (value.empty()) c.bound_strong_stability.reset();
      else c.bound_strong_stability = r.real();
    } else if (key.rfind("assert.", 0) == 0) {
      if (known_assertions().count(key) == 0) r.fail("unknown assertion");
      c.assertions[key] = r.real();
    } else {
      r.fail("unknown key");
    }
  }

  // Field-level validation that does not need the game.
  auto bad = [&](const std::string& key, const std::string& what) {
    throw ConfigError(source + ": field '" + key + "': " + what);
  };
  if (c.horizon < 1) bad("run.horizon", "must be >= 1");
  if (c.trials < 1) bad("run.trials", "must be >= 1");
  if (c.stride < 0) bad("run.stride", "must be >= 0");
  if (!(c.gamma > 0.0)) bad("step.gamma", "must be positive");
  if (c.step_kind == "power" && !(c.beta > 0.0 && c.beta <= 1.0)) bad("step.beta", "must lie in (0, 1]");
  if (!(c.sigma >= 0.0)) bad("noise.sigma", "must be >= 0");
  if (c.players < 1) bad("game.players", "must be >= 1");
  if (c.dim < 1) bad("game.dim", "must be >= 1");
  if (c.game_kind == "document" && c.document.empty()) bad("game.document", "required when game.kind = document");
  if (c.game_kind == "bilinear" && c.matrix.empty()) bad("game.matrix", "required when game.kind = bilinear");
  for (const auto& row : c.matrix) {
    if (row.size() != c.matrix.front().size()) bad("game.matrix", "rows have different lengths");
  }
  if (c.candidate_source == "explicit" && c.candidate_point.empty())
    bad("candidate.point", "required when candidate.source = explicit");
  if (c.bound_epsilon && !(*c.bound_epsilon > 0.0)) bad("bound.epsilon", "must be positive");
  if (c.bound_strong_stability && !(*c.bound_strong_stability > 0.0)) bad("bound.strong_stability", "must be positive");
  if (c.assertions.count("assert.final_distance.threshold") != c.assertions.count("assert.final_distance.fraction"))
    bad("assert.final_distance.threshold", "threshold and fraction must be given together");
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<config>") {
  std::istringstream in(text);
  return parse_config(in, source);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  ExperimentConfig c = parse_config(in, path);
  const auto slash = path.find_last_of('/');
  c.base_dir = slash == std::string::npos ? "." : path.substr(0, slash);
  return c;
}

}  // namespace gameda::cli
