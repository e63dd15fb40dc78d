#pragma once

// Text schema for finite and congestion games.
//
//   finite-game players=2
//   strategies=2            one line per player, in order
//   strategies=2
//   payoff 1 1 1 = 1        payoff <player> <a_1 ... a_N> = <value>, all 1-based
//   ...
//
//   congestion-game         (optional header)
//   resource r1 alpha=1 beta=0.5
//   player 1 load=1.5
//   path 1 fast = r1,r2
//
// '#' starts a comment. Every error names the line it was found on.

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gameda/games.hpp"
#include "gameda/types.hpp"

namespace gameda::cli {

class ParseError : public UsageError {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : UsageError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::optional<double> to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::optional<long> to_long(const std::string& s) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Splits "key=value"; nullopt when there is no '=' or the key differs.
inline std::optional<std::string> keyed(const std::string& tok, const std::string& key) {
  const auto eq = tok.find('=');
  if (eq == std::string::npos || tok.substr(0, eq) != key) return std::nullopt;
  return tok.substr(eq + 1);
}

struct Line {
  int number;
  std::string text;
};

class DocumentParser {
 public:
  DocumentParser(std::string source, std::vector<Line> lines) : source_(std::move(source)), lines_(std::move(lines)) {}

  GamePtr parse() {
    if (lines_.empty()) fail(1, "empty game document");
    const auto head = split_ws(lines_.front().text);
    if (head[0] == "finite-game") return parse_finite();
    return parse_congestion();
  }

 private:
  [[noreturn]] void fail(int line, const std::string& what) const { throw ParseError(source_, line, what); }

  double number(const Line& l, const std::string& tok, const std::string& field) const {
    const auto v = to_double(tok);
    if (!v) fail(l.number, "field '" + field + "': '" + tok + "' is not a finite number");
    return *v;
  }

  long integer(const Line& l, const std::string& tok, const std::string& field, long lo, long hi) const {
    const auto v = to_long(tok);
    if (!v) fail(l.number, "field '" + field + "': '" + tok + "' is not an integer");
    if (*v < lo || *v > hi)
      fail(l.number, "field '" + field + "': " + tok + " out of range [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    return *v;
  }

  GamePtr parse_finite() {
    const Line& head = lines_.front();
    const auto tokens = split_ws(head.text);
    if (tokens.size() != 2) fail(head.number, "expected 'finite-game players=<N>'");
    const auto p = keyed(tokens[1], "players");
    if (!p) fail(head.number, "expected 'players=<N>' after 'finite-game'");
    const int players = static_cast<int>(integer(head, *p, "players", 1, 16));

    std::vector<int> strategies;
    std::size_t k = 1;
    for (; k < lines_.size() && static_cast<int>(strategies.size()) < players; ++k) {
      const Line& l = lines_[k];
      const auto t = split_ws(l.text);
      const auto s = t.size() == 1 ? keyed(t[0], "strategies") : std::nullopt;
      if (!s) fail(l.number, "expected 'strategies=<k>' for player " + std::to_string(strategies.size() + 1));
      strategies.push_back(static_cast<int>(integer(l, *s, "strategies", 1, 1000)));
    }
    if (static_cast<int>(strategies.size()) < players)
      fail(lines_.back().number, "missing 'strategies=<k>' lines: need one per player");

    long profiles = 1;
    for (int s : strategies) {
      profiles *= s;
      if (profiles > 10'000'000) fail(head.number, "payoff tensor too large");
    }
    FiniteGame shape(strategies, std::vector<std::vector<double>>(
                                     static_cast<std::size_t>(players), std::vector<double>(static_cast<std::size_t>(profiles))));
    std::vector<std::vector<double>> pay(static_cast<std::size_t>(players),
                                         std::vector<double>(static_cast<std::size_t>(profiles)));
    std::vector<std::vector<int>> seen(static_cast<std::size_t>(players),
                                       std::vector<int>(static_cast<std::size_t>(profiles), 0));
    for (; k < lines_.size(); ++k) {
      const Line& l = lines_[k];
      const auto t = split_ws(l.text);
      if (t[0] != "payoff") fail(l.number, "expected 'payoff <player> <strategies...> = <value>', got '" + t[0] + "'");
      const std::size_t arity = static_cast<std::size_t>(players) + 4;
      if (t.size() != arity || t[t.size() - 2] != "=")
        fail(l.number, "payoff row has wrong arity: expected 'payoff <player> " + std::to_string(players) +
                           " strategy indices = <value>'");
      const int i = static_cast<int>(integer(l, t[1], "player", 1, players)) - 1;
      std::vector<int> profile;
      for (int j = 0; j < players; ++j)
        profile.push_back(static_cast<int>(integer(l, t[2 + static_cast<std::size_t>(j)],
                                                   "strategy of player " + std::to_string(j + 1), 1,
                                                   strategies[static_cast<std::size_t>(j)])) -
                          1);
      const int idx = shape.profile_index(profile);
      auto& mark = seen[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)];
      if (mark != 0) fail(l.number, "duplicate payoff cell (first given on line " + std::to_string(mark) + ")");
      mark = l.number;
      pay[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)] = number(l, t.back(), "value");
    }
    for (int i = 0; i < players; ++i) {
      for (int idx = 0; idx < profiles; ++idx) {
        if (seen[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)] == 0) {
          std::string cell;
          for (int s : shape.profile_of(idx)) cell += " " + std::to_string(s + 1);
          fail(lines_.back().number, "missing payoff cell: payoff " + std::to_string(i + 1) + cell);
        }
      }
    }
    return std::make_shared<FiniteGame>(strategies, pay);
  }

  GamePtr parse_congestion() {
    std::vector<CongestionGame::Resource> resources;
    std::map<std::string, int> resource_index;
    std::map<int, CongestionGame::Player> players;
    std::map<int, int> player_line;
    std::size_t k = 0;
    if (split_ws(lines_.front().text)[0] == "congestion-game") {
      if (split_ws(lines_.front().text).size() != 1) fail(lines_.front().number, "unexpected text after 'congestion-game'");
      k = 1;
    }
    for (; k < lines_.size(); ++k) {
      const Line& l = lines_[k];
      const auto t = split_ws(l.text);
      if (t[0] == "resource") {
        if (t.size() != 4) fail(l.number, "expected 'resource <name> alpha=<a> beta=<b>'");
        const auto a = keyed(t[2], "alpha");
        const auto b = keyed(t[3], "beta");
        if (!a) fail(l.number, "expected 'alpha=<a>' in resource '" + t[1] + "'");
        if (!b) fail(l.number, "expected 'beta=<b>' in resource '" + t[1] + "'");
        CongestionGame::Resource r{t[1], number(l, *a, "alpha"), number(l, *b, "beta")};
        if (r.alpha < 0.0 || r.beta < 0.0) fail(l.number, "resource '" + t[1] + "': alpha and beta must be >= 0");
        if (resource_index.count(r.name) != 0) fail(l.number, "duplicate resource '" + r.name + "'");
        resource_index[r.name] = static_cast<int>(resources.size());
        resources.push_back(r);
      } else if (t[0] == "player") {
        if (t.size() != 3) fail(l.number, "expected 'player <i> load=<rho>'");
        const int i = static_cast<int>(integer(l, t[1], "player", 1, 100000));
        const auto load = keyed(t[2], "load");
        if (!load) fail(l.number, "expected 'load=<rho>' for player " + t[1]);
        const double rho = number(l, *load, "load");
        if (!(rho > 0.0)) fail(l.number, "field 'load': must be positive");
        if (players.count(i) != 0) fail(l.number, "duplicate player " + t[1]);
        players[i].load = rho;
        player_line[i] = l.number;
      } else if (t[0] == "path") {
        if (t.size() != 5 || t[3] != "=") fail(l.number, "expected 'path <i> <name> = <r1,r2,...>'");
        const int i = static_cast<int>(integer(l, t[1], "player", 1, 100000));
        if (players.count(i) == 0) fail(l.number, "path for undeclared player " + t[1]);
        CongestionGame::Path path{t[2], {}};
        std::stringstream list(t[4]);
        std::string name;
        while (std::getline(list, name, ',')) {
          const auto it = resource_index.find(name);
          if (it == resource_index.end()) fail(l.number, "path '" + t[2] + "' references undeclared resource '" + name + "'");
          path.resources.push_back(it->second);
        }
        if (path.resources.empty()) fail(l.number, "path '" + t[2] + "' uses no resources");
        players[i].paths.push_back(path);
      } else {
        fail(l.number, "unknown directive '" + t[0] + "' (expected resource, player or path)");
      }
    }
    if (resources.empty()) fail(lines_.back().number, "congestion game declares no resources");
    if (players.empty()) fail(lines_.back().number, "congestion game declares no players");
    std::vector<CongestionGame::Player> ordered;
    int expected = 1;
    for (const auto& [i, p] : players) {
      if (i != expected) fail(player_line[i], "players must be numbered 1.." + std::to_string(players.size()));
      if (p.paths.empty()) fail(player_line[i], "player " + std::to_string(i) + " has no paths");
      ordered.push_back(p);
      ++expected;
    }
    return std::make_shared<CongestionGame>(resources, ordered);
  }

  std::string source_;
  std::vector<Line> lines_;
};

}  // namespace detail

inline GamePtr parse_game_document(std::istream& in, const std::string& source = "<input>") {
  std::vector<detail::Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string s = detail::strip_comment(raw);
    if (!s.empty()) lines.push_back({number, std::move(s)});
  }
  return detail::DocumentParser(source, std::move(lines)).parse();
}

inline GamePtr parse_game_document_text(const std::string& text, const std::string& source = "<input>") {
  std::istringstream in(text);
  return parse_game_document(in, source);
}

inline GamePtr load_game_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open game document '" + path + "'");
  return parse_game_document(in, path);
}

}  // namespace gameda::cli
