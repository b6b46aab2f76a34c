#include "pnpns/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pnpns/errors.hpp"

namespace pnpns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& msg) {
  std::ostringstream os;
  os << "config line " << line;
  if (!key.empty()) os << ", key '" << key << "'";
  os << ": " << msg;
  throw ConfigError(os.str());
}

double as_double(const std::string& v, int line, const std::string& key) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    fail(line, key, "expected a number, got '" + v + "'");
  }
  if (used != v.size()) fail(line, key, "expected a number, got '" + v + "'");
  return out;
}

int as_int(const std::string& v, int line, const std::string& key) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    fail(line, key, "expected an integer, got '" + v + "'");
  }
  if (used != v.size()) fail(line, key, "expected an integer, got '" + v + "'");
  return static_cast<int>(out);
}

std::string as_string(const std::string& v, int line, const std::string& key) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    fail(line, key, "expected a double-quoted string, got '" + v + "'");
  return v.substr(1, v.size() - 2);
}

bool as_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(line, key, "expected true or false, got '" + v + "'");
}

}  // namespace

int RunConfig::step_count() const {
  const double steps = t_final / time_step();
  return std::max(1, static_cast<int>(std::llround(steps)));
}

void RunConfig::validate() {
  if (n_cells < 4 || n_cells % 2 != 0)
    throw ConfigError("n_cells must be an even integer >= 4, got " + std::to_string(n_cells));
  if (!(length > 0)) throw ConfigError("length must be positive");
  if (tau && tau_ratio) throw ConfigError("set exactly one of tau and tau_ratio, not both");
  if (!tau && !tau_ratio) tau_ratio = 0.1;
  if (tau && !(*tau > 0)) throw ConfigError("tau must be positive");
  if (tau_ratio && !(*tau_ratio > 0)) throw ConfigError("tau_ratio must be positive");
  if (!(t_final > 0)) throw ConfigError("t_final must be positive");
  if (!(iter_tol > 0)) throw ConfigError("iter_tol must be positive");
  if (max_nonlinear_iters < 1) throw ConfigError("max_nonlinear_iters must be >= 1");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  if (initial_condition != "paper" && initial_condition != "uniform" &&
      initial_condition.rfind("file:", 0) != 0)
    throw ConfigError("initial_condition must be \"paper\", \"uniform\" or \"file:<path>\", got \"" +
                      initial_condition + "\"");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  bool have_n = false, have_t = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = trim(strip_comment(raw));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(line, "", "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string val = trim(body.substr(eq + 1));
    if (key.empty()) fail(line, "", "empty key");
    if (!seen.insert(key).second) fail(line, key, "duplicate key");

    if (key == "n_cells") {
      cfg.n_cells = as_int(val, line, key);
      have_n = true;
    } else if (key == "length") {
      cfg.length = as_double(val, line, key);
    } else if (key == "tau_ratio") {
      cfg.tau_ratio = as_double(val, line, key);
    } else if (key == "tau") {
      cfg.tau = as_double(val, line, key);
    } else if (key == "t_final") {
      cfg.t_final = as_double(val, line, key);
      have_t = true;
    } else if (key == "initial_condition") {
      cfg.initial_condition = as_string(val, line, key);
    } else if (key == "iter_tol") {
      cfg.iter_tol = as_double(val, line, key);
    } else if (key == "max_nonlinear_iters") {
      cfg.max_nonlinear_iters = as_int(val, line, key);
    } else if (key == "output_dir") {
      cfg.output_dir = as_string(val, line, key);
    } else if (key == "snapshot_every") {
      cfg.snapshot_every = as_int(val, line, key);
    } else if (key == "debug_first_order") {
      cfg.debug_first_order = as_bool(val, line, key);
    } else {
      fail(line, key, "unknown key");
    }
  }
  if (!have_n) throw ConfigError("missing required key 'n_cells'");
  if (!have_t) throw ConfigError("missing required key 't_final'");
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace pnpns
