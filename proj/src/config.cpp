#include "fid/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "fid/util/error.hpp"

namespace fid {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& msg) { throw Error(errc::invalid_config, msg); }

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    bad(key + ": expected a number, got '" + v + "'");
  }
  if (used != v.size()) bad(key + ": trailing characters in '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    bad(key + ": expected an integer, got '" + v + "'");
  }
  if (used != v.size()) bad(key + ": trailing characters in '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    bad(key + ": expected an unsigned integer, got '" + v + "'");
  }
  if (used != v.size()) bad(key + ": trailing characters in '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key + ": expected true/false, got '" + v + "'");
}

}  // namespace

Config parse_config_text(const std::string& text) {
  Config cfg;
  bool versioned = false;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      bad("line " + std::to_string(lineno) + ": expected key=value, got '" + trim(raw) + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) bad("line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) bad("duplicate key '" + key + "'");

    if (key == "schema_version") {
      if (val != "1") bad("unsupported schema_version '" + val + "'");
      versioned = true;
    } else if (key == "command") {
      cfg.command = val;
    } else if (key == "model") {
      cfg.model = val;
    } else if (key == "mu") {
      cfg.mu = val;
    } else if (key.rfind("mu.", 0) == 0) {
      std::string sub = key.substr(3);
      if (sub.empty()) bad("empty mu parameter name");
      cfg.mu_params[sub] = val;
    } else if (key == "kernel") {
      cfg.kernel = val;
    } else if (key.rfind("kernel.", 0) == 0) {
      std::string sub = key.substr(7);
      if (sub.empty()) bad("empty kernel parameter name");
      cfg.kernel_params[sub] = val;
    } else if (key == "check") {
      cfg.check = val;
    } else if (key == "d") {
      cfg.d = static_cast<int>(to_int(key, val));
    } else if (key == "replicas") {
      cfg.replicas = static_cast<int>(to_int(key, val));
    } else if (key == "eps") {
      cfg.eps = to_double(key, val);
    } else if (key == "ar_substitute") {
      cfg.ar_substitute = to_bool(key, val);
    } else if (key == "tol") {
      cfg.tol = to_double(key, val);
    } else if (key == "seed") {
      cfg.seed = to_u64(key, val);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(to_int(key, val));
    } else if (key == "out") {
      cfg.out = val;
    } else if (key == "grid_points") {
      cfg.grid_points = static_cast<int>(to_int(key, val));
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  if (!versioned) bad("missing schema_version");

  if (cfg.d < 1) bad("d must be >= 1");
  if (cfg.replicas < 1) bad("replicas must be >= 1");
  if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) bad("eps must lie in (0, 1]");
  if (!(cfg.tol > 0.0)) bad("tol must be positive");
  if (cfg.workers < 0) bad("workers must be >= 0");
  if (cfg.grid_points < 2) bad("grid_points must be >= 2");
  if (!cfg.model.empty() && cfg.model != "direct" && cfg.model != "integral" &&
      cfg.model != "integrated_direct")
    bad("model must be direct, integral, or integrated_direct");
  if ((cfg.model == "integral" || cfg.model == "integrated_direct") && cfg.kernel.empty())
    bad("model '" + cfg.model + "' needs a kernel");
  return cfg;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace fid
