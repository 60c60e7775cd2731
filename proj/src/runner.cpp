#include "fid/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fid/free_transforms.hpp"
#include "fid/integrated_law.hpp"
#include "fid/kernel.hpp"
#include "fid/matrix_integral.hpp"
#include "fid/matrix_model.hpp"
#include "fid/spectra.hpp"
#include "fid/util/error.hpp"
#include "fid/util/rng.hpp"
#include "fid/util/sha256.hpp"

namespace fid {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json params_json(const Params& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

json config_json(const Config& cfg) {
  json j;
  j["schema_version"] = 1;
  j["command"] = cfg.command;
  j["model"] = cfg.model;
  j["mu"] = cfg.mu;
  j["mu_params"] = params_json(cfg.mu_params);
  j["kernel"] = cfg.kernel;
  j["kernel_params"] = params_json(cfg.kernel_params);
  j["check"] = cfg.check;
  j["d"] = cfg.d;
  j["replicas"] = cfg.replicas;
  j["eps"] = cfg.eps;
  j["ar_substitute"] = cfg.ar_substitute;
  j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["out"] = cfg.out;
  j["grid_points"] = cfg.grid_points;
  return j;
}

struct FileEntry {
  std::string name;
  std::size_t bytes = 0;
  std::string sha256;
};

void write_file(const fs::path& dir, const std::string& name, const std::string& body,
                std::vector<FileEntry>& inventory) {
  fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_error, "cannot write '" + p.string() + "'");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.close();
  if (!out) throw Error(errc::io_error, "short write on '" + p.string() + "'");
  inventory.push_back({name, body.size(), sha256_hex(body)});
}

json inventory_json(const std::vector<FileEntry>& inventory) {
  json files = json::array();
  for (const auto& f : inventory)
    files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  return files;
}

void dump_json(const fs::path& dir, const std::string& name, const json& j) {
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_error, "cannot write '" + (dir / name).string() + "'");
  out << j.dump(2) << '\n';
}

LevyTriplet target_triplet(const Config& cfg) {
  LevyTriplet mu = make_law(cfg.mu, cfg.mu_params);
  if (cfg.model == "direct") return mu;
  Kernel h = make_kernel(cfg.kernel, cfg.kernel_params);
  return integrate_law(mu, h).triplet;
}

int worker_count(const Config& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(r) for r in [0, n) on a pool; results land in caller-owned slots,
// so the schedule never affects output bytes.
void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int r = 0; r < n; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto drain = [&] {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= n) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::string version_string() { return "fidlab 1.0.0"; }

std::string list_classes_text() {
  auto rows = class_catalog();
  std::ostringstream out;
  out << " # | class            | kernel           | h | admissible driver\n";
  int i = 0;
  for (const auto& r : rows) {
    char head[64];
    std::snprintf(head, sizeof(head), "%2d | %-16s | %-16s | ", ++i, r.id.c_str(),
                  r.kernel.c_str());
    out << head << r.h_text << " | " << r.driver << '\n';
  }
  return out.str();
}

void cmd_simulate(const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  LevyTriplet mu = make_law(cfg.mu, cfg.mu_params);

  std::function<std::vector<double>(Rng&)> draw;
  if (cfg.model == "direct" || cfg.model == "integrated_direct") {
    EnsembleOptions opt;
    opt.eps = cfg.eps;
    opt.ar_substitute = cfg.ar_substitute;
    MatrixEnsemble ens = cfg.model == "direct"
                             ? MatrixEnsemble(cfg.d, mu, opt)
                             : integrated_ensemble(cfg.d, mu,
                                                   make_kernel(cfg.kernel, cfg.kernel_params), opt);
    draw = [ens](Rng& rng) { return hermitian_eigenvalues(ens.sample(rng).m); };
  } else {
    IntegralOptions opt;
    opt.eps = cfg.eps;
    opt.ar_substitute = cfg.ar_substitute;
    PathIntegralSimulator sim(cfg.d, mu, make_kernel(cfg.kernel, cfg.kernel_params), opt);
    draw = [sim](Rng& rng) { return hermitian_eigenvalues(sim.sample(rng).m); };
  }

  const int R = cfg.replicas;
  std::vector<std::vector<double>> spectra(R);
  parallel_for(R, worker_count(cfg), [&](int r) {
    Rng rng = replica_stream(cfg.seed, static_cast<std::uint64_t>(r));
    spectra[r] = draw(rng);
  });

  fs::create_directories(cfg.out);
  std::vector<FileEntry> inventory;
  for (int r = 0; r < R; ++r) {
    char name[32];
    std::snprintf(name, sizeof(name), "spectrum_%04d.csv", r);
    std::string body = "replica,index,lambda\n";
    for (std::size_t i = 0; i < spectra[r].size(); ++i)
      body += std::to_string(r) + "," + std::to_string(i) + "," + fmt(spectra[r][i]) + "\n";
    write_file(cfg.out, name, body, inventory);
  }

  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(R) * cfg.d);
  for (const auto& s : spectra) pooled.insert(pooled.end(), s.begin(), s.end());
  std::sort(pooled.begin(), pooled.end());
  std::string body = "x,cdf\n";
  for (std::size_t i = 0; i < pooled.size(); ++i)
    body += fmt(pooled[i]) + "," + fmt(static_cast<double>(i + 1) / pooled.size()) + "\n";
  write_file(cfg.out, "pooled_cdf.csv", body, inventory);

  json streams = json::array();
  for (int r = 0; r < R; ++r) {
    std::uint64_t s = cfg.seed ^ (0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(r) + 1));
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(splitmix64(s)));
    streams.push_back(hex);
  }
  const auto t1 = std::chrono::steady_clock::now();
  json manifest;
  manifest["version"] = version_string();
  manifest["config"] = config_json(cfg);
  manifest["seed"] = cfg.seed;
  manifest["replica_streams"] = streams;
  manifest["files"] = inventory_json(inventory);
  manifest["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  dump_json(cfg.out, "manifest.json", manifest);
}

void cmd_target(const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  LevyTriplet law = target_triplet(cfg);
  FreeLawOptions opt;
  opt.grid_points = cfg.grid_points;
  FreeLaw fl(law, opt);

  fs::create_directories(cfg.out);
  std::vector<FileEntry> inventory;
  json summary;
  summary["version"] = version_string();
  summary["config"] = config_json(cfg);

  std::string body = "x,density,cdf\n";
  if (auto atom = fl.point_mass()) {
    // Degenerate law: emit a sharp ramp so CDF interpolation reproduces the
    // step to within 1e-9.
    double c = *atom;
    double w = 1e-9 * (1.0 + std::abs(c));
    body += fmt(c - w) + ",0,0\n";
    body += fmt(c) + ",0,1\n";
    body += fmt(c + w) + ",0,1\n";
    summary["atom"] = {{"x", c}, {"mass", 1.0}};
    summary["support"] = {c, c};
    summary["escaped_mass"] = 0.0;
  } else {
    const auto& g = fl.grid();
    for (std::size_t i = 0; i < g.x.size(); ++i)
      body += fmt(g.x[i]) + "," + fmt(g.density[i]) + "," + fmt(g.cdf[i]) + "\n";
    summary["atom"] = nullptr;
    summary["support"] = {g.lo, g.hi};
    summary["escaped_mass"] = g.escaped;
  }
  write_file(cfg.out, "target.csv", body, inventory);
  summary["files"] = inventory_json(inventory);
  const auto t1 = std::chrono::steady_clock::now();
  summary["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  dump_json(cfg.out, "target_summary.json", summary);
}

namespace {

std::vector<std::vector<double>> read_csv_columns(const std::string& path, int min_cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;  // header
      continue;
    }
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(errc::io_error, "bad numeric cell '" + cell + "' in " + path);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(row.size()) < min_cols)
      throw Error(errc::io_error, "short row in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(errc::io_error, "no data rows in " + path);
  return rows;
}

}  // namespace

CompareOutcome cmd_compare(const Config& cfg, const std::string& run_dir,
                           const std::string& target_csv) {
  auto pooled_rows = read_csv_columns((fs::path(run_dir) / "pooled_cdf.csv").string(), 1);
  std::vector<double> xs;
  xs.reserve(pooled_rows.size());
  for (const auto& r : pooled_rows) xs.push_back(r[0]);
  EmpiricalCdf emp(std::move(xs));

  auto target_rows = read_csv_columns(target_csv, 3);
  std::vector<double> tx, tc;
  for (const auto& r : target_rows) {
    if (!tx.empty() && r[0] <= tx.back())
      throw Error(errc::not_monotone, "target grid must be strictly increasing");
    tx.push_back(r[0]);
    tc.push_back(r[2]);
  }
  auto target_cdf = [&](double x) {
    if (x <= tx.front()) return tc.front();
    if (x >= tx.back()) return tc.back();
    auto it = std::upper_bound(tx.begin(), tx.end(), x);
    std::size_t i = static_cast<std::size_t>(it - tx.begin());
    double t = (x - tx[i - 1]) / (tx[i] - tx[i - 1]);
    return tc[i - 1] + t * (tc[i] - tc[i - 1]);
  };

  CompareOutcome out;
  out.tolerance = cfg.tol;
  out.ks = ks_distance(emp, target_cdf);
  double lo = std::min(emp.sorted().front(), tx.front());
  double hi = std::max(emp.sorted().back(), tx.back());
  out.w1 = wasserstein1(emp, target_cdf, lo, hi);
  out.pass = out.ks <= cfg.tol;

  json report;
  report["version"] = version_string();
  report["run_dir"] = run_dir;
  report["target"] = target_csv;
  report["samples"] = emp.size();
  report["ks"] = out.ks;
  report["w1"] = out.w1;
  report["tolerance"] = out.tolerance;
  report["pass"] = out.pass;
  dump_json(run_dir, "compare_report.json", report);
  return out;
}

namespace {

// Polar check against the configured law.  A law without jumps passes
// trivially: there is nothing to count.
CheckReport configured_polar_report(const Config& cfg) {
  CheckReport rep;
  rep.title = "jump occupancy rates";
  LevyTriplet mu = make_law(cfg.mu, cfg.mu_params);
  if (mu.nu.is_zero()) {
    rep.add(cfg.mu + ": no jump measure, zero counts expected", 0.0, 0.0);
    return rep;
  }
  double m = mu.nu.min_abs_support();
  double big = mu.nu.max_abs_support();
  double lo = m > 0.0 ? 0.5 * m : 0.1;
  double hi = std::isfinite(big) ? 1.5 * big : std::max(1.0, 10.0 * lo);
  int d = std::max(2, cfg.d);
  Rng rng = replica_stream(cfg.seed, 7400);
  for (const auto& s : polar_form_check(mu, d, lo, hi, 0.0, rng))
    rep.add(cfg.mu + " d=" + std::to_string(d) + ": " + s.name, std::abs(s.zscore), 3.0);
  return rep;
}

CheckReport configured_pathway_report(const Config& cfg) {
  CheckReport rep;
  rep.title = "pathway equivalence";
  LevyTriplet mu = make_law(cfg.mu, cfg.mu_params);
  Kernel h = make_kernel(cfg.kernel, cfg.kernel_params);
  IntegralOptions oa;
  oa.eps = cfg.eps;
  oa.ar_substitute = cfg.ar_substitute;
  EnsembleOptions ob;
  ob.eps = cfg.eps;
  ob.ar_substitute = cfg.ar_substitute;
  Rng rng = replica_stream(cfg.seed, 9100);
  auto r = pathway_equivalence(mu, h, cfg.d, cfg.replicas, cfg.replicas, oa, ob, rng);
  rep.add_above(cfg.mu + " + " + cfg.kernel + " (permutation p)", r.p_value, 0.01);
  return rep;
}

}  // namespace

CheckReport cmd_check(const Config& cfg) {
  CheckReport rep;
  if (cfg.check == "characteristic") {
    rep = run_characteristic_matrix(cfg.seed);
  } else if (cfg.check == "polar") {
    rep = configured_polar_report(cfg);
  } else if (cfg.check == "pathway") {
    rep = cfg.kernel.empty() ? run_pathway_equivalence(cfg.seed, cfg.d, cfg.replicas)
                             : configured_pathway_report(cfg);
  } else if (cfg.check == "kernels") {
    rep = run_kernel_roundtrips();
  } else {
    throw Error(errc::invalid_config,
                "check must be one of characteristic, polar, pathway, kernels");
  }

  fs::create_directories(cfg.out);
  json report;
  report["version"] = version_string();
  report["config"] = config_json(cfg);
  report["title"] = rep.title;
  report["pass"] = rep.pass;
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"name", r.name}, {"stat", r.stat}, {"bound", r.bound}, {"pass", r.pass}});
  report["rows"] = rows;
  dump_json(cfg.out, "check_report.json", report);
  return rep;
}

int run_command(const Config& cfg, const std::vector<std::string>& positionals) {
  try {
    if (cfg.command == "list-classes") {
      std::cout << list_classes_text();
      return 0;
    }
    if (cfg.command == "simulate") {
      cmd_simulate(cfg);
      std::cout << "wrote " << cfg.out << "/manifest.json\n";
      return 0;
    }
    if (cfg.command == "target") {
      cmd_target(cfg);
      std::cout << "wrote " << cfg.out << "/target.csv\n";
      return 0;
    }
    if (cfg.command == "compare") {
      std::string run_dir = positionals.size() > 0 ? positionals[0] : cfg.out;
      std::string target_csv = positionals.size() > 1
                                   ? positionals[1]
                                   : (fs::path(run_dir) / "target.csv").string();
      CompareOutcome out = cmd_compare(cfg, run_dir, target_csv);
      std::cout << (out.pass ? "PASS" : "FAIL") << " ks=" << fmt(out.ks)
                << " w1=" << fmt(out.w1) << " tol=" << fmt(out.tolerance) << "\n";
      return out.pass ? 0 : 1;
    }
    if (cfg.command == "check") {
      CheckReport rep = cmd_check(cfg);
      for (const auto& r : rep.rows)
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << " stat=" << fmt(r.stat)
                  << " bound=" << fmt(r.bound) << "\n";
      std::cout << (rep.pass ? "PASS" : "FAIL") << " " << rep.title << "\n";
      return rep.pass ? 0 : 1;
    }
    throw Error(errc::invalid_config, "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    json err;
    err["error"] = {{"code", e.code()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"code", "internal_error"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
}

}  // namespace fid
