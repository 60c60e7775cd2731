// Command-line front end: subcommand selection plus config-file loading,
// with --seed/--out/--workers overriding the file.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fid/config.hpp"
#include "fid/runner.hpp"
#include "fid/util/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"matrix ensembles of infinitely divisible laws: spectra, targets, checks"};
  app.set_version_flag("--version", fid::version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 0;
  std::string which;
  std::vector<std::string> positionals;

  std::vector<CLI::Option*> seed_opts, out_opts, workers_opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    seed_opts.push_back(sub->add_option("--seed", seed, "master seed override"));
    out_opts.push_back(sub->add_option("--out", out, "output directory override"));
    workers_opts.push_back(sub->add_option("--workers", workers, "worker thread count override"));
  };
  add_common(app.add_subcommand("list-classes", "print the stochastic-integral class catalog"));
  add_common(app.add_subcommand("simulate", "sample replica spectra into a run directory"));
  add_common(app.add_subcommand("target", "write the limiting spectral density grid"));
  CLI::App* cmp = app.add_subcommand("compare", "compare a finished run against a target CSV");
  add_common(cmp);
  cmp->add_option("paths", positionals, "run directory [target CSV]")->expected(0, 2);
  CLI::App* chk = app.add_subcommand("check", "run a verification fixture");
  add_common(chk);
  chk->add_option("which", which, "characteristic | polar | pathway | kernels");

  CLI11_PARSE(app, argc, argv);

  try {
    fid::Config cfg;
    if (!config_path.empty()) cfg = fid::load_config_file(config_path);
    cfg.command = app.get_subcommands().front()->get_name();
    for (auto* o : seed_opts)
      if (o->count()) cfg.seed = seed;
    for (auto* o : out_opts)
      if (o->count()) cfg.out = out;
    for (auto* o : workers_opts)
      if (o->count()) cfg.workers = workers;
    if (!which.empty()) cfg.check = which;
    return fid::run_command(cfg, positionals);
  } catch (const fid::Error& e) {
    nlohmann::json err;
    err["error"] = {{"code", e.code()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = {{"code", "internal_error"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
}
