// Acceptance gate: ten numbered criteria, one PASS/FAIL line each, covering
// the known-limit spectral laws, the dual sampling pathways, the exact
// matrix-level identities, the pushforward oracles, the kernel round trips,
// the free-law engine, and the determinism and structure invariants.
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "fid/catalog.hpp"
#include "fid/checks.hpp"
#include "fid/free_transforms.hpp"
#include "fid/integrated_law.hpp"
#include "fid/kernel.hpp"
#include "fid/matrix_integral.hpp"
#include "fid/runner.hpp"
#include "fid/spectra.hpp"
#include "fid/util/error.hpp"
#include "fid/util/rng.hpp"
#include "fid/util/sha256.hpp"

using namespace fid;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

int g_failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
  std::printf("%s | criterion %2d | %s | %s\n", pass ? "PASS" : "FAIL", id, label,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("fidlab_acc_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<double> pooled_values(const fs::path& run_dir) {
  std::vector<double> xs;
  FILE* f = std::fopen((run_dir / "pooled_cdf.csv").string().c_str(), "r");
  if (!f) throw Error(errc::io_error, "missing pooled file");
  char line[256];
  if (!std::fgets(line, sizeof line, f)) {
    std::fclose(f);
    throw Error(errc::io_error, "empty pooled file");
  }
  double x, c;
  while (std::fscanf(f, "%lf,%lf", &x, &c) == 2) xs.push_back(x);
  std::fclose(f);
  return xs;
}

double pooled_ks(const std::string& mu, const Params& params, int d, int replicas,
                 const std::string& tag, double (*cdf)(double)) {
  Config cfg;
  cfg.command = "simulate";
  cfg.model = "direct";
  cfg.mu = mu;
  cfg.mu_params = params;
  cfg.d = d;
  cfg.replicas = replicas;
  cfg.seed = kSeed;
  cfg.workers = 1;
  cfg.out = fresh_dir(tag).string();
  cmd_simulate(cfg);
  EmpiricalCdf emp(pooled_values(cfg.out));
  return ks_distance(emp, [&](double x) { return cdf(x); });
}

double sc_cdf(double x) { return semicircle_cdf(x, 1.0); }

bool all_rows(const CheckReport& rep, std::string& detail) {
  double worst = 0.0;
  std::string worst_name;
  int failed = 0;
  for (const auto& r : rep.rows) {
    double ratio = r.bound > 0.0 ? r.stat / r.bound : (r.stat == 0.0 ? 0.0 : 2.0);
    if (ratio > worst) {
      worst = ratio;
      worst_name = r.name;
    }
    if (!r.pass) ++failed;
  }
  detail = fmt("%zu rows, %d failed, tightest margin %.3f of allowance (%s)",
               rep.rows.size(), failed, worst, worst_name.c_str());
  return rep.pass;
}

// ---- criteria ------------------------------------------------------------

void criterion_semicircle() {
  double ks = pooled_ks("gaussian", {{"mean", "0"}, {"var", "1"}}, 200, 50, "c1", sc_cdf);
  report(1, "semicircle limit, direct gaussian model", ks <= 0.05,
         fmt("pooled KS %.4f <= 0.05 at d=200, 50 replicas", ks));
}

void criterion_mp() {
  double ks = pooled_ks("poisson", {{"rate", "1"}}, 200, 50, "c2", marchenko_pastur_cdf);
  report(2, "square-law limit, direct unit poisson model", ks <= 0.07,
         fmt("pooled KS %.4f <= 0.07 at d=200, 50 replicas", ks));
}

void criterion_pathways() {
  CheckReport rep = run_pathway_equivalence(kSeed);
  double min_p = 1.0;
  for (const auto& r : rep.rows) min_p = std::min(min_p, r.stat);
  report(3, "pathway spectral equivalence, three kernel pairs", rep.pass,
         fmt("smallest permutation p-value %.3f > 0.01", min_p));
}

void criterion_characteristic() {
  CheckReport rep = run_characteristic_matrix(kSeed);
  std::string detail;
  bool pass = all_rows(rep, detail);
  report(4, "trace characteristic-function identity", pass, detail);
}

void criterion_polar() {
  CheckReport rep = run_polar_sets(kSeed);
  std::string detail;
  bool pass = all_rows(rep, detail);
  report(5, "polar jump-event rates", pass, detail);
}

void criterion_pushforward_counts() {
  LevyTriplet mu = make_law("poisson", {{"rate", "1"}});  // unit jump atom
  Kernel h = make_kernel("ou_exp");
  bool pass = true;
  std::string detail;
  double worst = 0.0;

  LevyMeasure pushed = pushforward_measure(mu.nu, h);
  for (auto [a, b] : {std::pair{0.1, 0.5}, std::pair{0.5, 0.9}}) {
    double exact = pushed.radial_mass(+1, a, b);
    if (std::abs(exact - std::log(b / a)) > 1e-9) pass = false;
  }

  IntegralOptions opt;
  opt.keep_jumps = true;
  Rng rng = replica_stream(kSeed, 600);
  for (int d : {2, 5}) {
    PathIntegralSimulator sim(d, mu, h, opt);
    int n = d == 2 ? 400 : 200;
    double band_a[2] = {0.1, 0.5}, band_b[2] = {0.5, 0.9};
    double obs[2] = {0.0, 0.0};
    long long negative = 0;
    for (int i = 0; i < n; ++i) {
      IntegralSample s = sim.sample(rng);
      for (const auto& j : s.jumps) {
        if (j.x < 0.0) ++negative;
        double norm = h(j.t) * j.x;
        for (int k = 0; k < 2; ++k)
          if (norm > band_a[k] && norm < band_b[k]) obs[k] += 1.0;
      }
    }
    if (negative != 0) pass = false;
    for (int k = 0; k < 2; ++k) {
      double lambda = n * d * std::log(band_b[k] / band_a[k]);
      double z = (obs[k] - lambda) / std::sqrt(lambda);
      worst = std::max(worst, std::abs(z));
      if (std::abs(z) > 3.0) pass = false;
    }
  }
  report(6, "pushforward band rates for the unit-atom driver", pass,
         fmt("exact masses match log(b/a); worst count z-score %.2f <= 3", worst));
}

void criterion_profile_oracles() {
  struct Row {
    const char* class_id;
    LevyTriplet mu;
    const char* kernel;
    int sign;
    double lo, hi;
  };
  LevyTriplet gam = make_law("gamma");
  LevyTriplet st = make_law("sym_stable", {{"alpha", "1.5"}});
  std::vector<Row> rows = {
      {"ggc", gam, "ou_exp", +1, 0.05, 3.0},
      {"thorin", gam, "e1_inv", +1, 0.05, 3.0},
      {"thorin_alt", gam, "log_inv", +1, 0.05, 3.0},
      {"selfdecomposable", gam, "ou_exp", +1, 0.05, 3.0},
      {"type_g", st, "normal_tail_inv", +1, 0.05, 3.0},
      {"m_class", st, "phi_over_t_inv", +1, 0.05, 3.0},
      {"jurek", gam, "linear_t", +1, 0.05, 3.0},
  };
  bool pass = true;
  double worst = 0.0;
  for (const auto& row : rows) {
    Kernel h = make_kernel(row.kernel);
    LevyMeasure pushed = pushforward_measure(row.mu.nu, h);
    for (int i = 0; i < 20; ++i) {
      double r = row.lo * std::pow(row.hi / row.lo, (i + 0.5) / 20.0);
      double want = radial_profile_reference(row.class_id, row.mu, h, row.sign, r);
      double got = pushed.density_at(row.sign > 0 ? r : -r);
      double rel = std::abs(got - want) / std::max(std::abs(want), 1e-12);
      worst = std::max(worst, rel);
      if (rel > 1e-5) pass = false;
    }
  }

  LevyTriplet atom = make_law("poisson", {{"rate", "1"}});
  double arc_mass = pushforward_measure(atom.nu, make_kernel("cos_arc")).mass_above(0.0);
  if (std::abs(arc_mass - 1.0) > 1e-8) pass = false;

  report(7, "closed-form radial profiles vs pushforward", pass,
         fmt("7 classes x 20 points, max rel err %.2e <= 1e-5; arcsine mass gap %.1e",
             worst, std::abs(arc_mass - 1.0)));
}

void criterion_kernel_roundtrips() {
  CheckReport rep = run_kernel_roundtrips();
  std::string detail;
  bool pass = all_rows(rep, detail);
  report(8, "kernel inverses and exact moments", pass, detail);
}

void criterion_free_engine() {
  bool pass = true;
  double worst_density = 0.0, worst_resid = 0.0;

  FreeLaw sc(make_law("gaussian", {{"mean", "0"}, {"var", "1"}}));
  for (int i = 0; i <= 40; ++i) {
    double x = -1.9 + i * (3.8 / 40.0);
    worst_density = std::max(worst_density,
                             std::abs(sc.density(x) - semicircle_density(x, 1.0)));
    std::complex<double> zeta(x, 1e-6);
    std::complex<double> g = sc.cauchy(zeta);
    worst_resid = std::max(
        worst_resid, std::abs(1.0 / g + sc.free_cumulant_fast(g) / g - zeta) /
                         (1.0 + std::abs(zeta)));
  }
  FreeLaw mp(make_law("poisson", {{"rate", "1"}}));
  for (int i = 0; i <= 40; ++i) {
    double x = 0.15 + i * (3.7 / 40.0);
    worst_density = std::max(worst_density,
                             std::abs(mp.density(x) - marchenko_pastur_density(x)));
    std::complex<double> zeta(x, 1e-6);
    std::complex<double> g = mp.cauchy(zeta);
    worst_resid = std::max(
        worst_resid, std::abs(1.0 / g + mp.free_cumulant_fast(g) / g - zeta) /
                         (1.0 + std::abs(zeta)));
  }
  if (worst_density > 1e-3 || worst_resid > 1e-10) pass = false;
  report(9, "free-law densities and transform residuals", pass,
         fmt("max |density gap| %.2e <= 1e-3, max residual %.2e <= 1e-10",
             worst_density, worst_resid));
}

void criterion_invariants() {
  bool pass = true;
  std::string why;

  // structural invariants over a mixed matrix test set
  std::vector<LevyTriplet> laws = {
      make_law("gamma"),
      make_law("compound_poisson", {{"rate", "1.2"}, {"jumps", "0.5:1,-1.3:0.4"}}),
      make_law("poisson", {{"rate", "2"}}),
  };
  Rng rng = replica_stream(kSeed, 1000);
  for (std::size_t li = 0; li < laws.size(); ++li) {
    for (int d : {2, 3}) {
      EnsembleOptions opt;
      opt.keep_jumps = true;
      MatrixEnsemble ens(d, laws[li], opt);
      for (int rep = 0; rep < 30; ++rep) {
        MatrixSample s = ens.sample(rng);
        if ((s.m - s.m.adjoint()).norm() > 1e-10) { pass = false; why = "hermiticity"; }
        Mat rebuilt = s.drift * Mat::Identity(d, d) + s.gaussian;
        double jump_trace = 0.0;
        bool all_positive = true;
        for (const auto& j : s.jumps) {
          if (std::abs(j.u.norm() - 1.0) > 1e-10) { pass = false; why = "direction"; }
          rebuilt += j.x * (j.u * j.u.adjoint());  // rank-one by construction
          jump_trace += j.x;
          all_positive = all_positive && j.x > 0.0;
        }
        if ((s.m - rebuilt).norm() > 1e-9) { pass = false; why = "rank-one rebuild"; }
        double tr_want = d * s.drift + s.gaussian.trace().real() + jump_trace;
        if (std::abs(s.m.trace().real() - tr_want) > 1e-9 * (1.0 + std::abs(tr_want))) {
          pass = false;
          why = "trace consistency";
        }
        if (li == 2 && all_positive && ens.gaussian_sigma2() == 0.0 &&
            std::abs(ens.drift_coefficient()) < 1e-12) {
          std::vector<double> eig = hermitian_eigenvalues(s.m);
          if (eig.front() < -1e-10) { pass = false; why = "positivity"; }
        }
      }
    }
  }

  // byte determinism across reruns and worker counts
  auto hash_run = [](int workers, const std::string& tag) {
    Config cfg;
    cfg.command = "simulate";
    cfg.mu = "gamma";
    cfg.d = 8;
    cfg.replicas = 6;
    cfg.seed = kSeed;
    cfg.workers = workers;
    cfg.out = fresh_dir(tag).string();
    cmd_simulate(cfg);
    std::string acc;
    for (int r = 0; r < 6; ++r)
      acc += sha256_file_hex(cfg.out + fmt("/spectrum_%04d.csv", r));
    acc += sha256_file_hex(cfg.out + "/pooled_cdf.csv");
    return acc;
  };
  std::string h1 = hash_run(1, "c10_a");
  std::string h2 = hash_run(1, "c10_b");
  std::string h3 = hash_run(3, "c10_c");
  if (h1 != h2) { pass = false; why = "rerun hash"; }
  if (h1 != h3) { pass = false; why = "worker-count hash"; }

#ifdef FIDLAB_BIN
  // the installed binary reproduces the same bytes
  fs::path cli_out = fresh_dir("c10_cli");
  fs::path cfg_file = cli_out / "exp.cfg";
  {
    FILE* f = std::fopen(cfg_file.string().c_str(), "w");
    std::fprintf(f,
                 "schema_version = 1\nmu = gamma\nd = 8\nreplicas = 6\nseed = %llu\n"
                 "workers = 2\nout = %s/artifacts\n",
                 static_cast<unsigned long long>(kSeed), cli_out.string().c_str());
    std::fclose(f);
  }
  std::string cmd = std::string(FIDLAB_BIN) + " simulate --config " +
                    cfg_file.string() + " >/dev/null 2>&1";
  if (std::system(cmd.c_str()) != 0) { pass = false; why = "cli exit"; }
  std::string cli_acc;
  for (int r = 0; r < 6; ++r)
    cli_acc += sha256_file_hex(cli_out.string() + fmt("/artifacts/spectrum_%04d.csv", r));
  cli_acc += sha256_file_hex(cli_out.string() + "/artifacts/pooled_cdf.csv");
  if (cli_acc != h1) { pass = false; why = "cli hash"; }
#endif

  report(10, "structure invariants and byte determinism", pass,
         pass ? "hermiticity, rank-one rebuild, positivity, trace, hashes all clean"
              : "violation: " + why);
}

}  // namespace

int main() {
  try {
    criterion_semicircle();
    criterion_mp();
    criterion_pathways();
    criterion_characteristic();
    criterion_polar();
    criterion_pushforward_counts();
    criterion_profile_oracles();
    criterion_kernel_roundtrips();
    criterion_free_engine();
    criterion_invariants();
  } catch (const Error& e) {
    std::printf("FAIL | unexpected error | %s | %s\n", e.code().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::printf("FAIL | unexpected error | %s\n", e.what());
    return 2;
  }
  std::printf("ACCEPTANCE: %d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
