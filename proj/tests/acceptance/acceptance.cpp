// Acceptance suite: one line per criterion, "PASS" or "FAIL", with the
// measured figure next to the tolerance it is held to.
//
//   acceptance              run every criterion
//   acceptance 3 8b         run the named criteria
//
// Exit status is 0 iff every criterion that ran passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ginibre/cli.hpp"
#include "ginibre/density.hpp"
#include "ginibre/kernel_chiral.hpp"
#include "ginibre/kernel_ginibre.hpp"
#include "ginibre/mc.hpp"
#include "ginibre/specfun.hpp"

using namespace ginibre;
using cplx = std::complex<double>;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

cplx in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    const cplx z(u(rng), u(rng));
    if (std::abs(z) <= 1.0) return radius * z;
  }
}

cli::RunConfig verify_config(const std::string& ensemble, cplx lambda, std::uint64_t seed) {
  cli::RunConfig c;
  c.command = "verify";
  c.ensemble = ensemble;
  c.lambda = lambda;
  c.gamma = std::conj(lambda);
  c.samples = 1000000;
  c.seed = seed;
  c.shards = 4;
  return c;
}

Outcome z_score_campaign(const std::vector<cli::RunConfig>& configs, int needed) {
  int passed = 0;
  double worst = 0.0;
  for (const auto& c : configs) {
    const cli::VerifyReport r = cli::run_verify(c);
    passed += r.pass ? 1 : 0;
    worst = std::max(worst, r.z_score);
  }
  const int total = static_cast<int>(configs.size());
  return {passed >= needed, std::to_string(passed) + "/" + std::to_string(total) +
                                " with |z| <= 4 (need " + std::to_string(needed) +
                                "), max |z| " + fmt("%.2f", worst)};
}

Outcome criterion_1() {
  std::mt19937_64 rng(1001);
  std::vector<cli::RunConfig> configs;
  std::uint64_t seed = 100;
  for (int N : {1, 2, 4}) {
    for (double tau : {0.0, 0.4, 0.8}) {
      for (int point = 0; point < 3; ++point) {
        cli::RunConfig c = verify_config("elliptic", in_disk(rng, 1.5), ++seed);
        c.N = N;
        c.tau = tau;
        configs.push_back(c);
      }
    }
  }
  return z_score_campaign(configs, 26);
}

Outcome criterion_2() {
  std::mt19937_64 rng(1002);
  std::vector<cli::RunConfig> configs;
  std::uint64_t seed = 200;
  for (int N : {1, 2}) {
    for (int nu : {0, 1, 2}) {
      for (double mu : {0.0, 0.5, 1.0}) {
        cli::RunConfig c = verify_config("chiral", in_disk(rng, 1.2), ++seed);
        c.N = N;
        c.nu = nu;
        c.mu = mu;
        c.n = 1.0;
        configs.push_back(c);
      }
    }
  }
  return z_score_campaign(configs, 17);
}

Outcome criterion_3() {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> size(1, 15), nu_dist(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0), n_dist(0.5, 2.0);
  double worst_e = 0.0, worst_c = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws / 2; ++i) {
    const EllipticParams p(size(rng), unit(rng));
    const cplx l = in_disk(rng, 2.0), g = in_disk(rng, 2.0);
    worst_e = std::max(worst_e, rel(k_elliptic(l, g, p).value, (l - g) * f_elliptic(l, g, p).value));
  }
  for (int i = 0; i < draws / 2; ++i) {
    const ChiralParams p(size(rng), nu_dist(rng), unit(rng), n_dist(rng));
    const cplx l = in_disk(rng, 1.5), g = in_disk(rng, 1.5);
    worst_c = std::max(worst_c,
                       rel(k_chiral(l, g, p).value, (l * l - g * g) * f_chiral(l, g, p).value));
  }
  const double worst = std::max(worst_e, worst_c);
  return {worst <= 1e-10, std::to_string(draws) + " draws, max rel err elliptic " +
                              fmt("%.2e", worst_e) + ", chiral " + fmt("%.2e", worst_c) +
                              " (tol 1e-10)"};
}

Outcome criterion_4() {
  std::mt19937_64 rng(1004);
  const double eps = 1e-6;
  double worst_tau = 0.0, worst_mu = 0.0;
  int points = 0;
  // 50 elliptic points, N = 1..5
  for (int N = 1; N <= 5; ++N) {
    for (int k = 0; k < 10; ++k, ++points) {
      const cplx l = in_disk(rng, 1.0), g = in_disk(rng, 1.0);
      worst_tau = std::max(worst_tau, rel(f_elliptic(l, g, {N, eps}).value, f_elliptic(l, g, {N, 0.0}).value));
    }
  }
  // 50 chiral points, N = 1..3, nu = 0..2; F against the incomplete-Bessel
  // form and K against its (lambda^2 - gamma^2) multiple
  for (int k = 0; k < 50; ++k, ++points) {
    const int N = 1 + k % 3, nu = (k / 3) % 3;
    const cplx l = in_disk(rng, 1.0), g = in_disk(rng, 1.0);
    const ChiralParams near(N, nu, 1.0 - eps, 1.0);
    worst_mu = std::max(worst_mu, rel(f_chiral(l, g, near).value,
                                      f_chiral_max_asymmetry(l, g, N, nu, 1.0).value));
    worst_mu = std::max(worst_mu, rel(k_chiral(l, g, near).value,
                                      k_chiral_max_asymmetry(l, g, N, nu, 1.0).value));
  }
  const double worst = std::max(worst_tau, worst_mu);
  return {worst <= 1e-5, std::to_string(points) + " points, max rel dev tau->0 " +
                             fmt("%.2e", worst_tau) + ", mu->1 " + fmt("%.2e", worst_mu) +
                             " (tol 1e-5)"};
}

Outcome criterion_5() {
  std::mt19937_64 rng(1005);
  double worst_h = 0.0, worst_l = 0.0;
  for (double tau : {0.1, 0.5, 0.9}) {
    for (int trial = 0; trial < 20; ++trial) {
      const cplx z = in_disk(rng, 3.0);
      const auto seq = scaled_hermite_seq(z, tau, 30);
      for (int k = 0; k <= 30; ++k) worst_h = std::max(worst_h, rel(seq[k], hermite_integral_oracle(z, tau, k)));
    }
  }
  for (int nu : {0, 1, 3}) {
    for (double d : {0.2, 1.0}) {
      for (int trial = 0; trial < 20; ++trial) {
        const cplx z = in_disk(rng, 3.0);
        const auto seq = scaled_laguerre_seq(z, d, nu, 20);
        for (int k = 0; k <= 20; ++k) {
          const cplx want = (k % 2 ? -1.0 : 1.0) * std::exp(log_factorial(k)) * std::pow(d, k) *
                            laguerre_series_oracle(k, nu, z * z / d);
          worst_l = std::max(worst_l, rel(seq[k], want));
        }
      }
    }
  }
  return {std::max(worst_h, worst_l) <= 1e-8,
          "max rel err Hermite " + fmt("%.2e", worst_h) + ", Laguerre " + fmt("%.2e", worst_l) +
              " (tol 1e-8)"};
}

Outcome criterion_6() {
  double closed = 0.0;
  for (double tau : {0.0, 0.4, 0.8, 1.0})
    closed = std::max(closed, rel(f_elliptic(0.0, 0.0, {1, tau}).value, 1.0 + tau));
  closed = std::max(closed, rel(f_chiral(1.0, 1.0, {1, 0, 1.0, 2.0}).value, 2.0));
  closed = std::max(closed, rel(f_chiral(0.5, 2.0, {1, 0, 1.0, 2.0}).value, 2.0));
  for (double n : {0.5, 1.0, 2.0})
    closed = std::max(closed, rel(f_chiral(0.0, 0.0, {1, 0, 0.0, n}).value, 3.0 / (n * n)));

  struct Anchor {
    EnsembleParams params;
    cplx lambda, gamma, want;
  };
  const std::vector<Anchor> anchors{{EllipticParams(1, 0.4), 0.0, 0.0, 1.4},
                                    {ChiralParams(1, 0, 1.0, 2.0), 1.0, 1.0, 2.0},
                                    {ChiralParams(1, 0, 0.0, 2.0), 0.0, 0.0, 0.75}};
  double worst_z = 0.0;
  std::uint64_t seed = 600;
  for (const auto& a : anchors) {
    const MCEstimate est = mc_charpoly_product(a.params, a.lambda, a.gamma, 1000000, ++seed, 4);
    const cplx d = est.mean - a.want;
    worst_z = std::max(worst_z, std::max(std::abs(d.real()), std::abs(d.imag())) / est.stderr);
  }
  return {closed <= 1e-12 && worst_z <= 3.0,
          "closed form max rel err " + fmt("%.1e", closed) + " (tol 1e-12), MC max |z| " +
              fmt("%.2f", worst_z) + " (tol 3)"};
}

Outcome criterion_7() {
  const SpectrumSummary chiral = spectrum_ensemble(ChiralParams(5, 3, 0.7, 1.0), 100, 701, 4);
  const SpectrumSummary ell = spectrum_ensemble(EllipticParams(200, 0.5), 50, 702, 4);
  const bool chiral_ok = chiral.min_zero_count == 3 && chiral.max_zero_count == 3 &&
                         chiral.max_chiral_residual <= 1e-8 && chiral.max_pairing_residual <= 1e-8;
  const double inside = 1.0 - ell.outside_fraction;
  return {chiral_ok && inside >= 0.99,
          "chiral zero modes " + std::to_string(chiral.min_zero_count) + ".." +
              std::to_string(chiral.max_zero_count) + " (need 3), +- residual " +
              fmt("%.1e", chiral.max_chiral_residual) + " ||M|| (tol 1e-8); elliptic inside " +
              fmt("%.4f", inside) + " (need 0.99)"};
}

Outcome criterion_8a() {
  const GridSpec grid{-4.0, 4.0, 16, -4.0, 4.0, 16};
  const WeightRegistry reg = WeightRegistry::with_defaults();
  const DensityGrid closed =
      complex_density_elliptic(grid, {8, 0.0}, reg.get("ginibre"), {Normalization::Raw, 6});
  const DensityGrid hist = mc_density_histogram(EllipticParams(10, 0.0), 100000, grid, 801, 4);
  const DensityComparison c = compare_density(closed, hist, 500);
  return {c.cells_used > 0 && c.max_relative_deviation <= 0.10,
          "N=8 kernel vs 10x10 samples, " + std::to_string(c.cells_used) +
              " cells with >= 500 counts, max rel dev " + fmt("%.4f", c.max_relative_deviation) +
              " (tol 0.10)"};
}

Outcome criterion_8b() {
  const WeightRegistry reg = WeightRegistry::with_defaults();
  const double target = std::sqrt(2.0 / std::numbers::pi);
  double worst = 0.0, value = 0.0;
  for (cplx z : {cplx(0.0, 3.0), cplx(0.0, -3.0), cplx(1.0, 3.0), cplx(-2.0, -3.0)}) {
    const double v = elliptic_density_point(z, {200, 0.0}, reg.get("ginibre"));
    if (std::abs(v / target - 1.0) >= worst) {
      worst = std::abs(v / target - 1.0);
      value = v;
    }
  }
  return {worst <= 0.01, "raw density at N=200, |Im z|=3: " + fmt("%.5f", value) + " vs sqrt(2/pi) " +
                             fmt("%.5f", target) + ", rel dev " + fmt("%.4f", worst) + " (tol 0.01)"};
}

Outcome criterion_9() {
  auto run = [](const std::vector<std::string>& args, const char* threads) {
    setenv("GINIBRE_THREADS", threads, 1);
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    unsetenv("GINIBRE_THREADS");
    return std::to_string(code) + out.str();
  };
  const std::vector<std::vector<std::string>> commands{
      {"verify", "--N", "3", "--tau", "0.4", "--lambda", "0.6+0.5i", "--gamma", "0.6-0.5i",
       "--samples", "200000", "--seed", "91", "--shards", "8"},
      {"verify", "--ensemble", "chiral", "--N", "2", "--nu", "1", "--mu", "0.5", "--lambda",
       "0.9+0.2i", "--gamma", "0.9-0.2i", "--samples", "200000", "--seed", "92", "--shards", "8"},
      {"spectrum", "--N", "30", "--tau", "0.3", "--samples", "200", "--seed", "93", "--shards", "8"},
      {"spectrum", "--ensemble", "chiral", "--N", "5", "--nu", "3", "--mu", "0.7", "--samples",
       "200", "--seed", "94", "--shards", "8"}};
  int identical = 0;
  for (const auto& args : commands) {
    const std::string a = run(args, "1");
    const std::string b = run(args, "1");
    const std::string c = run(args, "4");
    identical += (a == b && a == c && a[0] == '0') ? 1 : 0;
  }
  const int total = static_cast<int>(commands.size());
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " runs bit-identical across repeats and thread counts"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"1", "elliptic closed form vs Monte Carlo", 300, criterion_1},
      {"2", "chiral closed form vs Monte Carlo", 300, criterion_2},
      {"3", "kernel identities", 30, criterion_3},
      {"4", "tau -> 0 and mu -> 1 limits", 5, criterion_4},
      {"5", "special-function oracles", 10, criterion_5},
      {"6", "Gaussian-moment anchors", 300, criterion_6},
      {"7", "spectral structure", 120, criterion_7},
      {"8a", "tau = 0 density vs histogram", 300, criterion_8a},
      {"8b", "bulk density constant", 300, criterion_8b},
      {"9", "determinism", 300, criterion_9},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool all_pass = true;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.budget_seconds) + " s budget";
    }
    all_pass = all_pass && o.pass;
    std::printf("%s [%s] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion\n");
    return 2;
  }
  return all_pass ? 0 : 1;
}
