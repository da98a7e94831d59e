#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "ginibre/cli.hpp"
#include "ginibre/kernel_chiral.hpp"
#include "ginibre/kernel_ginibre.hpp"
#include "ginibre/mc.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre::cli {

namespace {

using cplx = std::complex<double>;
using EllipticF = std::function<KernelValue(cplx, cplx, const EllipticParams&)>;

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// f_elliptic with the top recurrence coefficient scaled by 1 + 1e-6.
KernelValue corrupted_f_elliptic(cplx l, cplx g, const EllipticParams& p) {
  KernelValue v = f_elliptic(l, g, p);
  const auto cl = normalized_hermite_seq(l, p.tau(), p.N());
  const auto cg = normalized_hermite_seq(g, p.tau(), p.N());
  const double factorial = p.N() > kPrefactorExtractionThreshold ? 1.0 : std::exp(log_factorial(p.N()));
  v.value += 1e-6 * factorial * cl[p.N()] * cg[p.N()];
  return v;
}

cplx draw(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng)};
}

struct Suite {
  std::uint64_t seed;
  EllipticF f_ell;
  std::vector<SelftestCheck> checks;

  void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    SelftestCheck c;
    c.name = name;
    try {
      std::tie(c.pass, c.detail) = body();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    c.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    checks.push_back(std::move(c));
  }
};

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed, bool inject_fault) {
  Suite s{seed, inject_fault ? EllipticF(corrupted_f_elliptic) : EllipticF(
                                   [](cplx l, cplx g, const EllipticParams& p) { return f_elliptic(l, g, p); }),
          {}};

  s.check("hermite_vs_quadrature", [&] {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      const cplx z = draw(rng, 2.0);
      const double tau = 0.1 + 0.8 * (trial % 5) / 4.0;
      const auto seq = scaled_hermite_seq(z, tau, 12);
      for (int k = 0; k <= 12; k += 3) worst = std::max(worst, rel(seq[k], hermite_integral_oracle(z, tau, k)));
    }
    return std::pair{worst <= 1e-8, "max rel err " + fmt(worst)};
  });

  s.check("laguerre_vs_series", [&] {
    std::mt19937_64 rng(seed + 1);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      const cplx z = draw(rng, 2.0);
      const double d = 0.2 + 0.2 * (trial % 4);
      const int nu = trial % 3;
      const auto seq = scaled_laguerre_seq(z, d, nu, 10);
      for (int k = 0; k <= 10; ++k) {
        const double sign = (k % 2) ? -1.0 : 1.0;
        const cplx want = sign * std::exp(log_factorial(k)) * std::pow(d, k) *
                          laguerre_series_oracle(k, nu, z * z / d);
        worst = std::max(worst, rel(seq[k], want));
      }
    }
    return std::pair{worst <= 1e-8, "max rel err " + fmt(worst)};
  });

  s.check("elliptic_anchors", [&] {
    double worst = rel(s.f_ell(2.0, 3.0, {1, 0.0}).value, 7.0);
    for (double tau : {0.0, 0.4, 0.9}) worst = std::max(worst, rel(s.f_ell(0.0, 0.0, {1, tau}).value, 1.0 + tau));
    worst = std::max(worst, rel(s.f_ell(1.0, 1.0, {2, 0.0}).value, 5.0));
    worst = std::max(worst, rel(s.f_ell(1.0, 1.0, {2, 0.5}).value, f_elliptic(1.0, 1.0, {2, 0.5}).value));
    worst = std::max(worst, rel(k_elliptic(1.0, 0.0, {1, 0.0}).value, 1.0));
    return std::pair{worst <= 1e-12, "max rel err " + fmt(worst)};
  });

  s.check("chiral_anchors", [&] {
    double worst = rel(f_chiral(1.0, 1.0, {1, 0, 1.0, 2.0}).value, 2.0);
    worst = std::max(worst, rel(f_chiral(0.0, 0.0, {1, 0, 0.0, 2.0}).value, 0.75));
    worst = std::max(worst, rel(k_chiral(1.0, 0.0, {1, 0, 1.0, 2.0}).value, 1.0));
    const bool zero = f_chiral(0.0, {0.5, 0.5}, {2, 1, 0.5, 1.0}).value == cplx(0.0);
    return std::pair{zero && worst <= 1e-12, "max rel err " + fmt(worst)};
  });

  s.check("elliptic_kernel_identity", [&] {
    std::mt19937_64 rng(seed + 2);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      const EllipticParams p(1 + trial % 15, 0.33 * (trial % 4));
      const cplx l = draw(rng, 2.0), g = draw(rng, 2.0);
      worst = std::max(worst, rel(k_elliptic(l, g, p).value, (l - g) * s.f_ell(l, g, p).value));
    }
    return std::pair{worst <= 1e-10, "max rel err " + fmt(worst)};
  });

  s.check("chiral_kernel_identity", [&] {
    std::mt19937_64 rng(seed + 3);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      const ChiralParams p(1 + trial % 15, trial % 4, 0.3 * (trial % 4), 1.0);
      const cplx l = draw(rng, 1.2), g = draw(rng, 1.2);
      worst = std::max(worst, rel(k_chiral(l, g, p).value, (l * l - g * g) * f_chiral(l, g, p).value));
    }
    return std::pair{worst <= 1e-10, "max rel err " + fmt(worst)};
  });

  s.check("limits", [&] {
    std::mt19937_64 rng(seed + 4);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const int N = 1 + trial % 3;
      const cplx l = draw(rng, 1.0), g = draw(rng, 1.0);
      worst = std::max(worst, rel(s.f_ell(l, g, {N, 1e-6}).value, s.f_ell(l, g, {N, 0.0}).value));
      const ChiralParams near(N, trial % 3, 1.0 - 1e-6, 1.0);
      worst = std::max(worst, rel(f_chiral(l, g, near).value,
                                  f_chiral_max_asymmetry(l, g, N, trial % 3, 1.0).value));
    }
    return std::pair{worst <= 1e-5, "max rel err " + fmt(worst)};
  });

  auto mc_check = [&](const EnsembleParams& params, cplx l, cplx g, cplx closed, std::uint64_t offset) {
    const MCEstimate est = mc_charpoly_product(params, l, g, 200000, seed + offset, 4);
    const cplx d = est.mean - closed;
    const double z = std::max(std::abs(d.real()), std::abs(d.imag())) / est.stderr;
    return std::pair{z <= 4.0, "z " + fmt(z)};
  };
  s.check("mc_elliptic", [&] {
    const cplx l(0.7, 0.3);
    const EllipticParams p(2, 0.4);
    return mc_check(p, l, std::conj(l), s.f_ell(l, std::conj(l), p).value, 5);
  });
  s.check("mc_chiral", [&] {
    const cplx l(0.9, 0.2);
    const ChiralParams p(2, 1, 0.5, 1.0);
    return mc_check(p, l, std::conj(l), f_chiral(l, std::conj(l), p).value, 6);
  });

  s.check("chiral_zero_modes", [&] {
    const SpectrumSummary sum = spectrum_ensemble(ChiralParams(5, 3, 0.7, 1.0), 40, seed + 7, 2);
    const bool ok = sum.min_zero_count == 3 && sum.max_zero_count == 3 && sum.max_chiral_residual <= 1e-8;
    return std::pair{ok, "zero modes " + std::to_string(sum.min_zero_count) + ".." +
                             std::to_string(sum.max_zero_count) + ", residual " + fmt(sum.max_chiral_residual)};
  });

  s.check("determinism", [&] {
    const EllipticParams p(3, 0.2);
    const MCEstimate a = mc_charpoly_product(p, 0.5, 0.5, 5000, seed + 8, 3);
    const MCEstimate b = mc_charpoly_product(p, 0.5, 0.5, 5000, seed + 8, 3);
    return std::pair{a.mean == b.mean && a.stderr == b.stderr, "repeat identical"};
  });

  return std::move(s.checks);
}

}  // namespace ginibre::cli
