#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hmix/core/autocorr.hpp"
#include "hmix/core/numerics.hpp"
#include "hmix/core/params.hpp"
#include "hmix/core/quadrature.hpp"
#include "hmix/core/rng.hpp"

using namespace hmix;

TEST_CASE("params derive densities and injection rates from beta") {
  auto p = ChainParams::discrete(3, 0.5, 0.75);
  CHECK(p.rho_a() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.rho_b() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(p.injection_rate_a() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(p.injection_rate_b() == doctest::Approx(std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("params reject invalid values and name the field") {
  auto field_of = [](auto&& make) -> std::string {
    try {
      make();
    } catch (const ParameterError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(field_of([] { ChainParams::discrete(0, 0.5, 0.6); }) == "n");
  CHECK(field_of([] { ChainParams::discrete(2, 0.0, 0.6); }) == "beta-a");
  CHECK(field_of([] { ChainParams::discrete(2, 0.5, 1.0); }) == "beta-b");
  CHECK(field_of([] { ChainParams::discrete(2, 0.7, 0.6); }) == "beta-b");
  CHECK(field_of([] { ChainParams::continuous(2, -1.0, 2.0); }) == "t-a");
  CHECK(field_of([] { ChainParams::continuous(2, 3.0, 2.0); }) == "t-b");
  CHECK_NOTHROW(ChainParams::discrete(2, 0.6, 0.6));  // equilibrium admitted
  CHECK_THROWS_AS(model_from_string("lattice"), ParameterError);
}

TEST_CASE("harmonic numbers") {
  CHECK(harmonic_number(0) == 0.0);
  CHECK(harmonic_number(1) == 1.0);
  // direct summation oracle
  double direct = 0.0;
  for (int k = 1; k <= 4; ++k) direct += 1.0 / k;
  CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
  CHECK(harmonic_number(4) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("harmonic differences are 1/n to one ulp and the sequence increases") {
  const auto& table = harmonic_table();
  Rng rng(7);
  for (int trial = 0; trial < 20000; ++trial) {
    const auto n = 1 + rng() % table.bound();
    const double hn = table(n), hm = table(n - 1);
    REQUIRE(hn > hm);
    const double ulp = std::nextafter(hn, INFINITY) - hn;
    REQUIRE(std::abs((hn - hm) - 1.0 / static_cast<double>(n)) <= ulp);
  }
}

TEST_CASE("harmonic asymptotic expansion matches the cache at the boundary") {
  const HarmonicTable small(5000);
  for (std::uint64_t n : {1000ULL, 2500ULL, 5000ULL})
    CHECK(std::abs(HarmonicTable::asymptotic(n) - small(n)) < 1e-12);
  // beyond the bound the table switches to the expansion seamlessly
  const auto& table = harmonic_table();
  const auto b = table.bound();
  CHECK(std::abs(table(b + 1) - (table(b) + 1.0 / static_cast<double>(b + 1))) < 1e-12);
}

TEST_CASE("exponential integral against quadrature and frozen reference values") {
  // Reference values computed once with 30-digit arithmetic.
  struct Case { double x, e1; };
  const Case cases[] = {{0.5, 0.559773594776160811746795939315},
                        {1.0, 0.21938393439552027367716377546},
                        {1e-6, 13.2382958930624912888088351054},
                        {0.99, 0.223099825790177240234250239943},
                        {1.01, 0.215741623794489971607813239975},
                        {2.0, 0.0489005107080611195672398352281},
                        {10.0, 4.15696892968532427740285981028e-6},
                        {50.0, 3.78326402955045901869896785402e-24}};
  for (const auto& c : cases) {
    CAPTURE(c.x);
    CHECK(std::abs(exp_integral_e1(c.x) - c.e1) <= 1e-10 * c.e1);
  }
  // independent route: quadrature of e^{-t}/t on [x, x+60] (tail < e^{-60})
  for (double x : {0.5, 1.0, 3.0}) {
    QuadratureOptions q{1e-15, 1e-13, 4000};
    auto r = quadrature_1d([](double t) { return std::exp(-t) / t; }, x, x + 60.0, q);
    REQUIRE(r.converged);
    CHECK(std::abs(exp_integral_e1(x) - r.value) <= 1e-10 * r.value);
  }
}

TEST_CASE("exponential integral is monotone decreasing and vanishes at infinity") {
  double previous = INFINITY;
  for (double x = 1e-8; x < 700.0; x *= 1.3) {
    const double v = exp_integral_e1(x);
    REQUIRE(v < previous);
    previous = v;
  }
  CHECK(exp_integral_e1(INFINITY) == 0.0);
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
}

TEST_CASE("quadrature examples") {
  auto one = quadrature_1d([](double) { return 1.0; }, 0.0, 1.0);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-15));

  auto log2 = quadrature_1d([](double m) { return 1.0 / (1.0 + m); }, 1.0, 3.0);
  CHECK(std::abs(log2.value - std::log(2.0)) < 1e-13);
  CHECK(log2.converged);

  const double lambda = 0.5;
  auto gen = quadrature_1d([=](double m) { return 1.0 / (1.0 + (1.0 - lambda) * m); }, 1.0, 3.0);
  CHECK(std::abs(gen.value - 2.0 * (std::log(2.5) - std::log(1.5))) < 1e-13);

  CHECK(quadrature_1d([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
  CHECK_THROWS(quadrature_1d([](double) { return 1.0; }, 2.0, 1.0));
}

TEST_CASE("quadrature reproduces random quintics") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    double c[6];
    for (double& v : c) v = rng.uniform(-5.0, 5.0);
    const double a = rng.uniform(-3.0, 1.0), b = a + rng.uniform(0.0, 4.0);
    auto poly = [&](double x) {
      double s = 0.0;
      for (int j = 5; j >= 0; --j) s = s * x + c[j];
      return s;
    };
    double exact = 0.0;
    for (int j = 0; j < 6; ++j) exact += c[j] * (std::pow(b, j + 1) - std::pow(a, j + 1)) / (j + 1);
    auto r = quadrature_1d(poly, a, b, {1e-10, 0.0, 100});
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.value - exact) <= 1e-10 + 1e-13 * std::abs(exact));
  }
}

TEST_CASE("quadrature reports non-convergence instead of truncating") {
  // 1/sqrt(x) style singularity with a tiny budget
  auto r = quadrature_1d([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-15, 0.0, 3});
  CHECK_FALSE(r.converged);
  CHECK(r.error > 1e-15);
}

TEST_CASE("ordered simplex integration gives the simplex volume and order-statistic means") {
  for (int n = 1; n <= 4; ++n) {
    auto vol = integrate_ordered_simplex([](std::span<const double>) { return 1.0; }, n, 1.0, 3.0,
                                         {1e-12, 1e-12, 2000});
    CHECK(vol.value == doctest::Approx(std::pow(2.0, n) / std::tgamma(n + 1.0)).epsilon(1e-11));
  }
  // E[m_2] for N = 3 on [0,1] is 2/4
  auto first = integrate_ordered_simplex([](std::span<const double> m) { return m[1]; }, 3, 0.0, 1.0,
                                         {1e-13, 1e-13, 2000});
  CHECK(first.value * 6.0 == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("rng is deterministic per (seed, stream) and streams differ") {
  Rng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a(), vb = b(), vc = c(), vd = d();
    REQUIRE(va == vb);
    differs_c |= va != vc;
    differs_d |= va != vd;
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("rng streams are uncorrelated and uniform") {
  constexpr int n = 200000;
  for (std::uint64_t stream = 0; stream < 4; ++stream) {
    Rng x(1, stream), y(1, stream + 1);
    double sx = 0, sy = 0, sxy = 0, sxx = 0;
    for (int i = 0; i < n; ++i) {
      const double u = x.uniform() - 0.5, v = y.uniform() - 0.5;
      sx += u;
      sy += v;
      sxy += u * v;
      sxx += u * u;
    }
    CHECK(std::abs(sx / n) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sxx / n - 1.0 / 12.0) < 0.002);
    // corr SE is 1/sqrt(n)
    CHECK(std::abs(sxy / n) / (1.0 / 12.0) < 4.0 / std::sqrt(n));
  }
}

TEST_CASE("uniform_open never returns 0 or 1") {
  Rng r(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("integrated autocorrelation time of an AR(1) series") {
  // tau = (1 + phi) / (1 - phi)
  for (double phi : {0.0, 0.5, 0.8}) {
    Rng rng(99);
    std::vector<double> series(200000);
    double x = 0.0;
    for (auto& v : series) {
      const double g = std::sqrt(-2.0 * std::log(rng.uniform_open())) * std::cos(2.0 * M_PI * rng.uniform());
      x = phi * x + g;
      v = x;
    }
    const double expected = (1 + phi) / (1 - phi);
    CAPTURE(phi);
    CHECK(integrated_autocorr_time(series) == doctest::Approx(expected).epsilon(0.1));
  }
  std::vector<double> constant(100, 3.0);
  CHECK(integrated_autocorr_time(constant) == 1.0);
}
