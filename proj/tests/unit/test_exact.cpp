#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "hmix/core/quadrature.hpp"
#include "hmix/exact/mixture.hpp"

using namespace hmix;
using namespace hmix::exact;

namespace {

MixtureSpec discrete_spec(int n, double beta_a = 0.5, double beta_b = 0.75) {
  return {ChainParams::discrete(n, beta_a, beta_b), Model::Discrete};
}

MixtureSpec continuous_spec(int n, double t_a = 1.0, double t_b = 3.0) {
  return {ChainParams::continuous(n, t_a, t_b), Model::Continuous};
}

}  // namespace

TEST_CASE("geometric pmf") {
  CHECK(geometric_pmf(1.0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(geometric_pmf(0.0, 1), std::domain_error);
  CHECK(geometric_pmf(2.0, -1) == 0.0);
  for (double m : {0.3, 1.0, 3.0, 12.0}) {
    // truncate where the tail p^{K+1} is below 1e-15
    const double p = m / (1.0 + m);
    const int K = static_cast<int>(std::ceil(std::log(1e-15) / std::log(p)));
    double total = 0.0, mean = 0.0;
    for (int k = 0; k <= K; ++k) {
      total += geometric_pmf(m, k);
      mean += k * geometric_pmf(m, k);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(std::abs(mean - m) < 1e-10 * std::max(1.0, m));
  }
  // log-space evaluation survives where the direct product underflows
  CHECK(std::isfinite(log_geometric_pmf(1.0, 5000)));
  CHECK(log_geometric_pmf(1.0, 5000) == doctest::Approx(-5001 * std::log(2.0)));
}

TEST_CASE("geometric moment generating function") {
  CHECK(mgf_geometric(3.0, 1.0) == doctest::Approx(1.0));
  CHECK(mgf_geometric(2.0, 0.0) == doctest::Approx(geometric_pmf(2.0, 0)).epsilon(1e-15));
  // truncated series oracle for (m=2, lambda=0.5)
  double series = 0.0;
  for (int k = 0; k < 200; ++k) series += geometric_pmf(2.0, k) * std::pow(0.5, k);
  CHECK(mgf_geometric(2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(series - 0.5) < 1e-14);
  CHECK_THROWS_AS(mgf_geometric(2.0, 1.5), std::domain_error);  // radius is 1.5
  CHECK_THROWS_AS(mgf_geometric(2.0, -0.1), std::domain_error);
  CHECK_NOTHROW(mgf_geometric(2.0, 1.49));
}

TEST_CASE("exponential moment generating function") {
  CHECK(mgf_exponential(4.0, 0.0) == 1.0);
  CHECK(mgf_exponential(1.0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  // quadrature oracle for (m=2, t=-1): int (1/2) e^{-z/2} e^{-z} dz, tail past z=60 < e^{-90}
  auto r = quadrature_1d([](double z) { return 0.5 * std::exp(-z / 2.0) * std::exp(-z); }, 0.0, 60.0,
                         {1e-15, 1e-14, 1000});
  CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-13);
  CHECK(mgf_exponential(2.0, -1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(mgf_exponential(2.0, 0.5), std::domain_error);
}

TEST_CASE("ordered profile sampling") {
  Rng rng(1);
  auto eq = MixtureSpec{ChainParams::discrete(4, 0.6, 0.6), Model::Discrete};
  auto prof = sample_ordered_profile(eq, rng);
  for (double m : prof.m) CHECK(m == eq.lo());

  auto spec = discrete_spec(5);
  for (int i = 0; i < 1000; ++i) REQUIRE(sample_ordered_profile(spec, rng).is_ordered(spec.lo(), spec.hi()));
}

TEST_CASE("order-statistic means by Monte Carlo over sorted uniforms") {
  // oracle: E[m_x] = lo + (hi-lo) x/(N+1)
  const auto spec = discrete_spec(4);
  Rng rng(2024);
  const int draws = 1'000'000;
  std::vector<double> sum(4, 0.0), sum_sq(4, 0.0);
  for (int i = 0; i < draws; ++i) {
    const auto p = sample_ordered_profile(spec, rng);
    for (int x = 0; x < 4; ++x) {
      sum[x] += p.m[x];
      sum_sq[x] += p.m[x] * p.m[x];
    }
  }
  const auto exact = profile_moments(4, spec.lo(), spec.hi());
  for (int x = 0; x < 4; ++x) {
    const double mean = sum[x] / draws;
    const double se = std::sqrt((sum_sq[x] / draws - mean * mean) / draws);
    CHECK(std::abs(mean - exact.means[x]) < 4.0 * se);
    CHECK(exact.means[x] == doctest::Approx(1.0 + 2.0 * (x + 1) / 5.0));
  }
}

TEST_CASE("profile covariances are positive and match sorted-uniform Monte Carlo") {
  const int n = 3;
  const auto exact = profile_moments(n, 1.0, 3.0);
  Rng rng(5);
  const int draws = 400000;
  std::vector<std::vector<double>> sxy(n, std::vector<double>(n, 0.0));
  std::vector<double> sx(n, 0.0);
  const MixtureSpec spec = discrete_spec(n);
  for (int i = 0; i < draws; ++i) {
    const auto p = sample_ordered_profile(spec, rng);
    for (int x = 0; x < n; ++x) {
      sx[x] += p.m[x];
      for (int y = 0; y < n; ++y) sxy[x][y] += p.m[x] * p.m[y];
    }
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x != y) CHECK(exact.covariance[x][y] > 0.0);
      const double cov = sxy[x][y] / draws - sx[x] / draws * sx[y] / draws;
      CHECK(std::abs(cov - exact.covariance[x][y]) < 0.003);
    }
}

TEST_CASE("moment profile special cases") {
  auto one = moment_profile(discrete_spec(1));
  CHECK(one.means[0] == doctest::Approx(2.0));  // (rho_A + rho_B)/2

  auto eq = moment_profile({ChainParams::discrete(3, 2.0 / 3.0, 2.0 / 3.0), Model::Discrete});
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      CHECK(eq.covariance[x][y] == doctest::Approx(x == y ? 2.0 + 4.0 : 0.0));

  auto eqc = moment_profile({ChainParams::continuous(2, 1.5, 1.5), Model::Continuous});
  CHECK(eqc.covariance[0][0] == doctest::Approx(2.25));
  CHECK(eqc.covariance[0][1] == 0.0);
}

TEST_CASE("discrete mixture density closed forms") {
  // N=1, eta=0: (1/2) int_1^3 dm/(1+m) = ln(2)/2
  auto v = mixture_density_discrete(discrete_spec(1), {{0}});
  CHECK(v.method == Method::Quadrature);
  CHECK(std::abs(v.value - 0.5 * std::log(2.0)) < 1e-13);

  auto eq = MixtureSpec{ChainParams::discrete(3, 2.0 / 3.0, 2.0 / 3.0), Model::Discrete};
  DiscreteConfig eta{{0, 1, 2}};
  auto d = mixture_density_discrete(eq, eta);
  CHECK(d.method == Method::Exact);
  CHECK(d.value == doctest::Approx(geometric_pmf(2.0, 0) * geometric_pmf(2.0, 1) * geometric_pmf(2.0, 2))
                       .epsilon(1e-14));
}

TEST_CASE("continuous mixture density closed forms") {
  auto v = mixture_density_continuous(continuous_spec(1), {{0.0}});
  CHECK(std::abs(v.value - 0.5 * std::log(3.0)) < 1e-13);

  auto eq = MixtureSpec{ChainParams::continuous(2, 1.5, 1.5), Model::Continuous};
  auto d = mixture_density_continuous(eq, {{0.5, 2.0}});
  CHECK(d.value == doctest::Approx(exponential_density(1.5, 0.5) * exponential_density(1.5, 2.0)));
  CHECK(mixture_density_continuous(eq, {{-0.5, 2.0}}).value == 0.0);
}

TEST_CASE("two-site density: nested quadrature agrees with Monte Carlo") {
  DensityOptions mc;
  mc.force_monte_carlo = true;
  mc.mc_samples = 10'000'000;
  mc.seed = 77;

  const auto spec = discrete_spec(2);
  auto quad = mixture_density_discrete(spec, {{0, 0}});
  auto est = mixture_density_discrete(spec, {{0, 0}}, mc);
  CHECK(est.method == Method::MonteCarlo);
  CHECK(std::abs(quad.value - est.value) < 3.0 * est.error);

  const auto cspec = continuous_spec(2, 1.0, 2.0);
  auto cquad = mixture_density_continuous(cspec, {{0.3, 1.1}});
  auto cest = mixture_density_continuous(cspec, {{0.3, 1.1}}, mc);
  CHECK(std::abs(cquad.value - cest.value) < 3.0 * cest.error);
}

TEST_CASE("mixture density falls back to Monte Carlo beyond the quadrature limit") {
  auto spec = discrete_spec(6);
  DensityOptions opts;
  opts.mc_samples = 20000;
  auto v = mixture_density_discrete(spec, {{0, 1, 0, 2, 1, 3}}, opts);
  CHECK(v.method == Method::MonteCarlo);
  CHECK(v.samples == 20000);
  CHECK(v.value > 0.0);
}

TEST_CASE("discrete mixture sums to one on a box up to the geometric tail bound") {
  const auto spec = discrete_spec(2);
  const int K = 40;
  double total = 0.0;
  for (int a = 0; a <= K; ++a)
    for (int b = 0; b <= K; ++b) total += mixture_density_discrete(spec, {{a, b}}, {1e-14, 1e-11}).value;
  // each component's mass outside the box is at most N * beta_B^{K+1}
  const double bound = 2.0 * std::pow(0.75, K + 1);
  CHECK(total <= 1.0 + 1e-10);
  CHECK(total >= 1.0 - bound - 1e-10);
}

TEST_CASE("marginal pmf") {
  // N=1 reduces to the uniform mixture
  const auto one = discrete_spec(1);
  CHECK(std::abs(marginal_pmf_discrete(one, 1, 0) - 0.5 * std::log(2.0)) < 1e-13);

  const auto spec = discrete_spec(3);
  for (int x = 1; x <= 3; ++x) {
    double total = 0.0, mean = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double p = marginal_pmf_discrete(spec, x, k);
      total += p;
      mean += k * p;
    }
    CHECK(std::abs(total - 1.0) < 1e-11);
    CHECK(mean == doctest::Approx(1.0 + 2.0 * x / 4.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(marginal_pmf_discrete(spec, 4, 0), std::out_of_range);

  // the marginal agrees with summing the joint density over the other sites
  const auto two = discrete_spec(2);
  double joint = 0.0;
  for (int b = 0; b < 120; ++b) joint += mixture_density_discrete(two, {{2, b}}).value;
  CHECK(std::abs(joint - marginal_pmf_discrete(two, 1, 2)) < 1e-11);
}

TEST_CASE("marginal pmf matches exact sampling (chi-square)") {
  const auto spec = discrete_spec(3);
  Rng rng(314);
  const int draws = 1'000'000;
  std::map<std::int64_t, double> counts;
  for (int i = 0; i < draws; ++i) counts[sample_exact_discrete(spec, rng).eta[1]] += 1.0;
  // bins 0..K-1 plus a tail bin
  const int K = 20;
  double chi2 = 0.0, tail_obs = draws, tail_p = 1.0;
  for (int k = 0; k < K; ++k) {
    const double p = marginal_pmf_discrete(spec, 2, k);
    const double obs = counts.count(k) ? counts[k] : 0.0;
    chi2 += (obs - draws * p) * (obs - draws * p) / (draws * p);
    tail_obs -= obs;
    tail_p -= p;
  }
  chi2 += (tail_obs - draws * tail_p) * (tail_obs - draws * tail_p) / (draws * tail_p);
  const double p_value = boost::math::gamma_q(K / 2.0, chi2 / 2.0);
  CHECK(p_value > 0.01);
}

TEST_CASE("exact samplers reproduce equilibrium product laws and linear profiles") {
  Rng rng(8);
  const int draws = 400000;
  auto eq = MixtureSpec{ChainParams::discrete(2, 0.6, 0.6), Model::Discrete};
  const double rho = eq.lo();
  double zeros = 0.0;
  for (int i = 0; i < draws; ++i) zeros += sample_exact_discrete(eq, rng).eta[0] == 0;
  const double p0 = 1.0 / (1.0 + rho);
  CHECK(std::abs(zeros / draws - p0) < 4.0 * std::sqrt(p0 * (1 - p0) / draws));

  auto cont = continuous_spec(3, 1.0, 2.0);
  std::vector<double> sum(3, 0.0), sum_sq(3, 0.0);
  for (int i = 0; i < draws; ++i) {
    auto z = sample_exact_continuous(cont, rng);
    for (int x = 0; x < 3; ++x) {
      sum[x] += z.z[x];
      sum_sq[x] += z.z[x] * z.z[x];
    }
  }
  const auto exact = moment_profile(cont);
  for (int x = 0; x < 3; ++x) {
    const double mean = sum[x] / draws;
    const double var = sum_sq[x] / draws - mean * mean;
    CHECK(std::abs(mean - (1.0 + (x + 1) / 4.0)) < 4.0 * std::sqrt(var / draws));
    CHECK(var == doctest::Approx(exact.covariance[x][x]).epsilon(0.02));
  }
  CHECK_THROWS(sample_exact_continuous(discrete_spec(2), rng));
}

TEST_CASE("continuous marginal cdf") {
  const auto spec = continuous_spec(3, 1.0, 2.0);
  CHECK(marginal_cdf_continuous(spec, 2, 0.0) == 0.0);
  CHECK(marginal_cdf_continuous(spec, 2, 500.0) == doctest::Approx(1.0).epsilon(1e-12));
  // equilibrium reduces to the exponential cdf
  const MixtureSpec eq{ChainParams::continuous(3, 1.5, 1.5), Model::Continuous};
  CHECK(marginal_cdf_continuous(eq, 1, 2.0) == doctest::Approx(1.0 - std::exp(-2.0 / 1.5)).epsilon(1e-14));
  double previous = 0.0;
  for (double t = 0.05; t < 20.0; t *= 1.5) {
    const double c = marginal_cdf_continuous(spec, 2, t);
    REQUIRE(c >= previous);
    previous = c;
  }
}

TEST_CASE("near-degenerate interval approaches the product law") {
  const double rho = 2.0;
  const double beta_a = rho / (1.0 + rho);
  const double beta_b = (rho + 1e-8) / (1.0 + rho + 1e-8);
  const MixtureSpec spec{ChainParams::discrete(3, beta_a, beta_b), Model::Discrete};
  const DiscreteConfig eta{{0, 1, 2}};
  const double product = geometric_pmf(rho, 0) * geometric_pmf(rho, 1) * geometric_pmf(rho, 2);
  CHECK(std::abs(mixture_density_discrete(spec, eta).value - product) <= 1e-6 * product);
}
