#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "loggas/config.hpp"
#include "loggas/diagnostics.hpp"
#include "loggas/energy.hpp"
#include "loggas/errors.hpp"
#include "loggas/numeric.hpp"
#include "loggas/rng.hpp"
#include "loggas/sampler.hpp"
#include "oracles.hpp"

using namespace loggas;

namespace {

std::vector<PointConfiguration> poisson_batch(double lambda, const Window& w, int m,
                                              std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<PointConfiguration> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) out.push_back(poisson_sample(lambda, w, rng));
  return out;
}

}  // namespace

TEST_CASE("summarize computes mean, variance and standard error") {
  std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  MCEstimate e = summarize(xs);
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.variance == doctest::Approx(5.0 / 3.0));
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.n_samples == 4);
}

TEST_CASE("standard errors shrink like one over root n") {
  RngStream rng(3);
  std::vector<double> xs;
  for (int i = 0; i < 4096; ++i) xs.push_back(rng.uniform() + 0.2 * rng.uniform());
  MCEstimate full = summarize(xs);
  MCEstimate half = summarize(std::span<const double>(xs.data(), 2048));
  double expected_ratio = std::sqrt(2.0);
  CHECK(half.std_error / full.std_error >= expected_ratio / 1.5);
  CHECK(half.std_error / full.std_error <= expected_ratio * 1.5);
}

TEST_CASE("batch means control autocorrelation bias") {
  // strongly autocorrelated AR(1) stream: the naive SE is far too small
  RngStream rng(5);
  std::vector<double> xs(20000);
  double x = 0.0;
  for (auto& v : xs) {
    x = 0.95 * x + rng.normal();
    v = x;
  }
  double naive = summarize(xs).std_error;
  double batched = batch_means_se(xs);
  CHECK(batched > 2.0 * naive);
}

TEST_CASE("sample_gas does not depend on the worker count") {
  GasParams params{6, 2.0};
  SamplingOptions opt;
  opt.chains = 4;
  opt.samples_per_chain = 25;
  opt.burn_in_sweeps = 100;
  opt.thin_sweeps = 2;
  opt.workers = 1;
  auto a = sample_gas(params, opt, 123);
  opt.workers = 3;
  auto b = sample_gas(params, opt, 123);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("dlr residual vanishes identically for constant and count statistics") {
  GasParams params{8, 1.0};
  Window inner(-1.0, 1.0);
  DlrOptions opt;
  opt.sampling.chains = 2;
  opt.sampling.samples_per_chain = 150;
  opt.sampling.burn_in_sweeps = 300;
  opt.sampling.thin_sweeps = 2;
  opt.k_inner = 2;

  MCEstimate c = dlr_residual([](const PointConfiguration&) { return 1.0; }, params,
                              inner, 17, opt);
  CHECK(c.mean == 0.0);
  CHECK(c.variance == 0.0);
  CHECK(c.n_samples == 300);

  MCEstimate k = dlr_residual(
      [&inner](const PointConfiguration& g) {
        return static_cast<double>(restrict_to(g, inner).size());
      },
      params, inner, 17, opt);
  CHECK(k.mean == 0.0);
  CHECK(k.variance == 0.0);
}

TEST_CASE("dlr residual is statistically zero for a smooth statistic") {
  GasParams params{8, 1.0};
  Window inner(-1.0, 1.0);
  DlrOptions opt;
  opt.sampling.chains = 2;
  opt.sampling.samples_per_chain = 400;
  opt.sampling.burn_in_sweeps = 400;
  opt.sampling.thin_sweeps = 3;
  opt.k_inner = 2;

  auto smooth = [](const PointConfiguration& g) {
    double s = 0.0;
    for (double x : g) {
      double t = x;  // bump supported on (-1, 1)
      if (t > -1.0 && t < 1.0) s += std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
    return std::exp(-s);
  };
  MCEstimate e = dlr_residual(smooth, params, inner, 19, opt);
  CHECK(e.n_samples == 800);
  CHECK(std::abs(e.mean) <= 4.0 * e.std_error);
}

TEST_CASE("paired kernel averaging is unbiased for any inner replicate count") {
  // three-state toy measure, exhaustively enumerated: E[f - avg_K f(kernel)]
  // is zero for the exact conditional kernel, for K = 1 and K = 2
  const double mu[3] = {0.5, 0.3, 0.2};
  const int cls[3] = {0, 0, 1};  // states 0,1 share an exterior class
  const double f[3] = {1.3, -0.7, 2.2};

  double kernel[3][3] = {};
  for (int s = 0; s < 3; ++s) {
    double mass = 0.0;
    for (int t = 0; t < 3; ++t)
      if (cls[t] == cls[s]) mass += mu[t];
    for (int t = 0; t < 3; ++t)
      kernel[s][t] = cls[t] == cls[s] ? mu[t] / mass : 0.0;
  }

  double resid1 = 0.0, resid2 = 0.0;
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t) resid1 += mu[s] * kernel[s][t] * (f[s] - f[t]);
    for (int t1 = 0; t1 < 3; ++t1)
      for (int t2 = 0; t2 < 3; ++t2)
        resid2 += mu[s] * kernel[s][t1] * kernel[s][t2] *
                  (f[s] - 0.5 * (f[t1] + f[t2]));
  }
  CHECK(std::abs(resid1) <= 1e-15);
  CHECK(std::abs(resid2) <= 1e-15);
}

TEST_CASE("truncation profile is exactly clean at the full radius") {
  GasParams params{32, 2.0};
  Window inner(-1.0, 1.0);
  TruncationOptions opt;
  opt.sampling.chains = 2;
  opt.sampling.samples_per_chain = 30;
  opt.sampling.burn_in_sweeps = 200;
  opt.sampling.thin_sweeps = 2;
  opt.trial_count = 6;
  opt.delta = 0.1;

  std::vector<double> radii{8.0, 16.0, 32.0};
  TruncationProfile prof = truncation_profile(params, inner, radii, 23, opt);
  REQUIRE(prof.radii.size() == 3);
  REQUIRE(prof.fraction_within_delta.size() == 3);
  CHECK(prof.n_samples == 60);
  CHECK(prof.sup_estimates[2] == 0.0);
  CHECK(prof.fraction_within_delta[2] == 1.0);
  for (double s : prof.sup_estimates) CHECK(s >= 0.0);
}

TEST_CASE("discrepancy of the Poisson process has unit second moment") {
  auto samples = poisson_batch(1.0, Window(-5.0, 5.0), 8000, 29);
  std::vector<Window> windows{Window(0.0, 1.0)};
  auto rows = discrepancy_stats(samples, windows);
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0].first_moment.mean) <= 3.0 * rows[0].first_moment.std_error);
  CHECK(std::abs(rows[0].second_moment.mean - 1.0) <= 3.0 * rows[0].second_moment.std_error);
  CHECK(rows[0].ratio == doctest::Approx(rows[0].second_moment.mean));
}

TEST_CASE("discrepancy of the unit lattice stays within one point") {
  std::vector<double> half, ints;
  for (int j = 0; j < 12; ++j) {
    half.push_back(j + 0.5);
    ints.push_back(static_cast<double>(j));
  }
  auto lattice_half = make_configuration(half);
  auto lattice_int = make_configuration(ints);
  for (int k = 1; k <= 5; ++k) {
    Window w(0.0, static_cast<double>(k));
    CHECK(discrepancy(lattice_half, w) == 0.0);
    CHECK(discrepancy(lattice_int, w) == 1.0);  // closed window holds 0..k
  }
}

TEST_CASE("overcrowding probability endpoints") {
  auto samples = poisson_batch(1.0, Window(-4.0, 4.0), 400, 31);
  Window inner(-1.0, 1.0);

  MCEstimate certain = overcrowding_probability(samples, inner, 100.0);
  CHECK(certain.mean == 1.0);

  MCEstimate zerop = overcrowding_probability(samples, inner, 0.0);
  double empirical_empty = 0.0;
  for (const auto& g : samples)
    if (restrict_to(g, inner).empty()) empirical_empty += 1.0;
  empirical_empty /= static_cast<double>(samples.size());
  CHECK(zerop.mean == doctest::Approx(empirical_empty));
}

TEST_CASE("gas windows are rarely overcrowded") {
  GasParams params{256, 2.0};
  SamplingOptions opt;
  opt.chains = 2;
  opt.samples_per_chain = 100;
  opt.burn_in_sweeps = 300;
  opt.thin_sweeps = 2;
  auto samples = sample_gas(params, opt, 37);
  MCEstimate e = overcrowding_probability(samples, Window(-1.0, 1.0), 16.0);
  CHECK(e.mean >= 0.98);
}

TEST_CASE("campbell estimator of order one obeys the Poisson identities") {
  auto samples = poisson_batch(1.0, Window(-10.0, 10.0), 5000, 41);
  Window b(0.0, 1.0);

  auto h_count = [&b](std::span<const double> xs, const PointConfiguration&) {
    return b.contains(xs[0]) ? 1.0 : 0.0;
  };
  CampbellEstimate ce = campbell_estimate(samples, 1, h_count);
  CHECK(std::abs(ce.value - 1.0) <= 3.0 * ce.std_error);

  // the estimator is algebraically the mean count for an indicator h
  std::vector<double> counts;
  for (const auto& g : samples)
    counts.push_back(static_cast<double>(restrict_to(g, b).size()));
  CHECK(ce.value == summarize(counts).mean);
}

TEST_CASE("campbell estimator matches a brute-force enumeration") {
  auto samples = poisson_batch(1.0, Window(-6.0, 6.0), 800, 43);
  Window b(0.0, 1.0);
  auto h_void = [&b](std::span<const double> xs, const PointConfiguration& rest) {
    if (!b.contains(xs[0])) return 0.0;
    return restrict_to(rest, b).empty() ? 1.0 : 0.0;
  };
  CampbellEstimate ce = campbell_estimate(samples, 1, h_void);

  std::vector<double> per_sample;
  for (const auto& g : samples) {
    CompensatedSum total;
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::vector<double> rest;
      for (std::size_t j = 0; j < g.size(); ++j)
        if (j != i) rest.push_back(g[j]);
      double xs[1] = {g[i]};
      total.add(h_void(std::span<const double>(xs, 1), make_configuration(rest)));
    }
    per_sample.push_back(total.value());
  }
  MCEstimate direct = summarize(per_sample);
  CHECK(ce.value == direct.mean);
  CHECK(ce.std_error == direct.std_error);
}

TEST_CASE("campbell estimator of order two") {
  // configurations with fewer than two points contribute zero
  std::vector<PointConfiguration> tiny{make_configuration({0.5}), PointConfiguration{},
                                       make_configuration({0.2})};
  auto h2 = [](std::span<const double>, const PointConfiguration&) { return 1.0; };
  CampbellEstimate z = campbell_estimate(tiny, 2, h2);
  CHECK(z.value == 0.0);

  // second factorial moment of Poisson(1) counts on [0,1] is 1
  auto samples = poisson_batch(1.0, Window(-6.0, 6.0), 6000, 47);
  Window b(0.0, 1.0);
  auto h_pair = [&b](std::span<const double> xs, const PointConfiguration&) {
    return b.contains(xs[0]) && b.contains(xs[1]) ? 1.0 : 0.0;
  };
  CampbellEstimate ce = campbell_estimate(samples, 2, h_pair);
  CHECK(ce.order == 2);
  CHECK(std::abs(ce.value - 1.0) <= 3.0 * ce.std_error);
}

TEST_CASE("campbell estimator refuses combinatorial blowups") {
  std::vector<double> many;
  for (int i = 0; i < 30; ++i) many.push_back(0.1 * i);
  std::vector<PointConfiguration> samples{make_configuration(many)};
  auto h = [](std::span<const double>, const PointConfiguration&) { return 1.0; };
  CHECK_THROWS_AS(campbell_estimate(samples, 3, h, 100), CombinatorialBlowupError);
}

TEST_CASE("fluctuations of the zero function vanish") {
  auto samples = poisson_batch(1.0, Window(-4.0, 4.0), 50, 53);
  auto zero = [](double) { return 0.0; };
  MCEstimate e = fluctuation_stat(samples, zero, Window(-1.0, 1.0), 2.0,
                                  Window(-4.0, 4.0));
  CHECK(e.mean == 0.0);
  CHECK(e.variance == 0.0);
}

TEST_CASE("poisson linear statistics have the exact variance") {
  // phi = raised cosine on [-1,1]: int phi = 1, int phi^2 = 3/4
  auto phi = [](double t) {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(3.141592653589793 * t));
  };
  for (double ell : {1.0, 2.0, 4.0}) {
    auto samples = poisson_batch(1.0, Window(-8.0, 8.0), 4000, 59 + static_cast<int>(ell));
    MCEstimate e = fluctuation_stat(samples, phi, Window(-1.0, 1.0), ell,
                                    Window(-8.0, 8.0));
    CHECK(std::abs(e.mean) <= 4.0 * e.std_error);
    double target = 0.75 * ell;
    CHECK(std::abs(e.variance - target) <= 0.12 * target);
  }
}

TEST_CASE("fluctuation_stat rejects supports leaving the domain") {
  auto samples = poisson_batch(1.0, Window(-4.0, 4.0), 10, 61);
  auto phi = [](double) { return 1.0; };
  CHECK_THROWS_AS(
      fluctuation_stat(samples, phi, Window(-1.0, 1.0), 8.0, Window(-4.0, 4.0)),
      SupportOverflowError);
}

TEST_CASE("gas fluctuations stay bounded as the test function widens") {
  GasParams params{64, 2.0};
  SamplingOptions opt;
  opt.chains = 2;
  opt.samples_per_chain = 300;
  opt.burn_in_sweeps = 400;
  opt.thin_sweeps = 2;
  auto samples = sample_gas(params, opt, 67);
  auto phi = [](double t) {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(3.141592653589793 * t));
  };
  std::vector<double> vars;
  for (double ell : {1.0, 2.0, 4.0, 8.0}) {
    MCEstimate e =
        fluctuation_stat(samples, phi, Window(-1.0, 1.0), ell, Window(-32.0, 32.0));
    vars.push_back(e.variance);
  }
  double cap = *std::max_element(vars.begin(), vars.begin() + 2);
  CHECK(vars[2] <= 3.0 * cap + 0.5);
  CHECK(vars[3] <= 3.0 * cap + 0.5);
}

TEST_CASE("plateau taper interpolates between one and zero") {
  Window w(-1.0, 1.0);
  CHECK(plateau_taper(0.0, w, 2.0) == 1.0);
  CHECK(plateau_taper(-1.0, w, 2.0) == 1.0);
  CHECK(plateau_taper(1.0 + 2.0, w, 2.0) == 0.0);
  CHECK(plateau_taper(1.0 + 1.0, w, 2.0) == doctest::Approx(0.5));
  CHECK(plateau_taper(5.0, w, 2.0) == 0.0);
  CHECK(plateau_taper(1.0 + 0.5, w, 2.0) > plateau_taper(1.0 + 1.5, w, 2.0));
}

TEST_CASE("rigidity statistic at vanishing scale is the raw count") {
  auto samples = poisson_batch(1.0, Window(-4.0, 4.0), 500, 71);
  Window w(-1.0, 1.0);
  std::vector<double> tiny{1e-12};
  auto stats = rigidity_statistics(samples, w, tiny);
  REQUIRE(stats.size() == 1);
  std::vector<double> counts;
  for (const auto& g : samples)
    counts.push_back(static_cast<double>(restrict_to(g, w).size()));
  REQUIRE(stats[0].size() == counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    CHECK(stats[0][i] == doctest::Approx(counts[i]).epsilon(1e-9));
}

TEST_CASE("poisson control variance grows with the smoothing scale") {
  auto samples = poisson_batch(1.0, Window(-16.0, 16.0), 4000, 73);
  Window w(-1.0, 1.0);
  std::vector<double> scales{1.0, 2.0, 4.0, 8.0};
  auto stats = rigidity_statistics(samples, w, scales);
  auto probe = rigidity_probe(samples, w, scales);
  REQUIRE(probe.size() == 4);
  // exact Poisson variance is 2 + 0.75 s: check and verify the paired trend
  for (std::size_t i = 0; i < scales.size(); ++i) {
    double target = 2.0 + 0.75 * scales[i];
    CHECK(std::abs(probe[i].stat_variance - target) <= 0.15 * target);
    if (i > 0) {
      VarianceDifference d = paired_variance_difference(stats[i - 1], stats[i]);
      CHECK(d.difference < 3.0 * d.std_error);  // must NOT significantly decrease
    }
  }
}

TEST_CASE("paired variance difference of identical streams is zero") {
  RngStream rng(79);
  std::vector<double> a;
  for (int i = 0; i < 256; ++i) a.push_back(rng.normal());
  VarianceDifference d = paired_variance_difference(a, a);
  CHECK(d.difference == 0.0);
}

TEST_CASE("energy decomposition identity holds to nine digits") {
  RngStream rng(83);
  Window inner(-1.0, 1.0);
  const std::int64_t n = 32;
  Window full = Window::centered(32.0);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> interior, eta;
    for (int i = 0; i < 5; ++i) {
      interior.push_back(rng.uniform(-1.0, 1.0));
      eta.push_back(rng.uniform(-1.0, 1.0));
    }
    std::vector<double> all = interior;
    while (all.size() < 32) {
      double u = rng.uniform(full.lo(), full.hi());
      if (!inner.contains(u)) all.push_back(u);
    }
    double r = algebraic_identity_residual(n, make_configuration(all),
                                           make_configuration(eta), inner);
    worst = std::max(worst, r);
  }
  CHECK(worst <= 1e-9);

  // eta equal to the interior: both sides coincide termwise
  auto gamma = make_configuration({-0.5, 0.3, 4.0, -9.0, 12.0, 1.7, -3.3, 7.7,
                                   10.1, -12.5, 14.2, -15.0, 15.5, 8.8, -6.1, 2.9,
                                   -2.1, 5.5, -4.4, 6.9, -7.9, 9.9, -10.9, 11.9,
                                   -13.9, 13.3, -14.6, 3.9, -5.9, 0.9, -0.9, 1.1});
  auto eta_same = restrict_to(gamma, inner);
  CHECK(algebraic_identity_residual(n, gamma, eta_same, inner) <= 1e-12);
}

TEST_CASE("identity reports singular contact as an overlap") {
  Window inner(-1.0, 1.0);
  auto gamma = make_configuration({0.5, 2.0, -3.0, 4.0});
  auto eta = make_configuration({2.0});  // hits the exterior point at 2.0
  CHECK_THROWS_AS(algebraic_identity_residual(16, gamma, eta, inner),
                  SingularOverlapError);
}

TEST_CASE("csv rows are stable and self describing") {
  CHECK(csv_header() ==
        std::string("test,n,beta,window_lo,window_hi,param,mean,std_error,n_samples,pass\n"));
  ResultRow row;
  row.test = "demo";
  row.n = 2;
  row.beta = 2.0;
  row.window_lo = -1.0;
  row.window_hi = 1.0;
  row.param = 4.0;
  row.mean = 0.5;
  row.std_error = 0.25;
  row.n_samples = 100;
  row.pass = true;
  CHECK(to_csv_row(row) == std::string("demo,2,2,-1,1,4,0.5,0.25,100,1\n"));
}
