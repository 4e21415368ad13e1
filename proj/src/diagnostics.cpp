#include "loggas/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "loggas/numeric.hpp"

namespace loggas {

namespace {
constexpr double kPi = 3.141592653589793238462643;
}

MCEstimate summarize(std::span<const double> xs) {
  MCEstimate e;
  e.n_samples = static_cast<std::int64_t>(xs.size());
  if (xs.empty()) return e;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  double m = static_cast<double>(xs.size());
  e.mean = s.value() / m;
  if (xs.size() > 1) {
    CompensatedSum q;
    for (double x : xs) {
      double d = x - e.mean;
      q.add(d * d);
    }
    e.variance = q.value() / (m - 1.0);
  }
  e.std_error = std::sqrt(e.variance / m);
  return e;
}

double batch_means_se(std::span<const double> xs, int n_batches) {
  std::size_t m = xs.size();
  if (m < 4) return summarize(xs).std_error;
  std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(n_batches), m / 2);
  if (nb < 2) nb = 2;
  std::size_t bs = m / nb;  // truncate the remainder
  std::vector<double> means;
  means.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    CompensatedSum s;
    for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s.add(xs[i]);
    means.push_back(s.value() / static_cast<double>(bs));
  }
  MCEstimate e = summarize(means);
  return std::sqrt(e.variance / static_cast<double>(nb));
}

std::vector<PointConfiguration> sample_gas(const GasParams& params,
                                           const SamplingOptions& opts,
                                           std::uint64_t seed) {
  if (opts.chains < 1) throw DomainError("sample_gas: chains >= 1 required");
  if (opts.samples_per_chain < 1)
    throw DomainError("sample_gas: samples_per_chain >= 1 required");
  const std::int64_t n = params.n;
  McmcSchedule sched;
  sched.burn_in = (opts.burn_in_sweeps < 0 ? 10000 : opts.burn_in_sweeps) * n;
  sched.thin = (opts.thin_sweeps < 0 ? 1 : opts.thin_sweeps) * n;
  if (sched.thin < 1) sched.thin = 1;
  sched.steps = sched.burn_in + sched.thin * opts.samples_per_chain;

  std::function<std::vector<PointConfiguration>(int)> one = [&](int c) {
    return loggas_mcmc(params, sched, RngStream::derive(seed, 2 * static_cast<std::uint64_t>(c)));
  };
  auto per_chain = run_chains<std::vector<PointConfiguration>>(opts.chains, opts.workers, one);
  std::vector<PointConfiguration> all;
  all.reserve(static_cast<std::size_t>(opts.chains) *
              static_cast<std::size_t>(opts.samples_per_chain));
  for (auto& v : per_chain)
    for (auto& g : v) all.push_back(std::move(g));
  return all;
}

MCEstimate dlr_residual(const std::function<double(const PointConfiguration&)>& f,
                        const GasParams& params, const Window& inner,
                        std::uint64_t seed, const DlrOptions& opts) {
  const std::int64_t n = params.n;
  Window full = Window::centered(static_cast<double>(n));
  if (!full.contains(inner))
    throw WindowNestingError("dlr_residual: inner window leaves the period window");
  if (opts.k_inner < 1) throw DomainError("dlr_residual: k_inner >= 1 required");
  double radius = opts.outer_radius < 0.0 ? 0.5 * static_cast<double>(n)
                                          : opts.outer_radius;
  const InteractionModel model = InteractionModel::periodic(n);
  std::int64_t burn = (opts.sampling.burn_in_sweeps < 0 ? 10000
                                                        : opts.sampling.burn_in_sweeps) * n;
  std::int64_t thin = (opts.sampling.thin_sweeps < 0 ? 1 : opts.sampling.thin_sweeps) * n;
  if (thin < 1) thin = 1;

  std::function<std::vector<double>(int)> one = [&](int c) {
    RngStream gas = RngStream::derive(seed, 2 * static_cast<std::uint64_t>(c));
    RngStream kernel = RngStream::derive(seed, 2 * static_cast<std::uint64_t>(c) + 1);
    LoggasChain chain(params, gas);
    chain.run(burn, /*adapt=*/true);
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(opts.sampling.samples_per_chain));
    for (std::int64_t s = 0; s < opts.sampling.samples_per_chain; ++s) {
      chain.run(thin);
      PointConfiguration gamma = chain.current();
      double fg = f(gamma);
      CompensatedSum acc;
      for (int k = 0; k < opts.k_inner; ++k) {
        PointConfiguration resampled = resample_interior(
            gamma, inner, radius, model, params.beta, opts.kernel_steps, kernel);
        acc.add(f(resampled));
      }
      diffs.push_back(fg - acc.value() / static_cast<double>(opts.k_inner));
    }
    return diffs;
  };
  auto per_chain =
      run_chains<std::vector<double>>(opts.sampling.chains, opts.sampling.workers, one);
  std::vector<double> all;
  for (auto& v : per_chain) all.insert(all.end(), v.begin(), v.end());
  return summarize(all);
}

namespace {

// Deterministic interior trials bracketing the worst case: tight clusters at
// either end, an endpoint split, then uniform fills.
std::vector<PointConfiguration> interior_trials(const Window& inner, std::int64_t count,
                                                std::int64_t total, RngStream& rng) {
  std::vector<PointConfiguration> out;
  if (total < 1) total = 1;
  const double L = inner.length();
  auto cluster = [&](bool left) {
    std::vector<double> xs;
    for (std::int64_t i = 0; i < count; ++i) {
      double off = L * (1e-6 + 1e-4 * static_cast<double>(i));
      xs.push_back(left ? inner.lo() + off : inner.hi() - off);
    }
    return make_configuration(std::move(xs));
  };
  if (total >= 1) out.push_back(cluster(true));
  if (total >= 2) out.push_back(cluster(false));
  if (total >= 3) {
    std::vector<double> xs;
    std::int64_t half = (count + 1) / 2;
    for (std::int64_t i = 0; i < half; ++i)
      xs.push_back(inner.lo() + L * (1e-6 + 1e-4 * static_cast<double>(i)));
    for (std::int64_t i = half; i < count; ++i)
      xs.push_back(inner.hi() - L * (1e-6 + 1e-4 * static_cast<double>(i - half)));
    out.push_back(make_configuration(std::move(xs)));
  }
  while (static_cast<std::int64_t>(out.size()) < total)
    out.push_back(bernoulli_sample(count, inner, rng));
  return out;
}

}  // namespace

TruncationProfile truncation_profile(const GasParams& params, const Window& inner,
                                     std::span<const double> radii,
                                     std::uint64_t seed,
                                     const TruncationOptions& opts) {
  const std::int64_t n = params.n;
  const double dn = static_cast<double>(n);
  Window full = Window::centered(dn);
  if (radii.empty()) throw DomainError("truncation_profile: no radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw DomainError("truncation_profile: radii must increase");
  if (radii[radii.size() - 1] > dn)
    throw WindowNestingError("truncation_profile: radius exceeds the period");
  if (!Window::centered(radii[0]).contains(inner))
    throw WindowNestingError("truncation_profile: smallest radius does not cover inner");

  const InteractionModel model = InteractionModel::periodic(n);

  std::function<std::vector<std::vector<double>>(int)> one = [&](int c) {
    RngStream gas = RngStream::derive(seed, 2 * static_cast<std::uint64_t>(c));
    RngStream trial_rng = RngStream::derive(seed, 2 * static_cast<std::uint64_t>(c) + 1);
    McmcSchedule sched;
    sched.burn_in = (opts.sampling.burn_in_sweeps < 0 ? 10000
                                                      : opts.sampling.burn_in_sweeps) * n;
    sched.thin = (opts.sampling.thin_sweeps < 0 ? 1 : opts.sampling.thin_sweeps) * n;
    if (sched.thin < 1) sched.thin = 1;
    sched.steps = sched.burn_in + sched.thin * opts.sampling.samples_per_chain;
    auto samples = loggas_mcmc(params, sched, gas);

    // sups[r][s]: estimated sup over trials for radius r, sample s.
    std::vector<std::vector<double>> sups(radii.size());
    for (auto& gamma : samples) {
      PointConfiguration gamma_inner = restrict_to(gamma, inner);
      std::int64_t count = static_cast<std::int64_t>(gamma_inner.size());
      auto trials = interior_trials(inner, count, opts.trial_count, trial_rng);
      for (std::size_t r = 0; r < radii.size(); ++r) {
        PointConfiguration annulus =
            window_difference(gamma, Window::centered(radii[r]), full);
        double sup = 0.0;
        for (const auto& eta : trials) {
          CompensatedSum s;
          for (double u : annulus) {
            for (double x : eta) s.add(model.g(x - u));
            for (double y : gamma_inner) s.add(-model.g(y - u));
          }
          sup = std::max(sup, std::abs(s.value()));
        }
        sups[r].push_back(sup);
      }
    }
    return sups;
  };

  auto per_chain = run_chains<std::vector<std::vector<double>>>(
      opts.sampling.chains, opts.sampling.workers, one);

  TruncationProfile prof;
  prof.radii.assign(radii.begin(), radii.end());
  prof.delta = opts.delta;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    CompensatedSum total;
    std::int64_t within = 0, count = 0;
    for (const auto& chain : per_chain) {
      for (double s : chain[r]) {
        total.add(s);
        within += (s <= opts.delta) ? 1 : 0;
        ++count;
      }
    }
    prof.sup_estimates.push_back(count ? total.value() / static_cast<double>(count) : 0.0);
    prof.fraction_within_delta.push_back(
        count ? static_cast<double>(within) / static_cast<double>(count) : 0.0);
    prof.n_samples = count;
  }
  return prof;
}

std::vector<DiscrepancyRow> discrepancy_stats(
    std::span<const PointConfiguration> samples, std::span<const Window> windows) {
  std::vector<DiscrepancyRow> rows;
  rows.reserve(windows.size());
  for (const Window& w : windows) {
    std::vector<double> d1, d2;
    d1.reserve(samples.size());
    d2.reserve(samples.size());
    for (const auto& g : samples) {
      double d = discrepancy(g, w);
      d1.push_back(d);
      d2.push_back(d * d);
    }
    DiscrepancyRow row;
    row.window_lo = w.lo();
    row.window_hi = w.hi();
    row.first_moment = summarize(d1);
    row.second_moment = summarize(d2);
    row.ratio = row.second_moment.mean / w.length();
    rows.push_back(row);
  }
  return rows;
}

MCEstimate overcrowding_probability(std::span<const PointConfiguration> samples,
                                    const Window& inner, double p) {
  if (p < 0.0 || !std::isfinite(p))
    throw DomainError("overcrowding_probability: p >= 0 required");
  std::int64_t hits = 0;
  for (const auto& g : samples) {
    double inner_count = static_cast<double>(restrict_to(g, inner).size());
    // Lambda_p degenerates to a null window at p = 0 and holds no points.
    double p_count =
        p > 0.0 ? static_cast<double>(restrict_to(g, Window::centered(p)).size()) : 0.0;
    if (inner_count <= p && p_count <= p * p) ++hits;
  }
  MCEstimate e;
  e.n_samples = static_cast<std::int64_t>(samples.size());
  if (e.n_samples == 0) return e;
  double m = static_cast<double>(e.n_samples);
  e.mean = static_cast<double>(hits) / m;
  e.variance = e.mean * (1.0 - e.mean);
  e.std_error = std::sqrt(e.variance / m);
  return e;
}

CampbellEstimate campbell_estimate(
    std::span<const PointConfiguration> samples, int order,
    const std::function<double(std::span<const double>, const PointConfiguration&)>& h,
    std::int64_t max_tuples_per_sample) {
  if (order < 1) throw DomainError("campbell_estimate: order >= 1 required");
  std::vector<double> per_sample;
  per_sample.reserve(samples.size());
  std::vector<double> tuple(static_cast<std::size_t>(order));
  std::vector<std::size_t> idx(static_cast<std::size_t>(order));
  for (const auto& g : samples) {
    const std::size_t k = g.size();
    double tuples = 1.0;
    for (int r = 0; r < order; ++r) tuples *= static_cast<double>(k) - r;
    if (tuples > static_cast<double>(max_tuples_per_sample))
      throw CombinatorialBlowupError("campbell_estimate: ordered tuple count over cap");
    CompensatedSum total;
    if (k >= static_cast<std::size_t>(order)) {
      std::vector<bool> used(k, false);
      std::vector<double> rest;
      std::function<void(int)> rec = [&](int depth) {
        if (depth == order) {
          rest.clear();
          for (std::size_t i = 0; i < k; ++i)
            if (!used[i]) rest.push_back(g[i]);
          PointConfiguration rest_cfg = make_configuration(rest);
          total.add(h(std::span<const double>(tuple.data(), tuple.size()), rest_cfg));
          return;
        }
        for (std::size_t i = 0; i < k; ++i) {
          if (used[i]) continue;
          used[i] = true;
          idx[static_cast<std::size_t>(depth)] = i;
          tuple[static_cast<std::size_t>(depth)] = g[i];
          rec(depth + 1);
          used[i] = false;
        }
      };
      rec(0);
    }
    per_sample.push_back(total.value());
  }
  MCEstimate e = summarize(per_sample);
  CampbellEstimate ce;
  ce.value = e.mean;
  ce.std_error = e.std_error;
  ce.order = order;
  ce.n_samples = e.n_samples;
  return ce;
}

MCEstimate fluctuation_stat(std::span<const PointConfiguration> samples,
                            const std::function<double(double)>& phi,
                            const Window& phi_support, double ell,
                            const Window& domain) {
  if (!(ell > 0.0)) throw DomainError("fluctuation_stat: ell > 0 required");
  Window scaled(ell * phi_support.lo(), ell * phi_support.hi());
  if (!domain.contains(scaled))
    throw SupportOverflowError("fluctuation_stat: scaled support leaves the domain");
  double integral = integrate(phi, phi_support.lo(), phi_support.hi());
  std::vector<double> stats;
  stats.reserve(samples.size());
  for (const auto& g : samples) {
    CompensatedSum s;
    for (double x : restrict_to(g, scaled)) s.add(phi(x / ell));
    stats.push_back(s.value() - ell * integral);
  }
  return summarize(stats);
}

double plateau_taper(double x, const Window& w, double s) {
  double d = std::max(w.lo() - x, x - w.hi());
  if (d <= 0.0) return 1.0;
  if (d >= s) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * d / s));
}

std::vector<std::vector<double>> rigidity_statistics(
    std::span<const PointConfiguration> samples, const Window& w,
    std::span<const double> scales) {
  std::vector<std::vector<double>> out(scales.size());
  for (std::size_t si = 0; si < scales.size(); ++si) {
    double s = scales[si];
    if (!(s > 0.0)) throw DomainError("rigidity_statistics: scales must be positive");
    Window support(w.lo() - s, w.hi() + s);
    out[si].reserve(samples.size());
    for (const auto& g : samples) {
      CompensatedSum t;
      for (double x : restrict_to(g, support)) t.add(plateau_taper(x, w, s));
      out[si].push_back(t.value());
    }
  }
  return out;
}

std::vector<RigidityPoint> rigidity_probe(std::span<const PointConfiguration> samples,
                                          const Window& w,
                                          std::span<const double> scales) {
  auto stats = rigidity_statistics(samples, w, scales);
  std::vector<RigidityPoint> out;
  out.reserve(scales.size());
  for (std::size_t si = 0; si < scales.size(); ++si) {
    MCEstimate e = summarize(stats[si]);
    double m = static_cast<double>(e.n_samples);
    RigidityPoint pt;
    pt.scale = scales[si];
    pt.stat_mean = e.mean;
    pt.stat_variance = e.variance;
    if (e.n_samples > 3) {
      // SE of the sample variance from the fourth central moment.
      CompensatedSum q4;
      for (double x : stats[si]) {
        double d = x - e.mean;
        q4.add(d * d * d * d);
      }
      double m4 = q4.value() / m;
      double v2 = e.variance * e.variance;
      double var_of_var = (m4 - v2 * (m - 3.0) / (m - 1.0)) / m;
      pt.variance_se = var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
    }
    pt.n_samples = e.n_samples;
    out.push_back(pt);
  }
  return out;
}

VarianceDifference paired_variance_difference(std::span<const double> a,
                                              std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw CardinalityMismatchError("paired_variance_difference: size mismatch");
  MCEstimate ea = summarize(a);
  MCEstimate eb = summarize(b);
  double m = static_cast<double>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ea.mean;
    double db = b[i] - eb.mean;
    d[i] = da * da - db * db;
  }
  double scale = a.size() > 1 ? m / (m - 1.0) : 1.0;
  VarianceDifference out;
  out.difference = summarize(d).mean * scale;
  out.std_error = batch_means_se(d) * scale;
  return out;
}

double algebraic_identity_residual(std::int64_t n, const PointConfiguration& gamma,
                                   const PointConfiguration& eta, const Window& inner) {
  const double dn = static_cast<double>(n);
  Window full = Window::centered(dn);
  if (!full.contains(inner))
    throw WindowNestingError("identity residual: inner window leaves the period window");
  if (!gamma.empty() && !(gamma[0] >= full.lo() && gamma[gamma.size() - 1] <= full.hi()))
    throw DomainError("identity residual: gamma must lie in the period window");
  const InteractionModel model = InteractionModel::periodic(n);
  PointConfiguration gamma_inner = restrict_to(gamma, inner);
  PointConfiguration exterior = window_difference(gamma, inner, full);
  // a contact with the exterior makes both sides infinite; report the overlap
  // rather than a residual, even when eta also leaves the inner window
  for (double x : eta)
    if (std::binary_search(exterior.begin(), exterior.end(), x))
      throw SingularOverlapError("identity residual: eta touches an exterior point");
  if (!eta.empty() && !(eta[0] >= inner.lo() && eta[eta.size() - 1] <= inner.hi()))
    throw DomainError("identity residual: eta must lie in the inner window");
  if (eta.size() != gamma_inner.size())
    throw CardinalityMismatchError("identity residual: |eta| != interior count");
  PointConfiguration merged = merge_disjoint(eta, exterior);

  double lhs = interaction_energy(model, gamma, full) +
               move_function(model, eta, gamma, inner, full) +
               interaction_energy(model, eta, inner);
  double rhs = interaction_energy(model, merged, full) +
               interaction_energy(model, gamma, inner);
  return std::abs(lhs - rhs);
}

std::string csv_header() {
  return "test,n,beta,window_lo,window_hi,param,mean,std_error,n_samples,pass\n";
}

std::string to_csv_row(const ResultRow& row) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%lld,%d\n",
                row.test.c_str(), static_cast<long long>(row.n), row.beta,
                row.window_lo, row.window_hi, row.param, row.mean, row.std_error,
                static_cast<long long>(row.n_samples), row.pass ? 1 : 0);
  return buf;
}

}  // namespace loggas
