#include "loggas/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace loggas {

namespace {
constexpr double kPi = 3.141592653589793238462643;

void validate_params(const GasParams& p) {
  if (p.n < 1) throw DomainError("gas requires n >= 1");
  if (!(p.beta > 0.0) || !std::isfinite(p.beta))
    throw DomainError("gas requires beta > 0");
}
}  // namespace

McmcSchedule McmcSchedule::defaults_for(std::int64_t n, std::int64_t n_samples) {
  McmcSchedule s;
  s.burn_in = 10000 * n;
  s.thin = n;
  s.steps = s.burn_in + s.thin * n_samples;
  return s;
}

PointConfiguration bernoulli_sample(std::int64_t n, const Window& w, RngStream& rng) {
  if (n < 0) throw DomainError("bernoulli_sample: n >= 0 required");
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (;;) {
    for (auto& x : xs) x = rng.uniform(w.lo(), w.hi());
    std::sort(xs.begin(), xs.end());
    bool simple = true;
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (xs[i] == xs[i - 1]) simple = false;
    if (simple) break;  // collisions have probability ~0; redraw if one occurs
  }
  return make_configuration(std::move(xs));
}

PointConfiguration poisson_sample(double intensity, const Window& w, RngStream& rng) {
  if (!(intensity > 0.0)) throw DomainError("poisson_sample: intensity > 0 required");
  double lambda = intensity * w.length();
  if (lambda > 700.0) throw DomainError("poisson_sample: mean too large");
  // Knuth multiplication method.
  double limit = std::exp(-lambda);
  std::int64_t k = -1;
  double prod = 1.0;
  do {
    prod *= 1.0 - rng.uniform();
    ++k;
  } while (prod > limit);
  return bernoulli_sample(k, w, rng);
}

LoggasChain::LoggasChain(const GasParams& params, RngStream rng)
    : params_(params), rng_(rng), sigma_(1.0) {
  validate_params(params);
  c_ = kPi / static_cast<double>(params_.n);
  Window full = Window::centered(static_cast<double>(params_.n));
  PointConfiguration init = bernoulli_sample(params_.n, full, rng_);
  x_ = init.points();
  energy_.reset(interaction_energy(InteractionModel::periodic(params_.n),
                                   init, full));
}

bool LoggasChain::propose() {
  const std::int64_t n = params_.n;
  const double dn = static_cast<double>(n);
  std::size_t i = static_cast<std::size_t>(rng_.uniform_int(n));
  double xo = x_[i];
  double xn = std::remainder(xo + sigma_ * rng_.normal(), dn);

  // Acceptance ratio as a renormalized product of sine ratios; one log at the
  // end. A zero factor means the proposal landed on an occupied site: reject.
  double mant = 1.0;
  long expo = 0;
  for (std::size_t j = 0; j < x_.size(); ++j) {
    if (j == i) continue;
    double sn = std::sin(c_ * (xn - x_[j]));
    if (sn == 0.0) return false;
    double so = std::sin(c_ * (xo - x_[j]));
    mant *= std::abs(sn / so);
    if (mant > 0x1p500) {
      mant *= 0x1p-500;
      expo += 500;
    } else if (mant < 0x1p-500) {
      mant *= 0x1p500;
      expo -= 500;
    }
  }
  double delta_h = -(std::log(mant) + static_cast<double>(expo) * 0.6931471805599453);
  bool accept;
  if (delta_h <= 0.0) {
    accept = true;
    rng_.uniform();  // burn one draw so the stream advances uniformly
  } else {
    double u = 1.0 - rng_.uniform();  // (0, 1]
    accept = std::log(u) < -params_.beta * delta_h;
  }
  if (accept) {
    x_[i] = xn;
    energy_.add(delta_h);
    if (++accepted_since_refresh_ >= (1 << 20)) {
      energy_.reset(full_energy());
      accepted_since_refresh_ = 0;
    }
  }
  return accept;
}

void LoggasChain::run(std::int64_t proposals, bool adapt) {
  const std::int64_t block = 50 * params_.n;
  for (std::int64_t s = 0; s < proposals; ++s) {
    bool acc = propose();
    ++proposals_;
    accepted_ += acc ? 1 : 0;
    if (adapt) {
      ++block_proposals_;
      block_accepted_ += acc ? 1 : 0;
      if (block_proposals_ >= block) {
        double rate = static_cast<double>(block_accepted_) /
                      static_cast<double>(block_proposals_);
        if (rate < 0.3) sigma_ *= 0.8;
        if (rate > 0.5) sigma_ *= 1.25;
        sigma_ = std::clamp(sigma_, 1e-4, 0.5 * static_cast<double>(params_.n));
        block_proposals_ = 0;
        block_accepted_ = 0;
      }
    }
  }
}

PointConfiguration LoggasChain::current() const {
  std::vector<double> xs = x_;
  return make_configuration(std::move(xs));
}

double LoggasChain::full_energy() const {
  std::vector<double> xs = x_;
  std::sort(xs.begin(), xs.end());
  CompensatedSum s;
  InteractionModel model = InteractionModel::periodic(params_.n);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) s.add(model.g(xs[i] - xs[j]));
  return s.value();
}

double LoggasChain::acceptance_rate() const {
  if (proposals_ == 0) return 0.0;
  return static_cast<double>(accepted_) / static_cast<double>(proposals_);
}

std::vector<PointConfiguration> loggas_mcmc(const GasParams& params,
                                            const McmcSchedule& schedule,
                                            RngStream rng, double* acceptance_rate) {
  validate_params(params);
  if (schedule.burn_in < 0 || schedule.thin < 1 || schedule.steps <= schedule.burn_in)
    throw InvalidScheduleError("loggas_mcmc: need steps > burn_in >= 0 and thin >= 1");
  LoggasChain chain(params, rng);
  chain.run(schedule.burn_in, /*adapt=*/true);
  std::int64_t n_emit = (schedule.steps - schedule.burn_in) / schedule.thin;
  std::vector<PointConfiguration> out;
  out.reserve(static_cast<std::size_t>(n_emit));
  for (std::int64_t k = 0; k < n_emit; ++k) {
    chain.run(schedule.thin);
    out.push_back(chain.current());
  }
  if (acceptance_rate) *acceptance_rate = chain.acceptance_rate();
  return out;
}

PointConfiguration gibbs_kernel_sample(const KernelSpec& spec, std::int64_t steps,
                                       RngStream& rng) {
  if (spec.fixed_count < 0) throw DomainError("kernel: fixed_count >= 0 required");
  if (!(spec.beta > 0.0)) throw DomainError("kernel: beta > 0 required");
  const std::int64_t count = spec.fixed_count;
  if (count == 0) return PointConfiguration{};

  std::vector<double> ext;
  for (double u : spec.exterior) {
    if (spec.inner.contains(u))
      throw ExteriorOverlapError("kernel: exterior point inside the inner window");
    if (std::abs(u) <= spec.outer_radius) ext.push_back(u);
  }

  if (steps <= 0) steps = 200 * count;
  std::vector<double> eta = bernoulli_sample(count, spec.inner, rng).points();

  auto one_body = [&](double x) {
    CompensatedSum s;
    for (double u : ext) s.add(spec.model.g(x - u));
    return s.value();
  };

  for (std::int64_t step = 0; step < steps; ++step) {
    std::size_t i = static_cast<std::size_t>(rng.uniform_int(count));
    double xo = eta[i];
    double xn = rng.uniform(spec.inner.lo(), spec.inner.hi());
    bool collision = false;
    CompensatedSum delta;
    for (std::size_t j = 0; j < eta.size(); ++j) {
      if (j == i) continue;
      if (xn == eta[j]) {
        collision = true;
        break;
      }
      delta.add(spec.model.g(xn - eta[j]) - spec.model.g(xo - eta[j]));
    }
    if (collision) {
      rng.uniform();  // keep the draw count aligned with the non-collision path
      continue;
    }
    delta.add(one_body(xn) - one_body(xo));
    double dh = delta.value();
    bool accept;
    if (dh <= 0.0) {
      accept = true;
      rng.uniform();
    } else {
      accept = std::log(1.0 - rng.uniform()) < -spec.beta * dh;
    }
    if (accept) eta[i] = xn;
  }
  return make_configuration(std::move(eta));
}

PointConfiguration resample_interior(const PointConfiguration& gamma,
                                     const Window& inner, double outer_radius,
                                     const InteractionModel& model, double beta,
                                     std::int64_t steps, RngStream& rng) {
  double needed = std::max(std::abs(inner.lo()), std::abs(inner.hi()));
  if (outer_radius < needed)
    throw WindowNestingError("resample_interior: outer radius does not cover inner");
  PointConfiguration interior = restrict_to(gamma, inner);
  if (interior.empty()) return gamma;

  KernelSpec spec{inner, outer_radius, model, beta,
                  static_cast<std::int64_t>(interior.size()),
                  PointConfiguration{}};
  // All of gamma outside inner is preserved; only points within the radius
  // enter the kernel's one-body term.
  std::vector<double> outside;
  for (double u : gamma)
    if (!inner.contains(u)) outside.push_back(u);
  PointConfiguration exterior = make_configuration(outside);
  spec.exterior = exterior;
  PointConfiguration eta = gibbs_kernel_sample(spec, steps, rng);
  return merge_disjoint(eta, exterior);
}

}  // namespace loggas
