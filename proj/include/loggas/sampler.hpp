#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "loggas/config.hpp"
#include "loggas/energy.hpp"
#include "loggas/numeric.hpp"
#include "loggas/rng.hpp"

namespace loggas {

/// Ensemble parameters: n points at inverse temperature beta on the period
/// window [-n/2, n/2].
struct GasParams {
  std::int64_t n;
  double beta;
};

/// Counts are in single-particle proposals. One sweep = n proposals.
struct McmcSchedule {
  std::int64_t steps;
  std::int64_t burn_in;
  std::int64_t thin;

  /// Defaults: burn_in = 10000 * n proposals, thin = n, sized for the
  /// requested number of emitted configurations.
  static McmcSchedule defaults_for(std::int64_t n, std::int64_t n_samples);
};

/// n independent uniform points in w, returned sorted. Exact collisions are
/// redrawn so the result is simple.
PointConfiguration bernoulli_sample(std::int64_t n, const Window& w, RngStream& rng);

/// Poisson point process of the given intensity on w.
PointConfiguration poisson_sample(double intensity, const Window& w, RngStream& rng);

/// Metropolis chain for the n-point periodic log-gas: reference measure n iid
/// uniforms on [-n/2, n/2], weight exp(-beta H) with the periodic pair energy
/// H. Single-particle Gaussian proposals, wrapped periodically. The step size
/// adapts toward a 0.3-0.5 acceptance rate only while adaptation is enabled
/// (burn-in) and is frozen afterwards.
class LoggasChain {
 public:
  LoggasChain(const GasParams& params, RngStream rng);

  void run(std::int64_t proposals, bool adapt = false);

  PointConfiguration current() const;
  double cached_energy() const { return energy_.value(); }
  double full_energy() const;
  double acceptance_rate() const;
  double step_sigma() const { return sigma_; }
  std::int64_t proposals_done() const { return proposals_; }
  const GasParams& params() const { return params_; }
  RngStream& rng() { return rng_; }

 private:
  bool propose();

  GasParams params_;
  RngStream rng_;
  std::vector<double> x_;     // unordered particle positions
  CompensatedSum energy_;     // tracks H incrementally
  double sigma_;
  double c_;                  // pi / n
  std::int64_t proposals_ = 0;
  std::int64_t accepted_ = 0;
  std::int64_t block_proposals_ = 0;
  std::int64_t block_accepted_ = 0;
  std::int64_t accepted_since_refresh_ = 0;
};

/// Runs one chain and collects every thin-th state after burn-in.
/// Throws InvalidScheduleError for steps <= burn_in, burn_in < 0 or thin < 1.
std::vector<PointConfiguration> loggas_mcmc(const GasParams& params,
                                            const McmcSchedule& schedule,
                                            RngStream rng,
                                            double* acceptance_rate = nullptr);

/// Conditional kernel specification: resample fixed_count points inside inner
/// against the fixed exterior, with weight
///   exp(-beta [ H_inner(eta) + sum_{x in eta} U(x) ]),
///   U(x) = sum over exterior u, |u| <= outer_radius, of g(x - u),
/// relative to fixed_count iid uniforms on inner. The kernel depends only on
/// the exterior and the count, so no interior reference appears here.
struct KernelSpec {
  Window inner;
  double outer_radius;
  InteractionModel model;
  double beta;
  std::int64_t fixed_count;
  PointConfiguration exterior;
};

/// One draw from the kernel via Metropolis with single-particle uniform
/// redraws inside the window; steps <= 0 selects the default 200 * count.
/// The chain starts from a fresh uniform draw. Throws ExteriorOverlapError if
/// an exterior point lies inside the inner window.
PointConfiguration gibbs_kernel_sample(const KernelSpec& spec, std::int64_t steps,
                                       RngStream& rng);

/// Replaces the interior of gamma by a kernel draw with matching count and
/// returns interior-draw union exterior. Every point of gamma outside inner
/// is preserved bitwise. An empty interior returns gamma unchanged.
PointConfiguration resample_interior(const PointConfiguration& gamma,
                                     const Window& inner, double outer_radius,
                                     const InteractionModel& model, double beta,
                                     std::int64_t steps, RngStream& rng);

/// Runs fn(chain_index) for chain_index in [0, n_chains) on up to `workers`
/// threads. Results are collected by index, so the outcome is identical for
/// any worker count as long as fn(i) depends only on i.
template <class T>
std::vector<T> run_chains(int n_chains, int workers,
                          const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(n_chains));
  if (workers < 1) workers = 1;
  if (workers > n_chains) workers = n_chains;
  if (workers == 1) {
    for (int i = 0; i < n_chains; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_chains));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n_chains) return;
        try {
          out[static_cast<std::size_t>(i)] = fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace loggas
