#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "loggas/partition.hpp"
#include "loggas/sampler.hpp"

namespace loggas {

struct MCEstimate {
  double mean = 0.0;
  double variance = 0.0;   // unbiased sample variance
  double std_error = 0.0;  // sqrt(variance / n_samples)
  std::int64_t n_samples = 0;
};

/// Mean / variance / standard error of a sample vector (compensated sums).
MCEstimate summarize(std::span<const double> xs);

/// Standard error of the mean from batch means; robust to residual
/// autocorrelation in chain output.
double batch_means_se(std::span<const double> xs, int n_batches = 64);

/// Shared knobs for diagnostics that generate their own gas samples.
/// Negative burn-in/thin select the chain defaults (1e4 sweeps, 1 sweep).
struct SamplingOptions {
  int chains = 4;
  std::int64_t samples_per_chain = 1000;
  std::int64_t burn_in_sweeps = -1;
  std::int64_t thin_sweeps = -1;
  int workers = 1;
};

/// Draws gas samples with per-chain derived streams (seed, chain index) and
/// concatenates them in chain order.
std::vector<PointConfiguration> sample_gas(const GasParams& params,
                                           const SamplingOptions& opts,
                                           std::uint64_t seed);

struct DlrOptions {
  SamplingOptions sampling;
  int k_inner = 4;                // interior redraws averaged per sample
  std::int64_t kernel_steps = 0;  // <= 0: default 200 * count
  double outer_radius = -1.0;     // < 0: full period (n/2)
};

/// Paired one-step invariance residual for the statistic f:
/// for each gas sample gamma, compares f(gamma) against the average of f over
/// k_inner conditional redraws of the interior, and summarizes the paired
/// differences. Exactly zero for f constant or f = interior count.
MCEstimate dlr_residual(const std::function<double(const PointConfiguration&)>& f,
                        const GasParams& params, const Window& inner,
                        std::uint64_t seed, const DlrOptions& opts);

struct TruncationProfile {
  std::vector<double> radii;
  std::vector<double> sup_estimates;          // mean over samples of per-sample sup
  double delta = 0.0;
  std::vector<double> fraction_within_delta;  // one entry per radius
  std::int64_t n_samples = 0;
};

struct TruncationOptions {
  SamplingOptions sampling;
  std::int64_t trial_count = 8;  // interior trial configurations per sample
  double delta = 0.1;
};

/// For each radius p, estimates per sample the sup over trial interiors eta of
/// |M(eta, gamma; inner, [-n/2,n/2]) - M(eta, gamma; inner, [-p/2,p/2])|
/// and reports the fraction of samples with estimate <= delta. Trials cover
/// clustered-left, clustered-right, endpoint-split and uniform interiors.
/// p = n makes the difference exactly zero.
TruncationProfile truncation_profile(const GasParams& params, const Window& inner,
                                     std::span<const double> radii,
                                     std::uint64_t seed,
                                     const TruncationOptions& opts);

struct DiscrepancyRow {
  double window_lo = 0.0;
  double window_hi = 0.0;
  MCEstimate first_moment;
  MCEstimate second_moment;
  double ratio = 0.0;  // E[D^2] / window length
};

/// Per-window moments of the count discrepancy over a sample set.
std::vector<DiscrepancyRow> discrepancy_stats(
    std::span<const PointConfiguration> samples, std::span<const Window> windows);

/// Empirical probability of the moderate-occupation event
///   {count(inner) <= p and count([-p/2, p/2]) <= p^2},
/// with a binomial standard error.
MCEstimate overcrowding_probability(std::span<const PointConfiguration> samples,
                                    const Window& inner, double p);

struct CampbellEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int order = 0;
  std::int64_t n_samples = 0;
};

/// Campbell-measure functional of the given order:
/// per sample, the sum of h(tuple, rest) over ordered tuples of distinct
/// points, averaged over samples. h receives the tuple coordinates and the
/// configuration with those points removed. Throws CombinatorialBlowupError
/// when a sample's ordered-tuple count exceeds max_tuples_per_sample.
CampbellEstimate campbell_estimate(
    std::span<const PointConfiguration> samples, int order,
    const std::function<double(std::span<const double>, const PointConfiguration&)>& h,
    std::int64_t max_tuples_per_sample = 1000000);

/// Centered linear statistic at scale ell:
///   sum_x phi(x / ell) - ell * integral of phi,
/// phi supported on phi_support. Throws SupportOverflowError if the scaled
/// support leaves the sampled domain.
MCEstimate fluctuation_stat(std::span<const PointConfiguration> samples,
                            const std::function<double(double)>& phi,
                            const Window& phi_support, double ell,
                            const Window& domain);

/// Plateau test function: 1 on w, cosine decay to 0 over width s outside.
double plateau_taper(double x, const Window& w, double s);

/// Per-scale values of the smoothed count T_s = sum_x phi_s(x); result is
/// indexed [scale][sample]. The shared samples make paired comparisons of
/// adjacent scales well conditioned.
std::vector<std::vector<double>> rigidity_statistics(
    std::span<const PointConfiguration> samples, const Window& w,
    std::span<const double> scales);

struct RigidityPoint {
  double scale = 0.0;
  double stat_mean = 0.0;
  double stat_variance = 0.0;
  double variance_se = 0.0;  // fourth-moment standard error of the variance
  std::int64_t n_samples = 0;
};

/// Variance-versus-scale curve of the smoothed counts.
std::vector<RigidityPoint> rigidity_probe(std::span<const PointConfiguration> samples,
                                          const Window& w,
                                          std::span<const double> scales);

struct VarianceDifference {
  double difference = 0.0;  // Var(a) - Var(b)
  double std_error = 0.0;   // batch-means SE of the paired estimator
};

/// Paired estimate of Var(a) - Var(b) from per-sample statistic values
/// a_i, b_i computed on the same samples.
VarianceDifference paired_variance_difference(std::span<const double> a,
                                              std::span<const double> b);

/// Absolute residual of the periodic decomposition identity
///   H_full(gamma) + M(eta, gamma) + H_inner(eta)
///     = H_full(eta union gamma_exterior) + H_inner(gamma)
/// on the period window [-n/2, n/2]. Throws SingularOverlapError when eta
/// touches an exterior point, CardinalityMismatchError when |eta| differs
/// from the interior count.
double algebraic_identity_residual(std::int64_t n, const PointConfiguration& gamma,
                                   const PointConfiguration& eta, const Window& inner);

/// One row of the tabular results emitted by the command-line tool.
struct ResultRow {
  std::string test;
  std::int64_t n = 0;
  double beta = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double param = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  bool pass = false;
};

std::string csv_header();
std::string to_csv_row(const ResultRow& row);

}  // namespace loggas
