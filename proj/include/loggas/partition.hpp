#pragma once

#include <cstdint>

#include "loggas/sampler.hpp"

namespace loggas {

enum class PartitionMethod { exact, quadrature, mc };

struct PartitionValue {
  double log_value;
  double std_error;  // 0 for exact; quadrature: grid-refinement difference
  PartitionMethod method;
};

/// Closed form for the normalization of the n-point periodic gas:
///   log Z = lgamma(beta n / 2 + 1) - n * lgamma(beta / 2 + 1).
PartitionValue z_exact(std::int64_t n, double beta);

/// Midpoint tensor-grid quadrature of the same normalization with one
/// Richardson refinement step; exact-diagonal cells contribute the
/// integrand's natural zero. grid <= 0 picks a size suited to n.
/// Throws TooLargeError for n > 3.
PartitionValue z_quadrature(std::int64_t n, double beta, std::int64_t grid = 0);

/// Monte Carlo estimate of the conditional normalization
///   Z = E[ exp(-beta (H_inner(eta) + sum_eta U - sum_ref U)) ],
/// eta ~ fixed_count iid uniforms on spec.inner, U the exterior one-body
/// potential of spec. reference may be empty (no subtraction) or have
/// exactly fixed_count points. fixed_count = 0 gives log 1 = 0 exactly.
/// std_error is the relative standard error of the mean, i.e. an absolute
/// error bar on log_value. Throws DegenerateWeightError if every sampled
/// weight is zero, CardinalityMismatchError for a bad reference.
PartitionValue z_conditional_estimate(const KernelSpec& spec,
                                      const PointConfiguration& reference,
                                      std::int64_t n_samples, RngStream& rng);

}  // namespace loggas
