#include "loggas/partition.hpp"

#include <cmath>
#include <vector>

#include "loggas/numeric.hpp"

namespace loggas {

namespace {
constexpr double kPi = 3.141592653589793238462643;

void check_args(std::int64_t n, double beta) {
  if (n < 1) throw DomainError("partition: n >= 1 required");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("partition: beta > 0 required");
}

// Midpoint quadrature of E_B[exp(-beta H)] on m^n cells of [-n/2, n/2]^n.
// Midpoint nodes are equally spaced, so the pair factor |2 sin(pi(x-y)/n)|^b
// depends only on the index difference d: precompute F[d] = |2 sin(pi d/m)|^b
// and contract. Coincidence cells (d = 0) carry the integrand's natural 0.
double midpoint_level(std::int64_t n, double beta, std::int64_t m) {
  if (n == 1) return 1.0;  // no pair term; normalized integrand is 1
  std::vector<double> F(static_cast<std::size_t>(m));
  for (std::int64_t d = 0; d < m; ++d) {
    double t = std::abs(2.0 * std::sin(kPi * static_cast<double>(d) /
                                       static_cast<double>(m)));
    double f;
    if (beta == 1.0) {
      f = t;
    } else if (beta == 2.0) {
      f = t * t;
    } else if (beta == 4.0) {
      double q = t * t;
      f = q * q;
    } else {
      f = (t == 0.0) ? 0.0 : std::pow(t, beta);
    }
    F[static_cast<std::size_t>(d)] = f;
  }
  auto fa = [&](std::int64_t d) { return F[static_cast<std::size_t>(std::abs(d))]; };

  CompensatedSum total;
  if (n == 2) {
    for (std::int64_t d = 1; d < m; ++d)
      total.add(2.0 * static_cast<double>(m - d) * fa(d));
    double cells = static_cast<double>(m) * static_cast<double>(m);
    return total.value() / cells;
  }
  // n == 3: sum over a = i-j, b = j-k of (#valid i) * F[a] F[b] F[a+b].
  for (std::int64_t a = -(m - 1); a < m; ++a) {
    double Fa = fa(a);
    if (Fa == 0.0) continue;
    CompensatedSum row;
    for (std::int64_t b = -(m - 1); b < m; ++b) {
      std::int64_t ab = a + b;
      if (ab <= -m || ab >= m) continue;
      std::int64_t lo = std::max({std::int64_t{0}, a, ab});
      std::int64_t hi = std::min({m, m + a, m + ab});
      if (hi <= lo) continue;
      row.add(static_cast<double>(hi - lo) * fa(b) * fa(ab));
    }
    total.add(Fa * row.value());
  }
  double dm = static_cast<double>(m);
  return total.value() / (dm * dm * dm);
}
}  // namespace

PartitionValue z_exact(std::int64_t n, double beta) {
  check_args(n, beta);
  double log_z = std::lgamma(0.5 * beta * static_cast<double>(n) + 1.0) -
                 static_cast<double>(n) * std::lgamma(0.5 * beta + 1.0);
  return PartitionValue{log_z, 0.0, PartitionMethod::exact};
}

PartitionValue z_quadrature(std::int64_t n, double beta, std::int64_t grid) {
  check_args(n, beta);
  if (n > 3) throw TooLargeError("z_quadrature supports n <= 3");
  std::int64_t m = grid;
  if (m <= 0) m = (n == 3) ? 512 : 4096;
  if (m < 2) m = 2;
  double coarse = midpoint_level(n, beta, m);
  double fine = midpoint_level(n, beta, 2 * m);
  double richardson = fine + (fine - coarse) / 3.0;  // midpoint error ~ h^2
  PartitionValue pv;
  pv.log_value = std::log(richardson);
  pv.std_error = std::abs(fine - coarse);
  pv.method = PartitionMethod::quadrature;
  return pv;
}

PartitionValue z_conditional_estimate(const KernelSpec& spec,
                                      const PointConfiguration& reference,
                                      std::int64_t n_samples, RngStream& rng) {
  if (n_samples < 1) throw DomainError("z_conditional_estimate: n_samples >= 1");
  if (!(spec.beta > 0.0)) throw DomainError("z_conditional_estimate: beta > 0");
  const std::int64_t count = spec.fixed_count;
  if (count < 0) throw DomainError("z_conditional_estimate: fixed_count >= 0");
  if (count == 0) return PartitionValue{0.0, 0.0, PartitionMethod::mc};
  if (!reference.empty() &&
      static_cast<std::int64_t>(reference.size()) != count)
    throw CardinalityMismatchError(
        "z_conditional_estimate: reference must be empty or match fixed_count");

  std::vector<double> ext;
  for (double u : spec.exterior)
    if (std::abs(u) <= spec.outer_radius) ext.push_back(u);
  auto one_body = [&](double x) {
    CompensatedSum s;
    for (double u : ext) s.add(spec.model.g(x - u));
    return s.value();
  };
  CompensatedSum ref_term;
  for (double y : reference) ref_term.add(one_body(y));

  CompensatedSum sum_w, sum_w2;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    PointConfiguration eta = bernoulli_sample(count, spec.inner, rng);
    CompensatedSum e;
    for (std::size_t i = 0; i < eta.size(); ++i) {
      for (std::size_t j = i + 1; j < eta.size(); ++j)
        e.add(spec.model.g(eta[i] - eta[j]));
      e.add(one_body(eta[i]));
    }
    double w = std::exp(-spec.beta * (e.value() - ref_term.value()));
    sum_w.add(w);
    sum_w2.add(w * w);
  }
  double m = static_cast<double>(n_samples);
  double mean = sum_w.value() / m;
  if (mean <= 0.0)
    throw DegenerateWeightError("z_conditional_estimate: all weights vanished");
  double var = 0.0;
  if (n_samples > 1) {
    var = (sum_w2.value() - m * mean * mean) / (m - 1.0);
    if (var < 0.0) var = 0.0;
  }
  double se = std::sqrt(var / m);
  PartitionValue pv;
  pv.log_value = std::log(mean);
  pv.std_error = se / mean;  // delta method: absolute error bar on log Z
  pv.method = PartitionMethod::mc;
  return pv;
}

}  // namespace loggas
