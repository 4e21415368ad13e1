#include "loggas/energy.hpp"

#include <algorithm>
#include <cmath>

#include "loggas/numeric.hpp"

namespace loggas {

namespace {
constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 6.283185307179586476925287;

bool subset_of(const PointConfiguration& eta, const Window& w) {
  return eta.empty() || (eta[0] >= w.lo() && eta[eta.size() - 1] <= w.hi());
}
}  // namespace

InteractionModel InteractionModel::periodic(std::int64_t period) {
  if (period < 1) throw DomainError("periodic model requires period >= 1");
  return InteractionModel(period);
}

double InteractionModel::g(double x) const {
  if (period_ == 0) {
    if (x == 0.0) return 0.0;
    return -std::log(std::abs(x));
  }
  // Reduce to [-n/2, n/2] first: exact periodicity and full sine accuracy
  // for arguments far from the base period.
  double n = static_cast<double>(period_);
  double r = std::remainder(x, n);
  if (r == 0.0) return 0.0;
  return -std::log(std::abs(2.0 * std::sin(kPi * r / n)));
}

double pair_potential(const InteractionModel& model, double x) { return model.g(x); }

double interaction_energy(const InteractionModel& model,
                          const PointConfiguration& gamma, const Window& w) {
  PointConfiguration part = restrict_to(gamma, w);
  CompensatedSum s;
  for (std::size_t i = 0; i < part.size(); ++i)
    for (std::size_t j = i + 1; j < part.size(); ++j) s.add(model.g(part[i] - part[j]));
  return s.value();
}

namespace {

// Shared core: interaction of (eta - gamma_inner) with a fixed list of
// exterior points, accumulated into `s`.
void add_exterior_terms(const InteractionModel& model, const PointConfiguration& eta,
                        const PointConfiguration& gamma_inner,
                        const PointConfiguration& exterior, CompensatedSum& s) {
  for (double u : exterior) {
    for (double x : eta) s.add(model.g(x - u));
    for (double y : gamma_inner) s.add(-model.g(y - u));
  }
}

}  // namespace

double move_function(const InteractionModel& model, const PointConfiguration& eta,
                     const PointConfiguration& gamma, const Window& inner,
                     const Window& outer) {
  if (!outer.contains(inner))
    throw WindowNestingError("move_function: inner window must nest in outer");
  if (!subset_of(eta, inner))
    throw DomainError("move_function: eta must lie inside the inner window");
  PointConfiguration gamma_inner = restrict_to(gamma, inner);
  if (eta.size() != gamma_inner.size())
    throw CardinalityMismatchError("move_function: |eta| != interior count of gamma");
  PointConfiguration exterior = window_difference(gamma, inner, outer);
  CompensatedSum s;
  add_exterior_terms(model, eta, gamma_inner, exterior, s);
  return s.value();
}

MoveValue move_function_limit(const PointConfiguration& eta,
                              const PointConfiguration& gamma, const Window& inner,
                              std::span<const double> p_schedule, double tol) {
  if (p_schedule.empty()) throw DomainError("move_function_limit: empty schedule");
  for (std::size_t i = 0; i + 1 < p_schedule.size(); ++i)
    if (!(p_schedule[i] < p_schedule[i + 1]))
      throw DomainError("move_function_limit: schedule must increase");
  double needed = std::max(std::abs(inner.lo()), std::abs(inner.hi()));
  if (p_schedule[0] < needed)
    throw WindowNestingError("move_function_limit: first radius does not cover inner");
  if (!subset_of(eta, inner))
    throw DomainError("move_function_limit: eta must lie inside the inner window");
  PointConfiguration gamma_inner = restrict_to(gamma, inner);
  if (eta.size() != gamma_inner.size())
    throw CardinalityMismatchError("move_function_limit: cardinality mismatch");

  const InteractionModel model = InteractionModel::non_periodic();
  // Accumulate one annulus at a time; value at radius p_k is the running sum.
  CompensatedSum s;
  double prev_radius = 0.0;
  double value = 0.0;
  double inc1 = 0.0, inc2 = 0.0;  // last two increments
  std::size_t n_incs = 0;
  bool first = true;
  for (double p : p_schedule) {
    Window cut(-p, p);
    PointConfiguration ring =
        first ? window_difference(gamma, inner, cut)
              : window_difference(gamma, Window(-prev_radius, prev_radius), cut);
    add_exterior_terms(model, eta, gamma_inner, ring, s);
    double next = s.value();
    if (!first) {
      inc1 = inc2;
      inc2 = next - value;
      ++n_incs;
    }
    value = next;
    prev_radius = p;
    first = false;
  }
  MoveValue mv;
  mv.value = value;
  mv.inner_lo = inner.lo();
  mv.inner_hi = inner.hi();
  mv.outer_radius = p_schedule[p_schedule.size() - 1];
  mv.last_increment = n_incs ? inc2 : 0.0;
  mv.converged = n_incs >= 2 && std::abs(inc1) <= tol && std::abs(inc2) <= tol;
  return mv;
}

double exterior_weight(double x, const PointConfiguration& gamma_ext, double beta,
                       double p) {
  if (beta <= 0.0) throw DomainError("exterior_weight: beta must be positive");
  CompensatedSum logs;
  for (double u : gamma_ext) {
    if (std::abs(u) > p) continue;
    if (u == 0.0) throw DomainError("exterior_weight: exterior point at 0");
    double factor = std::abs(1.0 - x / u);
    if (factor == 0.0) return 0.0;
    logs.add(std::log(factor));
  }
  return std::exp(beta * logs.value());
}

CostValue cost_function(std::span<const double> tuple, const PointConfiguration& gamma,
                        double p, double tol) {
  if (tuple.empty()) throw DomainError("cost_function: empty tuple");
  if (!(p > 0.0)) throw DomainError("cost_function: truncation radius must be positive");
  std::vector<double> xs(tuple.begin(), tuple.end());
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] == xs[i - 1])
      throw SingularOverlapError("cost_function: repeated tuple entry");
  for (double x : xs) {
    auto it = std::lower_bound(gamma.begin(), gamma.end(), x);
    if (it != gamma.end() && *it == x)
      throw SingularOverlapError("cost_function: tuple point coincides with gamma");
  }

  const InteractionModel model = InteractionModel::non_periodic();
  CompensatedSum s;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) s.add(model.g(xs[i] - xs[j]));
  double pair_term = s.value();

  // Background term, accumulated outward with checkpoints at p/8, p/4, p/2, p
  // so truncation convergence can be flagged as for the move function.
  std::vector<double> by_abs;
  for (double y : gamma)
    if (std::abs(y) <= p) by_abs.push_back(y);
  std::sort(by_abs.begin(), by_abs.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  const double checkpoints[4] = {p / 8.0, p / 4.0, p / 2.0, p};
  double at_checkpoint[4];
  CompensatedSum tail;
  std::size_t k = 0;
  for (int c = 0; c < 4; ++c) {
    while (k < by_abs.size() && std::abs(by_abs[k]) <= checkpoints[c]) {
      double y = by_abs[k];
      for (double x : xs) tail.add(model.g(x - y) - model.g(y));
      ++k;
    }
    at_checkpoint[c] = tail.value();
  }

  CostValue cv;
  cv.value = pair_term + at_checkpoint[3];
  cv.tuple_size = static_cast<int>(xs.size());
  cv.truncation_radius = p;
  double inc1 = at_checkpoint[2] - at_checkpoint[1];
  double inc2 = at_checkpoint[3] - at_checkpoint[2];
  cv.converged = std::abs(inc1) <= tol && std::abs(inc2) <= tol;
  return cv;
}

double renormalized_energy_periodic(const PointConfiguration& gamma, std::int64_t n) {
  if (n < 1) throw DomainError("renormalized_energy_periodic: n >= 1 required");
  if (static_cast<std::int64_t>(gamma.size()) != n)
    throw CardinalityMismatchError("renormalized_energy_periodic: |gamma| != n");
  Window full = Window::centered(static_cast<double>(n));
  if (!subset_of(gamma, full))
    throw DomainError("renormalized_energy_periodic: gamma must lie in [-n/2, n/2]");
  double h = interaction_energy(InteractionModel::periodic(n), gamma, full);
  double dn = static_cast<double>(n);
  return kPi / dn * (2.0 * h + dn * std::log(dn / kTwoPi));
}

double moved_charge_potential(const InteractionModel& model,
                              const PointConfiguration& eta,
                              const PointConfiguration& ref, double x) {
  if (eta.size() != ref.size())
    throw CardinalityMismatchError("moved_charge_potential: cardinality mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    s.add(model.g(x - eta[i]));
    s.add(-model.g(x - ref[i]));
  }
  return s.value();
}

double v_function(double t) {
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("v_function: t outside [-1, 1]");
  double a = (1.0 + t) == 0.0 ? 0.0 : (1.0 + t) * std::log1p(t);
  double b = (1.0 - t) == 0.0 ? 0.0 : (1.0 - t) * std::log1p(-t);
  return a + b;
}

}  // namespace loggas
