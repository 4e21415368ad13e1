#pragma once

#include <cstdint>
#include <span>

#include "loggas/config.hpp"

namespace loggas {

/// Pair interaction family. Non-periodic: g(x) = -log|x|. Periodic with
/// integer period n: g_n(x) = -log|2 sin(pi x / n)|. Both take the value 0 at
/// the singularity (x = 0, resp. x in n*Z); coincident-point energies are
/// handled as hard rejections upstream, never as floating inf.
class InteractionModel {
 public:
  static InteractionModel non_periodic() { return InteractionModel(0); }
  static InteractionModel periodic(std::int64_t period);

  bool is_periodic() const { return period_ > 0; }
  std::int64_t period() const { return period_; }

  double g(double x) const;

 private:
  explicit InteractionModel(std::int64_t p) : period_(p) {}
  std::int64_t period_;  // 0 means non-periodic
};

/// Value of the pair potential at separation x.
double pair_potential(const InteractionModel& model, double x);

/// Interior pair energy: sum of g(x_i - x_j) over unordered pairs of points
/// of gamma inside w. Compensated summation; symmetric in the input order by
/// construction.
double interaction_energy(const InteractionModel& model,
                          const PointConfiguration& gamma, const Window& w);

/// Result of a truncated move-function evaluation.
struct MoveValue {
  double value;
  double inner_lo;
  double inner_hi;
  double outer_radius;   // last truncation radius used
  bool converged;        // two final increments within tolerance
  double last_increment;
};

/// Interaction between the moved interior charge (eta - gamma_inner) and the
/// exterior points of gamma in outer \ inner:
///   sum over u in gamma_(outer\inner) of
///     [ sum_{x in eta} g(x-u) - sum_{y in gamma_inner} g(y-u) ].
/// Preconditions: eta inside inner, |eta| = |gamma restricted to inner|.
/// Throws WindowNestingError, CardinalityMismatchError, DomainError.
double move_function(const InteractionModel& model, const PointConfiguration& eta,
                     const PointConfiguration& gamma, const Window& inner,
                     const Window& outer);

/// Truncated limit of the non-periodic move function along an increasing
/// radius schedule; at radius p the exterior is cut symmetrically to |u| <= p.
/// Non-convergence is reported through the flag, never thrown.
MoveValue move_function_limit(const PointConfiguration& eta,
                              const PointConfiguration& gamma, const Window& inner,
                              std::span<const double> p_schedule, double tol);

/// Multiplicative exterior weight at x:
///   product over u in gamma_ext with |u| <= p of |1 - x/u|^beta,
/// evaluated in log space. A factor that is exactly zero short-circuits to 0.
/// Throws DomainError if an included exterior point is 0.
double exterior_weight(double x, const PointConfiguration& gamma_ext, double beta,
                       double p);

/// Result of a truncated cost evaluation for an n-tuple.
struct CostValue {
  double value;
  int tuple_size;
  double truncation_radius;
  bool converged;
};

/// Tuple cost: sum_{i<j} g(x_i - x_j)
///   + sum over y in gamma, |y| <= p, of sum_i [ g(x_i - y) - g(y) ],
/// with the background sum accumulated outward in |y| so convergence of the
/// truncation can be flagged. Throws SingularOverlapError if tuple entries
/// repeat or hit a point of gamma.
CostValue cost_function(std::span<const double> tuple, const PointConfiguration& gamma,
                        double p, double tol);

/// Renormalized energy of an n-point configuration on the period window
/// [-n/2, n/2]:  (pi/n) * (2 H + n log(n / (2 pi))), H the periodic pair
/// energy of the full window. Equally spaced points give -pi log(2 pi) for
/// every n. Throws CardinalityMismatchError / DomainError.
double renormalized_energy_periodic(const PointConfiguration& gamma, std::int64_t n);

/// Potential of the moved charge at x:
///   sum_{e in eta} g(x - e) - sum_{y in ref} g(x - y),  |eta| = |ref|.
/// Diverges at the charges themselves; meaningful away from them.
double moved_charge_potential(const InteractionModel& model,
                              const PointConfiguration& eta,
                              const PointConfiguration& ref, double x);

/// v(t) = integral over s in [-1,1] of -log|t - s| ds + (t-independent
/// constant), in closed form: (1+t)log(1+t) + (1-t)log(1-t) on [-1, 1].
/// Throws DomainError outside [-1, 1].
double v_function(double t);

}  // namespace loggas
