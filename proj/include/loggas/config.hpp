#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "loggas/errors.hpp"

namespace loggas {

/// Closed interval [lo, hi] with lo < hi, both finite.
class Window {
 public:
  Window(double lo, double hi);

  /// The centered window of parameter p, i.e. [-p/2, p/2].
  static Window centered(double p) { return Window(-0.5 * p, 0.5 * p); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double length() const { return hi_ - lo_; }
  bool contains(double x) const { return x >= lo_ && x <= hi_; }
  bool contains(const Window& inner) const {
    return inner.lo_ >= lo_ && inner.hi_ <= hi_;
  }

 private:
  double lo_;
  double hi_;
};

/// Finite simple point configuration, stored strictly ascending.
class PointConfiguration {
 public:
  PointConfiguration() = default;

  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  double operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<double>& points() const { return pts_; }
  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  bool operator==(const PointConfiguration& o) const { return pts_ == o.pts_; }

 private:
  friend PointConfiguration make_configuration(std::vector<double> coords);
  friend PointConfiguration restrict_to(const PointConfiguration&, const Window&);
  friend PointConfiguration window_difference(const PointConfiguration&,
                                              const Window&, const Window&);
  friend PointConfiguration merge_disjoint(const PointConfiguration&,
                                           const PointConfiguration&);
  std::vector<double> pts_;  // invariant: sorted, strictly increasing, finite
};

/// Sorts the coordinates and validates them.
/// Throws NonFiniteError for NaN/inf entries, DuplicatePointError for exact
/// duplicates.
PointConfiguration make_configuration(std::vector<double> coords);

/// Points of gamma lying in the closed window w, order preserved.
PointConfiguration restrict_to(const PointConfiguration& gamma, const Window& w);

/// Points of gamma in the closed outer window but not in the closed inner
/// one. Throws WindowNestingError unless inner is contained in outer.
PointConfiguration window_difference(const PointConfiguration& gamma,
                                     const Window& inner, const Window& outer);

/// Union of two configurations with disjoint supports.
/// Throws SingularOverlapError if they share a point.
PointConfiguration merge_disjoint(const PointConfiguration& a,
                                  const PointConfiguration& b);

/// Number of points in w minus the window length. The count is recoverable
/// as discrepancy + length.
double discrepancy(const PointConfiguration& gamma, const Window& w);

/// 1-Wasserstein distance between equal-cardinality configurations:
/// sum of |a_i - b_i| over the sorted matching, which is optimal in 1-D.
/// Throws CardinalityMismatchError when sizes differ.
double w1_distance(const PointConfiguration& a, const PointConfiguration& b);

/// One-line JSON serialization: ascending array of numbers, full precision.
std::string to_json_line(const PointConfiguration& gamma);

/// Parses a line produced by to_json_line (JSON array of finite numbers).
/// Throws ParseError on malformed text, plus the make_configuration errors.
PointConfiguration parse_json_line(const std::string& line);

}  // namespace loggas
