#include "loggas/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "loggas/numeric.hpp"

namespace loggas {

Window::Window(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw NonFiniteError("window bounds must be finite");
  if (!(lo < hi)) throw DomainError("window requires lo < hi");
}

PointConfiguration make_configuration(std::vector<double> coords) {
  for (double x : coords) {
    if (!std::isfinite(x)) throw NonFiniteError("configuration coordinate is not finite");
  }
  std::sort(coords.begin(), coords.end());
  for (std::size_t i = 1; i < coords.size(); ++i) {
    if (coords[i] == coords[i - 1])
      throw DuplicatePointError("configuration contains a duplicate point");
  }
  PointConfiguration g;
  g.pts_ = std::move(coords);
  return g;
}

PointConfiguration restrict_to(const PointConfiguration& gamma, const Window& w) {
  const auto& p = gamma.points();
  auto first = std::lower_bound(p.begin(), p.end(), w.lo());
  auto last = std::upper_bound(first, p.end(), w.hi());
  PointConfiguration g;
  g.pts_.assign(first, last);
  return g;
}

PointConfiguration window_difference(const PointConfiguration& gamma,
                                     const Window& inner, const Window& outer) {
  if (!outer.contains(inner))
    throw WindowNestingError("inner window not contained in outer window");
  const auto& p = gamma.points();
  auto o0 = std::lower_bound(p.begin(), p.end(), outer.lo());
  auto i0 = std::lower_bound(o0, p.end(), inner.lo());
  auto i1 = std::upper_bound(i0, p.end(), inner.hi());
  auto o1 = std::upper_bound(i1, p.end(), outer.hi());
  PointConfiguration g;
  g.pts_.reserve(static_cast<std::size_t>((i0 - o0) + (o1 - i1)));
  g.pts_.assign(o0, i0);
  g.pts_.insert(g.pts_.end(), i1, o1);
  return g;
}

PointConfiguration merge_disjoint(const PointConfiguration& a,
                                  const PointConfiguration& b) {
  PointConfiguration g;
  g.pts_.resize(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), g.pts_.begin());
  for (std::size_t i = 1; i < g.pts_.size(); ++i) {
    if (g.pts_[i] == g.pts_[i - 1])
      throw SingularOverlapError("configurations share a point");
  }
  return g;
}

double discrepancy(const PointConfiguration& gamma, const Window& w) {
  return static_cast<double>(restrict_to(gamma, w).size()) - w.length();
}

double w1_distance(const PointConfiguration& a, const PointConfiguration& b) {
  if (a.size() != b.size())
    throw CardinalityMismatchError("w1_distance requires equal cardinalities");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(std::abs(a[i] - b[i]));
  return s.value();
}

std::string to_json_line(const PointConfiguration& gamma) {
  std::string out = "[";
  char buf[40];
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", gamma[i]);
    if (i) out += ",";
    out += buf;
  }
  out += "]";
  return out;
}

PointConfiguration parse_json_line(const std::string& line) {
  // Minimal parser for "[x1,x2,...]"; avoids dragging the JSON library into
  // every consumer of configuration streams.
  std::vector<double> xs;
  const char* s = line.c_str();
  while (*s == ' ' || *s == '\t') ++s;
  if (*s != '[') throw ParseError("configuration line must start with '['");
  ++s;
  while (*s == ' ') ++s;
  if (*s == ']') {
    ++s;
  } else {
    for (;;) {
      char* end = nullptr;
      double v = std::strtod(s, &end);
      if (end == s) throw ParseError("configuration line: expected a number");
      xs.push_back(v);
      s = end;
      while (*s == ' ') ++s;
      if (*s == ',') {
        ++s;
        continue;
      }
      if (*s == ']') {
        ++s;
        break;
      }
      throw ParseError("configuration line: expected ',' or ']'");
    }
  }
  while (*s == ' ' || *s == '\t' || *s == '\r' || *s == '\n') ++s;
  if (*s != '\0') throw ParseError("configuration line: trailing characters");
  return make_configuration(std::move(xs));
}

}  // namespace loggas
