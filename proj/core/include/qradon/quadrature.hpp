#pragma once

#include <span>
#include <vector>

namespace qradon {

// One-dimensional quadrature rule: nodes x[i] with weights w[i].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1,1].  Nodes are the Legendre roots,
// found by Newton iteration from the Chebyshev initial guess; converges to
// machine precision in a handful of steps.
Rule1D gauss_legendre(int n);

// The same rule affinely mapped to [lo,hi].
Rule1D gauss_legendre(int n, double lo, double hi);

// Sum with pairwise (cascade) splitting, fixed evaluation order.  Error grows
// like log(n) rather than n, and the result is bit-reproducible for a given
// input order.
double pairwise_sum(std::span<const double> terms);

// Axis-aligned integration region, one interval per coordinate.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
using Box = std::vector<Interval>;

// Smallest box containing both arguments (componentwise union).
Box box_union(const Box& a, const Box& b);

// Box grown by `pad` on every side.
Box box_pad(const Box& b, double pad);

bool box_contains(const Box& outer, const Box& inner);
bool box_contains_point(const Box& b, std::span<const double> p);

// Coordinate-axis descriptor.  Integration always happens in "working"
// coordinates: the raw value for line/angle axes, the logarithm for a
// logscale axis (so a positive chart coordinate c corresponds to the working
// coordinate log c).  Angle axes are periodic with the stated period.
struct Axis {
  enum class Kind { line, logscale, angle };
  Kind kind = Kind::line;
  double period = 0.0;  // angle axes only

  static Axis line() { return {Kind::line, 0.0}; }
  static Axis logscale() { return {Kind::logscale, 0.0}; }
  static Axis angle(double period) { return {Kind::angle, period}; }
};

// chart <-> working coordinate maps for a single axis.
double chart_of_working(const Axis& ax, double q);
double working_of_chart(const Axis& ax, double c);

std::vector<double> chart_of_working(std::span<const Axis> axes, std::span<const double> q);
std::vector<double> working_of_chart(std::span<const Axis> axes, std::span<const double> c);

// Distance along one axis; wraps around for angle axes.
double axis_distance(const Axis& ax, double a, double b);

// Normalise an angle into [0, period).
double wrap_angle(double value, double period);

// Tensor-product Gauss-Legendre grid over `box` (working coordinates), one
// rule factor per axis.  `order` is the per-axis point count.  The optional
// density multiplies every weight; it receives working coordinates.
struct TensorGrid {
  std::vector<std::vector<double>> nodes;  // size prod(order), each of dim box.size()
  std::vector<double> weights;
};
TensorGrid tensor_gauss_legendre(const Box& box, int order);

}  // namespace qradon
