#include "qradon/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

#include "qradon/errors.hpp"

namespace qradon {

Rule1D gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: order must be >= 1");
  Rule1D rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));

  const int m = (n + 1) / 2;  // roots come in +/- pairs
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root of P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n(z) and P_{n-1}(z) by the three-term recurrence.
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.x[static_cast<std::size_t>(i)] = -z;
    rule.x[static_cast<std::size_t>(n - 1 - i)] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.w[static_cast<std::size_t>(i)] = w;
    rule.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.x[static_cast<std::size_t>(n / 2)] = 0.0;  // exact midpoint
  return rule;
}

Rule1D gauss_legendre(int n, double lo, double hi) {
  Rule1D base = gauss_legendre(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < base.x.size(); ++i) {
    base.x[i] = mid + half * base.x[i];
    base.w[i] *= half;
  }
  return base;
}

namespace {
double pairwise_sum_impl(std::span<const double> t) {
  if (t.size() <= 8) {
    double s = 0.0;
    for (double v : t) s += v;
    return s;
  }
  const std::size_t half = t.size() / 2;
  return pairwise_sum_impl(t.first(half)) + pairwise_sum_impl(t.subspan(half));
}
}  // namespace

double pairwise_sum(std::span<const double> terms) { return pairwise_sum_impl(terms); }

Box box_union(const Box& a, const Box& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.size() != b.size()) throw Error("box_union: dimension mismatch");
  Box out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i].lo = std::min(a[i].lo, b[i].lo);
    out[i].hi = std::max(a[i].hi, b[i].hi);
  }
  return out;
}

Box box_pad(const Box& b, double pad) {
  Box out = b;
  for (auto& iv : out) {
    iv.lo -= pad;
    iv.hi += pad;
  }
  return out;
}

bool box_contains(const Box& outer, const Box& inner) {
  if (outer.size() != inner.size()) return false;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    if (inner[i].lo < outer[i].lo || inner[i].hi > outer[i].hi) return false;
  }
  return true;
}

bool box_contains_point(const Box& b, std::span<const double> p) {
  if (b.size() != p.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (p[i] < b[i].lo || p[i] > b[i].hi) return false;
  }
  return true;
}

double chart_of_working(const Axis& ax, double q) {
  switch (ax.kind) {
    case Axis::Kind::logscale:
      return std::exp(q);
    case Axis::Kind::angle:
      return wrap_angle(q, ax.period);
    case Axis::Kind::line:
    default:
      return q;
  }
}

double working_of_chart(const Axis& ax, double c) {
  switch (ax.kind) {
    case Axis::Kind::logscale:
      if (!(c > 0.0)) throw ChartDomainViolation("logscale coordinate must be positive");
      return std::log(c);
    case Axis::Kind::angle:
      return wrap_angle(c, ax.period);
    case Axis::Kind::line:
    default:
      return c;
  }
}

std::vector<double> chart_of_working(std::span<const Axis> axes, std::span<const double> q) {
  if (axes.size() != q.size()) throw Error("chart_of_working: dimension mismatch");
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = chart_of_working(axes[i], q[i]);
  return out;
}

std::vector<double> working_of_chart(std::span<const Axis> axes, std::span<const double> c) {
  if (axes.size() != c.size()) throw Error("working_of_chart: dimension mismatch");
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = working_of_chart(axes[i], c[i]);
  return out;
}

double axis_distance(const Axis& ax, double a, double b) {
  if (ax.kind == Axis::Kind::angle) {
    const double p = ax.period;
    double d = std::fmod(std::abs(a - b), p);
    return std::min(d, p - d);
  }
  return std::abs(a - b);
}

double wrap_angle(double value, double period) {
  if (!(period > 0.0)) throw Error("wrap_angle: period must be positive");
  double v = std::fmod(value, period);
  if (v < 0.0) v += period;
  if (v >= period) v = 0.0;  // guard against fmod returning exactly `period`
  return v;
}

TensorGrid tensor_gauss_legendre(const Box& box, int order) {
  if (box.empty()) throw Error("tensor_gauss_legendre: empty box");
  std::vector<Rule1D> factors;
  factors.reserve(box.size());
  std::size_t total = 1;
  for (const auto& iv : box) {
    if (!(iv.hi > iv.lo)) throw Error("tensor_gauss_legendre: degenerate interval");
    factors.push_back(gauss_legendre(order, iv.lo, iv.hi));
    total *= static_cast<std::size_t>(order);
  }

  TensorGrid grid;
  grid.nodes.reserve(total);
  grid.weights.reserve(total);
  const std::size_t dim = box.size();
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> node(dim);
    double w = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      node[d] = factors[d].x[idx[d]];
      w *= factors[d].w[idx[d]];
    }
    grid.nodes.push_back(std::move(node));
    grid.weights.push_back(w);
    for (std::size_t d = dim; d-- > 0;) {
      if (++idx[d] < static_cast<std::size_t>(order)) break;
      idx[d] = 0;
    }
  }
  return grid;
}

}  // namespace qradon
