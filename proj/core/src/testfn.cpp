#include "qradon/testfn.hpp"

#include <cmath>
#include <numbers>

#include "qradon/errors.hpp"

namespace qradon {

double SpaceFunction::operator()(const Coords& working) const {
  if (!support.empty() && !box_contains_point(support, working)) return 0.0;
  return eval(working);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::string_view tag)
    : gen_(seed * 0x9E3779B97F4A7C15ull ^ fnv1a(tag)) {}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;  // [0,1)
  return lo + (hi - lo) * u;
}

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(gen_() % span);
}

SpaceFunction make_bump(std::string space_id, const std::vector<Axis>& axes,
                        const std::vector<BumpAxis>& params) {
  if (axes.size() != params.size()) throw Error("make_bump: one parameter set per axis");
  SpaceFunction f;
  f.space_id = std::move(space_id);
  f.support.reserve(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].kind == Axis::Kind::angle)
      f.support.push_back({0.0, axes[i].period});
    else
      f.support.push_back({params[i].center - kBumpCut * params[i].sigma,
                           params[i].center + kBumpCut * params[i].sigma});
  }
  auto axes_copy = axes;
  auto par = params;
  f.eval = [axes_copy, par](const Coords& q) {
    double v = 1.0;
    for (std::size_t i = 0; i < axes_copy.size(); ++i) {
      if (axes_copy[i].kind == Axis::Kind::angle) {
        const double k = 2.0 * std::numbers::pi / axes_copy[i].period;
        v *= (1.1 + std::cos(k * (q[i] - par[i].phase))) / 2.1;
      } else {
        const double d = (q[i] - par[i].center) / par[i].sigma;
        v *= std::exp(-0.5 * d * d);
      }
    }
    return v;
  };
  return f;
}

std::vector<SpaceFunction> random_bumps(std::string space_id, const std::vector<Axis>& axes,
                                        const std::vector<BumpRanges>& ranges, std::uint64_t seed,
                                        std::string_view tag, int count) {
  if (axes.size() != ranges.size()) throw Error("random_bumps: one range set per axis");
  Rng rng(seed, tag);
  std::vector<SpaceFunction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<BumpAxis> params(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (axes[a].kind == Axis::Kind::angle) {
        params[a].phase = rng.uniform(0.0, axes[a].period);
      } else {
        params[a].center = rng.uniform(ranges[a].center_lo, ranges[a].center_hi);
        params[a].sigma = rng.uniform(ranges[a].sigma_lo, ranges[a].sigma_hi);
      }
    }
    auto f = make_bump(space_id, axes, params);
    f.note = tag;
    f.note += "#" + std::to_string(i);
    out.push_back(std::move(f));
  }
  return out;
}

SpaceFunction one_function(std::string space_id, const std::vector<Axis>& axes, Box support) {
  SpaceFunction f;
  f.space_id = std::move(space_id);
  f.support = std::move(support);
  if (f.support.size() != axes.size()) throw Error("one_function: box/axes mismatch");
  f.eval = [](const Coords&) { return 1.0; };
  f.note = "constant 1";
  return f;
}

FiniteFn constant_fn(std::string space_id, int n, const Rational& value) {
  FiniteFn f;
  f.space_id = std::move(space_id);
  f.values.assign(static_cast<std::size_t>(n), value);
  return f;
}

std::vector<FiniteFn> indicator_basis(std::string space_id, int n) {
  std::vector<FiniteFn> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    FiniteFn f = constant_fn(space_id, n, Rational(0));
    f.values[static_cast<std::size_t>(i)] = Rational(1);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FiniteFn> random_finite_fns(std::string space_id, int n, std::uint64_t seed,
                                        std::string_view tag, int count) {
  Rng rng(seed, tag);
  std::vector<FiniteFn> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    FiniteFn f;
    f.space_id = space_id;
    f.values.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      f.values.emplace_back(rng.uniform_int(0, 6), rng.uniform_int(1, 3));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace qradon
