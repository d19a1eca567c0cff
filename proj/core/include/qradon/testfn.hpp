#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qradon/group.hpp"
#include "qradon/quadrature.hpp"
#include "qradon/rational.hpp"

namespace qradon {

// Scalar function on a named space, evaluated in working coordinates.
// Outside the support box the function is treated as exactly zero; `eval`
// itself is the smooth formula without that clamp.
struct SpaceFunction {
  std::string space_id;
  std::function<double(const Coords&)> eval;
  Box support;
  std::string note;

  double operator()(const Coords& working) const;
};

// Role aliases used at call sites.
using TestFunction = SpaceFunction;
using QuotientFunction = SpaceFunction;

// Exact function on a finite enumerated space, one value per element or
// coset index.
struct FiniteFn {
  std::string space_id;
  std::vector<Rational> values;
};

// Deterministic random stream derived from a seed and a purpose tag, so the
// same (seed, tag) always yields the same draws regardless of call order
// elsewhere.  Doubles are produced from raw 64-bit draws (portable across
// standard libraries).
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view tag);

  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive bounds

 private:
  std::mt19937_64 gen_;
};

// Smooth bump parameters for one axis.  Line/logscale axes get a Gaussian
// factor exp(-(q-center)^2 / (2 sigma^2)) truncated at `kBumpCut` standard
// deviations; angle axes get the strictly positive factor
// (1.1 + cos(k(q - phase))) / 2.1 with k matching the axis period.
struct BumpAxis {
  double center = 0.0;
  double sigma = 1.0;
  double phase = 0.0;
};

// Where the Gaussian factors are cut off.  The neglected tail mass is about
// 6e-13 of the total, far below the verification tolerances.
inline constexpr double kBumpCut = 7.5;

SpaceFunction make_bump(std::string space_id, const std::vector<Axis>& axes,
                        const std::vector<BumpAxis>& params);

// Per-axis ranges the random batteries draw from.
struct BumpRanges {
  double center_lo = -0.5;
  double center_hi = 0.5;
  double sigma_lo = 0.3;
  double sigma_hi = 0.5;
};

std::vector<SpaceFunction> random_bumps(std::string space_id, const std::vector<Axis>& axes,
                                        const std::vector<BumpRanges>& ranges, std::uint64_t seed,
                                        std::string_view tag, int count);

// The constant-one function with the given support box.
SpaceFunction one_function(std::string space_id, const std::vector<Axis>& axes, Box support);

// Exact helpers for finite spaces.
FiniteFn constant_fn(std::string space_id, int n, const Rational& value);
std::vector<FiniteFn> indicator_basis(std::string space_id, int n);
std::vector<FiniteFn> random_finite_fns(std::string space_id, int n, std::uint64_t seed,
                                        std::string_view tag, int count);

}  // namespace qradon
