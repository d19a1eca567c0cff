#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qradon/coset.hpp"
#include "qradon/group.hpp"
#include "qradon/quadrature.hpp"
#include "qradon/rational.hpp"
#include "qradon/testfn.hpp"

namespace qradon {

// How a quadrature-backed rule was built, so it can be rebuilt over another
// box with identical conventions.
struct QuadRecipe {
  Box box;
  int order = 0;
};

// A positive measure on a named space, realised either exactly (finite
// spaces: node indices with rational weights) or as a quadrature rule
// (nodes in working key coordinates with double weights).
struct MeasureRule {
  std::string space_id;
  bool exact = false;
  std::string note;

  std::vector<int> idx_nodes;
  std::vector<Rational> rat_weights;

  std::vector<Coords> nodes;
  std::vector<double> weights;
  std::optional<QuadRecipe> recipe;

  std::size_t size() const { return exact ? idx_nodes.size() : nodes.size(); }
  double total_mass() const;
  Rational total_mass_exact() const;
};

double integrate(const SpaceFunction& f, const MeasureRule& m);
Rational integrate_exact(const FiniteFn& f, const MeasureRule& m);

// Plain-text dump: header lines, then one line per node.
void dump_rule(const MeasureRule& m, std::ostream& out);

// Counting measure with a common weight on n enumerated points.
MeasureRule counting_rule(std::string space_id, int n, const Rational& weight = Rational(1));

// Tensor Gauss-Legendre rule over `box` (working coordinates) with weights
// multiplied by `density` (also in working coordinates).
MeasureRule density_rule(std::string space_id, const Box& box, int order,
                         const std::function<double(const Coords&)>& density, std::string note);

// Haar rule of a chart group over a working-coordinate box.
MeasureRule haar_rule(const ChartGroup& g, std::string space_id, const Box& box, int order);

// Push a rule on the source group down to a quotient with finite fibre:
// node keys are reduced, weights divided by the fibre size.
MeasureRule project_rule(const ChartChain& chain, Quot q, const MeasureRule& source_rule,
                         int fibre_size, std::string space_id, std::string note);

// Positive weight on G tying the Haar measures of G and H to a measure on
// G/H; covariant under right H-translation with factor
// (modular_H / modular_G)(h).
struct RhoFunction {
  std::string chain_id;
  bool exact = false;
  std::function<double(const Coords&)> eval_working;  // chart chains, G working coords
  std::vector<Rational> values;                       // finite chains, per G element
  std::string note;
};

// Largest covariance defect  |rho(xh) - (modular_H / modular_G)(h) rho(x)| / rho(xh)
// over sampled (x, h) pairs; exhaustive on finite chains (where the boxes and
// sample count are ignored).  Throws NonpositiveRho if rho is not strictly
// positive at a sampled point.
double validate_rho(const SubgroupChain& chain, const RhoFunction& rho, const Box& g_box,
                    const Box& h_box, std::uint64_t seed, int n_samples);

// Relative defect of the iterated-integration identity for one function:
//   | int_G f rho dx  -  int_{G/H} int_H f(xh) dh dmu(xH) | / max(1, |lhs|).
// A null rho means the unweighted identity (rho = 1).  The optional out
// parameters receive the two sides.
double weil_residual(const SubgroupChain& chain, const TestFunction& f, const MeasureRule& m_G,
                     const MeasureRule& m_H, const MeasureRule& m_GH,
                     const RhoFunction* rho = nullptr, double* lhs_out = nullptr,
                     double* rhs_out = nullptr);
double weil_residual(const FiniteChain& chain, const FiniteFn& f, const MeasureRule& m_G,
                     const MeasureRule& m_GH, const RhoFunction* rho = nullptr,
                     double* lhs_out = nullptr, double* rhs_out = nullptr);

// Quotient-measure translation behaviour.
enum class PushMode { invariant, quasi_invariant };

struct PushforwardOptions {
  PushMode mode = PushMode::invariant;
  double pad = 0.05;   // margin added to back-mapped support boxes
  Box safety;          // box the back-mapped support must stay inside
  const RhoFunction* rho = nullptr;  // quasi-invariant mode only
};

// The worst comparison behind a pushforward residual, for reporting.
struct PushWorst {
  double base = 0.0;
  double pushed = 0.0;
  double residual = 0.0;
  int fn_index = -1;
};

// Invariant mode: worst relative defect of
//     int f(g.c) dm(c)  vs  int f dm
// over the battery, with the left side integrated over a rule rebuilt on the
// back-mapped support of f (rule_on_box must reproduce m's conventions).
// Quasi-invariant mode compares  int f(g^{-1}.c) dm(c)  against
//     int f(c) rho(g s(c)) / rho(s(c)) dm(c).
// Throws SupportEscape if a back-mapped support leaves options.safety.
double pushforward_residual(const SubgroupChain& chain, Quot q, const MeasureRule& m,
                            const std::function<MeasureRule(const Box&)>& rule_on_box,
                            const GroupElement& g, const std::vector<SpaceFunction>& battery,
                            const PushforwardOptions& options, PushWorst* worst_out = nullptr);

// Exact invariance on finite chains: the counting weights must be permuted
// by the action of g.
bool pushforward_invariant_exact(const FiniteChain& chain, Quot q, const MeasureRule& m,
                                 const GroupElement& g);

}  // namespace qradon
