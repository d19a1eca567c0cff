#pragma once

#include "qradon/coset.hpp"
#include "qradon/measure.hpp"
#include "qradon/testfn.hpp"

namespace qradon {

// Conventions shared by every transform here:
//  * space ids look like "<case>/G", "<case>/GH", ...; inputs must agree on
//    the case prefix, and outputs carry the prefix of their inputs;
//  * chart-path functions take and produce working coordinates;
//  * chart-path outputs memoise evaluations keyed by the (quantized)
//    coordinate tuple, which makes repeated evaluation on tensor grids
//    cheap; the caches are synchronized, so the returned objects are safe
//    to evaluate concurrently.

// Fibre average over H:  (P f)(xH) = int_H f(xh) dh.  Chart path integrates
// with m_H; exact path uses counting measure on H.
QuotientFunction fibre_average_mid(const SubgroupChain& chain, const TestFunction& f,
                                   const MeasureRule& m_H);
FiniteFn fibre_average_mid(const FiniteChain& chain, const FiniteFn& f);

// Fibre average over L:  (P f)(xL) = int_L f(xl) dl  (L is finite in every
// registered chain; m_L is its exact rule).
QuotientFunction fibre_average_small(const SubgroupChain& chain, const TestFunction& f,
                                     const MeasureRule& m_L);
FiniteFn fibre_average_small(const FiniteChain& chain, const FiniteFn& f);

// Weighted fibre average  (T f)(xH) = int_H f(xh) / rho(xh) dh, the
// normalised surjection onto integrable functions of the quotient.
QuotientFunction weighted_fibre_average(const SubgroupChain& chain, const TestFunction& f,
                                        const RhoFunction& rho, const MeasureRule& m_H);
FiniteFn weighted_fibre_average(const FiniteChain& chain, const FiniteFn& f,
                                const RhoFunction& rho);

// Radon transform between the quotients:
//     (R f)(xH) = int_{H/L} f(x h L) d eta(hL).
// Requires the modular function of H to restrict to that of L (otherwise the
// invariant fibre measure eta does not exist): throws HypothesisViolated.
QuotientFunction radon(const SubgroupChain& chain, const QuotientFunction& f_gl,
                       const MeasureRule& m_HL);
FiniteFn radon(const FiniteChain& chain, const FiniteFn& f_gl);

// Dual transform for a registered second subgroup K with L <= K:
//     (R* phi)(xK) = int_{K/L} phi(x k H) d sigma(kL).
// The chart overload covers the case K == H (so G/K = G/H and sigma = eta).
QuotientFunction dual_radon_keq(const SubgroupChain& chain, const QuotientFunction& phi_gh,
                                const MeasureRule& m_HL);
FiniteFn dual_radon(const FiniteChain& chain, const FiniteFn& phi_gh);

// Section-based right inverse of R on functions supported where g0's Radon
// transform is bounded away from zero:
//     f = g0 * (phi o pi) / ((R g0) o pi),   pi : G/L -> G/H.
// Throws DegenerateDenominator when (R g0) falls below
// kLiftDenomScale * sup(R g0) at a point where phi is nonzero.
inline constexpr double kLiftDenomScale = 1e-8;
QuotientFunction lift(const SubgroupChain& chain, const QuotientFunction& phi_gh,
                      const QuotientFunction& g0_gl, const MeasureRule& m_HL);
FiniteFn lift(const FiniteChain& chain, const FiniteFn& phi_gh, const FiniteFn& g0_gl);

}  // namespace qradon
