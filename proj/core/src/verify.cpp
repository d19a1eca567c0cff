#include "qradon/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "qradon/errors.hpp"
#include "qradon/transforms.hpp"

namespace qradon {

namespace {

double rel_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

Rational rational_abs(const Rational& v) { return v < Rational(0) ? -v : v; }

// Keeps the comparison with the largest relative residual seen so far; every
// check reports its worst pair as (lhs, rhs, residual).
struct WorstPair {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool any = false;

  void consider(double l, double r, double res) {
    if (any && res <= residual) return;
    lhs = l;
    rhs = r;
    residual = res;
    any = true;
  }
  void consider(double l, double r) { consider(l, r, rel_residual(l, r)); }
  void consider(const Rational& l, const Rational& r) {
    double res = 0.0;
    if (l != r) {
      res = std::abs(to_double(l - r)) / std::max(1.0, std::abs(to_double(l)));
      // Never let an unequal rational pair round to an exact residual of 0.
      if (res == 0.0) res = std::numeric_limits<double>::denorm_min();
    }
    consider(to_double(l), to_double(r), res);
  }
  void store(CheckResult& r) const {
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = residual;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

void require(bool ok, const std::string& reason) {
  if (!ok) throw HypothesisViolated(reason);
}

void require_fibre_measure(const CaseContext& ctx) {
  require(ctx.chain().flags().dH_restricts_dL,
          "modular function of H does not restrict to that of L (no invariant measure on H/L)");
}

void require_invariant_gl(const CaseContext& ctx) {
  require(ctx.chain().flags().dG_restricts_dL,
          "modular function of G does not restrict to that of L (no invariant measure on G/L)");
}

void require_invariant_gh(const CaseContext& ctx) {
  require(ctx.chain().flags().dG_restricts_dH,
          "modular function of G does not restrict to that of H (no invariant measure on G/H)");
}

void require_rotation_case(const CaseContext& ctx) {
  require(ctx.id() == "sl2-so2-pm1", "check is specific to the rotation-fibre case sl2-so2-pm1");
}

const FiniteChain& finite_chain(const CaseContext& ctx) {
  return static_cast<const FiniteChain&>(ctx.chain());
}

const ChartChain& chart_chain(const CaseContext& ctx) {
  return static_cast<const ChartChain&>(ctx.chain());
}

// Chart battery: the deterministic canonical bump plus seeded random ones.
std::vector<SpaceFunction> chart_battery(const CaseContext& ctx, Space s, const CheckOptions& opts,
                                         std::string_view tag) {
  std::vector<SpaceFunction> battery;
  battery.push_back(ctx.canonical_bump(s));
  auto random = ctx.bumps(s, opts.seed, tag, opts.n_testfns);
  for (auto& f : random) battery.push_back(std::move(f));
  return battery;
}

// Finite battery: the full indicator basis of the space.
std::vector<FiniteFn> basis_battery(const CaseContext& ctx, Space s) {
  const auto& fc = finite_chain(ctx);
  int n = 0;
  switch (s) {
    case Space::G: n = fc.big_table().order(); break;
    case Space::GH: n = fc.n_cosets(Quot::GH); break;
    case Space::GL: n = fc.n_cosets(Quot::GL); break;
    default: throw Error("no indicator battery for space " + std::string(to_string(s)));
  }
  return indicator_basis(space_id(ctx.id(), s), n);
}

// Enumeration index of the larger coset containing each smaller one.
std::vector<int> gh_of_gl(const FiniteChain& fc) {
  const int n = fc.n_cosets(Quot::GL);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] = fc.coset_index(fc.cosets(Quot::GL)[j].front(), Quot::GH);
  return out;
}

// Strictly positive reference used by the lifting construction: a broad
// axis-aligned Gaussian in the non-angle key coordinates, constant in angle
// ones.  Wide enough to dominate every battery support, narrow enough for the
// quadrature boxes.
QuotientFunction reference_positive_chart(const CaseContext& ctx) {
  const auto& cc = chart_chain(ctx);
  const auto axes = cc.key_axes(Quot::GL);
  constexpr double kHalfWidth = 6.0;
  constexpr double kTwoSigmaSq = 2.0 * 0.8 * 0.8;
  QuotientFunction g0;
  g0.space_id = space_id(ctx.id(), Space::GL);
  g0.note = "wide positive reference";
  std::vector<bool> is_angle;
  for (const auto& ax : axes) {
    const bool angle = ax.kind == Axis::Kind::angle;
    is_angle.push_back(angle);
    g0.support.push_back(angle ? Interval{0.0, ax.period} : Interval{-kHalfWidth, kHalfWidth});
  }
  g0.eval = [is_angle](const Coords& q) {
    double v = 1.0;
    for (std::size_t i = 0; i < q.size(); ++i)
      if (!is_angle[i]) v *= std::exp(-q[i] * q[i] / kTwoSigmaSq);
    return v;
  };
  return g0;
}

SpaceFunction abs_fn(const SpaceFunction& f) {
  SpaceFunction out = f;
  out.note = "|" + f.note + "|";
  out.eval = [inner = f](const Coords& q) { return std::abs(inner(q)); };
  return out;
}

// f on G/L multiplied by the weight evaluated at the coset section.
SpaceFunction weight_on_gl(const CaseContext& ctx, const SpaceFunction& f,
                           const RhoFunction& rho) {
  auto chain = ctx.chain_ptr();
  SpaceFunction out = f;
  out.note = "weighted [" + f.note + "]";
  out.eval = [chain, inner = f, rho_eval = rho.eval_working](const Coords& key) {
    const double fv = inner(key);
    if (fv == 0.0) return 0.0;
    const auto& cc = static_cast<const ChartChain&>(*chain);
    const GroupElement s = cc.section(cc.point_from_working_key(Quot::GL, key));
    return fv * rho_eval(cc.big_chart().working_coords(s));
  };
  return out;
}

Rational weighted_gl_exact(const FiniteChain& fc, const MeasureRule& m_GL, const FiniteFn& f,
                           const RhoFunction& rho) {
  Rational sum(0);
  for (std::size_t i = 0; i < m_GL.idx_nodes.size(); ++i) {
    const int j = m_GL.idx_nodes[i];
    const int rep = fc.cosets(Quot::GL)[j].front();
    sum += m_GL.rat_weights[i] * rho.values[static_cast<std::size_t>(rep)] *
           f.values[static_cast<std::size_t>(j)];
  }
  return sum;
}

// --- individual checks -----------------------------------------------------

CheckResult check_weil(const CaseContext& ctx, const CheckOptions& opts) {
  CheckResult r;
  r.tol = opts.tol;
  r.exact = ctx.finite();
  const RhoFunction rho = ctx.rho(opts.rho);
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto basis = basis_battery(ctx, Space::G);
    for (const auto& f : basis) {
      double lhs = 0.0, rhs = 0.0;
      const double res =
          weil_residual(fc, f, ctx.rule(Space::G), ctx.rule(Space::GH), &rho, &lhs, &rhs);
      worst.consider(lhs, rhs, res);
    }
    note << "iterated-integration identity over the full indicator basis of G (" << basis.size()
         << " functions); weight: " << rho.note;
  } else {
    const auto battery = chart_battery(ctx, Space::G, opts, "weil");
    for (const auto& f : battery) {
      double lhs = 0.0, rhs = 0.0;
      const double res = weil_residual(ctx.chain(), f, ctx.rule(Space::G), ctx.rule(Space::H),
                                       ctx.rule(Space::GH), &rho, &lhs, &rhs);
      worst.consider(lhs, rhs, res);
    }
    note << "iterated-integration identity, worst of " << battery.size()
         << " bump functions; weight: " << rho.note;
  }
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult check_mackey(const CaseContext& ctx, const CheckOptions& opts) {
  CheckResult r;
  r.tol = opts.tol;
  r.exact = ctx.finite();
  const RhoFunction rho = ctx.rho(opts.rho);
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto basis = basis_battery(ctx, Space::G);
    for (const auto& f : basis) {
      const Rational lhs = integrate_exact(f, ctx.rule(Space::G));
      const FiniteFn tf = weighted_fibre_average(fc, f, rho);
      const Rational rhs = integrate_exact(tf, ctx.rule(Space::GH));
      worst.consider(lhs, rhs);
    }
    note << "weighted surjection preserves integrals, full indicator basis of G (" << basis.size()
         << " functions); weight: " << rho.note;
  } else {
    const auto battery = chart_battery(ctx, Space::G, opts, "mackey-bruhat");
    for (const auto& f : battery) {
      const double lhs = integrate(f, ctx.rule(Space::G));
      const auto tf = weighted_fibre_average(ctx.chain(), f, rho, ctx.rule(Space::H));
      const double rhs = integrate(tf, ctx.rule(Space::GH));
      worst.consider(lhs, rhs);
    }
    note << "weighted surjection preserves integrals, worst of " << battery.size()
         << " bump functions; weight: " << rho.note;
  }
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult check_thm35(const CaseContext& ctx, const CheckOptions& opts) {
  require_invariant_gh(ctx);
  require_invariant_gl(ctx);
  require_fibre_measure(ctx);
  CheckResult r;
  r.tol = opts.tol;
  r.exact = ctx.finite();
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto basis = basis_battery(ctx, Space::GL);
    const auto& m_gh = ctx.rule(Space::GH);
    const auto& hl_cosets = fc.cosets(Quot::HL);
    for (const auto& f : basis) {
      const Rational direct = integrate_exact(f, ctx.rule(Space::GL));
      const FiniteFn rf = radon(fc, f);
      const Rational through = integrate_exact(rf, m_gh);
      Rational iterated(0);
      for (std::size_t i = 0; i < m_gh.idx_nodes.size(); ++i) {
        const int rep = fc.cosets(Quot::GH)[m_gh.idx_nodes[i]].front();
        Rational inner(0);
        for (const auto& fibre : hl_cosets) {
          const int moved = fc.big_table().compose_index(rep, fibre.front());
          inner += f.values[static_cast<std::size_t>(fc.coset_index(moved, Quot::GL))];
        }
        iterated += m_gh.rat_weights[i] * inner;
      }
      worst.consider(direct, through);
      worst.consider(direct, iterated);
      worst.consider(through, iterated);
    }
    note << "direct, transform-then-integrate and explicitly iterated integrals compared "
            "pairwise over the full indicator basis of G/L ("
         << basis.size() << " functions)";
  } else {
    const auto& cc = chart_chain(ctx);
    const auto& big = cc.big_chart();
    const auto battery = chart_battery(ctx, Space::GL, opts, "thm35");
    const auto& m_gh = ctx.rule(Space::GH);
    const auto& m_hl = ctx.rule(Space::HL);
    std::vector<GroupElement> fibre;
    fibre.reserve(m_hl.nodes.size());
    for (const auto& node : m_hl.nodes)
      fibre.push_back(cc.embed_mid(cc.section(cc.point_from_working_key(Quot::HL, node))));
    std::vector<double> outer(m_gh.nodes.size());
    std::vector<double> inner(fibre.size());
    for (const auto& f : battery) {
      const double direct = integrate(f, ctx.rule(Space::GL));
      const auto rf = radon(ctx.chain(), f, m_hl);
      const double through = integrate(rf, m_gh);
      for (std::size_t k = 0; k < m_gh.nodes.size(); ++k) {
        const GroupElement s = cc.section(cc.point_from_working_key(Quot::GH, m_gh.nodes[k]));
        for (std::size_t j = 0; j < fibre.size(); ++j)
          inner[j] =
              m_hl.weights[j] * f(cc.working_key(cc.project(big.compose(s, fibre[j]), Quot::GL)));
        outer[k] = m_gh.weights[k] * pairwise_sum(inner);
      }
      const double iterated = pairwise_sum(outer);
      worst.consider(direct, through);
      worst.consider(direct, iterated);
      worst.consider(through, iterated);
    }
    note << "direct, transform-then-integrate and explicitly iterated integrals compared "
            "pairwise, worst of "
         << battery.size() << " bump functions";
  }
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult thm36_body(const CaseContext& ctx, const CheckOptions& opts, std::string_view tag,
                       std::string_view context_note) {
  require_invariant_gl(ctx);
  require_fibre_measure(ctx);
  CheckResult r;
  r.tol = opts.tol;
  r.exact = ctx.finite();
  const RhoFunction rho = ctx.rho(opts.rho);
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto basis = basis_battery(ctx, Space::GL);
    for (const auto& f : basis) {
      const FiniteFn rf = radon(fc, f);
      const Rational lhs = integrate_exact(rf, ctx.rule(Space::GH));
      const Rational rhs = weighted_gl_exact(fc, ctx.rule(Space::GL), f, rho);
      worst.consider(lhs, rhs);
    }
    note << "transform integral against the weighted direct integral, full indicator basis of "
            "G/L ("
         << basis.size() << " functions); weight: " << rho.note;
  } else {
    const auto battery = chart_battery(ctx, Space::GL, opts, tag);
    for (const auto& f : battery) {
      const auto rf = radon(ctx.chain(), f, ctx.rule(Space::HL));
      const double lhs = integrate(rf, ctx.rule(Space::GH));
      const double rhs = integrate(weight_on_gl(ctx, f, rho), ctx.rule(Space::GL));
      worst.consider(lhs, rhs);
    }
    note << "transform integral against the weighted direct integral, worst of " << battery.size()
         << " bump functions; weight: " << rho.note;
  }
  if (!context_note.empty()) note << "; " << context_note;
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult check_thm36(const CaseContext& ctx, const CheckOptions& opts) {
  return thm36_body(ctx, opts, "thm36", "");
}

CheckResult check_prop32(const CaseContext& ctx, const CheckOptions& opts) {
  require_fibre_measure(ctx);
  CheckResult r;
  r.tol = opts.tol;
  r.exact = ctx.finite();
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto phis = basis_battery(ctx, Space::GH);
    const auto fs = basis_battery(ctx, Space::GL);
    const auto gh_of = gh_of_gl(fc);
    for (const auto& phi : phis) {
      for (const auto& f : fs) {
        FiniteFn pf = f;
        for (std::size_t j = 0; j < pf.values.size(); ++j)
          pf.values[j] *= phi.values[static_cast<std::size_t>(gh_of[j])];
        const FiniteFn left = radon(fc, pf);
        const FiniteFn rf = radon(fc, f);
        for (std::size_t k = 0; k < left.values.size(); ++k)
          worst.consider(left.values[k], phi.values[k] * rf.values[k]);
      }
    }
    note << "module identity over all " << phis.size() * fs.size()
         << " indicator pairs, compared on every coset";
  } else {
    auto chain = ctx.chain_ptr();
    const auto& cc = chart_chain(ctx);
    const auto phis = chart_battery(ctx, Space::GH, opts, "prop32-phi");
    const auto fs = chart_battery(ctx, Space::GL, opts, "prop32-f");
    const auto keys = ctx.sample_keys(Space::GH, opts.seed, "prop32", 50);
    const std::size_t pairs = std::min(phis.size(), fs.size());
    for (std::size_t i = 0; i < pairs; ++i) {
      const auto& phi = phis[i];
      const auto& f = fs[i];
      SpaceFunction pf;
      pf.space_id = f.space_id;
      pf.support = cc.restrict_key_box(phi.support, f.support);
      pf.note = "pulled-back [" + phi.note + "] times [" + f.note + "]";
      pf.eval = [chain, phi, f](const Coords& key) {
        const double fv = f(key);
        if (fv == 0.0) return 0.0;
        const auto& ch = static_cast<const ChartChain&>(*chain);
        const Coords gh = ch.working_key(ch.refine_project(ch.point_from_working_key(Quot::GL, key)));
        return phi(gh) * fv;
      };
      const auto left = radon(ctx.chain(), pf, ctx.rule(Space::HL));
      const auto rf = radon(ctx.chain(), f, ctx.rule(Space::HL));
      for (const auto& key : keys) worst.consider(left(key), phi(key) * rf(key));
    }
    note << "module identity for " << pairs << " function pairs at " << keys.size()
         << " probe cosets";
  }
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult check_cor37(const CaseContext& ctx, const CheckOptions& opts) {
  require_invariant_gl(ctx);
  require_fibre_measure(ctx);
  CheckResult r;
  r.tol = opts.tol;
  r.exact = ctx.finite();
  const RhoFunction rho = ctx.rho(opts.rho);
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto gs = basis_battery(ctx, Space::GL);
    const FiniteFn g0 =
        constant_fn(space_id(ctx.id(), Space::GL), fc.n_cosets(Quot::GL), Rational(1));
    Rational max_abs_f(0);
    for (const auto& g : gs) {
      const FiniteFn phi = radon(fc, g);
      const FiniteFn lf = lift(fc, phi, g0);
      FiniteFn f = g;
      for (std::size_t j = 0; j < f.values.size(); ++j) f.values[j] -= lf.values[j];
      const FiniteFn rf = radon(fc, f);
      for (const auto& v : rf.values) worst.consider(v, Rational(0));
      worst.consider(weighted_gl_exact(fc, ctx.rule(Space::GL), f, rho), Rational(0));
      for (const auto& v : f.values) max_abs_f = std::max(max_abs_f, rational_abs(v));
    }
    note << "kernel members built as g minus the lift of its transform, full indicator basis ("
         << gs.size() << " functions); weighted integral and transform values compared to 0"
         << "; max |f| = " << fmt(to_double(max_abs_f));
  } else {
    const auto battery = chart_battery(ctx, Space::GL, opts, "cor37");
    const QuotientFunction g0 = reference_positive_chart(ctx);
    const auto kernel_keys = ctx.sample_keys(Space::GH, opts.seed, "cor37-kernel", 20);
    const auto probe_keys = ctx.sample_keys(Space::GL, opts.seed, "cor37-probe", 20);
    const auto& m_hl = ctx.rule(Space::HL);
    double max_abs_f = 0.0;
    double max_abs_rf = 0.0;
    for (const auto& g : battery) {
      const auto phi = radon(ctx.chain(), g, m_hl);
      const auto lf = lift(ctx.chain(), phi, g0, m_hl);
      SpaceFunction f;
      f.space_id = g.space_id;
      f.support = box_union(g.support, lf.support);
      f.note = "kernel member from [" + g.note + "]";
      f.eval = [g, lf](const Coords& key) { return g(key) - lf(key); };
      worst.consider(integrate(weight_on_gl(ctx, f, rho), ctx.rule(Space::GL)), 0.0);
      const auto rf = radon(ctx.chain(), f, m_hl);
      for (const auto& key : kernel_keys) max_abs_rf = std::max(max_abs_rf, std::abs(rf(key)));
      for (const auto& key : probe_keys) max_abs_f = std::max(max_abs_f, std::abs(f(key)));
    }
    worst.consider(max_abs_rf, 0.0);
    note << "kernel members built as g minus the lift of its transform (" << battery.size()
         << " functions); weighted integral and transform probes compared to 0"
         << "; max |f| over " << probe_keys.size() << " probes = " << fmt(max_abs_f);
  }
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult check_lift(const CaseContext& ctx, const CheckOptions& opts) {
  require_fibre_measure(ctx);
  CheckResult r;
  r.tol = opts.tol;
  r.exact = ctx.finite();
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto phis = basis_battery(ctx, Space::GH);
    const FiniteFn g0 =
        constant_fn(space_id(ctx.id(), Space::GL), fc.n_cosets(Quot::GL), Rational(1));
    const auto gh_of = gh_of_gl(fc);
    Rational min_value(0);
    int support_mismatches = 0;
    for (const auto& phi : phis) {
      const FiniteFn f = lift(fc, phi, g0);
      const FiniteFn rf = radon(fc, f);
      for (std::size_t k = 0; k < rf.values.size(); ++k)
        worst.consider(rf.values[k], phi.values[k]);
      std::vector<bool> covered(phi.values.size(), false);
      for (std::size_t j = 0; j < f.values.size(); ++j) {
        min_value = std::min(min_value, f.values[j]);
        if (f.values[j] != Rational(0)) covered[static_cast<std::size_t>(gh_of[j])] = true;
      }
      for (std::size_t k = 0; k < phi.values.size(); ++k)
        if ((phi.values[k] != Rational(0)) != covered[k]) ++support_mismatches;
    }
    worst.consider(min_value, Rational(0));
    worst.consider(Rational(support_mismatches), Rational(0));
    note << "transform of the lift reproduces the input on the full indicator basis of G/H ("
         << phis.size() << " functions); nonnegativity and exact support equality folded in";
  } else {
    auto chain = ctx.chain_ptr();
    const auto& cc = chart_chain(ctx);
    const auto phis = chart_battery(ctx, Space::GH, opts, "lift");
    const QuotientFunction g0 = reference_positive_chart(ctx);
    const auto gh_keys = ctx.sample_keys(Space::GH, opts.seed, "lift-cosets", 50);
    const auto gl_keys = ctx.sample_keys(Space::GL, opts.seed, "lift-points", 50);
    const auto& m_hl = ctx.rule(Space::HL);
    double min_value = 0.0;
    int containment_violations = 0;
    for (const auto& phi : phis) {
      const auto f = lift(ctx.chain(), phi, g0, m_hl);
      const auto rf = radon(ctx.chain(), f, m_hl);
      for (const auto& key : gh_keys) worst.consider(rf(key), phi(key));
      for (const auto& key : gl_keys) {
        const double v = f(key);
        min_value = std::min(min_value, v);
        if (std::abs(v) > 1e-9) {
          const Coords gh =
              cc.working_key(cc.refine_project(cc.point_from_working_key(Quot::GL, key)));
          if (phi(gh) == 0.0) ++containment_violations;
        }
      }
      if (!box_contains(phi.support, cc.coarsen_key_box(f.support))) ++containment_violations;
    }
    worst.consider(std::min(0.0, min_value), 0.0);
    worst.consider(static_cast<double>(containment_violations), 0.0);
    note << "transform of the lift reproduces the input for " << phis.size() << " functions at "
         << gh_keys.size() << " probe cosets; nonnegativity (min " << fmt(min_value)
         << ") and support containment folded in";
  }
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult check_ex38_mass(const CaseContext& ctx, const CheckOptions& opts) {
  require_rotation_case(ctx);
  (void)opts;
  CheckResult r;
  r.tol = 1e-9;
  r.exact = false;
  r.lhs = ctx.rule(Space::HL).total_mass();
  r.rhs = std::numbers::pi;
  r.residual = rel_residual(r.lhs, r.rhs);
  std::ostringstream note;
  note << "total mass of the fibre measure rule (" << ctx.rule(Space::HL).size()
       << " nodes) against the reference value pi";
  r.details = note.str();
  return r;
}

CheckResult check_ex38_invariance(const CaseContext& ctx, const CheckOptions& opts) {
  require_rotation_case(ctx);
  CheckResult r;
  r.tol = opts.tol;
  r.exact = false;
  WorstPair worst;
  const auto point_battery = chart_battery(ctx, Space::GH, opts, "ex38-invariance");
  const auto fibre_battery = chart_battery(ctx, Space::HL, opts, "ex38-invariance-fibre");
  PushforwardOptions point_opts;
  point_opts.mode = PushMode::invariant;
  point_opts.safety = ctx.safety_box(Space::GH);
  double worst_point = 0.0;
  const auto translations = ctx.translation_battery();
  for (const auto& g : translations) {
    PushWorst pw;
    pushforward_residual(ctx.chain(), Quot::GH, ctx.rule(Space::GH), ctx.rule_builder(Space::GH),
                         g, point_battery, point_opts, &pw);
    worst.consider(pw.pushed, pw.base);
    worst_point = std::max(worst_point, pw.residual);
  }
  PushforwardOptions fibre_opts;
  fibre_opts.mode = PushMode::invariant;
  fibre_opts.safety = ctx.safety_box(Space::HL);
  double worst_fibre = 0.0;
  const auto rotations = ctx.mid_translation_battery();
  for (const auto& h : rotations) {
    PushWorst pw;
    pushforward_residual(ctx.chain(), Quot::HL, ctx.rule(Space::HL), ctx.rule_builder(Space::HL),
                         h, fibre_battery, fibre_opts, &pw);
    worst.consider(pw.pushed, pw.base);
    worst_fibre = std::max(worst_fibre, pw.residual);
  }
  worst.store(r);
  std::ostringstream note;
  note << "pushforward invariance of the point measure under " << translations.size()
       << " group elements (worst " << fmt(worst_point) << ") and of the fibre measure under "
       << rotations.size() << " rotations (worst " << fmt(worst_fibre) << "); "
       << point_battery.size() << " functions each";
  r.details = note.str();
  return r;
}

CheckResult check_contraction(const CaseContext& ctx, const CheckOptions& opts) {
  CheckResult r;
  r.tol = 1e-8;
  r.exact = ctx.finite();
  const RhoFunction rho = ctx.rho(opts.rho);
  WorstPair worst;
  std::ostringstream note;
  if (ctx.finite()) {
    const auto& fc = finite_chain(ctx);
    const auto basis = basis_battery(ctx, Space::G);
    for (const auto& f : basis) {
      const FiniteFn tf = weighted_fibre_average(fc, f, rho);
      const auto& m_gh = ctx.rule(Space::GH);
      Rational lhs(0);
      for (std::size_t i = 0; i < m_gh.idx_nodes.size(); ++i)
        lhs += m_gh.rat_weights[i] *
               rational_abs(tf.values[static_cast<std::size_t>(m_gh.idx_nodes[i])]);
      const auto& m_g = ctx.rule(Space::G);
      Rational rhs(0);
      for (std::size_t i = 0; i < m_g.idx_nodes.size(); ++i)
        rhs += m_g.rat_weights[i] *
               rational_abs(f.values[static_cast<std::size_t>(m_g.idx_nodes[i])]);
      worst.consider(lhs, rhs);
    }
    note << "weighted surjection preserves the norm of nonnegative functions, full indicator "
            "basis ("
         << basis.size() << " functions)";
  } else {
    const auto battery = chart_battery(ctx, Space::G, opts, "th-contraction");
    for (const auto& f : battery) {
      const auto tf = weighted_fibre_average(ctx.chain(), f, rho, ctx.rule(Space::H));
      const double lhs = integrate(abs_fn(tf), ctx.rule(Space::GH));
      const double rhs = integrate(abs_fn(f), ctx.rule(Space::G));
      worst.consider(lhs, rhs);
    }
    note << "weighted surjection preserves the norm of " << battery.size()
         << " nonnegative bump functions; weight: " << rho.note;
  }
  worst.store(r);
  r.details = note.str();
  return r;
}

CheckResult check_ex39(const CaseContext& ctx, const CheckOptions& opts) {
  require(ctx.chain().flags().h_normal, "H is not normal in G");
  return thm36_body(ctx, opts, "ex39", "rerun of the weighted identity on a normal-H chain");
}

using CheckFn = CheckResult (*)(const CaseContext&, const CheckOptions&);

struct CheckEntry {
  const char* id;
  CheckFn fn;
};

const std::vector<CheckEntry>& check_entries() {
  static const std::vector<CheckEntry> entries = {
      {"weil", &check_weil},
      {"mackey-bruhat", &check_mackey},
      {"thm35", &check_thm35},
      {"thm36", &check_thm36},
      {"prop32", &check_prop32},
      {"cor37", &check_cor37},
      {"lift", &check_lift},
      {"ex38-mass", &check_ex38_mass},
      {"ex38-invariance", &check_ex38_invariance},
      {"th-contraction", &check_contraction},
      {"ex39", &check_ex39},
  };
  return entries;
}

constexpr const char* kSkipPrefix = "hypothesis not satisfied: ";

}  // namespace

bool CheckResult::skipped() const { return details.rfind(kSkipPrefix, 0) == 0; }

const std::vector<std::string>& check_registry() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : check_entries()) v.emplace_back(e.id);
    return v;
  }();
  return ids;
}

CheckResult run_check(const CaseContext& ctx, const std::string& check_id,
                      const CheckOptions& opts) {
  const auto& entries = check_entries();
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const CheckEntry& e) { return check_id == e.id; });
  if (it == entries.end()) throw UnknownCheck("unknown check id: " + check_id);
  const auto start = std::chrono::steady_clock::now();
  CheckResult r = it->fn(ctx, opts);
  const auto stop = std::chrono::steady_clock::now();
  r.case_id = ctx.id();
  r.check_id = check_id;
  r.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  r.pass = r.exact ? r.residual == 0.0 : r.residual <= r.tol;
  return r;
}

CheckResult skip_result(const CaseContext& ctx, const std::string& check_id,
                        const CheckOptions& opts, const std::string& reason) {
  CheckResult r;
  r.case_id = ctx.id();
  r.check_id = check_id;
  r.tol = opts.tol;
  r.exact = true;
  r.pass = true;
  r.details = kSkipPrefix + reason;
  return r;
}

VerificationReport run_suite(const CaseContext& ctx, const CheckOptions& opts) {
  VerificationReport report;
  report.seed = opts.seed;
  report.quad_order = ctx.quad_order();
  bool all = true;
  for (const auto& id : check_registry()) {
    CheckResult r;
    try {
      r = run_check(ctx, id, opts);
    } catch (const HypothesisViolated& e) {
      r = skip_result(ctx, id, opts, e.what());
    }
    all = all && r.pass;
    report.results.push_back(std::move(r));
  }
  report.all_pass = all;
  return report;
}

nlohmann::ordered_json report_to_json(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["toolkit_version"] = report.toolkit_version;
  j["seed"] = report.seed;
  j["quad_order"] = report.quad_order;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    nlohmann::ordered_json jr;
    jr["case_id"] = r.case_id;
    jr["check_id"] = r.check_id;
    jr["lhs"] = r.lhs;
    jr["rhs"] = r.rhs;
    jr["residual"] = r.residual;
    jr["tol"] = r.tol;
    jr["exact"] = r.exact;
    jr["pass"] = r.pass;
    jr["runtime_ms"] = r.runtime_ms;
    jr["details"] = r.details;
    j["results"].push_back(std::move(jr));
  }
  j["all_pass"] = report.all_pass;
  return j;
}

VerificationReport report_from_json(const nlohmann::ordered_json& j) {
  VerificationReport report;
  report.toolkit_version = j.at("toolkit_version").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.quad_order = j.at("quad_order").get<int>();
  for (const auto& jr : j.at("results")) {
    CheckResult r;
    r.case_id = jr.at("case_id").get<std::string>();
    r.check_id = jr.at("check_id").get<std::string>();
    r.lhs = jr.at("lhs").get<double>();
    r.rhs = jr.at("rhs").get<double>();
    r.residual = jr.at("residual").get<double>();
    r.tol = jr.at("tol").get<double>();
    r.exact = jr.at("exact").get<bool>();
    r.pass = jr.at("pass").get<bool>();
    r.runtime_ms = jr.at("runtime_ms").get<double>();
    r.details = jr.at("details").get<std::string>();
    report.results.push_back(std::move(r));
  }
  report.all_pass = j.at("all_pass").get<bool>();
  return report;
}

std::string render_table(const VerificationReport& report) {
  std::ostringstream os;
  const auto num = [](double v) {
    std::ostringstream n;
    n << std::scientific << std::setprecision(6) << v;
    return n.str();
  };
  os << std::left << std::setw(16) << "case" << std::setw(17) << "check" << std::setw(15) << "lhs"
     << std::setw(15) << "rhs" << std::setw(14) << "residual" << std::setw(9) << "verdict"
     << "details\n";
  os << std::string(100, '-') << "\n";
  for (const auto& r : report.results) {
    const char* verdict = r.skipped() ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    os << std::left << std::setw(16) << r.case_id << std::setw(17) << r.check_id << std::setw(15)
       << num(r.lhs) << std::setw(15) << num(r.rhs) << std::setw(14) << num(r.residual)
       << std::setw(9) << verdict << r.details << "\n";
  }
  return os.str();
}

}  // namespace qradon
