#include "qradon/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "qradon/errors.hpp"

namespace qradon {

double MeasureRule::total_mass() const {
  if (exact) return to_double(total_mass_exact());
  return pairwise_sum(weights);
}

Rational MeasureRule::total_mass_exact() const {
  if (!exact) throw SpaceMismatch("total_mass_exact needs an exact rule");
  Rational s(0);
  for (const auto& w : rat_weights) s += w;
  return s;
}

double integrate(const SpaceFunction& f, const MeasureRule& m) {
  if (f.space_id != m.space_id)
    throw SpaceMismatch("function on '" + f.space_id + "' integrated against rule on '" +
                        m.space_id + "'");
  if (m.exact)
    throw SpaceMismatch("exact rule needs an exact function; got a smooth one on '" + f.space_id +
                        "'");
  std::vector<double> terms(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) terms[i] = m.weights[i] * f(m.nodes[i]);
  return pairwise_sum(terms);
}

Rational integrate_exact(const FiniteFn& f, const MeasureRule& m) {
  if (f.space_id != m.space_id)
    throw SpaceMismatch("function on '" + f.space_id + "' integrated against rule on '" +
                        m.space_id + "'");
  if (!m.exact) throw SpaceMismatch("integrate_exact needs an exact rule");
  Rational s(0);
  for (std::size_t i = 0; i < m.idx_nodes.size(); ++i) {
    const auto idx = static_cast<std::size_t>(m.idx_nodes[i]);
    if (idx >= f.values.size()) throw SpaceMismatch("rule node outside the function's domain");
    s += m.rat_weights[i] * f.values[idx];
  }
  return s;
}

void dump_rule(const MeasureRule& m, std::ostream& out) {
  out << "# measure rule\n";
  out << "space " << m.space_id << "\n";
  out << "kind " << (m.exact ? "exact" : "quadrature") << "\n";
  if (!m.note.empty()) out << "note " << m.note << "\n";
  out << "count " << m.size() << "\n";
  if (m.exact) {
    for (std::size_t i = 0; i < m.idx_nodes.size(); ++i)
      out << m.idx_nodes[i] << " " << to_string(m.rat_weights[i]) << "\n";
    return;
  }
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    for (double c : m.nodes[i]) out << c << " ";
    out << m.weights[i] << "\n";
  }
  out.precision(old_precision);
}

MeasureRule counting_rule(std::string space_id, int n, const Rational& weight) {
  MeasureRule m;
  m.space_id = std::move(space_id);
  m.exact = true;
  m.note = "counting measure";
  m.idx_nodes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m.idx_nodes[static_cast<std::size_t>(i)] = i;
  m.rat_weights.assign(static_cast<std::size_t>(n), weight);
  return m;
}

MeasureRule density_rule(std::string space_id, const Box& box, int order,
                         const std::function<double(const Coords&)>& density, std::string note) {
  MeasureRule m;
  m.space_id = std::move(space_id);
  m.note = std::move(note);
  TensorGrid grid = tensor_gauss_legendre(box, order);
  m.nodes = std::move(grid.nodes);
  m.weights = std::move(grid.weights);
  if (density)
    for (std::size_t i = 0; i < m.nodes.size(); ++i) m.weights[i] *= density(m.nodes[i]);
  m.recipe = QuadRecipe{box, order};
  return m;
}

MeasureRule haar_rule(const ChartGroup& g, std::string space_id, const Box& box, int order) {
  return density_rule(std::move(space_id), box, order,
                      [&g](const Coords& w) { return g.working_haar_density(w); },
                      "left Haar measure of " + g.id());
}

MeasureRule project_rule(const ChartChain& chain, Quot q, const MeasureRule& source_rule,
                         int fibre_size, std::string space_id, std::string note) {
  if (source_rule.exact) throw SpaceMismatch("project_rule expects a quadrature rule");
  const KeySpec& spec = chain.key_spec(q);
  const auto axes = chain.key_axes(q);
  MeasureRule m;
  m.space_id = std::move(space_id);
  m.note = std::move(note);
  m.nodes.reserve(source_rule.nodes.size());
  m.weights.reserve(source_rule.weights.size());
  const double scale = 1.0 / static_cast<double>(fibre_size);
  for (std::size_t i = 0; i < source_rule.nodes.size(); ++i) {
    const Coords& src = source_rule.nodes[i];
    Coords key(spec.kept.size());
    for (std::size_t k = 0; k < spec.kept.size(); ++k) {
      double v = src[spec.kept[k]];
      if (axes[k].kind == Axis::Kind::angle) v = wrap_angle(v, axes[k].period);
      key[k] = v;
    }
    m.nodes.push_back(std::move(key));
    m.weights.push_back(source_rule.weights[i] * scale);
  }
  if (source_rule.recipe)
    m.recipe = QuadRecipe{chain.key_box_of_group_box(source_rule.recipe->box, q),
                          source_rule.recipe->order};
  return m;
}

// ---------------------------------------------------------------------------
// rho

double validate_rho(const SubgroupChain& chain, const RhoFunction& rho, const Box& g_box,
                    const Box& h_box, std::uint64_t seed, int n_samples) {
  if (rho.chain_id != chain.id())
    throw SpaceMismatch("weight for chain '" + rho.chain_id + "' used with '" + chain.id() + "'");

  double worst = 0.0;
  if (chain.finite()) {
    const auto& fc = static_cast<const FiniteChain&>(chain);
    const auto& big = fc.big_table();
    for (const auto& v : rho.values)
      if (v <= Rational(0)) throw NonpositiveRho("weight must be strictly positive");
    for (int x = 0; x < big.order(); ++x) {
      for (int h_big : fc.h_elems()) {
        const auto xh = static_cast<std::size_t>(big.compose_index(x, h_big));
        // Finite groups are unimodular, so covariance says rho(xh) == rho(x).
        Rational diff = rho.values[xh] - rho.values[static_cast<std::size_t>(x)];
        if (diff < Rational(0)) diff = -diff;
        worst = std::max(worst, to_double(diff / rho.values[xh]));
      }
    }
    return worst;
  }

  const auto& cc = static_cast<const ChartChain&>(chain);
  const auto& big = cc.big_chart();
  const auto* mid_chart = dynamic_cast<const ChartGroup*>(chain.mid().get());
  if (!mid_chart) throw Error("validate_rho needs a chart middle group");
  Rng rng(seed, "rho-covariance:" + chain.id());
  for (int s = 0; s < n_samples; ++s) {
    Coords xw(g_box.size()), hw(h_box.size());
    for (std::size_t i = 0; i < g_box.size(); ++i) xw[i] = rng.uniform(g_box[i].lo, g_box[i].hi);
    for (std::size_t i = 0; i < h_box.size(); ++i) hw[i] = rng.uniform(h_box[i].lo, h_box[i].hi);
    const GroupElement x = big.element_from_working(xw);
    const GroupElement h = mid_chart->element_from_working(hw);
    const GroupElement h_in_g = cc.embed_mid(h);
    const GroupElement xh = big.compose(x, h_in_g);
    const double at_xh = rho.eval_working(big.working_coords(xh));
    const double at_x = rho.eval_working(xw);
    if (!(at_xh > 0.0) || !(at_x > 0.0))
      throw NonpositiveRho("weight must be strictly positive");
    const double expected = mid_chart->modular(h) / big.modular(h_in_g) * at_x;
    worst = std::max(worst, std::abs(at_xh - expected) / at_xh);
  }
  return worst;
}

namespace {

double finish_weil(double lhs, double rhs, double residual, double* lhs_out, double* rhs_out) {
  if (lhs_out) *lhs_out = lhs;
  if (rhs_out) *rhs_out = rhs;
  return residual;
}

}  // namespace

double weil_residual(const SubgroupChain& chain, const TestFunction& f, const MeasureRule& m_G,
                     const MeasureRule& m_H, const MeasureRule& m_GH, const RhoFunction* rho,
                     double* lhs_out, double* rhs_out) {
  const auto* cc = dynamic_cast<const ChartChain*>(&chain);
  if (!cc) throw SpaceMismatch("this overload serves chart chains; use the exact one");
  if (m_G.exact || m_H.exact || m_GH.exact)
    throw SpaceMismatch("chart residual needs quadrature rules");
  if (rho && !rho->eval_working) throw SpaceMismatch("chart residual needs a chart weight");

  // Left side: int_G f rho relative to the supplied Haar rule.
  std::vector<double> lhs_terms(m_G.nodes.size());
  for (std::size_t i = 0; i < m_G.nodes.size(); ++i) {
    const double fv = f(m_G.nodes[i]);
    lhs_terms[i] =
        (fv == 0.0) ? 0.0 : m_G.weights[i] * fv * (rho ? rho->eval_working(m_G.nodes[i]) : 1.0);
  }
  const double lhs = pairwise_sum(lhs_terms);

  // Right side: iterate the fibre integral over the quotient rule.
  const auto* mid_chart = dynamic_cast<const ChartGroup*>(chain.mid().get());
  if (!mid_chart) throw SpaceMismatch("chart residual needs a chart middle group");
  const auto& big = cc->big_chart();
  std::vector<GroupElement> fibre;
  fibre.reserve(m_H.nodes.size());
  for (const auto& node : m_H.nodes)
    fibre.push_back(cc->embed_mid(mid_chart->element_from_working(node)));
  std::vector<double> rhs_terms(m_GH.nodes.size());
  std::vector<double> inner(fibre.size());
  for (std::size_t k = 0; k < m_GH.nodes.size(); ++k) {
    const GroupElement s = cc->section(cc->point_from_working_key(Quot::GH, m_GH.nodes[k]));
    for (std::size_t j = 0; j < fibre.size(); ++j)
      inner[j] = m_H.weights[j] * f(big.working_coords(big.compose(s, fibre[j])));
    rhs_terms[k] = m_GH.weights[k] * pairwise_sum(inner);
  }
  const double rhs = pairwise_sum(rhs_terms);

  return finish_weil(lhs, rhs, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), lhs_out,
                     rhs_out);
}

double weil_residual(const FiniteChain& chain, const FiniteFn& f, const MeasureRule& m_G,
                     const MeasureRule& m_GH, const RhoFunction* rho, double* lhs_out,
                     double* rhs_out) {
  if (!m_G.exact || !m_GH.exact) throw SpaceMismatch("exact residual needs exact rules");
  if (rho && rho->values.size() != static_cast<std::size_t>(chain.big_table().order()))
    throw SpaceMismatch("weight values must cover the group");

  Rational lhs(0);
  for (std::size_t i = 0; i < m_G.idx_nodes.size(); ++i) {
    const auto idx = static_cast<std::size_t>(m_G.idx_nodes[i]);
    Rational term = m_G.rat_weights[i] * f.values[idx];
    if (rho) term *= rho->values[idx];
    lhs += term;
  }

  const auto& big = chain.big_table();
  Rational rhs(0);
  for (std::size_t k = 0; k < m_GH.idx_nodes.size(); ++k) {
    const int rep = chain.cosets(Quot::GH)[static_cast<std::size_t>(m_GH.idx_nodes[k])].front();
    Rational inner(0);
    for (int h : chain.h_elems())
      inner += f.values[static_cast<std::size_t>(big.compose_index(rep, h))];
    rhs += m_GH.rat_weights[k] * inner;
  }

  const double lhs_d = to_double(lhs);
  const double rhs_d = to_double(rhs);
  double residual = 0.0;
  if (lhs != rhs) {
    residual = std::abs(to_double(lhs - rhs)) / std::max(1.0, std::abs(lhs_d));
    if (residual == 0.0) residual = std::numeric_limits<double>::denorm_min();
  }
  return finish_weil(lhs_d, rhs_d, residual, lhs_out, rhs_out);
}

// ---------------------------------------------------------------------------
// pushforward

namespace {

// Evenly spaced probes of a box, endpoints included (5 per axis).
std::vector<Coords> box_grid(const Box& box) {
  constexpr int kPerAxis = 5;
  std::vector<Coords> points;
  std::size_t total = 1;
  for (std::size_t i = 0; i < box.size(); ++i) total *= kPerAxis;
  points.reserve(total);
  std::vector<int> idx(box.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Coords p(box.size());
    for (std::size_t d = 0; d < box.size(); ++d)
      p[d] = box[d].lo + (box[d].hi - box[d].lo) * idx[d] / (kPerAxis - 1);
    points.push_back(std::move(p));
    for (std::size_t d = box.size(); d-- > 0;) {
      if (++idx[d] < kPerAxis) break;
      idx[d] = 0;
    }
  }
  return points;
}

// Bounding box of the support of c |-> f(g.c), found by mapping a probe grid
// of supp f through the inverse translation.  Angle axes always span their
// full period.
Box backmapped_box(const ChartChain& chain, Quot q, const GroupElement& g_inverse,
                   const Box& support, const std::vector<Axis>& axes, double pad) {
  Box out(support.size());
  bool first = true;
  for (const Coords& p : box_grid(support)) {
    // Clamp angle probes into [0, period) before building the point.
    Coords probe = p;
    for (std::size_t d = 0; d < axes.size(); ++d)
      if (axes[d].kind == Axis::Kind::angle) probe[d] = wrap_angle(probe[d], axes[d].period);
    const CosetPoint c = chain.point_from_working_key(q, probe);
    const Coords moved = chain.working_key(chain.act(g_inverse, c));
    for (std::size_t d = 0; d < moved.size(); ++d) {
      if (first) {
        out[d] = {moved[d], moved[d]};
      } else {
        out[d].lo = std::min(out[d].lo, moved[d]);
        out[d].hi = std::max(out[d].hi, moved[d]);
      }
    }
    first = false;
  }
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (axes[d].kind == Axis::Kind::angle) {
      out[d] = {0.0, axes[d].period};
    } else {
      out[d].lo -= pad;
      out[d].hi += pad;
    }
  }
  return out;
}

void require_safety(const Box& safety, const Box& candidate, const std::vector<Axis>& axes) {
  if (safety.empty()) return;
  for (std::size_t d = 0; d < candidate.size(); ++d) {
    if (axes[d].kind == Axis::Kind::angle) continue;
    if (candidate[d].lo < safety[d].lo || candidate[d].hi > safety[d].hi)
      throw SupportEscape("translated support left the trusted quadrature region");
  }
}

}  // namespace

double pushforward_residual(const SubgroupChain& chain, Quot q, const MeasureRule& m,
                            const std::function<MeasureRule(const Box&)>& rule_on_box,
                            const GroupElement& g, const std::vector<SpaceFunction>& battery,
                            const PushforwardOptions& options, PushWorst* worst_out) {
  const auto* cc = dynamic_cast<const ChartChain*>(&chain);
  if (!cc) throw Error("pushforward_residual is for chart chains; use the exact variant");
  const auto axes = chain.key_axes(q);
  const Group& source = (q == Quot::HL) ? *chain.mid() : *chain.big();
  const GroupElement g_inv = source.invert(g);

  double worst = 0.0;
  const auto record = [&](double base, double pushed, double residual, int fn_index) {
    if (residual < worst) return;
    worst = residual;
    if (worst_out) *worst_out = PushWorst{base, pushed, residual, fn_index};
  };
  for (std::size_t fn = 0; fn < battery.size(); ++fn) {
    const auto& f = battery[fn];
    if (options.mode == PushMode::invariant) {
      const double base = integrate(f, m);
      Box moved_box = backmapped_box(*cc, q, g_inv, f.support, axes, options.pad);
      require_safety(options.safety, moved_box, axes);
      MeasureRule moved_rule = rule_on_box(moved_box);
      std::vector<double> terms(moved_rule.nodes.size());
      for (std::size_t i = 0; i < moved_rule.nodes.size(); ++i) {
        const CosetPoint c = cc->point_from_working_key(q, moved_rule.nodes[i]);
        terms[i] = moved_rule.weights[i] * f(cc->working_key(cc->act(g, c)));
      }
      const double pushed = pairwise_sum(terms);
      record(base, pushed, std::abs(pushed - base) / std::max(1.0, std::abs(base)),
             static_cast<int>(fn));
    } else {
      if (!options.rho || !options.rho->eval_working)
        throw Error("quasi-invariant mode needs a weight function");
      if (q != Quot::GH) throw Error("quasi-invariant mode is defined on the middle quotient");
      // Left side: int f(g^{-1}.c) dm(c), supported where c lies in g.supp f.
      Box moved_box = backmapped_box(*cc, q, g, f.support, axes, options.pad);
      require_safety(options.safety, moved_box, axes);
      MeasureRule moved_rule = rule_on_box(moved_box);
      std::vector<double> lhs_terms(moved_rule.nodes.size());
      for (std::size_t i = 0; i < moved_rule.nodes.size(); ++i) {
        const CosetPoint c = cc->point_from_working_key(q, moved_rule.nodes[i]);
        lhs_terms[i] = moved_rule.weights[i] * f(cc->working_key(cc->act(g_inv, c)));
      }
      const double lhs = pairwise_sum(lhs_terms);
      // Right side: int f(c) rho(g s(c)) / rho(s(c)) dm(c).
      const auto& big = cc->big_chart();
      std::vector<double> rhs_terms(m.nodes.size());
      for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        const double fv = f(m.nodes[i]);
        if (fv == 0.0) {
          rhs_terms[i] = 0.0;
          continue;
        }
        const CosetPoint c = cc->point_from_working_key(q, m.nodes[i]);
        const GroupElement s = cc->section(c);
        const double num = options.rho->eval_working(big.working_coords(big.compose(g, s)));
        const double den = options.rho->eval_working(big.working_coords(s));
        if (!(num > 0.0) || !(den > 0.0))
          throw NonpositiveRho("weight must be strictly positive");
        rhs_terms[i] = m.weights[i] * fv * num / den;
      }
      const double rhs = pairwise_sum(rhs_terms);
      record(lhs, rhs, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)),
             static_cast<int>(fn));
    }
  }
  return worst;
}

bool pushforward_invariant_exact(const FiniteChain& chain, Quot q, const MeasureRule& m,
                                 const GroupElement& g) {
  if (!m.exact) throw SpaceMismatch("exact invariance needs an exact rule");
  std::vector<Rational> weight_of(m.idx_nodes.size(), Rational(0));
  for (std::size_t i = 0; i < m.idx_nodes.size(); ++i)
    weight_of[static_cast<std::size_t>(m.idx_nodes[i])] = m.rat_weights[i];
  for (std::size_t i = 0; i < m.idx_nodes.size(); ++i) {
    const CosetPoint c = chain.coset_point(m.idx_nodes[i], q);
    const CosetPoint moved = chain.act(g, c);
    if (weight_of[static_cast<std::size_t>(moved.key_index)] != m.rat_weights[i]) return false;
  }
  return true;
}

}  // namespace qradon
