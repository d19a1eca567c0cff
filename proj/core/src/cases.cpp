#include "qradon/cases.hpp"

#include <cmath>
#include <numbers>

#include "qradon/errors.hpp"

namespace qradon {

const char* to_string(Space s) {
  switch (s) {
    case Space::G: return "G";
    case Space::H: return "H";
    case Space::L: return "L";
    case Space::GH: return "GH";
    case Space::GL: return "GL";
    case Space::HL: return "HL";
  }
  return "?";
}

std::string space_id(const std::string& case_id, Space s) {
  return case_id + "/" + to_string(s);
}

// Integration conventions of a chart case.
struct CaseContext::ChartConfig {
  Box g_box, g_safety;
  Box h_box, h_safety;
  std::vector<BumpRanges> g_ranges;  // per G working axis
  std::vector<BumpRanges> h_ranges;  // per H working axis
  std::function<double(const Coords&)> gh_density;  // key working coords
  std::function<double(const Coords&)> gl_density;
  std::function<double(const Coords&)> hl_density;
  std::function<double(const Coords&)> rho_canonical;  // G working coords
  std::string rho_note;
  std::vector<GroupElement> translations;
  std::vector<GroupElement> mid_translations;
};

const std::vector<std::string>& CaseContext::registry() {
  static const std::vector<std::string> ids = chain_ids();
  return ids;
}

std::string CaseContext::describe(const std::string& case_id) {
  if (case_id == "s3-a3")
    return "order-6 permutation group over its index-2 alternating subgroup (exact)";
  if (case_id == "d4-c4-center")
    return "symmetries of the square over the rotation subgroup and its center (exact)";
  if (case_id == "affine-dilation")
    return "affine line group over the dilation subgroup (nonunimodular, quadrature)";
  if (case_id == "sl2-so2-pm1")
    return "unit-determinant 2x2 group over rotations and {+I,-I} (quadrature)";
  if (case_id == "custom") return "user-supplied composition table (exact)";
  throw UnknownCase("unknown case id: " + case_id);
}

CaseContext::CaseContext(const std::string& case_id, int quad_order)
    : id_(case_id), chain_(find_chain(case_id)), quad_order_(quad_order) {
  if (quad_order_ < 2) throw Error("quadrature order must be at least 2");
  if (!chain_->finite()) init_chart_config();
}

CaseContext::CaseContext(std::shared_ptr<const FiniteChain> custom_chain, int quad_order)
    : id_(custom_chain->id()), chain_(std::move(custom_chain)), quad_order_(quad_order) {}

void CaseContext::init_chart_config() {
  auto cfg = std::make_shared<ChartConfig>();
  const double pi = std::numbers::pi;
  if (id_ == "affine-dilation") {
    cfg->g_box = {{-4.5, 4.5}, {-4.5, 4.5}};
    cfg->g_safety = {{-12.0, 12.0}, {-12.0, 12.0}};
    cfg->h_box = {{-4.5, 4.5}};
    cfg->h_safety = {{-12.0, 12.0}};
    cfg->g_ranges = {{-0.5, 0.5, 0.32, 0.5}, {-0.5, 0.5, 0.32, 0.5}};
    cfg->h_ranges = {{-0.5, 0.5, 0.32, 0.5}};
    cfg->gh_density = [](const Coords&) { return 1.0; };   // Lebesgue on the key line
    cfg->gl_density = [](const Coords& k) { return std::exp(-k[0]); };
    cfg->hl_density = [](const Coords&) { return 1.0; };
    // rho(a, b) = a makes the Lebesgue key measure strongly quasi-invariant.
    cfg->rho_canonical = [](const Coords& w) { return std::exp(w[0]); };
    cfg->rho_note = "scale coordinate of the element";
    const auto& g = affine_group();
    const double r2 = std::sqrt(2.0);
    cfg->translations = {g->element({r2, 0.6}), g->element({1.0 / r2, -0.6}),
                         g->element({1.0, 1.0}), g->element({2.0, 0.0}),
                         g->element({1.0, -1.2})};
    const auto* mid = dynamic_cast<const ChartGroup*>(chain_->mid().get());
    cfg->mid_translations = {mid->element({2.0}), mid->element({0.5}),
                             mid->element({std::exp(0.8)})};
  } else if (id_ == "sl2-so2-pm1") {
    cfg->g_box = {{-3.0, 3.0}, {-3.0, 3.0}, {0.0, 2.0 * pi}};
    cfg->g_safety = {{-40.0, 40.0}, {-15.0, 15.0}, {0.0, 2.0 * pi}};
    cfg->h_box = {{0.0, 2.0 * pi}};
    cfg->h_safety = {{0.0, 2.0 * pi}};
    cfg->g_ranges = {{-0.25, 0.25, 0.2, 0.3}, {-0.25, 0.25, 0.2, 0.3}, {0, 0, 0, 0}};
    cfg->h_ranges = {{0, 0, 0, 0}};
    cfg->gh_density = [](const Coords& k) { return std::exp(-k[1]); };
    cfg->gl_density = [](const Coords& k) { return std::exp(-k[1]); };
    cfg->hl_density = [](const Coords&) { return 1.0; };
    cfg->rho_canonical = [](const Coords&) { return 1.0; };
    cfg->rho_note = "constant 1 (unimodular pair)";
    const auto& g = sl2_group();
    // Shears, dilations and one lower-triangular element; all keep the
    // back-mapped supports well inside the safety region.
    cfg->translations = {
        g->element({1.0, 1.0, 0.0}),   // z -> z + 1
        g->element({-0.6, 1.0, 0.0}),  // z -> z - 0.6
        g->element({0.0, 2.0, 0.0}),   // z -> 2z
        g->element({0.0, 0.5, 0.0}),   // z -> z/2
        g->element(sl2::from_matrix({1.0, 0.0, 0.15, 1.0})),
    };
    const auto* mid = dynamic_cast<const ChartGroup*>(chain_->mid().get());
    cfg->mid_translations = {mid->element({0.2}), mid->element({1.0}), mid->element({2.5}),
                             mid->element({pi}), mid->element({5.77})};
  } else {
    throw UnknownCase("no chart configuration for case: " + id_);
  }
  chart_ = std::move(cfg);
}

const MeasureRule& CaseContext::rule(Space s) const {
  auto it = rule_cache_.find(s);
  if (it != rule_cache_.end()) return it->second;

  MeasureRule m;
  const std::string sid = space_id(id_, s);
  if (finite()) {
    const auto& fc = static_cast<const FiniteChain&>(*chain_);
    switch (s) {
      case Space::G: m = counting_rule(sid, fc.big_table().order()); break;
      case Space::H: m = counting_rule(sid, static_cast<int>(fc.h_elems().size())); break;
      case Space::L: m = counting_rule(sid, static_cast<int>(fc.l_elems().size())); break;
      case Space::GH: m = counting_rule(sid, fc.n_cosets(Quot::GH)); break;
      case Space::GL: m = counting_rule(sid, fc.n_cosets(Quot::GL)); break;
      case Space::HL: m = counting_rule(sid, fc.n_cosets(Quot::HL)); break;
    }
  } else {
    const auto& cc = static_cast<const ChartChain&>(*chain_);
    const int small_order = static_cast<const FiniteGroup&>(*chain_->small()).order();
    switch (s) {
      case Space::G:
        m = haar_rule(cc.big_chart(), sid, chart_->g_box, quad_order_);
        break;
      case Space::H:
        m = haar_rule(*dynamic_cast<const ChartGroup*>(chain_->mid().get()), sid, chart_->h_box,
                      quad_order_);
        break;
      case Space::L:
        m = counting_rule(sid, small_order);
        break;
      case Space::GH:
        m = density_rule(sid, cc.key_box_of_group_box(chart_->g_box, Quot::GH), quad_order_,
                         chart_->gh_density, "canonical invariant-class measure on G/H keys");
        break;
      case Space::GL:
        m = project_rule(cc, Quot::GL, rule(Space::G), small_order, sid,
                         "Haar rule pushed to G/L keys (weights / |L|)");
        break;
      case Space::HL:
        m = project_rule(cc, Quot::HL, rule(Space::H), small_order, sid,
                         "Haar rule of H pushed to H/L keys (weights / |L|)");
        break;
    }
  }
  return rule_cache_.emplace(s, std::move(m)).first->second;
}

MeasureRule CaseContext::rule_on_box(Space s, const Box& box) const {
  if (finite()) throw Error("rule_on_box applies to chart cases only");
  const auto& cc = static_cast<const ChartChain&>(*chain_);
  const std::string sid = space_id(id_, s);
  switch (s) {
    case Space::G: return haar_rule(cc.big_chart(), sid, box, quad_order_);
    case Space::H:
      return haar_rule(*dynamic_cast<const ChartGroup*>(chain_->mid().get()), sid, box,
                       quad_order_);
    case Space::GH:
      return density_rule(sid, box, quad_order_, chart_->gh_density,
                          "canonical invariant-class measure on G/H keys");
    case Space::GL:
      return density_rule(sid, box, quad_order_, chart_->gl_density,
                          "canonical measure on G/L keys");
    case Space::HL:
      return density_rule(sid, box, quad_order_, chart_->hl_density,
                          "canonical measure on H/L keys");
    case Space::L:
      break;
  }
  throw Error("no box-rebuild for this space");
}

std::function<MeasureRule(const Box&)> CaseContext::rule_builder(Space s) const {
  return [this, s](const Box& box) { return rule_on_box(s, box); };
}

Box CaseContext::default_box(Space s) const {
  if (finite()) throw Error("default_box applies to chart cases only");
  const auto& cc = static_cast<const ChartChain&>(*chain_);
  switch (s) {
    case Space::G: return chart_->g_box;
    case Space::H: return chart_->h_box;
    case Space::GH: return cc.key_box_of_group_box(chart_->g_box, Quot::GH);
    case Space::GL: return cc.key_box_of_group_box(chart_->g_box, Quot::GL);
    case Space::HL: return cc.key_box_of_group_box(chart_->h_box, Quot::HL);
    case Space::L: break;
  }
  throw Error("no default box for this space");
}

Box CaseContext::safety_box(Space s) const {
  if (finite()) throw Error("safety_box applies to chart cases only");
  const auto& cc = static_cast<const ChartChain&>(*chain_);
  switch (s) {
    case Space::G: return chart_->g_safety;
    case Space::H: return chart_->h_safety;
    case Space::GH: return cc.key_box_of_group_box(chart_->g_safety, Quot::GH);
    case Space::GL: return cc.key_box_of_group_box(chart_->g_safety, Quot::GL);
    case Space::HL: return cc.key_box_of_group_box(chart_->h_safety, Quot::HL);
    case Space::L: break;
  }
  throw Error("no safety box for this space");
}

RhoFunction CaseContext::rho(RhoChoice choice) const {
  RhoFunction r;
  r.chain_id = chain_->id();
  if (finite()) {
    const auto& fc = static_cast<const FiniteChain&>(*chain_);
    r.exact = true;
    r.values.assign(static_cast<std::size_t>(fc.big_table().order()), Rational(1));
    r.note = "constant 1";
    return r;
  }
  if (choice == RhoChoice::one) {
    r.eval_working = [](const Coords&) { return 1.0; };
    r.note = "constant 1";
  } else {
    r.eval_working = chart_->rho_canonical;
    r.note = chart_->rho_note;
  }
  return r;
}

MeasureRule CaseContext::build_quotient_measure(const RhoFunction& rho_fn) const {
  // Admissibility: strictly positive and covariant under right H-translation.
  double defect = 0.0;
  if (finite()) {
    defect = validate_rho(*chain_, rho_fn, {}, {}, 0, 0);
  } else {
    defect = validate_rho(*chain_, rho_fn, chart_->g_box, chart_->h_box, 0, 200);
  }
  if (defect > 1e-6)
    throw RhoInvalid("weight violates its covariance identity (defect " + std::to_string(defect) +
                     ")");

  // Two admissible weights differ by a positive factor constant on cosets,
  // and the tied measures differ by exactly that factor.  Reweight the
  // canonical rule accordingly.
  MeasureRule m = rule(Space::GH);
  const RhoFunction canonical = rho(RhoChoice::canonical);
  if (m.exact) {
    const auto& fc = static_cast<const FiniteChain&>(*chain_);
    for (std::size_t i = 0; i < m.idx_nodes.size(); ++i) {
      const int rep = fc.cosets(Quot::GH)[static_cast<std::size_t>(m.idx_nodes[i])].front();
      m.rat_weights[i] *= rho_fn.values[static_cast<std::size_t>(rep)] /
                          canonical.values[static_cast<std::size_t>(rep)];
    }
  } else {
    const auto& cc = static_cast<const ChartChain&>(*chain_);
    const auto& big = cc.big_chart();
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      const GroupElement s = cc.section(cc.point_from_working_key(Quot::GH, m.nodes[i]));
      const Coords w = big.working_coords(s);
      m.weights[i] *= rho_fn.eval_working(w) / canonical.eval_working(w);
    }
  }
  m.note += " (reweighted for the supplied rho)";
  return m;
}

void CaseContext::bump_setup(Space s, std::vector<Axis>& axes,
                             std::vector<BumpRanges>& ranges) const {
  if (finite()) throw Error("smooth bumps apply to chart cases only");
  const auto& cc = static_cast<const ChartChain&>(*chain_);
  switch (s) {
    case Space::G:
      axes = cc.big_chart().axes();
      ranges = chart_->g_ranges;
      break;
    case Space::H:
      axes = dynamic_cast<const ChartGroup*>(chain_->mid().get())->axes();
      ranges = chart_->h_ranges;
      break;
    case Space::GH:
    case Space::GL: {
      const Quot q = (s == Space::GH) ? Quot::GH : Quot::GL;
      axes = cc.key_axes(q);
      for (std::size_t k : cc.key_spec(q).kept) ranges.push_back(chart_->g_ranges[k]);
      break;
    }
    case Space::HL:
      axes = cc.key_axes(Quot::HL);
      for (std::size_t k : cc.key_spec(Quot::HL).kept) ranges.push_back(chart_->h_ranges[k]);
      break;
    case Space::L:
      throw Error("no smooth bumps on a finite space");
  }
}

std::vector<SpaceFunction> CaseContext::bumps(Space s, std::uint64_t seed, std::string_view tag,
                                              int count) const {
  std::vector<Axis> axes;
  std::vector<BumpRanges> ranges;
  bump_setup(s, axes, ranges);
  std::string full_tag = id_;
  full_tag += "/";
  full_tag += to_string(s);
  full_tag += "/";
  full_tag += tag;
  return random_bumps(space_id(id_, s), axes, ranges, seed, full_tag, count);
}

SpaceFunction CaseContext::canonical_bump(Space s) const {
  std::vector<Axis> axes;
  std::vector<BumpRanges> ranges;
  bump_setup(s, axes, ranges);
  std::vector<BumpAxis> params(axes.size());
  for (std::size_t a = 0; a < axes.size(); ++a) {
    params[a].center = 0.5 * (ranges[a].center_lo + ranges[a].center_hi);
    params[a].sigma = 0.5 * (ranges[a].sigma_lo + ranges[a].sigma_hi);
    params[a].phase = 0.0;
  }
  SpaceFunction f = make_bump(space_id(id_, s), axes, params);
  f.note = "canonical bump";
  return f;
}

std::vector<Coords> CaseContext::sample_keys(Space s, std::uint64_t seed, std::string_view tag,
                                             int count) const {
  const Box box = default_box(s);
  std::string full_tag = id_;
  full_tag += "/keys/";
  full_tag += to_string(s);
  full_tag += "/";
  full_tag += tag;
  Rng rng(seed, full_tag);
  std::vector<Coords> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Coords p(box.size());
    for (std::size_t d = 0; d < box.size(); ++d) p[d] = rng.uniform(box[d].lo, box[d].hi);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<GroupElement> CaseContext::translation_battery() const {
  if (finite()) {
    const auto& fc = static_cast<const FiniteChain&>(*chain_);
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(fc.big_table().order()));
    for (int i = 0; i < fc.big_table().order(); ++i) out.push_back(fc.big_table().element(i));
    return out;
  }
  return chart_->translations;
}

std::vector<GroupElement> CaseContext::mid_translation_battery() const {
  if (finite()) {
    const auto& fc = static_cast<const FiniteChain&>(*chain_);
    const auto& mid = static_cast<const FiniteGroup&>(*chain_->mid());
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(mid.order()));
    for (int i = 0; i < mid.order(); ++i) out.push_back(mid.element(i));
    return out;
  }
  return chart_->mid_translations;
}

DualSetup CaseContext::dual() const {
  DualSetup d;
  if (finite()) {
    d.available = static_cast<const FiniteChain&>(*chain_).has_dual();
    return d;
  }
  if (id_ == "sl2-so2-pm1") {
    d.available = true;
    d.k_equals_h = true;
  }
  return d;
}

}  // namespace qradon
