#include "qradon/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "qradon/errors.hpp"

namespace qradon {

namespace {

// "<case>/G" -> "<case>" with the suffix checked.
std::string strip_suffix(const std::string& id, const char* suffix) {
  const std::string suf = std::string("/") + suffix;
  if (id.size() <= suf.size() || id.compare(id.size() - suf.size(), suf.size(), suf) != 0)
    throw SpaceMismatch("expected a space id ending in '" + suf + "', got '" + id + "'");
  return id.substr(0, id.size() - suf.size());
}

void require_same_prefix(const std::string& a, const std::string& b) {
  if (a != b)
    throw SpaceMismatch("mixed case prefixes: '" + a + "' vs '" + b + "'");
}

const ChartChain& chart_chain(const SubgroupChain& chain) {
  const auto* cc = dynamic_cast<const ChartChain*>(&chain);
  if (!cc) throw SpaceMismatch("this overload serves chart chains; use the exact one");
  return *cc;
}

// Cache keys are quantized (granularity 2^-40 ~ 9e-13) so coordinates that
// reproduce the same coset through different arithmetic routes land in one
// bucket; quadrature nodes are separated by far more than that.
Coords quantized(const Coords& key) {
  Coords q(key.size());
  for (std::size_t i = 0; i < key.size(); ++i)
    q[i] = std::ldexp(std::round(std::ldexp(key[i], 40)), -40);
  return q;
}

// Wrap an expensive working-key evaluation with a synchronized per-function
// cache, so returned transforms stay safe to evaluate concurrently.
std::function<double(const Coords&)> memoised(std::function<double(const Coords&)> raw) {
  struct Cache {
    std::mutex mutex;
    std::map<Coords, double> map;
  };
  auto cache = std::make_shared<Cache>();
  return [cache, raw = std::move(raw)](const Coords& key) {
    const Coords q = quantized(key);
    {
      std::lock_guard<std::mutex> lock(cache->mutex);
      auto it = cache->map.find(q);
      if (it != cache->map.end()) return it->second;
    }
    const double v = raw(key);
    std::lock_guard<std::mutex> lock(cache->mutex);
    return cache->map.emplace(q, v).first->second;
  };
}

// Elements of G sitting over the nodes of a rule on H (chart path).
std::vector<GroupElement> embedded_mid_nodes(const ChartChain& cc, const MeasureRule& m_H) {
  const auto* mid_chart = dynamic_cast<const ChartGroup*>(cc.mid().get());
  if (!mid_chart) throw SpaceMismatch("chart fibre averaging needs a chart middle group");
  std::vector<GroupElement> out;
  out.reserve(m_H.nodes.size());
  for (const auto& node : m_H.nodes)
    out.push_back(cc.embed_mid(mid_chart->element_from_working(node)));
  return out;
}

// Elements of G sitting over the H/L coset nodes of eta (chart path).
std::vector<GroupElement> embedded_fibre_sections(const ChartChain& cc, const MeasureRule& m_HL) {
  std::vector<GroupElement> out;
  out.reserve(m_HL.nodes.size());
  for (const auto& node : m_HL.nodes)
    out.push_back(cc.embed_mid(cc.section(cc.point_from_working_key(Quot::HL, node))));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// fibre averages

QuotientFunction fibre_average_mid(const SubgroupChain& chain, const TestFunction& f,
                                   const MeasureRule& m_H) {
  const auto& cc = chart_chain(chain);
  const std::string prefix = strip_suffix(f.space_id, "G");
  require_same_prefix(prefix, strip_suffix(m_H.space_id, "H"));
  if (m_H.exact) throw SpaceMismatch("chart fibre averaging needs a quadrature rule on H");

  auto fibre = std::make_shared<const std::vector<GroupElement>>(embedded_mid_nodes(cc, m_H));
  auto weights = std::make_shared<const std::vector<double>>(m_H.weights);
  const auto& big = cc.big_chart();

  QuotientFunction out;
  out.space_id = prefix + "/GH";
  out.support = cc.key_box_of_group_box(f.support, Quot::GH);
  out.note = "fibre average over H of [" + f.note + "]";
  out.eval = memoised([&cc, &big, fibre, weights, f](const Coords& key) {
    const GroupElement s = cc.section(cc.point_from_working_key(Quot::GH, key));
    std::vector<double> terms(fibre->size());
    for (std::size_t i = 0; i < fibre->size(); ++i)
      terms[i] = (*weights)[i] * f(big.working_coords(big.compose(s, (*fibre)[i])));
    return pairwise_sum(terms);
  });
  return out;
}

FiniteFn fibre_average_mid(const FiniteChain& chain, const FiniteFn& f) {
  const std::string prefix = strip_suffix(f.space_id, "G");
  const auto& big = chain.big_table();
  FiniteFn out;
  out.space_id = prefix + "/GH";
  out.values.reserve(chain.cosets(Quot::GH).size());
  for (const auto& coset : chain.cosets(Quot::GH)) {
    Rational s(0);
    for (int h : chain.h_elems())
      s += f.values[static_cast<std::size_t>(big.compose_index(coset.front(), h))];
    out.values.push_back(s);
  }
  return out;
}

QuotientFunction fibre_average_small(const SubgroupChain& chain, const TestFunction& f,
                                     const MeasureRule& m_L) {
  const auto& cc = chart_chain(chain);
  const std::string prefix = strip_suffix(f.space_id, "G");
  require_same_prefix(prefix, strip_suffix(m_L.space_id, "L"));
  if (!m_L.exact) throw SpaceMismatch("L is finite in every registered chain");

  const auto* small_fg = dynamic_cast<const FiniteGroup*>(cc.small().get());
  if (!small_fg) throw SpaceMismatch("fibre average over L needs a finite L");
  std::vector<GroupElement> fibre;
  std::vector<double> weights;
  fibre.reserve(m_L.idx_nodes.size());
  for (std::size_t i = 0; i < m_L.idx_nodes.size(); ++i) {
    fibre.push_back(cc.embed_small_in_big(small_fg->element(m_L.idx_nodes[i])));
    weights.push_back(to_double(m_L.rat_weights[i]));
  }
  auto fibre_p = std::make_shared<const std::vector<GroupElement>>(std::move(fibre));
  auto weights_p = std::make_shared<const std::vector<double>>(std::move(weights));
  const auto& big = cc.big_chart();

  QuotientFunction out;
  out.space_id = prefix + "/GL";
  out.support = cc.key_box_of_group_box(f.support, Quot::GL);
  out.note = "fibre average over L of [" + f.note + "]";
  out.eval = memoised([&cc, &big, fibre_p, weights_p, f](const Coords& key) {
    const GroupElement s = cc.section(cc.point_from_working_key(Quot::GL, key));
    double v = 0.0;
    for (std::size_t i = 0; i < fibre_p->size(); ++i)
      v += (*weights_p)[i] * f(big.working_coords(big.compose(s, (*fibre_p)[i])));
    return v;
  });
  return out;
}

FiniteFn fibre_average_small(const FiniteChain& chain, const FiniteFn& f) {
  const std::string prefix = strip_suffix(f.space_id, "G");
  const auto& big = chain.big_table();
  FiniteFn out;
  out.space_id = prefix + "/GL";
  out.values.reserve(chain.cosets(Quot::GL).size());
  for (const auto& coset : chain.cosets(Quot::GL)) {
    Rational s(0);
    for (int l : chain.l_elems())
      s += f.values[static_cast<std::size_t>(big.compose_index(coset.front(), l))];
    out.values.push_back(s);
  }
  return out;
}

QuotientFunction weighted_fibre_average(const SubgroupChain& chain, const TestFunction& f,
                                        const RhoFunction& rho, const MeasureRule& m_H) {
  const auto& cc = chart_chain(chain);
  const std::string prefix = strip_suffix(f.space_id, "G");
  require_same_prefix(prefix, strip_suffix(m_H.space_id, "H"));
  if (m_H.exact) throw SpaceMismatch("chart fibre averaging needs a quadrature rule on H");
  if (!rho.eval_working) throw SpaceMismatch("weighted averaging needs a chart weight");

  auto fibre = std::make_shared<const std::vector<GroupElement>>(embedded_mid_nodes(cc, m_H));
  auto weights = std::make_shared<const std::vector<double>>(m_H.weights);
  const auto& big = cc.big_chart();
  auto rho_eval = rho.eval_working;

  QuotientFunction out;
  out.space_id = prefix + "/GH";
  out.support = cc.key_box_of_group_box(f.support, Quot::GH);
  out.note = "weighted fibre average over H of [" + f.note + "]";
  out.eval = memoised([&cc, &big, fibre, weights, f, rho_eval](const Coords& key) {
    const GroupElement s = cc.section(cc.point_from_working_key(Quot::GH, key));
    std::vector<double> terms(fibre->size());
    for (std::size_t i = 0; i < fibre->size(); ++i) {
      const Coords w = big.working_coords(big.compose(s, (*fibre)[i]));
      const double fv = f(w);
      if (fv == 0.0) {
        terms[i] = 0.0;
        continue;
      }
      const double r = rho_eval(w);
      if (!(r > 0.0)) throw NonpositiveRho("weight must be strictly positive");
      terms[i] = (*weights)[i] * fv / r;
    }
    return pairwise_sum(terms);
  });
  return out;
}

FiniteFn weighted_fibre_average(const FiniteChain& chain, const FiniteFn& f,
                                const RhoFunction& rho) {
  const std::string prefix = strip_suffix(f.space_id, "G");
  const auto& big = chain.big_table();
  if (rho.values.size() != static_cast<std::size_t>(big.order()))
    throw SpaceMismatch("weight values must cover the group");
  FiniteFn out;
  out.space_id = prefix + "/GH";
  out.values.reserve(chain.cosets(Quot::GH).size());
  for (const auto& coset : chain.cosets(Quot::GH)) {
    Rational s(0);
    for (int h : chain.h_elems()) {
      const auto xh = static_cast<std::size_t>(big.compose_index(coset.front(), h));
      if (rho.values[xh] <= Rational(0)) throw NonpositiveRho("weight must be strictly positive");
      s += f.values[xh] / rho.values[xh];
    }
    out.values.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Radon transform and its dual

QuotientFunction radon(const SubgroupChain& chain, const QuotientFunction& f_gl,
                       const MeasureRule& m_HL) {
  const auto& cc = chart_chain(chain);
  if (!chain.flags().dH_restricts_dL)
    throw HypothesisViolated(
        "the invariant fibre measure on H/L needs the modular function of H to restrict to L's");
  const std::string prefix = strip_suffix(f_gl.space_id, "GL");
  require_same_prefix(prefix, strip_suffix(m_HL.space_id, "HL"));
  if (m_HL.exact) throw SpaceMismatch("chart transform needs a quadrature rule on H/L");

  auto fibre = std::make_shared<const std::vector<GroupElement>>(embedded_fibre_sections(cc, m_HL));
  auto weights = std::make_shared<const std::vector<double>>(m_HL.weights);
  const auto& big = cc.big_chart();

  QuotientFunction out;
  out.space_id = prefix + "/GH";
  out.support = cc.coarsen_key_box(f_gl.support);
  out.note = "radon transform of [" + f_gl.note + "]";
  out.eval = memoised([&cc, &big, fibre, weights, f_gl](const Coords& key) {
    const GroupElement s = cc.section(cc.point_from_working_key(Quot::GH, key));
    std::vector<double> terms(fibre->size());
    for (std::size_t i = 0; i < fibre->size(); ++i) {
      const CosetPoint moved = cc.project(big.compose(s, (*fibre)[i]), Quot::GL);
      terms[i] = (*weights)[i] * f_gl(cc.working_key(moved));
    }
    return pairwise_sum(terms);
  });
  return out;
}

FiniteFn radon(const FiniteChain& chain, const FiniteFn& f_gl) {
  if (!chain.flags().dH_restricts_dL)
    throw HypothesisViolated(
        "the invariant fibre measure on H/L needs the modular function of H to restrict to L's");
  const std::string prefix = strip_suffix(f_gl.space_id, "GL");
  const auto& big = chain.big_table();
  FiniteFn out;
  out.space_id = prefix + "/GH";
  out.values.reserve(chain.cosets(Quot::GH).size());
  for (const auto& coset : chain.cosets(Quot::GH)) {
    Rational s(0);
    for (const auto& fibre_coset : chain.cosets(Quot::HL)) {
      const int moved = big.compose_index(coset.front(), fibre_coset.front());
      s += f_gl.values[static_cast<std::size_t>(chain.coset_index(moved, Quot::GL))];
    }
    out.values.push_back(s);
  }
  return out;
}

QuotientFunction dual_radon_keq(const SubgroupChain& chain, const QuotientFunction& phi_gh,
                                const MeasureRule& m_HL) {
  const auto& cc = chart_chain(chain);
  const std::string prefix = strip_suffix(phi_gh.space_id, "GH");
  require_same_prefix(prefix, strip_suffix(m_HL.space_id, "HL"));
  if (m_HL.exact) throw SpaceMismatch("chart transform needs a quadrature rule on H/L");

  auto fibre = std::make_shared<const std::vector<GroupElement>>(embedded_fibre_sections(cc, m_HL));
  auto weights = std::make_shared<const std::vector<double>>(m_HL.weights);
  const auto& big = cc.big_chart();

  QuotientFunction out;
  out.space_id = prefix + "/GH";  // K == H, so G/K is the same key space
  out.support = phi_gh.support;
  out.note = "dual transform of [" + phi_gh.note + "]";
  out.eval = memoised([&cc, &big, fibre, weights, phi_gh](const Coords& key) {
    const GroupElement s = cc.section(cc.point_from_working_key(Quot::GH, key));
    std::vector<double> terms(fibre->size());
    for (std::size_t i = 0; i < fibre->size(); ++i) {
      const CosetPoint moved = cc.project(big.compose(s, (*fibre)[i]), Quot::GH);
      terms[i] = (*weights)[i] * phi_gh(cc.working_key(moved));
    }
    return pairwise_sum(terms);
  });
  return out;
}

FiniteFn dual_radon(const FiniteChain& chain, const FiniteFn& phi_gh) {
  if (!chain.has_dual())
    throw HypothesisViolated("no dual subgroup registered for chain '" + chain.id() + "'");
  const std::string prefix = strip_suffix(phi_gh.space_id, "GH");
  const auto& big = chain.big_table();
  FiniteFn out;
  out.space_id = prefix + "/GK";
  out.values.reserve(chain.cosets(Quot::GK).size());
  for (const auto& coset : chain.cosets(Quot::GK)) {
    Rational s(0);
    for (const auto& fibre_coset : chain.cosets(Quot::KL)) {
      const int moved = big.compose_index(coset.front(), fibre_coset.front());
      s += phi_gh.values[static_cast<std::size_t>(chain.coset_index(moved, Quot::GH))];
    }
    out.values.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// lift

QuotientFunction lift(const SubgroupChain& chain, const QuotientFunction& phi_gh,
                      const QuotientFunction& g0_gl, const MeasureRule& m_HL) {
  const auto& cc = chart_chain(chain);
  const std::string prefix = strip_suffix(phi_gh.space_id, "GH");
  require_same_prefix(prefix, strip_suffix(g0_gl.space_id, "GL"));

  auto rg0 = std::make_shared<const QuotientFunction>(radon(chain, g0_gl, m_HL));

  // Scale for the denominator guard: probe the transform over its support.
  double sup = 0.0;
  {
    const Box& b = rg0->support;
    std::vector<int> idx(b.size(), 0);
    constexpr int kPerAxis = 7;
    std::size_t total = 1;
    for (std::size_t i = 0; i < b.size(); ++i) total *= kPerAxis;
    for (std::size_t flat = 0; flat < total; ++flat) {
      Coords p(b.size());
      for (std::size_t d = 0; d < b.size(); ++d)
        p[d] = b[d].lo + (b[d].hi - b[d].lo) * idx[d] / (kPerAxis - 1);
      sup = std::max(sup, std::abs((*rg0)(p)));
      for (std::size_t d = b.size(); d-- > 0;) {
        if (++idx[d] < kPerAxis) break;
        idx[d] = 0;
      }
    }
  }
  if (!(sup > 0.0))
    throw DegenerateDenominator("the reference function's transform vanishes on its support");
  const double floor = kLiftDenomScale * sup;

  QuotientFunction out;
  out.space_id = prefix + "/GL";
  out.support = cc.restrict_key_box(phi_gh.support, g0_gl.support);
  out.note = "lift of [" + phi_gh.note + "] through [" + g0_gl.note + "]";
  out.eval = [&cc, phi_gh, g0_gl, rg0, floor](const Coords& key) {
    const CosetPoint fine = cc.point_from_working_key(Quot::GL, key);
    const Coords gh_key = cc.working_key(cc.refine_project(fine));
    const double phi_v = phi_gh(gh_key);
    if (phi_v == 0.0) return 0.0;
    const double den = (*rg0)(gh_key);
    if (!(std::abs(den) > floor))
      throw DegenerateDenominator("denominator below the safe threshold in the lift");
    return g0_gl(key) * phi_v / den;
  };
  return out;
}

FiniteFn lift(const FiniteChain& chain, const FiniteFn& phi_gh, const FiniteFn& g0_gl) {
  const std::string prefix = strip_suffix(phi_gh.space_id, "GH");
  require_same_prefix(prefix, strip_suffix(g0_gl.space_id, "GL"));
  const FiniteFn rg0 = radon(chain, g0_gl);
  FiniteFn out;
  out.space_id = prefix + "/GL";
  out.values.reserve(chain.cosets(Quot::GL).size());
  for (int j = 0; j < chain.n_cosets(Quot::GL); ++j) {
    const int rep = chain.cosets(Quot::GL)[static_cast<std::size_t>(j)].front();
    const auto gh = static_cast<std::size_t>(chain.coset_index(rep, Quot::GH));
    if (phi_gh.values[gh] == Rational(0)) {
      out.values.emplace_back(0);
      continue;
    }
    if (rg0.values[gh] == Rational(0))
      throw DegenerateDenominator("the reference function's transform vanishes where the target is nonzero");
    out.values.push_back(g0_gl.values[static_cast<std::size_t>(j)] * phi_gh.values[gh] /
                         rg0.values[gh]);
  }
  return out;
}

}  // namespace qradon
