#include "qradon/coset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qradon/errors.hpp"

namespace qradon {

const char* to_string(Quot q) {
  switch (q) {
    case Quot::GH: return "GH";
    case Quot::GL: return "GL";
    case Quot::HL: return "HL";
    case Quot::GK: return "GK";
    case Quot::KL: return "KL";
  }
  return "?";
}

SubgroupChain::SubgroupChain(std::string id, std::shared_ptr<const Group> big,
                             std::shared_ptr<const Group> mid, std::shared_ptr<const Group> small,
                             ChainFlags flags)
    : id_(std::move(id)),
      big_(std::move(big)),
      mid_(std::move(mid)),
      small_(std::move(small)),
      flags_(flags) {}

void SubgroupChain::require_point(const CosetPoint& c, Quot q) const {
  if (c.chain_id != id_)
    throw QuotientMismatch("coset of chain '" + c.chain_id + "' used with chain '" + id_ + "'");
  if (c.quotient != q)
    throw QuotientMismatch(std::string("expected a ") + to_string(q) + " coset, got " +
                           to_string(c.quotient));
}

CosetPoint SubgroupChain::refine_project(const CosetPoint& xl) const {
  require_point(xl, Quot::GL);
  return project(xl.representative, Quot::GH);
}

// ---------------------------------------------------------------------------
// FiniteChain

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool contains_all(const std::vector<int>& sorted_outer, const std::vector<int>& sorted_inner) {
  return std::includes(sorted_outer.begin(), sorted_outer.end(), sorted_inner.begin(),
                       sorted_inner.end());
}

std::vector<int> checked_subgroup(const FiniteGroup& big, std::vector<int> elems,
                                  const char* name) {
  auto v = sorted_unique(std::move(elems));
  if (!big.is_subgroup(v))
    throw Error(std::string(name) + " is not a subgroup of the ambient group");
  return v;
}

std::shared_ptr<const FiniteGroup> subgroup_table(const FiniteGroup& big,
                                                  const std::vector<int>& elems,
                                                  std::string id) {
  const int k = static_cast<int>(elems.size());
  std::vector<int> pos(static_cast<std::size_t>(big.order()), -1);
  for (int i = 0; i < k; ++i) pos[static_cast<std::size_t>(elems[static_cast<std::size_t>(i)])] = i;
  std::vector<std::vector<int>> table(static_cast<std::size_t>(k),
                                      std::vector<int>(static_cast<std::size_t>(k)));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(
          big.compose_index(elems[static_cast<std::size_t>(i)], elems[static_cast<std::size_t>(j)]))];
  return std::make_shared<FiniteGroup>(std::move(id), std::move(table));
}

ChainFlags finite_flags(const FiniteGroup& big, const std::vector<int>& h_sorted) {
  // Finite groups are unimodular, so every modular-restriction hypothesis
  // holds automatically; only normality has to be decided.
  ChainFlags f;
  f.dH_restricts_dL = f.dG_restricts_dH = f.dG_restricts_dL = true;
  f.h_normal = big.is_normal(h_sorted);
  return f;
}

}  // namespace

FiniteChain::FiniteChain(std::string id, std::shared_ptr<const FiniteGroup> big_group,
                         std::vector<int> h_elems, std::vector<int> l_elems,
                         std::vector<int> k_elems)
    : SubgroupChain(
          id, big_group,
          subgroup_table(*big_group, checked_subgroup(*big_group, h_elems, "H"), id + ":H"),
          subgroup_table(*big_group, checked_subgroup(*big_group, l_elems, "L"), id + ":L"),
          finite_flags(*big_group, checked_subgroup(*big_group, h_elems, "H"))),
      big_typed_(std::move(big_group)),
      h_elems_(sorted_unique(std::move(h_elems))),
      l_elems_(sorted_unique(std::move(l_elems))),
      k_elems_(sorted_unique(std::move(k_elems))) {
  if (!contains_all(h_elems_, l_elems_)) throw Error("L is not contained in H");
  if (!k_elems_.empty()) {
    if (!big_typed_->is_subgroup(k_elems_)) throw Error("K is not a subgroup of the ambient group");
    if (!contains_all(k_elems_, l_elems_)) throw Error("L is not contained in K");
  }

  mid_local_.assign(static_cast<std::size_t>(big_typed_->order()), -1);
  for (std::size_t i = 0; i < h_elems_.size(); ++i)
    mid_local_[static_cast<std::size_t>(h_elems_[i])] = static_cast<int>(i);

  std::vector<int> all(static_cast<std::size_t>(big_typed_->order()));
  for (int i = 0; i < big_typed_->order(); ++i) all[static_cast<std::size_t>(i)] = i;
  gh_ = enumerate(all, h_elems_);
  gl_ = enumerate(all, l_elems_);
  hl_ = enumerate(h_elems_, l_elems_);
  if (!k_elems_.empty()) {
    gk_ = enumerate(all, k_elems_);
    kl_ = enumerate(k_elems_, l_elems_);
  }
}

FiniteChain::Enumeration FiniteChain::enumerate(const std::vector<int>& ambient,
                                                const std::vector<int>& sub) const {
  Enumeration e;
  e.index_of.assign(static_cast<std::size_t>(big_typed_->order()), -1);
  for (int a : ambient) {
    if (e.index_of[static_cast<std::size_t>(a)] >= 0) continue;
    std::vector<int> coset;
    coset.reserve(sub.size());
    for (int s : sub) coset.push_back(big_typed_->compose_index(a, s));
    std::sort(coset.begin(), coset.end());
    const int idx = static_cast<int>(e.cosets.size());
    for (int m : coset) e.index_of[static_cast<std::size_t>(m)] = idx;
    e.cosets.push_back(std::move(coset));
  }
  return e;
}

const FiniteChain::Enumeration& FiniteChain::enumeration(Quot q) const {
  switch (q) {
    case Quot::GH: return gh_;
    case Quot::GL: return gl_;
    case Quot::HL: return hl_;
    case Quot::GK:
      if (!has_dual()) throw QuotientMismatch("chain '" + id() + "' has no dual subgroup");
      return gk_;
    case Quot::KL:
      if (!has_dual()) throw QuotientMismatch("chain '" + id() + "' has no dual subgroup");
      return kl_;
  }
  throw QuotientMismatch("bad quotient");
}

int FiniteChain::n_cosets(Quot q) const { return static_cast<int>(enumeration(q).cosets.size()); }

const std::vector<std::vector<int>>& FiniteChain::cosets(Quot q) const {
  return enumeration(q).cosets;
}

int FiniteChain::coset_index(int g_index, Quot q) const {
  const auto& e = enumeration(q);
  if (g_index < 0 || g_index >= big_typed_->order())
    throw QuotientMismatch("element index out of range");
  const int idx = e.index_of[static_cast<std::size_t>(g_index)];
  if (idx < 0)
    throw QuotientMismatch(std::string("element not in the ambient subgroup of ") + to_string(q));
  return idx;
}

CosetPoint FiniteChain::coset_point(int index, Quot q) const {
  const auto& e = enumeration(q);
  if (index < 0 || index >= static_cast<int>(e.cosets.size()))
    throw QuotientMismatch("coset index out of range");
  CosetPoint c;
  c.chain_id = id();
  c.quotient = q;
  c.key_index = index;
  const int rep = e.cosets[static_cast<std::size_t>(index)].front();
  if (q == Quot::HL)
    c.representative = static_cast<const FiniteGroup&>(*mid()).element(mid_local_of_big(rep));
  else
    c.representative = big_typed_->element(rep);
  return c;
}

int FiniteChain::mid_local_of_big(int g_index) const {
  if (g_index < 0 || g_index >= big_typed_->order() || mid_local_[static_cast<std::size_t>(g_index)] < 0)
    throw QuotientMismatch("element is not in H");
  return mid_local_[static_cast<std::size_t>(g_index)];
}

GroupElement FiniteChain::embed_mid(const GroupElement& h) const {
  if (h.group_id != mid()->id()) throw GroupMismatch("embed_mid expects an element of H");
  return big_typed_->element(h_elems_[static_cast<std::size_t>(h.index)]);
}

GroupElement FiniteChain::embed_small(const GroupElement& l) const {
  if (l.group_id != small()->id()) throw GroupMismatch("embed_small expects an element of L");
  const int g_index = l_elems_[static_cast<std::size_t>(l.index)];
  return static_cast<const FiniteGroup&>(*mid()).element(mid_local_of_big(g_index));
}

CosetPoint FiniteChain::project(const GroupElement& x, Quot q) const {
  if (q == Quot::HL) {
    if (x.group_id != mid()->id()) throw GroupMismatch("HL projection expects an element of H");
    return coset_point(coset_index(h_elems_[static_cast<std::size_t>(x.index)], q), q);
  }
  if (x.group_id != big()->id()) throw GroupMismatch("projection expects an element of G");
  return coset_point(coset_index(x.index, q), q);
}

GroupElement FiniteChain::section(const CosetPoint& c) const {
  require_point(c, c.quotient);
  return coset_point(c.key_index, c.quotient).representative;
}

CosetPoint FiniteChain::act(const GroupElement& g, const CosetPoint& c) const {
  require_point(c, c.quotient);
  const int rep = cosets(c.quotient)[static_cast<std::size_t>(c.key_index)].front();
  if (c.quotient == Quot::HL) {
    if (g.group_id != mid()->id()) throw GroupMismatch("H acts on H/L");
    const int g_big = h_elems_[static_cast<std::size_t>(g.index)];
    return coset_point(coset_index(big_typed_->compose_index(g_big, rep), c.quotient), c.quotient);
  }
  if (g.group_id != big()->id()) throw GroupMismatch("G acts on this quotient");
  return coset_point(coset_index(big_typed_->compose_index(g.index, rep), c.quotient), c.quotient);
}

bool FiniteChain::coset_equal(const CosetPoint& a, const CosetPoint& b, double) const {
  require_point(a, a.quotient);
  require_point(b, a.quotient);
  return a.key_index == b.key_index;
}

// ---------------------------------------------------------------------------
// ChartChain

ChartChain::ChartChain(std::string id, std::shared_ptr<const ChartGroup> big_group,
                       std::shared_ptr<const Group> mid_group,
                       std::shared_ptr<const Group> small_group, ChainFlags flags, Embed embed_mid,
                       Embed embed_small, KeySpec gh, KeySpec gl, KeySpec hl)
    : SubgroupChain(std::move(id), big_group, std::move(mid_group), std::move(small_group), flags),
      big_typed_(std::move(big_group)),
      embed_mid_(std::move(embed_mid)),
      embed_small_(std::move(embed_small)),
      gh_(std::move(gh)),
      gl_(std::move(gl)),
      hl_(std::move(hl)) {}

const KeySpec& ChartChain::key_spec(Quot q) const {
  switch (q) {
    case Quot::GH: return gh_;
    case Quot::GL: return gl_;
    case Quot::HL: return hl_;
    default:
      throw QuotientMismatch("chain '" + id() + "' has no dual subgroup");
  }
}

const Group& ChartChain::source_group(Quot q) const {
  return q == Quot::HL ? *mid() : static_cast<const Group&>(*big_typed_);
}

const std::vector<Axis>& ChartChain::source_axes(Quot q) const {
  if (q == Quot::HL) {
    const auto* chart = dynamic_cast<const ChartGroup*>(mid().get());
    if (!chart) throw QuotientMismatch("HL keys need a chart middle group");
    return chart->axes();
  }
  return big_typed_->axes();
}

std::vector<Axis> ChartChain::key_axes(Quot q) const {
  const KeySpec& spec = key_spec(q);
  const auto& src = source_axes(q);
  std::vector<Axis> out;
  out.reserve(spec.kept.size());
  for (std::size_t i = 0; i < spec.kept.size(); ++i) {
    Axis ax = src[spec.kept[i]];
    if (ax.kind == Axis::Kind::angle) ax.period /= spec.period_div[i];
    out.push_back(ax);
  }
  return out;
}

Box ChartChain::key_box_of_group_box(const Box& group_box, Quot q) const {
  const KeySpec& spec = key_spec(q);
  const auto axes = key_axes(q);
  Box out;
  out.reserve(spec.kept.size());
  for (std::size_t i = 0; i < spec.kept.size(); ++i) {
    if (axes[i].kind == Axis::Kind::angle)
      out.push_back({0.0, axes[i].period});
    else
      out.push_back(group_box[spec.kept[i]]);
  }
  return out;
}

Box ChartChain::group_box_of_key_box(const Box& key_box, const Box& ambient, Quot q) const {
  const KeySpec& spec = key_spec(q);
  const auto& src = source_axes(q);
  Box out = ambient;
  for (std::size_t i = 0; i < spec.kept.size(); ++i) {
    if (src[spec.kept[i]].kind == Axis::Kind::angle) continue;  // keep the full circle
    out[spec.kept[i]] = key_box[i];
  }
  return out;
}

namespace {
// Position of each GH-kept ambient axis inside the GL-kept list.
std::vector<std::size_t> gh_positions_in_gl(const KeySpec& gh, const KeySpec& gl) {
  std::vector<std::size_t> pos;
  pos.reserve(gh.kept.size());
  for (std::size_t a : gh.kept) {
    std::size_t j = 0;
    while (j < gl.kept.size() && gl.kept[j] != a) ++j;
    if (j == gl.kept.size()) throw QuotientMismatch("GH key axis missing from GL keys");
    pos.push_back(j);
  }
  return pos;
}
}  // namespace

Box ChartChain::coarsen_key_box(const Box& gl_key_box) const {
  const auto pos = gh_positions_in_gl(gh_, gl_);
  const auto axes = key_axes(Quot::GH);
  Box out;
  out.reserve(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (axes[i].kind == Axis::Kind::angle)
      out.push_back({0.0, axes[i].period});
    else
      out.push_back(gl_key_box[pos[i]]);
  }
  return out;
}

Box ChartChain::restrict_key_box(const Box& gh_key_box, const Box& ambient_gl_box) const {
  const auto pos = gh_positions_in_gl(gh_, gl_);
  const auto axes = key_axes(Quot::GH);
  Box out = ambient_gl_box;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (axes[i].kind == Axis::Kind::angle) continue;
    out[pos[i]].lo = std::max(out[pos[i]].lo, gh_key_box[i].lo);
    out[pos[i]].hi = std::min(out[pos[i]].hi, gh_key_box[i].hi);
  }
  return out;
}

CosetPoint ChartChain::point_from_working_key(Quot q, const Coords& working_key) const {
  const auto axes = key_axes(q);
  if (working_key.size() != axes.size())
    throw QuotientMismatch("working key has the wrong dimension");
  CosetPoint c;
  c.chain_id = id();
  c.quotient = q;
  c.key = chart_of_working(axes, working_key);
  c.representative = section(c);
  return c;
}

Coords ChartChain::working_key(const CosetPoint& c) const {
  require_point(c, c.quotient);
  return working_of_chart(key_axes(c.quotient), c.key);
}

GroupElement ChartChain::embed_mid(const GroupElement& h) const {
  if (h.group_id != mid()->id()) throw GroupMismatch("embed_mid expects an element of H");
  return embed_mid_(h);
}

GroupElement ChartChain::embed_small(const GroupElement& l) const {
  if (l.group_id != small()->id()) throw GroupMismatch("embed_small expects an element of L");
  return embed_small_(l);
}

CosetPoint ChartChain::project(const GroupElement& x, Quot q) const {
  const Group& src = source_group(q);
  if (x.group_id != src.id())
    throw GroupMismatch("projection for " + std::string(to_string(q)) +
                        " expects an element of '" + src.id() + "'");
  const KeySpec& spec = key_spec(q);
  const auto& axes = source_axes(q);
  CosetPoint c;
  c.chain_id = id();
  c.quotient = q;
  c.representative = x;
  c.key.reserve(spec.kept.size());
  for (std::size_t i = 0; i < spec.kept.size(); ++i) {
    double v = x.coords[spec.kept[i]];
    const Axis& ax = axes[spec.kept[i]];
    if (ax.kind == Axis::Kind::angle) v = wrap_angle(v, ax.period / spec.period_div[i]);
    c.key.push_back(v);
  }
  return c;
}

GroupElement ChartChain::section(const CosetPoint& c) const {
  require_point(c, c.quotient);
  const Group& src = source_group(c.quotient);
  const KeySpec& spec = key_spec(c.quotient);
  Coords coords = src.identity().coords;
  for (std::size_t i = 0; i < spec.kept.size(); ++i) coords[spec.kept[i]] = c.key[i];
  if (c.quotient == Quot::HL) {
    const auto* chart = dynamic_cast<const ChartGroup*>(mid().get());
    return chart->element(std::move(coords));
  }
  return big_typed_->element(std::move(coords));
}

CosetPoint ChartChain::act(const GroupElement& g, const CosetPoint& c) const {
  require_point(c, c.quotient);
  const Group& src = source_group(c.quotient);
  if (g.group_id != src.id())
    throw GroupMismatch("action on " + std::string(to_string(c.quotient)) +
                        " expects an element of '" + src.id() + "'");
  return project(src.compose(g, section(c)), c.quotient);
}

bool ChartChain::coset_equal(const CosetPoint& a, const CosetPoint& b, double tol) const {
  require_point(a, a.quotient);
  require_point(b, a.quotient);
  const auto axes = key_axes(a.quotient);
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (axis_distance(axes[i], a.key[i], b.key[i]) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::shared_ptr<const SubgroupChain> make_s3_a3() {
  // Alternating subgroup H = {e, (123), (132)}, trivial L, dual K = <(12)>.
  return std::make_shared<FiniteChain>("s3-a3", symmetric3(), std::vector<int>{0, 4, 5},
                                       std::vector<int>{0}, std::vector<int>{0, 1});
}

std::shared_ptr<const SubgroupChain> make_d4_c4_center() {
  // Rotation subgroup H = <r>, center L = {e, r^2}.
  return std::make_shared<FiniteChain>("d4-c4-center", dihedral4(), std::vector<int>{0, 1, 2, 3},
                                       std::vector<int>{0, 2});
}

std::shared_ptr<const SubgroupChain> make_affine_dilation() {
  auto big = affine_group();
  // H = dilations (a, 0): its own one-axis chart.
  auto mid = std::make_shared<const ChartGroup>(
      "affine-dilation:H", std::vector<Axis>{Axis::logscale()}, Coords{1.0},
      [](const Coords& p, const Coords& q) -> Coords { return {p[0] * q[0]}; },
      [](const Coords& p) -> Coords { return {1.0 / p[0]}; },
      [](const Coords&) { return 1.0; }, [](const Coords&) { return 1.0; });
  // L = trivial subgroup.
  auto small = std::make_shared<const FiniteGroup>("affine-dilation:L",
                                                   std::vector<std::vector<int>>{{0}});
  ChainFlags flags;
  flags.dH_restricts_dL = true;
  flags.dG_restricts_dH = false;  // G is nonunimodular on H, H is unimodular
  flags.dG_restricts_dL = true;
  flags.h_normal = false;
  return std::make_shared<ChartChain>(
      "affine-dilation", big, mid, small, flags,
      [big](const GroupElement& h) { return big->element({h.coords[0], 0.0}); },
      [mid](const GroupElement&) { return mid->element({1.0}); },
      KeySpec{{1}, {1}}, KeySpec{{0, 1}, {1, 1}}, KeySpec{{0}, {1}});
}

std::shared_ptr<const SubgroupChain> make_sl2_so2_pm1() {
  auto big = sl2_group();
  auto mid = so2_group();
  // L = {I, -I}: order-2 subgroup of the rotations.
  auto small = std::make_shared<const FiniteGroup>(
      "sl2-so2-pm1:L", std::vector<std::vector<int>>{{0, 1}, {1, 0}});
  ChainFlags flags;
  flags.dH_restricts_dL = flags.dG_restricts_dH = flags.dG_restricts_dL = true;
  flags.h_normal = false;
  return std::make_shared<ChartChain>(
      "sl2-so2-pm1", big, mid, small, flags,
      [big](const GroupElement& h) { return big->element({0.0, 1.0, h.coords[0]}); },
      [mid](const GroupElement& l) {
        return mid->element({l.index == 0 ? 0.0 : std::numbers::pi});
      },
      KeySpec{{0, 1}, {1, 1}}, KeySpec{{0, 1, 2}, {1, 1, 2}}, KeySpec{{0}, {2}});
}

}  // namespace

std::shared_ptr<const SubgroupChain> find_chain(const std::string& id) {
  static const std::vector<std::shared_ptr<const SubgroupChain>> chains = {
      make_s3_a3(), make_d4_c4_center(), make_affine_dilation(), make_sl2_so2_pm1()};
  for (const auto& c : chains)
    if (c->id() == id) return c;
  throw UnknownCase("unknown case id: " + id);
}

std::vector<std::string> chain_ids() {
  return {"s3-a3", "d4-c4-center", "affine-dilation", "sl2-so2-pm1"};
}

}  // namespace qradon
