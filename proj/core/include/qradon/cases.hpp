#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qradon/coset.hpp"
#include "qradon/measure.hpp"
#include "qradon/testfn.hpp"

namespace qradon {

// Spaces a case carries measures and functions on.
enum class Space { G, H, L, GH, GL, HL };
const char* to_string(Space s);
std::string space_id(const std::string& case_id, Space s);

// Which weight ties the measures together.
enum class RhoChoice { canonical, one };

// How the dual transform runs on this case.
struct DualSetup {
  bool available = false;
  bool k_equals_h = false;  // continuous case: the second subgroup is H itself
};

// One registered verification case: a chain plus its integration conventions
// (canonical measure rules, integration and safety boxes, bump parameter
// ranges, translation batteries).  Rules are cached per instance, so reuse
// one context across checks of a run.
class CaseContext {
 public:
  CaseContext(const std::string& case_id, int quad_order);  // throws UnknownCase
  CaseContext(std::shared_ptr<const FiniteChain> custom_chain, int quad_order);

  CaseContext(const CaseContext&) = delete;
  CaseContext& operator=(const CaseContext&) = delete;

  static const std::vector<std::string>& registry();
  static std::string describe(const std::string& case_id);

  const std::string& id() const { return id_; }
  const SubgroupChain& chain() const { return *chain_; }
  std::shared_ptr<const SubgroupChain> chain_ptr() const { return chain_; }
  bool finite() const { return chain_->finite(); }
  int quad_order() const { return quad_order_; }

  // Canonical measure rule of a space (cached).
  const MeasureRule& rule(Space s) const;
  // Rebuild a quotient/group rule over another working-coordinate box with
  // the same density and order (chart cases only).
  MeasureRule rule_on_box(Space s, const Box& box) const;
  std::function<MeasureRule(const Box&)> rule_builder(Space s) const;

  Box default_box(Space s) const;   // chart cases only
  Box safety_box(Space s) const;    // region where quadrature is trusted

  RhoFunction rho(RhoChoice choice) const;

  // The measure on G/H tied to `rho` by the iterated-integration identity.
  // Validates rho (positivity and covariance) and throws RhoInvalid if it is
  // not an admissible weight for this chain.
  MeasureRule build_quotient_measure(const RhoFunction& rho) const;

  // Random batteries. Chart cases: smooth bumps; tag separates purposes.
  std::vector<SpaceFunction> bumps(Space s, std::uint64_t seed, std::string_view tag,
                                   int count) const;
  // The deterministic battery member: per-axis parameters at the midpoints of
  // the configured ranges (chart cases only).
  SpaceFunction canonical_bump(Space s) const;
  // Uniformly sampled working keys inside the default box (chart cases).
  std::vector<Coords> sample_keys(Space s, std::uint64_t seed, std::string_view tag,
                                  int count) const;

  // Group elements used for translation-invariance probes: all elements on
  // finite cases, a fixed set of well-conditioned ones on chart cases.
  std::vector<GroupElement> translation_battery() const;
  // Elements of H for probing the H/L quotient.
  std::vector<GroupElement> mid_translation_battery() const;

  DualSetup dual() const;

 private:
  struct ChartConfig;  // per-axis ranges, boxes, densities
  void init_chart_config();
  void bump_setup(Space s, std::vector<Axis>& axes, std::vector<BumpRanges>& ranges) const;

  std::string id_;
  std::shared_ptr<const SubgroupChain> chain_;
  int quad_order_;
  std::shared_ptr<const ChartConfig> chart_;  // null for finite cases
  mutable std::map<Space, MeasureRule> rule_cache_;
};

}  // namespace qradon
