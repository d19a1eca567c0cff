#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qradon/group.hpp"
#include "qradon/quadrature.hpp"

namespace qradon {

// The quotients a chain G > H > L knows about.  GK/KL exist only when a dual
// configuration (second subgroup K) is registered.
enum class Quot { GH, GL, HL, GK, KL };
const char* to_string(Quot q);

// A point of a quotient space, held as a representative plus a canonical key.
// Finite quotients key by enumeration index; chart quotients key by a tuple
// of chart coordinates (a subset of the representative's coordinates, with
// angle coordinates reduced to the stabiliser period).
struct CosetPoint {
  std::string chain_id;
  Quot quotient = Quot::GH;
  GroupElement representative;  // element of G (or of H for HL, K for KL)
  int key_index = -1;           // finite quotients
  Coords key;                   // chart quotients (chart coordinates)
};

// Structural facts about a chain that checks gate on.
struct ChainFlags {
  bool dH_restricts_dL = true;  // modular function of H restricts to that of L
  bool dG_restricts_dH = true;  // modular function of G restricts to that of H
  bool dG_restricts_dL = true;  // modular function of G restricts to that of L
  bool h_normal = false;        // H is normal in G
};

// A nested pair of closed subgroups L <= H <= G with projections, sections
// and the translation action on each quotient.
class SubgroupChain {
 public:
  virtual ~SubgroupChain() = default;

  const std::string& id() const { return id_; }
  const std::shared_ptr<const Group>& big() const { return big_; }
  const std::shared_ptr<const Group>& mid() const { return mid_; }
  const std::shared_ptr<const Group>& small() const { return small_; }
  const ChainFlags& flags() const { return flags_; }
  virtual bool finite() const = 0;

  // Inclusions H -> G and L -> H (and their composite).
  virtual GroupElement embed_mid(const GroupElement& h) const = 0;
  virtual GroupElement embed_small(const GroupElement& l) const = 0;
  GroupElement embed_small_in_big(const GroupElement& l) const {
    return embed_mid(embed_small(l));
  }

  // Canonical projection.  Expects x in G for GH/GL/GK and x in H for HL.
  virtual CosetPoint project(const GroupElement& x, Quot q) const = 0;

  // G/L -> G/H refinement: xL |-> xH.
  CosetPoint refine_project(const CosetPoint& xl) const;

  // A concrete representative: in G for GH/GL/GK, in H for HL.  Satisfies
  // project(section(c)) == c.
  virtual GroupElement section(const CosetPoint& c) const = 0;

  // Translation action g.(xH) = (gx)H.  Expects g in G for GH/GL/GK and
  // g in H for HL.
  virtual CosetPoint act(const GroupElement& g, const CosetPoint& c) const = 0;

  virtual bool coset_equal(const CosetPoint& a, const CosetPoint& b,
                           double tol = 1e-9) const = 0;

  // Working-coordinate axes of the key space (chart chains only; finite
  // chains return an empty list).
  virtual std::vector<Axis> key_axes(Quot q) const = 0;

 protected:
  SubgroupChain(std::string id, std::shared_ptr<const Group> big,
                std::shared_ptr<const Group> mid, std::shared_ptr<const Group> small,
                ChainFlags flags);
  void require_point(const CosetPoint& c, Quot q) const;

 private:
  std::string id_;
  std::shared_ptr<const Group> big_, mid_, small_;
  ChainFlags flags_;
};

// Chain over a finite group, with exhaustive coset enumerations.  Subgroups
// are given as G-element index lists; an optional second subgroup K enables
// the dual quotients G/K and K/L (requires L <= K).
class FiniteChain final : public SubgroupChain {
 public:
  FiniteChain(std::string id, std::shared_ptr<const FiniteGroup> big_group,
              std::vector<int> h_elems, std::vector<int> l_elems,
              std::vector<int> k_elems = {});

  const FiniteGroup& big_table() const { return *big_typed_; }
  bool has_dual() const { return !k_elems_.empty(); }

  const std::vector<int>& h_elems() const { return h_elems_; }
  const std::vector<int>& l_elems() const { return l_elems_; }
  const std::vector<int>& k_elems() const { return k_elems_; }

  int n_cosets(Quot q) const;
  // Members of each coset as sorted G-element indices (HL/KL cosets are
  // subsets of H resp. K).  Coset 0 always contains the identity.
  const std::vector<std::vector<int>>& cosets(Quot q) const;
  // Enumeration index of the coset containing a G element (for HL/KL the
  // element must lie in H resp. K).
  int coset_index(int g_index, Quot q) const;
  CosetPoint coset_point(int index, Quot q) const;

  // Position of a G-element index inside H's own element enumeration.
  int mid_local_of_big(int g_index) const;

  bool finite() const override { return true; }
  GroupElement embed_mid(const GroupElement& h) const override;
  GroupElement embed_small(const GroupElement& l) const override;
  CosetPoint project(const GroupElement& x, Quot q) const override;
  GroupElement section(const CosetPoint& c) const override;
  CosetPoint act(const GroupElement& g, const CosetPoint& c) const override;
  bool coset_equal(const CosetPoint& a, const CosetPoint& b, double tol) const override;
  std::vector<Axis> key_axes(Quot q) const override { return {}; }

 private:
  struct Enumeration {
    std::vector<std::vector<int>> cosets;
    std::vector<int> index_of;  // per G element; -1 where undefined
  };
  Enumeration enumerate(const std::vector<int>& ambient, const std::vector<int>& sub) const;
  const Enumeration& enumeration(Quot q) const;

  std::shared_ptr<const FiniteGroup> big_typed_;
  std::vector<int> h_elems_, l_elems_, k_elems_;
  std::vector<int> mid_local_;  // G index -> position in h_elems_, -1 outside H
  Enumeration gh_, gl_, hl_, gk_, kl_;
};

// Which working-coordinate axes of the ambient chart survive in a quotient
// key, and by how much each surviving angle period shrinks.
struct KeySpec {
  std::vector<std::size_t> kept;
  std::vector<int> period_div;  // parallel to `kept`; 1 for non-angle axes
};

// Chain over a chart group.  H may itself be a chart group (rotations,
// dilations); L is finite in every registered chain.  Keys are read off the
// representative's chart coordinates according to a KeySpec.
class ChartChain final : public SubgroupChain {
 public:
  using Embed = std::function<GroupElement(const GroupElement&)>;

  ChartChain(std::string id, std::shared_ptr<const ChartGroup> big_group,
             std::shared_ptr<const Group> mid_group, std::shared_ptr<const Group> small_group,
             ChainFlags flags, Embed embed_mid, Embed embed_small, KeySpec gh, KeySpec gl,
             KeySpec hl);

  const ChartGroup& big_chart() const { return *big_typed_; }
  const KeySpec& key_spec(Quot q) const;

  // Project a support box along the quotient: keep the surviving axes'
  // intervals; surviving angle axes get the full reduced period.
  Box key_box_of_group_box(const Box& group_box, Quot q) const;
  // Inverse direction: overwrite the surviving non-angle axes of `ambient`
  // with the key box intervals.
  Box group_box_of_key_box(const Box& key_box, const Box& ambient, Quot q) const;
  // GL -> GH support projection (the GH key axes are a subset of the GL ones).
  Box coarsen_key_box(const Box& gl_key_box) const;
  // Overwrite the GH-derived axes of a GL ambient box with the intersection
  // of their current intervals and a GH key box (angle axes untouched).
  Box restrict_key_box(const Box& gh_key_box, const Box& ambient_gl_box) const;

  // Keys in working coordinates (what measure rules store).
  CosetPoint point_from_working_key(Quot q, const Coords& working_key) const;
  Coords working_key(const CosetPoint& c) const;

  bool finite() const override { return false; }
  GroupElement embed_mid(const GroupElement& h) const override;
  GroupElement embed_small(const GroupElement& l) const override;
  CosetPoint project(const GroupElement& x, Quot q) const override;
  GroupElement section(const CosetPoint& c) const override;
  CosetPoint act(const GroupElement& g, const CosetPoint& c) const override;
  bool coset_equal(const CosetPoint& a, const CosetPoint& b, double tol) const override;
  std::vector<Axis> key_axes(Quot q) const override;

 private:
  const Group& source_group(Quot q) const;  // G for GH/GL, H for HL
  const std::vector<Axis>& source_axes(Quot q) const;

  std::shared_ptr<const ChartGroup> big_typed_;
  Embed embed_mid_, embed_small_;
  KeySpec gh_, gl_, hl_;
};

// Registered chains: "s3-a3", "d4-c4-center", "affine-dilation",
// "sl2-so2-pm1".
std::shared_ptr<const SubgroupChain> find_chain(const std::string& id);
std::vector<std::string> chain_ids();

}  // namespace qradon
