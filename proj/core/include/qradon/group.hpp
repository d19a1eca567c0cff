#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qradon/quadrature.hpp"

namespace qradon {

// Chart coordinates of a point, one double per axis.
using Coords = std::vector<double>;

// A group element.  Finite groups index into their composition table;
// chart-based matrix groups carry chart coordinates.
struct GroupElement {
  std::string group_id;
  int index = -1;  // >= 0 iff the element belongs to a finite group
  Coords coords;   // chart coordinates for chart groups, empty otherwise

  bool is_finite() const { return index >= 0; }
};

// Common interface for the two group flavours.
class Group {
 public:
  explicit Group(std::string id) : id_(std::move(id)) {}
  virtual ~Group() = default;

  const std::string& id() const { return id_; }
  virtual bool finite() const = 0;

  virtual GroupElement identity() const = 0;
  virtual GroupElement compose(const GroupElement& a, const GroupElement& b) const = 0;
  virtual GroupElement invert(const GroupElement& a) const = 0;

  // Modular function with the convention  \int f(y) dy = Delta(x) \int f(yx) dy.
  virtual double modular(const GroupElement& g) const = 0;

  // Componentwise comparison; angle axes compare along the circle.
  virtual bool approx_equal(const GroupElement& a, const GroupElement& b,
                            double tol = 1e-9) const = 0;

 protected:
  void require_member(const GroupElement& g) const;

 private:
  std::string id_;
};

// Finite group backed by a composition table.  table[a][b] is the index of
// a*b.  Construction verifies the table is a group: entries in range, rows
// and columns are permutations, a two-sided identity exists, and composition
// is associative.
class FiniteGroup final : public Group {
 public:
  FiniteGroup(std::string id, std::vector<std::vector<int>> table);

  int order() const { return static_cast<int>(table_.size()); }
  GroupElement element(int index) const;
  int identity_index() const { return identity_; }
  int compose_index(int a, int b) const;
  int invert_index(int a) const;
  const std::vector<std::vector<int>>& table() const { return table_; }

  bool finite() const override { return true; }
  GroupElement identity() const override { return element(identity_); }
  GroupElement compose(const GroupElement& a, const GroupElement& b) const override;
  GroupElement invert(const GroupElement& a) const override;
  double modular(const GroupElement&) const override { return 1.0; }
  bool approx_equal(const GroupElement& a, const GroupElement& b, double) const override;

  // True if the listed element indices form a subgroup / normal subgroup.
  bool is_subgroup(const std::vector<int>& elems) const;
  bool is_normal(const std::vector<int>& elems) const;

  // Parse a composition table from a text file: first the order n, then n*n
  // whitespace-separated 0-based entries.  Lines starting with '#' are
  // skipped.  Throws ParseFailure on malformed input and Error if the table
  // is not a group.
  static std::shared_ptr<const FiniteGroup> from_file(const std::string& path,
                                                      std::string id = "custom");

 private:
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  int identity_ = -1;
};

// Chart-based group: a global chart with per-axis kinds, composition and
// inversion maps in chart coordinates, a left Haar density given in working
// coordinates (relative to Lebesgue measure there, i.e. with log/angle
// substitutions already absorbed), and the modular function.
class ChartGroup final : public Group {
 public:
  using BinaryMap = std::function<Coords(const Coords&, const Coords&)>;
  using UnaryMap = std::function<Coords(const Coords&)>;
  using Scalar = std::function<double(const Coords&)>;

  ChartGroup(std::string id, std::vector<Axis> axes, Coords identity_coords,
             BinaryMap compose, UnaryMap inverse, Scalar working_haar_density,
             Scalar modular_fn);

  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t dim() const { return axes_.size(); }

  // Wrap chart coordinates into an element, validating the chart domain
  // (finite values, positive logscale coordinates) and normalising angles.
  GroupElement element(Coords chart) const;

  // Same, but from working coordinates (log/angle substitutions applied).
  GroupElement element_from_working(const Coords& working) const;
  Coords working_coords(const GroupElement& g) const;

  // Left Haar density at a point given in working coordinates, relative to
  // Lebesgue measure in working coordinates (log/angle substitutions already
  // absorbed).
  double working_haar_density(const Coords& working) const;

  bool finite() const override { return false; }
  GroupElement identity() const override;
  GroupElement compose(const GroupElement& a, const GroupElement& b) const override;
  GroupElement invert(const GroupElement& a) const override;
  double modular(const GroupElement& g) const override;
  bool approx_equal(const GroupElement& a, const GroupElement& b, double tol) const override;

 private:
  Coords normalise(Coords chart) const;

  std::vector<Axis> axes_;
  Coords identity_;
  BinaryMap compose_;
  UnaryMap inverse_;
  Scalar density_;
  Scalar modular_;
};

// 2x2 real matrix helpers for the special linear chart.
namespace sl2 {

// Row-major [[a,b],[c,d]].
using Mat = std::array<double, 4>;

Mat mul(const Mat& m, const Mat& n);
Mat inverse(const Mat& m);
Mat rotation(double theta);

// Chart (x, y, theta) -> upper-triangular factor times rotation:
//   [[sqrt(y), x/sqrt(y)], [0, 1/sqrt(y)]] * rotation(theta),  y > 0.
Mat to_matrix(const Coords& xyt);
Coords from_matrix(const Mat& m);

// Fractional linear action on the upper half plane.
std::complex<double> moebius(const Mat& m, std::complex<double> z);

}  // namespace sl2

// Registered groups.
std::shared_ptr<const FiniteGroup> symmetric3();
std::shared_ptr<const FiniteGroup> dihedral4();
std::shared_ptr<const ChartGroup> affine_group();
std::shared_ptr<const ChartGroup> sl2_group();
std::shared_ptr<const ChartGroup> so2_group();

// Lookup by registry id: "s3", "d4", "affine", "sl2", "so2".
std::shared_ptr<const Group> find_group(const std::string& id);

}  // namespace qradon
