#include "qradon/group.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qradon/errors.hpp"

namespace qradon {

void Group::require_member(const GroupElement& g) const {
  if (g.group_id != id_)
    throw GroupMismatch("element of group '" + g.group_id + "' used with group '" + id_ + "'");
}

// ---------------------------------------------------------------------------
// FiniteGroup

FiniteGroup::FiniteGroup(std::string id, std::vector<std::vector<int>> table)
    : Group(std::move(id)), table_(std::move(table)) {
  const int n = static_cast<int>(table_.size());
  if (n == 0) throw Error("composition table is empty");
  for (const auto& row : table_) {
    if (static_cast<int>(row.size()) != n) throw Error("composition table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw Error("composition table entry out of range");
  }

  // Rows and columns must be permutations.
  for (int a = 0; a < n; ++a) {
    std::vector<bool> row_seen(static_cast<std::size_t>(n), false);
    std::vector<bool> col_seen(static_cast<std::size_t>(n), false);
    for (int b = 0; b < n; ++b) {
      if (row_seen[static_cast<std::size_t>(table_[a][b])])
        throw Error("composition table row is not a permutation");
      row_seen[static_cast<std::size_t>(table_[a][b])] = true;
      if (col_seen[static_cast<std::size_t>(table_[b][a])])
        throw Error("composition table column is not a permutation");
      col_seen[static_cast<std::size_t>(table_[b][a])] = true;
    }
  }

  // Two-sided identity.
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x)
      ok = table_[e][x] == x && table_[x][e] == x;
    if (ok) {
      identity_ = e;
      break;
    }
  }
  if (identity_ < 0) throw Error("composition table has no identity");

  // Associativity, exhaustively.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
          throw Error("composition table is not associative");

  inverse_.resize(static_cast<std::size_t>(n), -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (table_[a][b] == identity_) {
        if (table_[b][a] != identity_) throw Error("one-sided inverse in composition table");
        inverse_[static_cast<std::size_t>(a)] = b;
        break;
      }
    }
    if (inverse_[static_cast<std::size_t>(a)] < 0) throw Error("element without inverse");
  }
}

GroupElement FiniteGroup::element(int index) const {
  if (index < 0 || index >= order())
    throw GroupMismatch("finite element index out of range for group '" + id() + "'");
  GroupElement g;
  g.group_id = id();
  g.index = index;
  return g;
}

int FiniteGroup::compose_index(int a, int b) const {
  if (a < 0 || a >= order() || b < 0 || b >= order())
    throw GroupMismatch("finite element index out of range for group '" + id() + "'");
  return table_[a][b];
}

int FiniteGroup::invert_index(int a) const {
  if (a < 0 || a >= order())
    throw GroupMismatch("finite element index out of range for group '" + id() + "'");
  return inverse_[static_cast<std::size_t>(a)];
}

GroupElement FiniteGroup::compose(const GroupElement& a, const GroupElement& b) const {
  require_member(a);
  require_member(b);
  return element(compose_index(a.index, b.index));
}

GroupElement FiniteGroup::invert(const GroupElement& a) const {
  require_member(a);
  return element(invert_index(a.index));
}

bool FiniteGroup::approx_equal(const GroupElement& a, const GroupElement& b, double) const {
  require_member(a);
  require_member(b);
  return a.index == b.index;
}

bool FiniteGroup::is_subgroup(const std::vector<int>& elems) const {
  if (elems.empty()) return false;
  std::vector<bool> in(static_cast<std::size_t>(order()), false);
  for (int e : elems) {
    if (e < 0 || e >= order()) return false;
    in[static_cast<std::size_t>(e)] = true;
  }
  if (!in[static_cast<std::size_t>(identity_)]) return false;
  for (int a : elems)
    for (int b : elems)
      if (!in[static_cast<std::size_t>(table_[a][b])]) return false;
  for (int a : elems)
    if (!in[static_cast<std::size_t>(inverse_[static_cast<std::size_t>(a)])]) return false;
  return true;
}

bool FiniteGroup::is_normal(const std::vector<int>& elems) const {
  if (!is_subgroup(elems)) return false;
  std::vector<bool> in(static_cast<std::size_t>(order()), false);
  for (int e : elems) in[static_cast<std::size_t>(e)] = true;
  for (int g = 0; g < order(); ++g) {
    const int ginv = inverse_[static_cast<std::size_t>(g)];
    for (int h : elems)
      if (!in[static_cast<std::size_t>(table_[table_[g][h]][ginv])]) return false;
  }
  return true;
}

std::shared_ptr<const FiniteGroup> FiniteGroup::from_file(const std::string& path, std::string id) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot open composition table file: " + path);
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line[first] == '#') continue;
    cleaned << line << '\n';
  }
  std::istringstream tokens(cleaned.str());
  int n = 0;
  if (!(tokens >> n) || n <= 0) throw ParseFailure("composition table file must start with a positive order");
  std::vector<std::vector<int>> table(static_cast<std::size_t>(n),
                                      std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (!(tokens >> table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]))
        throw ParseFailure("composition table file ended early (expected " + std::to_string(n * n) +
                           " entries)");
  std::string extra;
  if (tokens >> extra) throw ParseFailure("trailing tokens after composition table");
  try {
    return std::make_shared<FiniteGroup>(std::move(id), std::move(table));
  } catch (const Error& e) {
    throw ParseFailure(std::string("composition table rejected: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// ChartGroup

ChartGroup::ChartGroup(std::string id, std::vector<Axis> axes, Coords identity_coords,
                       BinaryMap compose, UnaryMap inverse, Scalar working_haar_density,
                       Scalar modular_fn)
    : Group(std::move(id)),
      axes_(std::move(axes)),
      identity_(std::move(identity_coords)),
      compose_(std::move(compose)),
      inverse_(std::move(inverse)),
      density_(std::move(working_haar_density)),
      modular_(std::move(modular_fn)) {
  if (axes_.empty()) throw Error("chart group needs at least one axis");
  identity_ = normalise(std::move(identity_));
}

Coords ChartGroup::normalise(Coords chart) const {
  if (chart.size() != axes_.size())
    throw ChartDomainViolation("coordinate count does not match chart dimension of '" + id() + "'");
  for (std::size_t i = 0; i < chart.size(); ++i) {
    if (!std::isfinite(chart[i]))
      throw ChartDomainViolation("non-finite coordinate in chart of '" + id() + "'");
    switch (axes_[i].kind) {
      case Axis::Kind::logscale:
        if (!(chart[i] > 0.0))
          throw ChartDomainViolation("logscale coordinate must be positive in chart of '" + id() + "'");
        break;
      case Axis::Kind::angle:
        chart[i] = wrap_angle(chart[i], axes_[i].period);
        break;
      case Axis::Kind::line:
        break;
    }
  }
  return chart;
}

GroupElement ChartGroup::element(Coords chart) const {
  GroupElement g;
  g.group_id = id();
  g.coords = normalise(std::move(chart));
  return g;
}

GroupElement ChartGroup::element_from_working(const Coords& working) const {
  return element(chart_of_working(axes_, working));
}

Coords ChartGroup::working_coords(const GroupElement& g) const {
  require_member(g);
  return working_of_chart(axes_, g.coords);
}

double ChartGroup::working_haar_density(const Coords& working) const {
  return density_(working);
}

GroupElement ChartGroup::identity() const {
  GroupElement g;
  g.group_id = id();
  g.coords = identity_;
  return g;
}

GroupElement ChartGroup::compose(const GroupElement& a, const GroupElement& b) const {
  require_member(a);
  require_member(b);
  return element(compose_(a.coords, b.coords));
}

GroupElement ChartGroup::invert(const GroupElement& a) const {
  require_member(a);
  return element(inverse_(a.coords));
}

double ChartGroup::modular(const GroupElement& g) const {
  require_member(g);
  return modular_(g.coords);
}

bool ChartGroup::approx_equal(const GroupElement& a, const GroupElement& b, double tol) const {
  require_member(a);
  require_member(b);
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axis_distance(axes_[i], a.coords[i], b.coords[i]) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// sl2 matrix helpers

namespace sl2 {

Mat mul(const Mat& m, const Mat& n) {
  return {m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
          m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3]};
}

Mat inverse(const Mat& m) {
  // det == 1 for everything we build, so the adjugate is the inverse.
  return {m[3], -m[1], -m[2], m[0]};
}

Mat rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

Mat to_matrix(const Coords& xyt) {
  const double x = xyt[0], y = xyt[1], theta = xyt[2];
  const double r = std::sqrt(y);
  const Mat b{r, x / r, 0.0, 1.0 / r};
  return mul(b, rotation(theta));
}

Coords from_matrix(const Mat& m) {
  const double den = m[2] * m[2] + m[3] * m[3];
  const double x = (m[0] * m[2] + m[1] * m[3]) / den;
  const double y = 1.0 / den;
  const double theta = std::atan2(m[2], m[3]);
  return {x, y, theta};
}

std::complex<double> moebius(const Mat& m, std::complex<double> z) {
  return (m[0] * z + m[1]) / (m[2] * z + m[3]);
}

}  // namespace sl2

// ---------------------------------------------------------------------------
// Registered groups

namespace {

std::vector<std::vector<int>> s3_table() {
  // Permutations of {0,1,2}; composition applies the left factor first:
  // (a*b)(i) = b(a(i)).
  const std::vector<std::array<int, 3>> perms = {
      {0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
  auto index_of = [&](const std::array<int, 3>& p) {
    for (std::size_t i = 0; i < perms.size(); ++i)
      if (perms[i] == p) return static_cast<int>(i);
    return -1;
  };
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[static_cast<std::size_t>(i)] = perms[b][static_cast<std::size_t>(perms[a][static_cast<std::size_t>(i)])];
      table[a][b] = index_of(c);
    }
  return table;
}

std::vector<std::vector<int>> d4_table() {
  // Indices 0..3 are r^0..r^3, indices 4..7 are s*r^0..s*r^3, with s*r*s = r^-1.
  auto idx = [](bool flip, int a) { return (flip ? 4 : 0) + ((a % 4) + 4) % 4; };
  std::vector<std::vector<int>> table(8, std::vector<int>(8));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const bool fi = i >= 4, fj = j >= 4;
      const int a = i % 4, b = j % 4;
      int out;
      if (!fi && !fj) out = idx(false, a + b);
      else if (!fi && fj) out = idx(true, b - a);
      else if (fi && !fj) out = idx(true, a + b);
      else out = idx(false, b - a);
      table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = out;
    }
  return table;
}

}  // namespace

std::shared_ptr<const FiniteGroup> symmetric3() {
  static const auto g = std::make_shared<const FiniteGroup>("s3", s3_table());
  return g;
}

std::shared_ptr<const FiniteGroup> dihedral4() {
  static const auto g = std::make_shared<const FiniteGroup>("d4", d4_table());
  return g;
}

std::shared_ptr<const ChartGroup> affine_group() {
  static const auto g = std::make_shared<const ChartGroup>(
      "affine", std::vector<Axis>{Axis::logscale(), Axis::line()}, Coords{1.0, 0.0},
      [](const Coords& p, const Coords& q) -> Coords {
        return {p[0] * q[0], p[0] * q[1] + p[1]};
      },
      [](const Coords& p) -> Coords {
        return {1.0 / p[0], -p[1] / p[0]};
      },
      // Left Haar da db / a^2 becomes exp(-t) dt db with t = log a.
      [](const Coords& w) { return std::exp(-w[0]); },
      [](const Coords& c) { return 1.0 / c[0]; });
  return g;
}

std::shared_ptr<const ChartGroup> sl2_group() {
  static const auto g = std::make_shared<const ChartGroup>(
      "sl2",
      std::vector<Axis>{Axis::line(), Axis::logscale(), Axis::angle(2.0 * std::numbers::pi)},
      Coords{0.0, 1.0, 0.0},
      [](const Coords& p, const Coords& q) -> Coords {
        return sl2::from_matrix(sl2::mul(sl2::to_matrix(p), sl2::to_matrix(q)));
      },
      [](const Coords& p) -> Coords {
        return sl2::from_matrix(sl2::inverse(sl2::to_matrix(p)));
      },
      // Haar dtheta dx dy/y^2 becomes exp(-u) dx du dtheta with u = log y.
      [](const Coords& w) { return std::exp(-w[1]); },
      [](const Coords&) { return 1.0; });
  return g;
}

std::shared_ptr<const ChartGroup> so2_group() {
  static const auto g = std::make_shared<const ChartGroup>(
      "so2", std::vector<Axis>{Axis::angle(2.0 * std::numbers::pi)}, Coords{0.0},
      [](const Coords& p, const Coords& q) -> Coords { return {p[0] + q[0]}; },
      [](const Coords& p) -> Coords { return {-p[0]}; },
      [](const Coords&) { return 1.0; }, [](const Coords&) { return 1.0; });
  return g;
}

std::shared_ptr<const Group> find_group(const std::string& id) {
  if (id == "s3") return symmetric3();
  if (id == "d4") return dihedral4();
  if (id == "affine") return affine_group();
  if (id == "sl2") return sl2_group();
  if (id == "so2") return so2_group();
  throw UnknownCase("unknown group id: " + id);
}

}  // namespace qradon
