#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qradon/cases.hpp"
#include "qradon/errors.hpp"
#include "qradon/measure.hpp"
#include "qradon/testfn.hpp"

using namespace qradon;

namespace {

// Integral of exp(-(q-c)^2 / (2 s^2)) over [c - cut*s, c + cut*s].
double gaussian_mass(double s, double cut) {
  return s * std::sqrt(2.0 * std::numbers::pi) * std::erf(cut / std::sqrt(2.0));
}

}  // namespace

TEST_CASE("deterministic random streams") {
  Rng a(42, "tag");
  Rng b(42, "tag");
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform(-1.0, 3.0);
    CHECK(x == b.uniform(-1.0, 3.0));
    CHECK(x >= -1.0);
    CHECK(x < 3.0);
  }
  Rng c(42, "other");
  bool differs = false;
  Rng a2(42, "tag");
  for (int i = 0; i < 20; ++i) differs = differs || a2.uniform(0, 1) != c.uniform(0, 1);
  CHECK(differs);

  Rng d(7, "ints");
  bool lo_hit = false, hi_hit = false;
  for (int i = 0; i < 1000; ++i) {
    const int v = d.uniform_int(0, 3);
    CHECK(v >= 0);
    CHECK(v <= 3);
    lo_hit = lo_hit || v == 0;
    hi_hit = hi_hit || v == 3;
  }
  CHECK(lo_hit);
  CHECK(hi_hit);
}

TEST_CASE("bump construction") {
  SUBCASE("line-axis bump is a truncated gaussian") {
    const auto f = make_bump("x/G", {Axis::line()}, {{1.0, 0.5, 0.0}});
    CHECK(f({1.0}) == doctest::Approx(1.0));
    CHECK(f({0.0}) == doctest::Approx(std::exp(-2.0)));
    REQUIRE(f.support.size() == 1);
    CHECK(f.support[0].lo == doctest::Approx(1.0 - 7.5 * 0.5));
    CHECK(f.support[0].hi == doctest::Approx(1.0 + 7.5 * 0.5));
    CHECK(f({1.0 + 7.6 * 0.5}) == 0.0);  // support clamp
  }

  SUBCASE("angle-axis bump is periodic and strictly positive") {
    const double period = 2.0 * std::numbers::pi;
    const auto f = make_bump("x/H", {Axis::angle(period)}, {{0.0, 1.0, 0.7}});
    CHECK(f({0.7}) == doctest::Approx(1.0));
    // The formula is periodic; the clamped function lives on one period.
    CHECK(f.eval({0.7 + period}) == doctest::Approx(f.eval({0.7})));
    CHECK(f({0.7 + period}) == 0.0);
    CHECK(f({0.7 + std::numbers::pi}) == doctest::Approx(0.1 / 2.1));
    CHECK(f.support[0].lo == 0.0);
    CHECK(f.support[0].hi == doctest::Approx(period));
  }

  SUBCASE("random batteries are reproducible") {
    const std::vector<Axis> axes = {Axis::line(), Axis::logscale()};
    const std::vector<BumpRanges> ranges(2);
    const auto fs = random_bumps("x/G", axes, ranges, 9, "battery", 5);
    const auto gs = random_bumps("x/G", axes, ranges, 9, "battery", 5);
    REQUIRE(fs.size() == 5);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      CHECK(fs[i]({0.1, -0.2}) == gs[i]({0.1, -0.2}));
      CHECK(fs[i].note == gs[i].note);
    }
    const auto hs = random_bumps("x/G", axes, ranges, 10, "battery", 5);
    CHECK(fs[0]({0.1, -0.2}) != hs[0]({0.1, -0.2}));
  }
}

TEST_CASE("counting and exact integration") {
  const MeasureRule m = counting_rule("s3-a3/G", 6);
  CHECK(m.exact);
  CHECK(m.size() == 6);
  CHECK(m.total_mass_exact() == Rational(6));
  CHECK(m.total_mass() == doctest::Approx(6.0));

  const FiniteFn one = constant_fn("s3-a3/G", 6, Rational(1));
  CHECK(integrate_exact(one, m) == Rational(6));

  const auto basis = indicator_basis("s3-a3/G", 6);
  REQUIRE(basis.size() == 6);
  for (const auto& f : basis) CHECK(integrate_exact(f, m) == Rational(1));

  const auto random = random_finite_fns("s3-a3/G", 6, 3, "rand", 4);
  REQUIRE(random.size() == 4);
  for (const auto& f : random)
    for (const auto& v : f.values) CHECK(v >= Rational(0));
}

TEST_CASE("weighted quadrature rules") {
  SUBCASE("density rule integrates monomials") {
    const MeasureRule m = density_rule(
        "x", {{0.0, 1.0}}, 16, [](const Coords& q) { return q[0]; }, "x dx");
    CHECK(m.total_mass() == doctest::Approx(0.5).epsilon(1e-13));
    SpaceFunction f;
    f.space_id = "x";
    f.support = {{0.0, 1.0}};
    f.eval = [](const Coords& q) { return q[0]; };
    CHECK(integrate(f, m) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  }

  SUBCASE("affine haar mass has a closed form") {
    const MeasureRule m = haar_rule(*affine_group(), "affine-dilation/G",
                                    {{-4.5, 4.5}, {-4.5, 4.5}}, 64);
    CHECK(m.total_mass() == doctest::Approx(9.0 * 2.0 * std::sinh(4.5)).epsilon(1e-12));
  }

  SUBCASE("affine haar integral of a normalised gaussian") {
    // Weighting the working-coordinate Lebesgue integral by e^{-t} shifts the
    // gaussian: the closed form follows from completing the square.
    const double L = 4.5;
    const double rt2 = std::sqrt(2.0);
    const MeasureRule m =
        haar_rule(*affine_group(), "affine-dilation/G", {{-L, L}, {-L, L}}, 64);
    SpaceFunction f;
    f.space_id = "affine-dilation/G";
    f.support = {{-L, L}, {-L, L}};
    f.eval = [](const Coords& q) {
      return std::exp(-0.5 * (q[0] * q[0] + q[1] * q[1])) / (2.0 * std::numbers::pi);
    };
    const double t_part = std::exp(0.5) * std::sqrt(std::numbers::pi / 2.0) *
                          (std::erf((L + 1.0) / rt2) + std::erf((L - 1.0) / rt2));
    const double b_part = std::sqrt(2.0 * std::numbers::pi) * std::erf(L / rt2);
    const double oracle = t_part * b_part / (2.0 * std::numbers::pi);
    CHECK(integrate(f, m) == doctest::Approx(oracle).epsilon(1e-12));
    // Sanity: the untruncated value is sqrt(e); the box cuts ~2e-4 of it.
    CHECK(oracle == doctest::Approx(std::exp(0.5)).epsilon(1e-3));
  }

  SUBCASE("unit-determinant group haar mass") {
    const double pi = std::numbers::pi;
    const MeasureRule m = haar_rule(*sl2_group(), "sl2-so2-pm1/G",
                                    {{-3.0, 3.0}, {-3.0, 3.0}, {0.0, 2.0 * pi}}, 16);
    CHECK(m.total_mass() == doctest::Approx(6.0 * 2.0 * std::sinh(3.0) * 2.0 * pi).epsilon(1e-12));
  }
}

TEST_CASE("rule projection to quotients") {
  const CaseContext ctx("sl2-so2-pm1", 16);
  // Factoring out the two-element centre halves the mass and wraps angles.
  CHECK(ctx.rule(Space::GL).total_mass() ==
        doctest::Approx(ctx.rule(Space::G).total_mass() / 2.0).epsilon(1e-12));
  CHECK(ctx.rule(Space::HL).total_mass() ==
        doctest::Approx(ctx.rule(Space::H).total_mass() / 2.0).epsilon(1e-12));
  for (const auto& node : ctx.rule(Space::GL).nodes) {
    CHECK(node[2] >= 0.0);
    CHECK(node[2] < std::numbers::pi);
  }
  const CaseContext actx("affine-dilation", 16);
  // Trivial L: same mass, full keys.
  CHECK(actx.rule(Space::GL).total_mass() ==
        doctest::Approx(actx.rule(Space::G).total_mass()).epsilon(1e-12));
}

TEST_CASE("rule dumping") {
  std::ostringstream out;
  dump_rule(counting_rule("s3-a3/GH", 2), out);
  const std::string text = out.str();
  CHECK(text.find("s3-a3/GH") != std::string::npos);
  CHECK(text.find("exact") != std::string::npos);

  std::ostringstream qout;
  dump_rule(density_rule("x", {{0.0, 1.0}}, 2, [](const Coords&) { return 1.0; }, "unit"), qout);
  CHECK(qout.str().find("quadrature") != std::string::npos);
  CHECK(qout.str().find("count 2") != std::string::npos);
}

TEST_CASE("weight validation") {
  const CaseContext ctx("affine-dilation", 16);

  SUBCASE("canonical weight is covariant") {
    const double defect = validate_rho(ctx.chain(), ctx.rho(RhoChoice::canonical),
                                       ctx.default_box(Space::G), ctx.default_box(Space::H), 0, 200);
    CHECK(defect <= 1e-10);
  }

  SUBCASE("constant weight on a nonunimodular pair is not covariant") {
    const double defect = validate_rho(ctx.chain(), ctx.rho(RhoChoice::one),
                                       ctx.default_box(Space::G), ctx.default_box(Space::H), 0, 200);
    CHECK(defect > 1.0);
  }

  SUBCASE("nonpositive weights are rejected") {
    RhoFunction bad;
    bad.chain_id = ctx.chain().id();
    bad.eval_working = [](const Coords&) { return -1.0; };
    CHECK_THROWS_AS((void)validate_rho(ctx.chain(), bad, ctx.default_box(Space::G),
                                       ctx.default_box(Space::H), 0, 10),
                    NonpositiveRho);
  }

  SUBCASE("finite chains are validated exhaustively") {
    const CaseContext fctx("s3-a3", 2);
    CHECK(validate_rho(fctx.chain(), fctx.rho(RhoChoice::canonical), {}, {}, 0, 0) == 0.0);
  }
}

TEST_CASE("iterated-integration residual") {
  SUBCASE("exact on finite chains, and sensitive to sabotage") {
    const CaseContext ctx("s3-a3", 2);
    const auto& fc = static_cast<const FiniteChain&>(ctx.chain());
    const FiniteFn f = constant_fn("s3-a3/G", 6, Rational(1));
    double lhs = 0.0, rhs = 0.0;
    CHECK(weil_residual(fc, f, ctx.rule(Space::G), ctx.rule(Space::GH), nullptr, &lhs, &rhs) ==
          0.0);
    CHECK(lhs == doctest::Approx(6.0));
    CHECK(rhs == doctest::Approx(6.0));

    MeasureRule off = ctx.rule(Space::GH);
    for (auto& w : off.rat_weights) w *= Rational(101, 100);
    CHECK(weil_residual(fc, f, ctx.rule(Space::G), off) >= 5e-3);
  }

  SUBCASE("holds for the weighted chart case and fails when sabotaged") {
    const CaseContext ctx("affine-dilation", 64);
    const RhoFunction rho = ctx.rho(RhoChoice::canonical);
    const auto f = ctx.canonical_bump(Space::G);
    double lhs = 0.0, rhs = 0.0;
    const double res = weil_residual(ctx.chain(), f, ctx.rule(Space::G), ctx.rule(Space::H),
                                     ctx.rule(Space::GH), &rho, &lhs, &rhs);
    CHECK(res <= 1e-9);
    CHECK(lhs == doctest::Approx(rhs));

    MeasureRule off = ctx.rule(Space::GH);
    for (auto& w : off.weights) w *= 1.01;
    CHECK(weil_residual(ctx.chain(), f, ctx.rule(Space::G), ctx.rule(Space::H), off, &rho) >=
          5e-3);
  }

  SUBCASE("unimodular chart case needs no weight") {
    const CaseContext ctx("sl2-so2-pm1", 32);
    const auto f = ctx.canonical_bump(Space::G);
    CHECK(weil_residual(ctx.chain(), f, ctx.rule(Space::G), ctx.rule(Space::H),
                        ctx.rule(Space::GH)) <= 1e-9);
  }
}

TEST_CASE("measure pushforwards") {
  SUBCASE("exact invariance on finite quotients") {
    const CaseContext ctx("s3-a3", 2);
    const auto& fc = static_cast<const FiniteChain&>(ctx.chain());
    for (int g = 0; g < 6; ++g)
      CHECK(pushforward_invariant_exact(fc, Quot::GH, ctx.rule(Space::GH),
                                        fc.big_table().element(g)));
    MeasureRule off = ctx.rule(Space::GH);
    off.rat_weights[1] *= Rational(2);
    CHECK(!pushforward_invariant_exact(fc, Quot::GH, off, fc.big_table().element(1)));
  }

  SUBCASE("invariance of the hyperbolic area measure") {
    const CaseContext ctx("sl2-so2-pm1", 64);
    const auto& big = ctx.chain().big();
    const std::vector<SpaceFunction> battery = {ctx.canonical_bump(Space::GH)};
    PushforwardOptions opts;
    opts.mode = PushMode::invariant;
    opts.safety = ctx.safety_box(Space::GH);
    // Horizontal translation and dilation of the half plane.
    for (const Coords chart : {Coords{1.0, 1.0, 0.0}, Coords{0.0, 2.0, 0.0}}) {
      PushWorst worst;
      const double res =
          pushforward_residual(ctx.chain(), Quot::GH, ctx.rule(Space::GH),
                               ctx.rule_builder(Space::GH),
                               std::static_pointer_cast<const ChartGroup>(big)->element(chart),
                               battery, opts, &worst);
      CHECK(res <= 1e-9);
      CHECK(worst.fn_index == 0);
      CHECK(worst.base == doctest::Approx(worst.pushed));
    }
  }

  SUBCASE("quasi-invariance of the shift measure under dilation") {
    const CaseContext ctx("affine-dilation", 64);
    const RhoFunction rho = ctx.rho(RhoChoice::canonical);
    const std::vector<SpaceFunction> battery = {ctx.canonical_bump(Space::GH)};
    PushforwardOptions opts;
    opts.mode = PushMode::quasi_invariant;
    opts.safety = ctx.safety_box(Space::GH);
    opts.rho = &rho;
    const auto& big = *std::static_pointer_cast<const ChartGroup>(ctx.chain().big());
    for (const Coords chart : {Coords{2.0, 0.0}, Coords{0.5, 1.0}}) {
      const double res =
          pushforward_residual(ctx.chain(), Quot::GH, ctx.rule(Space::GH),
                               ctx.rule_builder(Space::GH), big.element(chart), battery, opts);
      CHECK(res <= 1e-9);
    }
  }

  SUBCASE("translations that leave the trusted region are rejected") {
    const CaseContext ctx("affine-dilation", 16);
    const std::vector<SpaceFunction> battery = {ctx.canonical_bump(Space::GH)};
    PushforwardOptions opts;
    opts.mode = PushMode::invariant;
    opts.safety = ctx.safety_box(Space::GH);
    const auto& big = *std::static_pointer_cast<const ChartGroup>(ctx.chain().big());
    CHECK_THROWS_AS((void)pushforward_residual(ctx.chain(), Quot::GH, ctx.rule(Space::GH),
                                               ctx.rule_builder(Space::GH),
                                               big.element({1.0, 20.0}), battery, opts),
                    SupportEscape);
  }
}

TEST_CASE("quotient measure construction from a weight") {
  SUBCASE("canonical weight reproduces the canonical rule") {
    const CaseContext ctx("affine-dilation", 32);
    const MeasureRule m = ctx.build_quotient_measure(ctx.rho(RhoChoice::canonical));
    CHECK(m.total_mass() == doctest::Approx(ctx.rule(Space::GH).total_mass()).epsilon(1e-12));
  }

  SUBCASE("scaling the weight scales the measure") {
    const CaseContext ctx("affine-dilation", 32);
    RhoFunction twice;
    twice.chain_id = ctx.chain().id();
    twice.eval_working = [](const Coords& w) { return 2.0 * std::exp(w[0]); };
    twice.note = "doubled";
    const MeasureRule m = ctx.build_quotient_measure(twice);
    CHECK(m.total_mass() ==
          doctest::Approx(2.0 * ctx.rule(Space::GH).total_mass()).epsilon(1e-12));
  }

  SUBCASE("non-covariant weights are rejected") {
    const CaseContext ctx("affine-dilation", 16);
    CHECK_THROWS_AS((void)ctx.build_quotient_measure(ctx.rho(RhoChoice::one)), RhoInvalid);
  }

  SUBCASE("finite chains use counting weights") {
    const CaseContext ctx("d4-c4-center", 2);
    const MeasureRule m = ctx.build_quotient_measure(ctx.rho(RhoChoice::canonical));
    CHECK(m.exact);
    CHECK(m.total_mass_exact() == Rational(2));
  }
}
