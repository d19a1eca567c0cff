#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "qradon/errors.hpp"
#include "qradon/group.hpp"

using namespace qradon;

TEST_CASE("symmetric group on three letters") {
  auto s3 = symmetric3();
  REQUIRE(s3->order() == 6);
  CHECK(s3->identity_index() == 0);

  // Elements are [e, (12), (13), (23), (123), (132)] with left-to-right
  // action: (12) followed by (123) is the transposition (13).
  CHECK(s3->compose_index(1, 4) == 2);
  CHECK(s3->invert_index(4) == 5);
  CHECK(s3->invert_index(1) == 1);

  SUBCASE("group laws hold exhaustively") {
    for (int a = 0; a < 6; ++a) {
      CHECK(s3->compose_index(0, a) == a);
      CHECK(s3->compose_index(a, 0) == a);
      CHECK(s3->compose_index(a, s3->invert_index(a)) == 0);
      for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 6; ++c)
          CHECK(s3->compose_index(s3->compose_index(a, b), c) ==
                s3->compose_index(a, s3->compose_index(b, c)));
    }
  }

  SUBCASE("subgroup and normality tests") {
    CHECK(s3->is_subgroup({0, 4, 5}));   // alternating subgroup
    CHECK(s3->is_normal({0, 4, 5}));     // index 2
    CHECK(s3->is_subgroup({0, 1}));
    CHECK(!s3->is_normal({0, 1}));
    CHECK(!s3->is_subgroup({0, 1, 4}));  // not closed
    CHECK(!s3->is_subgroup({1, 2}));     // no identity
  }

  SUBCASE("element wrapping and mismatch detection") {
    const GroupElement e = s3->element(0);
    CHECK(e.is_finite());
    CHECK(s3->modular(e) == 1.0);
    auto d4 = dihedral4();
    CHECK_THROWS_AS((void)d4->compose(d4->element(0), s3->element(1)), GroupMismatch);
    CHECK_THROWS_AS((void)s3->element(6), GroupMismatch);
  }
}

TEST_CASE("dihedral group of the square") {
  auto d4 = dihedral4();
  REQUIRE(d4->order() == 8);

  // Indices 0..3 are rotations, 4..7 reflections.
  CHECK(d4->is_subgroup({0, 1, 2, 3}));
  CHECK(d4->is_normal({0, 1, 2, 3}));
  CHECK(d4->is_subgroup({0, 2}));
  CHECK(d4->is_normal({0, 2}));          // the center
  CHECK(d4->is_subgroup({0, 4}));
  CHECK(!d4->is_normal({0, 4}));

  // Reflections are involutions; rotations by a quarter turn are order 4.
  for (int s = 4; s < 8; ++s) CHECK(d4->compose_index(s, s) == 0);
  CHECK(d4->compose_index(1, 1) == 2);
  CHECK(d4->compose_index(2, 2) == 0);
}

TEST_CASE("composition table file parsing") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "qradon_group_table.txt").string();

  SUBCASE("valid table round-trips") {
    std::ofstream out(path);
    out << "# cyclic group of order 3\n3\n0 1 2\n1 2 0\n2 0 1\n";
    out.close();
    auto g = FiniteGroup::from_file(path, "c3");
    CHECK(g->order() == 3);
    CHECK(g->id() == "c3");
    CHECK(g->compose_index(1, 2) == 0);
    CHECK(g->invert_index(1) == 2);
  }

  SUBCASE("truncated input") {
    std::ofstream out(path);
    out << "3\n0 1 2\n1 2 0\n";
    out.close();
    CHECK_THROWS_AS((void)FiniteGroup::from_file(path), ParseFailure);
  }

  SUBCASE("entry out of range") {
    std::ofstream out(path);
    out << "2\n0 1\n1 7\n";
    out.close();
    CHECK_THROWS_AS((void)FiniteGroup::from_file(path), Error);
  }

  SUBCASE("table that is not a group") {
    std::ofstream out(path);
    out << "2\n0 0\n1 1\n";  // rows are not permutations compatible with identity
    out.close();
    CHECK_THROWS_AS((void)FiniteGroup::from_file(path), Error);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)FiniteGroup::from_file(path + ".does-not-exist"), ParseFailure);
  }

  std::remove(path.c_str());
}

TEST_CASE("affine line group") {
  auto aff = affine_group();
  REQUIRE(aff->dim() == 2);
  CHECK(aff->axes()[0].kind == Axis::Kind::logscale);
  CHECK(aff->axes()[1].kind == Axis::Kind::line);

  const GroupElement g = aff->element({2.0, 1.0});
  const GroupElement h = aff->element({3.0, 4.0});
  const GroupElement gh = aff->compose(g, h);
  CHECK(gh.coords[0] == doctest::Approx(6.0));
  CHECK(gh.coords[1] == doctest::Approx(9.0));

  const GroupElement gi = aff->invert(g);
  CHECK(gi.coords[0] == doctest::Approx(0.5));
  CHECK(gi.coords[1] == doctest::Approx(-0.5));

  CHECK(aff->modular(aff->element({4.0, 7.0})) == doctest::Approx(0.25));

  SUBCASE("working coordinates are log scale, plain shift") {
    const GroupElement w = aff->element_from_working({1.0, -2.0});
    CHECK(w.coords[0] == doctest::Approx(std::numbers::e));
    CHECK(w.coords[1] == -2.0);
    const Coords back = aff->working_coords(w);
    CHECK(back[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(back[1] == -2.0);
    // Haar density in working coordinates is e^{-t}.
    CHECK(aff->working_haar_density({1.0, -2.0}) == doctest::Approx(std::exp(-1.0)));
  }

  SUBCASE("chart domain is validated") {
    CHECK_THROWS_AS((void)aff->element({-1.0, 0.0}), ChartDomainViolation);
    CHECK_THROWS_AS((void)aff->element({0.0, 0.0}), ChartDomainViolation);
    CHECK_THROWS_AS((void)aff->element({1.0, std::nan("")}), ChartDomainViolation);
  }

  SUBCASE("group laws on random elements") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> t(-2.0, 2.0);
    for (int rep = 0; rep < 1000; ++rep) {
      const GroupElement a = aff->element_from_working({t(gen), t(gen)});
      const GroupElement b = aff->element_from_working({t(gen), t(gen)});
      const GroupElement c = aff->element_from_working({t(gen), t(gen)});
      CHECK(aff->approx_equal(aff->compose(aff->compose(a, b), c),
                              aff->compose(a, aff->compose(b, c)), 1e-9));
      CHECK(aff->approx_equal(aff->compose(a, aff->invert(a)), aff->identity(), 1e-9));
    }
  }
}

TEST_CASE("special linear chart and matrix helpers") {
  auto g2 = sl2_group();
  REQUIRE(g2->dim() == 3);
  CHECK(g2->axes()[1].kind == Axis::Kind::logscale);
  CHECK(g2->axes()[2].kind == Axis::Kind::angle);

  SUBCASE("matrix factorisation round-trips") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int rep = 0; rep < 1000; ++rep) {
      const Coords xyt = {u(gen), std::exp(u(gen)), ang(gen)};
      const sl2::Mat m = sl2::to_matrix(xyt);
      CHECK(m[0] * m[3] - m[1] * m[2] == doctest::Approx(1.0).epsilon(1e-10));
      const Coords back = sl2::from_matrix(m);
      CHECK(back[0] == doctest::Approx(xyt[0]).epsilon(1e-9));
      CHECK(back[1] == doctest::Approx(xyt[1]).epsilon(1e-9));
      CHECK(std::abs(std::remainder(back[2] - xyt[2], 2.0 * std::numbers::pi)) < 1e-9);
    }
  }

  SUBCASE("moebius action sends i to the chart point") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    const std::complex<double> i(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
      const double x = u(gen), y = std::exp(u(gen)), theta = ang(gen);
      const std::complex<double> z = sl2::moebius(sl2::to_matrix({x, y, theta}), i);
      CHECK(z.real() == doctest::Approx(x).epsilon(1e-9));
      CHECK(z.imag() == doctest::Approx(y).epsilon(1e-9));
      // Rotations stabilise i.
      const std::complex<double> fixed = sl2::moebius(sl2::rotation(theta), i);
      CHECK(std::abs(fixed - i) < 1e-12);
    }
  }

  SUBCASE("matrix inverse and product") {
    const sl2::Mat m = sl2::to_matrix({0.7, 2.0, 1.3});
    const sl2::Mat p = sl2::mul(m, sl2::inverse(m));
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p[3] == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("unimodular, associative, invertible") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int rep = 0; rep < 1000; ++rep) {
      const GroupElement a = g2->element({u(gen), std::exp(u(gen)), ang(gen)});
      const GroupElement b = g2->element({u(gen), std::exp(u(gen)), ang(gen)});
      const GroupElement c = g2->element({u(gen), std::exp(u(gen)), ang(gen)});
      CHECK(g2->modular(a) == 1.0);
      CHECK(g2->approx_equal(g2->compose(g2->compose(a, b), c),
                             g2->compose(a, g2->compose(b, c)), 1e-8));
      CHECK(g2->approx_equal(g2->compose(a, g2->invert(a)), g2->identity(), 1e-9));
    }
  }
}

TEST_CASE("rotation group chart") {
  auto rot = so2_group();
  const GroupElement a = rot->element({5.0});
  const GroupElement b = rot->element({2.0});
  const GroupElement ab = rot->compose(a, b);
  CHECK(ab.coords[0] == doctest::Approx(7.0 - 2.0 * std::numbers::pi));
  CHECK(rot->approx_equal(rot->compose(a, rot->invert(a)), rot->identity(), 1e-12));
  // Angles land in [0, 2 pi) after normalisation.
  CHECK(rot->element({-0.5}).coords[0] == doctest::Approx(2.0 * std::numbers::pi - 0.5));
}

TEST_CASE("group registry lookup") {
  for (const char* id : {"s3", "d4", "affine", "sl2", "so2"}) {
    auto g = find_group(id);
    REQUIRE(g != nullptr);
    CHECK(g->id() == id);
  }
  CHECK_THROWS_AS((void)find_group("nope"), UnknownCase);
}
