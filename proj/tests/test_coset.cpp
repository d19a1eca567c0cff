#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qradon/coset.hpp"
#include "qradon/errors.hpp"

using namespace qradon;

TEST_CASE("finite chain enumeration on the permutation case") {
  auto chain = std::static_pointer_cast<const FiniteChain>(find_chain("s3-a3"));
  REQUIRE(chain->finite());
  CHECK(chain->has_dual());

  CHECK(chain->n_cosets(Quot::GH) == 2);
  CHECK(chain->n_cosets(Quot::GL) == 6);
  CHECK(chain->n_cosets(Quot::HL) == 3);
  CHECK(chain->n_cosets(Quot::GK) == 3);
  CHECK(chain->n_cosets(Quot::KL) == 2);

  SUBCASE("coset membership lists") {
    const auto& gh = chain->cosets(Quot::GH);
    CHECK(gh[0] == std::vector<int>{0, 4, 5});  // the alternating subgroup itself
    CHECK(gh[1] == std::vector<int>{1, 2, 3});
    for (int g = 0; g < 6; ++g)
      CHECK(chain->coset_index(g, Quot::GL) >= 0);  // L trivial: every element its own coset
    // Fibre cosets are subsets of H.
    for (const auto& c : chain->cosets(Quot::HL))
      for (int g : c) CHECK(std::find(chain->h_elems().begin(), chain->h_elems().end(), g) !=
                            chain->h_elems().end());
  }

  SUBCASE("coset 0 always contains the identity") {
    for (Quot q : {Quot::GH, Quot::GL, Quot::HL, Quot::GK, Quot::KL})
      CHECK(std::find(chain->cosets(q)[0].begin(), chain->cosets(q)[0].end(), 0) !=
            chain->cosets(q)[0].end());
  }

  SUBCASE("action moves cosets correctly") {
    const auto& g = chain->big_table();
    // A transposition flips the two H-cosets.
    const CosetPoint moved = chain->act(g.element(1), chain->coset_point(0, Quot::GH));
    CHECK(moved.key_index == 1);
    // Action is a homomorphism into permutations of each coset space.
    for (Quot q : {Quot::GH, Quot::GL}) {
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          for (int c = 0; c < chain->n_cosets(q); ++c) {
            const CosetPoint lhs =
                chain->act(g.element(a), chain->act(g.element(b), chain->coset_point(c, q)));
            const CosetPoint rhs =
                chain->act(g.compose(g.element(a), g.element(b)), chain->coset_point(c, q));
            CHECK(chain->coset_equal(lhs, rhs, 0.0));
          }
    }
  }

  SUBCASE("section lands in the projected coset") {
    for (Quot q : {Quot::GH, Quot::GL, Quot::HL}) {
      for (int c = 0; c < chain->n_cosets(q); ++c) {
        const CosetPoint pt = chain->coset_point(c, q);
        const GroupElement rep = chain->section(pt);
        const CosetPoint back = chain->project(rep, q);
        CHECK(back.key_index == c);
      }
    }
  }

  SUBCASE("refinement projects GL points onto GH cosets") {
    for (int c = 0; c < chain->n_cosets(Quot::GL); ++c) {
      const CosetPoint fine = chain->coset_point(c, Quot::GL);
      const CosetPoint coarse = chain->refine_project(fine);
      const int member = chain->cosets(Quot::GL)[c].front();
      CHECK(coarse.key_index == chain->coset_index(member, Quot::GH));
    }
  }

  SUBCASE("local position of H elements") {
    CHECK(chain->mid_local_of_big(0) == 0);
    CHECK(chain->mid_local_of_big(4) == 1);
    CHECK(chain->mid_local_of_big(5) == 2);
  }
}

TEST_CASE("finite chain on the square-symmetry case") {
  auto chain = std::static_pointer_cast<const FiniteChain>(find_chain("d4-c4-center"));
  CHECK(chain->n_cosets(Quot::GH) == 2);
  CHECK(chain->n_cosets(Quot::GL) == 4);
  CHECK(chain->n_cosets(Quot::HL) == 2);
  CHECK(chain->flags().h_normal);
  CHECK(!chain->has_dual());
  CHECK(chain->cosets(Quot::GL)[0] == std::vector<int>{0, 2});  // the center
  CHECK(chain->cosets(Quot::HL)[0] == std::vector<int>{0, 2});
}

TEST_CASE("custom finite chains validate their inputs") {
  auto s3 = symmetric3();
  // L must sit inside H.
  CHECK_THROWS_AS((FiniteChain("bad", s3, {0, 4, 5}, {0, 1})), Error);
  // Subgroup lists must actually be subgroups.
  CHECK_THROWS_AS((FiniteChain("bad", s3, {0, 1, 4}, {0})), Error);
  // A valid nontrivial chain.
  const FiniteChain ok("ok", s3, {0, 1}, {0});
  CHECK(ok.n_cosets(Quot::GH) == 3);
}

TEST_CASE("chart chain on the affine case") {
  auto chain = std::static_pointer_cast<const ChartChain>(find_chain("affine-dilation"));
  REQUIRE(!chain->finite());
  const auto& big = chain->big_chart();

  SUBCASE("projection keeps the shift coordinate") {
    const CosetPoint c = chain->project(big.element({2.0, 3.5}), Quot::GH);
    const Coords key = chain->working_key(c);
    REQUIRE(key.size() == 1);
    CHECK(key[0] == doctest::Approx(3.5));
  }

  SUBCASE("full-point quotient keeps both working coordinates") {
    const CosetPoint c = chain->project(big.element({2.0, 3.5}), Quot::GL);
    const Coords key = chain->working_key(c);
    REQUIRE(key.size() == 2);
    CHECK(key[0] == doctest::Approx(std::log(2.0)));
    CHECK(key[1] == doctest::Approx(3.5));
  }

  SUBCASE("section then project is the identity on keys") {
    for (double b : {-3.0, 0.0, 1.75}) {
      const CosetPoint c = chain->point_from_working_key(Quot::GH, {b});
      const GroupElement s = chain->section(c);
      const Coords key = chain->working_key(chain->project(s, Quot::GH));
      CHECK(key[0] == doctest::Approx(b).epsilon(1e-12));
    }
  }

  SUBCASE("refinement forgets the scale coordinate") {
    const CosetPoint fine = chain->point_from_working_key(Quot::GL, {0.7, -1.2});
    const Coords key = chain->working_key(chain->refine_project(fine));
    REQUIRE(key.size() == 1);
    CHECK(key[0] == doctest::Approx(-1.2).epsilon(1e-12));
  }

  SUBCASE("translation acts on cosets through the group") {
    // (a, b) . (b0) = a b0 + b for the left action on shifts.
    const GroupElement g = big.element({2.0, 1.0});
    const CosetPoint c = chain->point_from_working_key(Quot::GH, {3.0});
    const Coords moved = chain->working_key(chain->act(g, c));
    CHECK(moved[0] == doctest::Approx(7.0));
  }

  SUBCASE("key boxes project and restore") {
    const Box g_box = {{-2.0, 2.0}, {-4.0, 4.0}};
    const Box gh = chain->key_box_of_group_box(g_box, Quot::GH);
    REQUIRE(gh.size() == 1);
    CHECK(gh[0].lo == -4.0);
    CHECK(gh[0].hi == 4.0);
    const Box restored = chain->group_box_of_key_box(gh, g_box, Quot::GH);
    CHECK(restored[0].lo == -2.0);
    CHECK(restored[1].hi == 4.0);
    const Box gl_box = {{-1.0, 1.0}, {-3.0, 3.0}};
    const Box coarse = chain->coarsen_key_box(gl_box);
    REQUIRE(coarse.size() == 1);
    CHECK(coarse[0].lo == -3.0);
    const Box narrowed = chain->restrict_key_box({{-1.0, 1.0}}, gl_box);
    CHECK(narrowed[1].lo == -1.0);
    CHECK(narrowed[1].hi == 1.0);
    CHECK(narrowed[0].lo == -1.0);  // scale axis untouched
  }

  SUBCASE("projection rejects foreign elements") {
    auto other = sl2_group();
    CHECK_THROWS_AS((void)chain->project(other->identity(), Quot::GH), GroupMismatch);
  }
}

TEST_CASE("chart chain on the rotation-fibre case") {
  auto chain = std::static_pointer_cast<const ChartChain>(find_chain("sl2-so2-pm1"));
  const auto& big = chain->big_chart();
  const double pi = std::numbers::pi;

  SUBCASE("point quotient drops the rotation angle") {
    const CosetPoint c = chain->project(big.element({0.3, 2.0, 4.0}), Quot::GH);
    const Coords key = chain->working_key(c);
    REQUIRE(key.size() == 2);
    CHECK(key[0] == doctest::Approx(0.3));
    CHECK(key[1] == doctest::Approx(std::log(2.0)));
  }

  SUBCASE("sign quotient halves the angle period") {
    const auto axes = chain->key_axes(Quot::GL);
    REQUIRE(axes.size() == 3);
    CHECK(axes[2].kind == Axis::Kind::angle);
    CHECK(axes[2].period == doctest::Approx(pi));
    const CosetPoint c = chain->project(big.element({0.3, 2.0, 4.0}), Quot::GL);
    const Coords key = chain->working_key(c);
    CHECK(key[2] == doctest::Approx(4.0 - pi));

    const auto fibre_axes = chain->key_axes(Quot::HL);
    REQUIRE(fibre_axes.size() == 1);
    CHECK(fibre_axes[0].period == doctest::Approx(pi));
  }

  SUBCASE("opposite rotations define the same sign coset") {
    const CosetPoint a = chain->project(big.element({0.1, 1.5, 1.0}), Quot::GL);
    const CosetPoint b = chain->project(big.element({0.1, 1.5, 1.0 + pi}), Quot::GL);
    CHECK(chain->coset_equal(a, b, 1e-9));
    const CosetPoint c = chain->project(big.element({0.1, 1.5, 1.5}), Quot::GL);
    CHECK(!chain->coset_equal(a, c, 1e-9));
  }

  SUBCASE("fibre quotient projects rotations") {
    auto rot = so2_group();
    const CosetPoint c = chain->project(rot->element({4.0}), Quot::HL);
    const Coords key = chain->working_key(c);
    REQUIRE(key.size() == 1);
    CHECK(key[0] == doctest::Approx(4.0 - pi));
  }

  SUBCASE("embeddings land in the ambient groups") {
    auto rot = so2_group();
    const GroupElement h = chain->embed_mid(rot->element({1.2}));
    CHECK(h.group_id == big.id());
    // A rotation embeds as the chart point with x = 0, y = 1.
    CHECK(h.coords[0] == doctest::Approx(0.0));
    CHECK(h.coords[1] == doctest::Approx(1.0));
    CHECK(h.coords[2] == doctest::Approx(1.2));
    auto small = std::static_pointer_cast<const FiniteGroup>(chain->small());
    const GroupElement l1 = chain->embed_small_in_big(small->element(1));
    CHECK(l1.coords[2] == doctest::Approx(pi));  // -I is the half-turn
  }

  SUBCASE("angle keys wrap when boxes are projected") {
    const Box g_box = {{-3.0, 3.0}, {-3.0, 3.0}, {0.0, 2.0 * pi}};
    const Box gl = chain->key_box_of_group_box(g_box, Quot::GL);
    CHECK(gl[2].lo == 0.0);
    CHECK(gl[2].hi == doctest::Approx(pi));  // full reduced period
  }
}

TEST_CASE("chain registry") {
  const auto ids = chain_ids();
  REQUIRE(ids.size() == 4);
  for (const auto& id : ids) CHECK(find_chain(id)->id() == id);
  CHECK_THROWS_AS((void)find_chain("nope"), UnknownCase);
}
