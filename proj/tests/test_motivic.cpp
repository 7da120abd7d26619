#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "panache/motivic.hpp"
#include "test_util.hpp"

using namespace panache::motivic;
using namespace panache::extmod;
using namespace panache::genext;
using namespace panache::repcat;
using testutil::make_sig;
using testutil::random_rep;
using testutil::random_scalar;

namespace {

ExtClass random_class(const WeightedRep& of, const WeightedRep& by, std::mt19937_64& rng) {
  ExtSpace sp(of, by);
  Matrix coords(of.field(), 1, sp.coord_count());
  for (int c = 0; c < sp.coord_count(); ++c) coords.at(0, c) = random_scalar(of.field(), rng);
  return sp.class_from_coords(coords);
}

WeightedRep kummer(const SignaturePtr& sig, long block) {
  Matrix op(sig->field(), 2, 2);
  op.at(0, 1) = Scalar(sig->field(), block);
  std::vector<Matrix> ops{op};
  for (int t = 1; t < sig->num_generators(); ++t)
    ops.push_back(Matrix(sig->field(), 2, 2));
  return WeightedRep(sig, {{-1, 1}, {0, 1}}, ops);
}

}  // namespace

TEST_CASE("totally_nonsplit basics") {
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
  WeightedRep one = WeightedRep::unit(sig);
  WeightedRep q1 = WeightedRep::pure(sig, -1, 1);

  SUBCASE("split is not totally nonsplit") {
    ExtClass z(one, q1, {Matrix(Field::rationals(), 1, 1), Matrix(Field::rationals(), 1, 1)});
    CHECK(!totally_nonsplit(z));
  }
  SUBCASE("1-dim target: nonsplit iff totally nonsplit") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      ExtClass e = random_class(one, q1, rng);
      CHECK(totally_nonsplit(e) == !e.is_split());
    }
  }
  SUBCASE("weight-0 part in the target is rejected") {
    WeightedRep p0 = WeightedRep::pure(sig, 0, 1);
    ExtClass z(p0, p0, {Matrix(Field::rationals(), 1, 1), Matrix(Field::rationals(), 1, 1)});
    CHECK_THROWS_AS((void)totally_nonsplit(z), panache::DomainError);
  }
  SUBCASE("2-negative-weight target: partial splitting detected") {
    WeightedRep n = random_rep(make_sig(Field::rationals(), {{"u", -1}, {"v", -2}}),
                               {{-2, 1}, {-1, 1}}, *(new std::mt19937_64(5)), 0);
    // Cocycle hitting only the -1 part: the pushforward to the -2 line splits.
    ExtSpace sp(one, n);
    Matrix coords(Field::rationals(), 1, sp.coord_count());
    coords.at(0, 0) = Scalar(Field::rationals(), 1);  // u-slot into weight -1
    ExtClass e = sp.class_from_coords(coords);
    // Whether e is TNS depends on n's internal operator; with the operator
    // nonzero the closure reaches the -2 line.
    bool tns = totally_nonsplit(e);
    bool closure_reaches = !n.op(0).submatrix(0, 1, 1, 1).is_zero();
    CHECK(tns == closure_reaches);
  }
}

TEST_CASE("end_scalar_check realizes the rigidity statement") {
  std::mt19937_64 rng(7);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
  WeightedRep one = WeightedRep::unit(sig);

  int tns_seen = 0, split_seen = 0;
  for (int trial = 0; trial < 40 && (tns_seen < 5 || split_seen < 5); ++trial) {
    WeightedRep n = random_rep(sig, {{-2, 1}, {-1, 1}}, rng);
    ExtClass e = random_class(one, n, rng);
    if (totally_nonsplit(e)) {
      CHECK(end_scalar_check(e));
      ++tns_seen;
    }
    ExtClass z(one, n, {Matrix(Field::rationals(), n.total_dim(), 1),
                        Matrix(Field::rationals(), n.total_dim(), 1)});
    if (!end_scalar_check(z)) ++split_seen;  // split with nonzero parts: dim >= 2
    CHECK(!end_scalar_check(z));
  }
  CHECK(tns_seen >= 5);

  // Prime-field input is rejected (characteristic 0 required).
  auto sigp = make_sig(Field::prime(3), {{"u", -1}});
  ExtClass zp(WeightedRep::unit(sigp), WeightedRep::pure(sigp, -1, 1),
              {Matrix(Field::prime(3), 1, 1)});
  CHECK_THROWS_AS((void)end_scalar_check(zp), panache::DomainError);
}

TEST_CASE("u_radical on the spec examples") {
  auto sig = make_sig(Field::rationals(), {{"u", -1}});
  SUBCASE("pure object") {
    CHECK(u_radical(WeightedRep::pure(sig, -2, 3)).basis.dim() == 0);
  }
  SUBCASE("Kummer shape") {
    LieSubalgebra u = u_radical(kummer(sig, 1));
    CHECK(u.basis.dim() == 1);
    CHECK(u.bracket_closed);
  }
  SUBCASE("one operator along the chain: no new brackets") {
    auto sig1 = make_sig(Field::rationals(), {{"u", -1}});
    Matrix op(Field::rationals(), 3, 3);
    op.at(0, 1) = Scalar(Field::rationals(), 1);  // weight -2 <- weight -1
    op.at(1, 2) = Scalar(Field::rationals(), 1);  // weight -1 <- weight 0
    WeightedRep x(sig1, {{-2, 1}, {-1, 1}, {0, 1}}, {op});
    LieSubalgebra u = u_radical(x);
    CHECK(u.basis.dim() == 1);  // [X, X] = 0
    CHECK(w_minus_one_end_dim(x) == 3);
    CHECK(!is_maximal(x));
  }
  SUBCASE("two operators: the bracket fills the distance-2 slot") {
    auto sig2 = make_sig(Field::rationals(), {{"u", -1}, {"u2", -1}});
    Matrix a(Field::rationals(), 3, 3), b(Field::rationals(), 3, 3);
    a.at(0, 1) = Scalar(Field::rationals(), 1);
    b.at(1, 2) = Scalar(Field::rationals(), 1);
    WeightedRep x(sig2, {{-2, 1}, {-1, 1}, {0, 1}}, {a, b});
    LieSubalgebra u = u_radical(x);
    CHECK(u.basis.dim() == 3);  // A, B and [A, B] = E_{02}
    CHECK(is_maximal(x));
  }
}

TEST_CASE("is_maximal on two-weight objects matches total nonsplitting") {
  std::mt19937_64 rng(11);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
  for (int trial = 0; trial < 25; ++trial) {
    WeightedRep x = random_rep(sig, {{-1, 1 + (int)(rng() % 2)}, {0, 1 + (int)(rng() % 2)}},
                               rng);
    ExtClass e = adjacent_extension(x, 1);
    CHECK(is_maximal(x) == totally_nonsplit(e));
  }
  // Vacuous case: one weight only.
  CHECK(is_maximal(WeightedRep::pure(sig, -3, 2)));
  // Split two-weight object with both parts nonzero is not maximal.
  WeightedRep split = random_rep(sig, {{-1, 1}, {0, 1}}, rng, 100);
  CHECK(!is_maximal(split));
}

TEST_CASE("graded independence on the spec examples") {
  auto sig = make_sig(Field::rationals(), {{"u", -1}});
  auto obj = [&](std::vector<int> ws) {
    std::map<int, int> support;
    for (int w : ws) support[w] = 1;
    int total = (int)ws.size();
    return WeightedRep(sig, support, {Matrix(Field::rationals(), total, total)});
  };
  CHECK(graded_independent(obj({0, -1, -3})));   // differences {-1,-2} vs {-3}
  CHECK(!graded_independent(obj({0, -1, -2})));  // adjacent difference -1 repeats
  CHECK(graded_independent(obj({0, -7})));
}

TEST_CASE("maximality criterion agrees with the radical route") {
  std::mt19937_64 rng(13);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}, {"w", -4}, {"z", -7}});
  // Weight patterns that are graded-independent with k up to 4.
  std::vector<std::vector<int>> patterns = {
      {0, -1, -3}, {0, -2, -3}, {0, -1, -3, -7}, {0, -4, -5}, {0, -1}, {0, -2, -3, -7}};
  for (int trial = 0; trial < 60; ++trial) {
    const auto& ws = patterns[trial % patterns.size()];
    std::map<int, int> support;
    for (int w : ws) support[w] = 1 + (int)(rng() % 2);
    WeightedRep x = random_rep(sig, support, rng, 35);
    REQUIRE(graded_independent(x));
    MaximalityReport rep = maximality_criterion(x);
    CHECK(rep.maximal == rep.radical_route);  // also asserted internally
    bool all = true;
    for (bool b : rep.adjacent_tns) all = all && b;
    CHECK(rep.maximal == all);
  }
  // Not graded-independent input is rejected.
  std::map<int, int> bad{{0, 1}, {-1, 1}, {-2, 1}};
  WeightedRep xbad = random_rep(sig, bad, rng);
  CHECK_THROWS_AS((void)maximality_criterion(xbad), panache::DomainError);
}

TEST_CASE("classify_star level 1 and fibers") {
  std::mt19937_64 rng(17);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}, {"w", -3}});
  // Frame with weights 0, -1, -3: graded-independent; adjacent gaps -1, -2.
  GradedFrame fr({WeightedRep::pure(sig, -3, 1), WeightedRep::pure(sig, -1, 1),
                  WeightedRep::pure(sig, 0, 1)});
  REQUIRE(graded_independent(fr));

  StarLevel1 s1 = classify_star_level1(fr, rng);
  REQUIRE(s1.factors.size() == 2);
  CHECK(s1.factors[0].ext_dim == 1);
  CHECK(s1.factors[1].ext_dim == 1);
  CHECK(s1.nonempty);

  // Choose the basis classes as a totally nonsplit level-1 member.
  BlockForm b = zero_block_form(fr, 1);
  b.blocks[1].at({1, 2}) = s1.factors[0].basis[0].reduced()[1];  // gap -2 uses v
  b.blocks[0].at({2, 3}) = s1.factors[1].basis[0].reduced()[0];  // gap -1 uses u
  GenExt chosen = denormalize(b);
  REQUIRE(tns_genext(chosen));

  StarFiber fib = classify_star_fiber(chosen);
  REQUIRE(fib.group_dims.size() == 1);
  CHECK(fib.group_dims[0] == 1);  // Ext^1(A_3, A_1) via generator w
  CHECK(fib.surjective);
  CHECK(fib.gamma_trivial);

  // Realized members of the full-level fiber are maximal with Gr = A.
  GenExt member = fib.fiber.lift_zero();
  const WeightedRep& x = member.object(0, 3);
  CHECK(is_maximal(x));
  CHECK(associated_graded(x).support() == direct_sum(fr.pieces()).sum.support());

  // A frame with a vanishing adjacent Ext space has empty S*_1.
  GradedFrame fr2({WeightedRep::pure(sig, -5, 1), WeightedRep::pure(sig, -1, 1),
                   WeightedRep::pure(sig, 0, 1)});
  StarLevel1 s2 = classify_star_level1(fr2, rng);
  CHECK(!s2.nonempty);
  CHECK(s2.factors[0].ext_dim == 0);  // gap -4 has no generator
}

TEST_CASE("totally nonsplit generalized extensions and Lemma-5.3.2 direction") {
  std::mt19937_64 rng(19);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}, {"w", -3}});
  GradedFrame fr({WeightedRep::pure(sig, -3, 1), WeightedRep::pure(sig, -1, 1),
                  WeightedRep::pure(sig, 0, 1)});

  // Fully split diagram is not totally nonsplit.
  CHECK(!tns_genext(denormalize(zero_block_form(fr, 2))));

  // Level-1 members with nonsplit classes on 1-dim pieces are totally
  // nonsplit, and (graded-independent frame) so is any level-2 lift.
  for (int trial = 0; trial < 10; ++trial) {
    BlockForm b = zero_block_form(fr, 1);
    b.blocks[1].at({1, 2}).at(0, 0) = random_scalar(Field::rationals(), rng, false);
    b.blocks[0].at({2, 3}).at(0, 0) = random_scalar(Field::rationals(), rng, false);
    GenExt level1 = denormalize(b);
    REQUIRE(tns_genext(level1));
    FiberDescriptor fib = fiber_classes(level1);
    Matrix coords(Field::rationals(), 1, fib.groups()[0].coord_count());
    for (int c = 0; c < coords.cols(); ++c)
      coords.at(0, c) = random_scalar(Field::rationals(), rng);
    GenExt lift = fib.lift({fib.groups()[0].class_from_coords(coords)});
    CHECK(tns_genext(lift));
  }
}
