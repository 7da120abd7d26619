#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "panache/extmod.hpp"
#include "test_util.hpp"

using namespace panache::extmod;
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

}  // namespace

TEST_CASE("ext1_space dimensions on the spec examples") {
  auto sig = make_sig(Field::rationals(), {{"u", -1}});
  WeightedRep one = WeightedRep::unit(sig);
  WeightedRep qlike = WeightedRep::pure(sig, -1, 1);

  auto r = ext1_space(one, qlike);
  CHECK(r.dim == 1);  // Z is 1-dim, B = 0

  auto same = ext1_space(qlike, qlike);
  CHECK(same.dim == 0);  // no generator fits degree 0

  CHECK_THROWS_AS((void)ext1_space(one, WeightedRep::unit(make_sig(Field::prime(2), {{"u", -1}}))),
                  panache::DomainError);
}

TEST_CASE("realize and class_of") {
  auto sig = make_sig(Field::rationals(), {{"u", -1}});
  WeightedRep one = WeightedRep::unit(sig);
  WeightedRep qlike = WeightedRep::pure(sig, -1, 1);

  SUBCASE("zero class realizes split") {
    ExtClass zero(one, qlike, {Matrix(Field::rationals(), 1, 1)});
    auto seq = realize(zero);
    validate_sequence(seq);
    std::mt19937_64 rng(1);
    auto sp = direct_sum({qlike, one});
    CHECK(is_isomorphic(seq.mid, sp.sum, rng).iso.has_value());
  }
  SUBCASE("round-trip is a fixed point") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      auto sig2 = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
      WeightedRep m = random_rep(sig2, {{-1, 1}, {0, 2}}, rng);
      WeightedRep n = random_rep(sig2, {{-3, 1}, {-2, 2}}, rng);
      ExtClass e = random_class(m, n, rng);
      CHECK(class_of(realize(e)) == e);
    }
  }
  SUBCASE("Kummer middle reads off cocycle [1]") {
    Matrix op(Field::rationals(), 2, 2);
    op.at(0, 1) = Scalar(Field::rationals(), 1);
    WeightedRep mid(sig, {{-1, 1}, {0, 1}}, {op});
    Matrix incl(Field::rationals(), 2, 1);
    incl.at(0, 0) = Scalar(Field::rationals(), 1);
    Matrix proj(Field::rationals(), 1, 2);
    proj.at(0, 1) = Scalar(Field::rationals(), 1);
    ExtensionSeq seq{qlike, mid, one, {qlike, mid, incl}, {mid, one, proj}};
    ExtClass e = class_of(seq);
    CHECK(e.cocycle()[0].at(0, 0).to_string() == "1");
    CHECK(!e.is_split());
  }
}

TEST_CASE("Baer arithmetic, pushforward, pullback") {
  std::mt19937_64 rng(7);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
  WeightedRep m = random_rep(sig, {{0, 2}}, rng);
  WeightedRep n = random_rep(sig, {{-2, 1}, {-1, 2}}, rng);
  ExtClass e = random_class(m, n, rng);
  ExtClass zero(m, n, std::vector<Matrix>(2, Matrix(Field::rationals(), n.total_dim(),
                                                    m.total_dim())));

  CHECK(baer_sum(e, zero) == e);
  CHECK(baer_sum(e, negate(e)).is_split());
  CHECK(pushforward(e, RepMorphism::identity(n)) == e);
  CHECK(pullback(e, RepMorphism::identity(m)) == e);

  RepMorphism two{n, n, Scalar(Field::rationals(), 2) * Matrix::identity(Field::rationals(),
                                                                         n.total_dim())};
  CHECK(pushforward(e, two) == baer_sum(e, e));

  // pushforward and pullback commute
  for (int trial = 0; trial < 10; ++trial) {
    WeightedRep m2 = random_rep(sig, {{0, 1}}, rng);
    Subspace gs = hom_space(m2, m);
    Subspace fs = hom_space(n, n);
    if (gs.dim() == 0 || fs.dim() == 0) continue;
    RepMorphism g{m2, m, unflatten(m2, m, gs.basis().row(0))};
    RepMorphism f{n, n, unflatten(n, n, fs.basis().row(rng() % fs.dim()))};
    CHECK(pushforward(pullback(e, g), f) == pullback(pushforward(e, f), g));
  }
}

TEST_CASE("is_split on the spec examples") {
  auto sig = make_sig(Field::rationals(), {{"u", -1}});
  WeightedRep one = WeightedRep::unit(sig);
  WeightedRep qlike = WeightedRep::pure(sig, -1, 1);
  auto r = ext1_space(one, qlike);
  REQUIRE(r.dim == 1);
  CHECK(!r.basis[0].is_split());
  ExtClass zero(one, qlike, {Matrix(Field::rationals(), 1, 1)});
  CHECK(zero.is_split());
  CHECK(baer_sum(r.basis[0], negate(r.basis[0])).is_split());
}

TEST_CASE("transfer_unit is an isomorphism of ext groups") {
  std::mt19937_64 rng(13);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
  WeightedRep one = WeightedRep::unit(sig);

  SUBCASE("zero maps to zero, round-trip is identity") {
    for (int trial = 0; trial < 10; ++trial) {
      WeightedRep y = random_rep(sig, {{0, 1}, {-1, 1}}, rng);
      WeightedRep x = random_rep(sig, {{-2, 1}, {-3, 1}}, rng);
      ExtClass e = random_class(y, x, rng);
      ExtClass te = transfer_unit(e);
      CHECK(transfer_unit_inverse(te, y, x) == e);
      CHECK(te.is_split() == e.is_split());

      ExtClass zero(y, x, std::vector<Matrix>(2, Matrix(Field::rationals(), x.total_dim(),
                                                        y.total_dim())));
      CHECK(transfer_unit(zero).is_split());
      // additivity
      ExtClass e2 = random_class(y, x, rng);
      CHECK(transfer_unit(baer_sum(e, e2)) == baer_sum(transfer_unit(e), transfer_unit(e2)));
    }
  }
  SUBCASE("dimension equality on 50 random pairs") {
    for (int trial = 0; trial < 50; ++trial) {
      WeightedRep y = random_rep(sig, {{0, 1}, {-1, (int)(rng() % 2 + 1)}}, rng);
      WeightedRep x = random_rep(sig, {{-2, (int)(rng() % 2 + 1)}, {-3, 1}}, rng);
      CHECK(ext1_space(y, x).dim ==
            ext1_space(WeightedRep::unit(sig), internal_hom(y, x)).dim);
    }
  }
}

TEST_CASE("Ext^1 is biadditive") {
  std::mt19937_64 rng(17);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
  for (int trial = 0; trial < 10; ++trial) {
    WeightedRep m1 = random_rep(sig, {{0, 1}}, rng);
    WeightedRep m2 = random_rep(sig, {{0, 2}, {-1, 1}}, rng);
    WeightedRep n = random_rep(sig, {{-2, 1}, {-1, 1}}, rng);
    auto sum = direct_sum({m1, m2});
    CHECK(ext1_space(sum.sum, n).dim == ext1_space(m1, n).dim + ext1_space(m2, n).dim);
  }
}

TEST_CASE("transfer_unit is natural in the by-object") {
  std::mt19937_64 rng(19);
  auto sig = make_sig(Field::rationals(), {{"u", -1}});
  for (int trial = 0; trial < 10; ++trial) {
    WeightedRep y = random_rep(sig, {{0, 1}}, rng);
    WeightedRep x = random_rep(sig, {{-1, 2}}, rng);
    ExtClass e = random_class(y, x, rng);
    Subspace fs = hom_space(x, x);
    REQUIRE(fs.dim() > 0);
    RepMorphism f{x, x, unflatten(x, x, fs.basis().row(rng() % fs.dim()))};
    // Hom(id, f): postcomposition on the internal hom.
    WeightedRep h = internal_hom(y, x);
    Matrix hf(Field::rationals(), h.total_dim(), h.total_dim());
    for (const auto& d : h.degrees()) {
      for (int c = 0; c < h.dim_at(d); ++c) {
        Matrix basis_vec(Field::rationals(), h.total_dim(), 1);
        basis_vec.at(h.offset_of(d) + c, 0) = Scalar(Field::rationals(), 1);
        Matrix as_map = ihom_matrix_of(y, x, basis_vec, d);
        hf.set_block(0, h.offset_of(d) + c, ihom_vector_of(y, x, f.matrix * as_map, d));
      }
    }
    RepMorphism hom_id_f{h, h, hf};
    validate_morphism(hom_id_f);
    CHECK(transfer_unit(pushforward(e, f)) == pushforward(transfer_unit(e), hom_id_f));
  }
}

TEST_CASE("sequence-level pullback, pushforward and Baer sum match cocycle arithmetic") {
  std::mt19937_64 rng(23);
  auto sig = make_sig(Field::rationals(), {{"u", -1}, {"v", -2}});
  for (int trial = 0; trial < 8; ++trial) {
    WeightedRep m = random_rep(sig, {{0, 1}, {-1, 1}}, rng);
    WeightedRep n = random_rep(sig, {{-2, 1}, {-3, 1}}, rng);
    ExtClass e1 = random_class(m, n, rng);
    ExtClass e2 = random_class(m, n, rng);
    auto s1 = realize(e1);
    auto s2 = realize(e2);
    CHECK(class_of(baer_sum_seq(s1, s2)) == baer_sum(e1, e2));

    WeightedRep m2 = random_rep(sig, {{0, 1}}, rng);
    Subspace gs = hom_space(m2, m);
    if (gs.dim()) {
      RepMorphism g{m2, m, unflatten(m2, m, gs.basis().row(0))};
      CHECK(class_of(pullback_seq(s1, g)) == pullback(e1, g));
    }
    Subspace fs = hom_space(n, n);
    if (fs.dim()) {
      RepMorphism f{n, n, unflatten(n, n, fs.basis().row(rng() % fs.dim()))};
      CHECK(class_of(pushforward_seq(s1, f)) == pushforward(e1, f));
    }
  }
}
