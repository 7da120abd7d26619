#include "panache/blended.hpp"

#include "panache/exactla.hpp"

namespace panache::blended {

using exactla::Field;
using repcat::GradedSubspace;
using repcat::VarSystem;
using repcat::direct_sum;
using repcat::validate_morphism;

namespace {

// Cocycle of a sequence with respect to the canonical degree-0 section.
std::vector<Matrix> raw_cocycle(const ExtensionSeq& s, Matrix* section_out = nullptr) {
  auto sec = exactla::solve(s.proj.matrix, Matrix::identity(s.mid.field(), s.quot.total_dim()));
  if (!sec) throw DomainError("sequence projection admits no section");
  std::vector<Matrix> phi;
  for (int t = 0; t < s.mid.signature()->num_generators(); ++t) {
    auto p = exactla::solve(s.incl.matrix, s.mid.op(t) * *sec - *sec * s.quot.op(t));
    if (!p) throw DomainError("sequence is not exact: cocycle extraction failed");
    phi.push_back(*p);
  }
  if (section_out) *section_out = *sec;
  return phi;
}

void check_square(const Matrix& a, const Matrix& b, const char* what) {
  if (a != b) throw DomainError(std::string("blend square does not commute: ") + what);
}

}  // namespace

void validate_blend(const Blend& b) {
  extmod::validate_sequence(b.l);
  extmod::validate_sequence(b.n);
  if (b.l.quot != b.n.sub) throw DomainError("blend interface object mismatch (A2)");
  extmod::validate_sequence({b.a1(), b.middle, b.n.mid, b.mid_incl, b.mid_proj});
  extmod::validate_sequence({b.l.mid, b.middle, b.a3(), b.col_incl, b.col_proj});
  check_square(b.col_incl.matrix * b.l.incl.matrix, b.mid_incl.matrix, "A1 corner");
  check_square(b.mid_proj.matrix * b.col_incl.matrix, b.n.incl.matrix * b.l.proj.matrix,
               "top right");
  check_square(b.n.proj.matrix * b.mid_proj.matrix, b.col_proj.matrix, "bottom");
}

bool same_frame(const Blend& b1, const Blend& b2) {
  auto seq_eq = [](const ExtensionSeq& a, const ExtensionSeq& b) {
    return a.sub == b.sub && a.mid == b.mid && a.quot == b.quot &&
           a.incl.matrix == b.incl.matrix && a.proj.matrix == b.proj.matrix;
  };
  return seq_eq(b1.l, b2.l) && seq_eq(b1.n, b2.n);
}

Blend make_blend(const ExtensionSeq& l, const ExtensionSeq& n) {
  if (l.quot != n.sub) throw DomainError("make_blend: l.quot must equal n.sub literally");
  const WeightedRep& a1 = l.sub;
  const WeightedRep& a2 = l.quot;
  const WeightedRep& a3 = n.quot;
  const Field& f = a1.field();

  Matrix sec_l(f, 0, 0), sec_n(f, 0, 0);
  std::vector<Matrix> phi_l = raw_cocycle(l, &sec_l);
  std::vector<Matrix> phi_n = raw_cocycle(n, &sec_n);

  auto parts = direct_sum({a1, a2, a3});
  const Matrix& i1 = parts.injections[0].matrix;
  const Matrix& i2 = parts.injections[1].matrix;
  const Matrix& i3 = parts.injections[2].matrix;
  const Matrix& p1 = parts.projections[0].matrix;
  const Matrix& p2 = parts.projections[1].matrix;
  const Matrix& p3 = parts.projections[2].matrix;

  std::vector<Matrix> ops;
  for (int t = 0; t < a1.signature()->num_generators(); ++t)
    ops.push_back(parts.sum.op(t) + i1 * phi_l[t] * p2 + i2 * phi_n[t] * p3);
  WeightedRep x(a1.signature(), parts.sum.support(), ops);

  // psi_l : A1 + A2 -> L via (a, c) |-> incl(a) + sec(c), in the canonical
  // degree-ordered coordinates of the pair sum.
  auto pair12 = direct_sum({a1, a2});
  Matrix psi_l = l.incl.matrix * pair12.projections[0].matrix +
                 sec_l * pair12.projections[1].matrix;
  auto psi_l_inv = exactla::inverse(psi_l);
  if (!psi_l_inv) throw DomainError("make_blend: splitting of l is singular (internal)");
  Matrix embed12 = i1 * pair12.projections[0].matrix + i2 * pair12.projections[1].matrix;
  Matrix col_incl = embed12 * *psi_l_inv;

  auto pair23 = direct_sum({a2, a3});
  Matrix psi_n = n.incl.matrix * pair23.projections[0].matrix +
                 sec_n * pair23.projections[1].matrix;
  Matrix collect23 = pair23.injections[0].matrix * p2 + pair23.injections[1].matrix * p3;
  Matrix mid_proj = psi_n * collect23;

  Blend out{l,
            n,
            x,
            {a1, x, i1},
            {x, n.mid, mid_proj},
            {l.mid, x, col_incl},
            {x, a3, p3}};
  validate_blend(out);
  return out;
}

namespace {

Blend translate_row(const ExtClass& e, const Blend& b) {
  const Field& f = b.middle.field();
  ExtensionSeq eseq = extmod::realize(e);

  // Pullback of e along omega = n.proj: P = {(x_E, nn) : proj_E x_E = omega nn}.
  auto pair_en = direct_sum({eseq.mid, b.n.mid});
  Matrix dp = eseq.proj.matrix * pair_en.projections[0].matrix -
              b.n.proj.matrix * pair_en.projections[1].matrix;
  auto pker = repcat::kernel_of({pair_en.sum, b.a3(), dp});
  auto P = repcat::sub_rep(pair_en.sum, pker);
  auto p_a1 = exactla::solve(P.incl.matrix,
                             pair_en.injections[0].matrix * eseq.incl.matrix);
  if (!p_a1) throw DomainError("translate: pullback inclusion failed (internal)");
  Matrix p_to_n = pair_en.projections[1].matrix * P.incl.matrix;

  // Baer sum of the second row with the pullback.
  auto pair_xp = direct_sum({b.middle, P.sub});
  Matrix ds = b.mid_proj.matrix * pair_xp.projections[0].matrix -
              p_to_n * pair_xp.projections[1].matrix;
  auto fker = repcat::kernel_of({pair_xp.sum, b.n.mid, ds});
  auto F = repcat::sub_rep(pair_xp.sum, fker);

  Matrix anti = pair_xp.injections[0].matrix * b.mid_incl.matrix -
                pair_xp.injections[1].matrix * *p_a1;
  auto anti_f = exactla::solve(F.incl.matrix, anti);
  if (!anti_f) throw DomainError("translate: antidiagonal escapes fiber product (internal)");
  GradedSubspace rel(F.sub);
  for (int j = 0; j < anti_f->cols(); ++j) rel.add_vector(anti_f->col(j).transpose());
  rel.stabilize();
  auto quo = repcat::quotient_rep(F.sub, rel);
  const Matrix& q = quo.proj.matrix;

  auto first = exactla::solve(F.incl.matrix, pair_xp.injections[0].matrix * b.mid_incl.matrix);
  if (!first) throw DomainError("translate: inclusion does not factor (internal)");
  Matrix x_incl = q * *first;
  auto x_proj = exactla::solve_left(
      q, b.mid_proj.matrix * pair_xp.projections[0].matrix * F.incl.matrix);
  if (!x_proj) throw DomainError("translate: projection does not descend (internal)");

  // Canonical map from L: l |-> [(col_incl l, (0, iota_N pi_L l))].
  auto pm = exactla::solve(P.incl.matrix,
                           pair_en.injections[1].matrix * b.n.incl.matrix * b.l.proj.matrix);
  if (!pm) throw DomainError("translate: canonical lift into pullback failed (internal)");
  Matrix pairvec = pair_xp.injections[0].matrix * b.col_incl.matrix +
                   pair_xp.injections[1].matrix * *pm;
  auto into_f = exactla::solve(F.incl.matrix, pairvec);
  if (!into_f) throw DomainError("translate: canonical L-map misses fiber product (internal)");
  Matrix col_incl = q * *into_f;
  Matrix col_proj = b.n.proj.matrix * *x_proj;

  Blend out{b.l,
            b.n,
            quo.quot,
            {b.a1(), quo.quot, x_incl},
            {quo.quot, b.n.mid, *x_proj},
            {b.l.mid, quo.quot, col_incl},
            {quo.quot, b.a3(), col_proj}};
  validate_blend(out);
  return out;
}

Blend translate_column(const ExtClass& e, const Blend& b) {
  const Field& f = b.middle.field();
  ExtensionSeq eseq = extmod::realize(e);

  // Pushout of e along A1 -> L: Q = (L + E) / {(incl_L a, -incl_E a)}.
  auto pair_le = direct_sum({b.l.mid, eseq.mid});
  GradedSubspace rel_q(pair_le.sum);
  Matrix relgen = pair_le.injections[0].matrix * b.l.incl.matrix -
                  pair_le.injections[1].matrix * eseq.incl.matrix;
  for (int j = 0; j < relgen.cols(); ++j) rel_q.add_vector(relgen.col(j).transpose());
  rel_q.stabilize();
  auto Q = repcat::quotient_rep(pair_le.sum, rel_q);
  Matrix l_to_q = Q.proj.matrix * pair_le.injections[0].matrix;
  auto q_to_a3 = exactla::solve_left(
      Q.proj.matrix, eseq.proj.matrix * pair_le.projections[1].matrix);
  if (!q_to_a3) throw DomainError("translate: pushout projection failed (internal)");

  // Baer sum of the middle column with the pushforward, in EXT(A3, L).
  auto pair_xq = direct_sum({b.middle, Q.quot});
  Matrix ds = b.col_proj.matrix * pair_xq.projections[0].matrix -
              *q_to_a3 * pair_xq.projections[1].matrix;
  auto fker = repcat::kernel_of({pair_xq.sum, b.a3(), ds});
  auto F = repcat::sub_rep(pair_xq.sum, fker);
  Matrix anti = pair_xq.injections[0].matrix * b.col_incl.matrix -
                pair_xq.injections[1].matrix * l_to_q;
  auto anti_f = exactla::solve(F.incl.matrix, anti);
  if (!anti_f) throw DomainError("translate: antidiagonal escapes fiber product (internal)");
  GradedSubspace rel(F.sub);
  for (int j = 0; j < anti_f->cols(); ++j) rel.add_vector(anti_f->col(j).transpose());
  rel.stabilize();
  auto quo = repcat::quotient_rep(F.sub, rel);
  const Matrix& q = quo.proj.matrix;

  auto first = exactla::solve(F.incl.matrix, pair_xq.injections[0].matrix * b.col_incl.matrix);
  if (!first) throw DomainError("translate: L-inclusion does not factor (internal)");
  Matrix col_incl = q * *first;
  auto col_proj = exactla::solve_left(
      q, b.col_proj.matrix * pair_xq.projections[0].matrix * F.incl.matrix);
  if (!col_proj) throw DomainError("translate: A3-projection does not descend (internal)");

  Matrix x_incl = col_incl * b.l.incl.matrix;
  // [(x, q)] |-> mid_proj(x) + g(q) with g([l, e]) = iota_N pi_L l.
  auto g = exactla::solve_left(
      Q.proj.matrix,
      b.n.incl.matrix * b.l.proj.matrix * pair_le.projections[0].matrix);
  if (!g) throw DomainError("translate: correction map does not descend (internal)");
  auto x_proj = exactla::solve_left(
      q, (b.mid_proj.matrix * pair_xq.projections[0].matrix +
          *g * pair_xq.projections[1].matrix) *
             F.incl.matrix);
  if (!x_proj) throw DomainError("translate: N-projection does not descend (internal)");

  Blend out{b.l,
            b.n,
            quo.quot,
            {b.a1(), quo.quot, x_incl},
            {quo.quot, b.n.mid, *x_proj},
            {b.l.mid, quo.quot, col_incl},
            {quo.quot, b.a3(), *col_proj}};
  validate_blend(out);
  return out;
}

}  // namespace

Blend translate(const ExtClass& e, const Blend& b, Construction c) {
  if (e.of() != b.a3() || e.by() != b.a1())
    throw DomainError("translate: class endpoints must be (A3, A1)");
  return c == Construction::row ? translate_row(e, b) : translate_column(e, b);
}

std::optional<RepMorphism> blend_equiv(const Blend& b1, const Blend& b2) {
  if (!same_frame(b1, b2)) throw DomainError("blend_equiv: mismatched frames");
  VarSystem sys(b1.middle.field());
  int F = sys.add_var(b1.middle, b2.middle, /*intertwine=*/true);
  sys.add_eq({{F, std::nullopt, b1.col_incl.matrix, false}}, b2.col_incl.matrix);
  sys.add_eq({{F, b2.mid_proj.matrix, std::nullopt, false}}, b1.mid_proj.matrix);
  auto sol = sys.solve();
  if (!sol.solvable) return std::nullopt;
  // Identity on L and N forces an isomorphism (five lemma).
  return RepMorphism{b1.middle, b2.middle, sol.particular[0]};
}

SecondRowReport second_row(const Blend& b) {
  SecondRowReport out{extmod::class_of({b.a1(), b.middle, b.n.mid, b.mid_incl, b.mid_proj}),
                      0, 0, false};
  out.hom_a2_a1_dim = repcat::hom_space(b.a2(), b.a1()).dim();
  ExtClass ncls = extmod::class_of(b.n);
  out.connecting_image_dim = extmod::connecting_image(ncls, b.a1()).dim();
  out.injective_on_classes = out.connecting_image_dim == 0;
  return out;
}

Subspace aut_blend(const Blend& b) {
  VarSystem sys(b.middle.field());
  int G = sys.add_var(b.middle, b.middle, /*intertwine=*/true);
  sys.add_eq_zero({{G, std::nullopt, b.col_incl.matrix, false}});
  sys.add_eq_zero({{G, b.mid_proj.matrix, std::nullopt, false}});
  auto sol = sys.solve();
  int n2 = b.middle.total_dim() * b.middle.total_dim();
  Matrix rows(b.middle.field(), 0, n2);
  for (const auto& elt : sol.kernel) rows = Matrix::vstack(rows, repcat::flatten(elt[0]));
  return Subspace::span(rows);
}

}  // namespace panache::blended

namespace panache::extmod {

blended::Blend yoneda_obstruction(const ExtClass& l, const ExtClass& n) {
  if (l.of() != n.by())
    throw DomainError("yoneda_obstruction: middle objects do not match");
  // Ext^2 vanishes in this model; the certifying witness is an actual blend.
  return blended::make_blend(realize(l), realize(n));
}

}  // namespace panache::extmod
