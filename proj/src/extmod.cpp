#include "panache/extmod.hpp"

#include <algorithm>

#include "panache/exactla.hpp"

namespace panache::extmod {

using exactla::Field;
using repcat::GradedSubspace;
using repcat::direct_sum;
using repcat::internal_hom;
using repcat::is_homogeneous;
using repcat::validate_morphism;

namespace {

void check_endpoints(const ExtClass& a, const ExtClass& b) {
  if (a.of() != b.of() || a.by() != b.by())
    throw DomainError("extension classes have mismatched endpoints");
}

}  // namespace

ExtSpace::ExtSpace(WeightedRep of, WeightedRep by) : of_(std::move(of)), by_(std::move(by)) {
  if (*of_.signature() != *by_.signature()) throw DomainError("ext space: signature mismatch");
  const auto& sig = *of_.signature();
  const Field& f = of_.field();

  layout_.resize(sig.num_generators());
  for (int t = 0; t < sig.num_generators(); ++t) {
    const int dt = sig.degree_of(t);
    for (int i = 0; i < by_.total_dim(); ++i)
      for (int j = 0; j < of_.total_dim(); ++j)
        if (by_.degree_of_index(i) == of_.degree_of_index(j) + dt)
          layout_[t].emplace_back(i, j);
    coord_count_ += static_cast<int>(layout_[t].size());
  }

  // Coboundaries: h runs over degree-0 maps of -> by.
  std::vector<std::pair<int, int>> h_entries;
  for (int i = 0; i < by_.total_dim(); ++i)
    for (int j = 0; j < of_.total_dim(); ++j)
      if (by_.degree_of_index(i) == of_.degree_of_index(j)) h_entries.emplace_back(i, j);
  Matrix rows(f, 0, coord_count_);
  for (const auto& [hi, hj] : h_entries) {
    Matrix h(f, by_.total_dim(), of_.total_dim());
    h.at(hi, hj) = Scalar::one(f);
    std::vector<Matrix> db;
    for (int t = 0; t < sig.num_generators(); ++t) db.push_back(by_.op(t) * h - h * of_.op(t));
    rows = Matrix::vstack(rows, coords_of(db));
  }
  coboundaries_ = Subspace::span(rows);

  dim_ = coord_count_ - coboundaries_.dim();
  std::vector<bool> is_pivot(coord_count_, false);
  for (int c : coboundaries_.pivot_cols()) is_pivot[c] = true;
  for (int c = 0; c < coord_count_; ++c)
    if (!is_pivot[c]) free_coords_.push_back(c);
  for (int c : free_coords_) {
    Matrix v(f, 1, coord_count_);
    v.at(0, c) = Scalar::one(f);
    basis_.push_back(class_from_coords(v));
  }
}

Matrix ExtSpace::coords_of(const std::vector<Matrix>& cocycle) const {
  const Field& f = of_.field();
  if (cocycle.size() != layout_.size()) throw DomainError("cocycle arity mismatch");
  Matrix v(f, 1, coord_count_);
  int off = 0;
  for (size_t t = 0; t < layout_.size(); ++t) {
    if (!is_homogeneous(of_, by_, cocycle[t], of_.signature()->degree_of(static_cast<int>(t))))
      throw DomainError("cocycle matrix is not homogeneous of the generator degree");
    for (const auto& [i, j] : layout_[t]) v.at(0, off++) = cocycle[t].at(i, j);
  }
  return v;
}

Matrix ExtSpace::reduce(const Matrix& coords) const {
  return coboundaries_.reduce_vector(coords);
}

std::vector<Matrix> ExtSpace::cocycle_from_coords(const Matrix& coords) const {
  const Field& f = of_.field();
  std::vector<Matrix> out;
  int off = 0;
  for (size_t t = 0; t < layout_.size(); ++t) {
    Matrix m(f, by_.total_dim(), of_.total_dim());
    for (const auto& [i, j] : layout_[t]) m.at(i, j) = coords.at(0, off++);
    out.push_back(std::move(m));
  }
  return out;
}

ExtClass ExtSpace::class_from_coords(const Matrix& coords) const {
  return ExtClass(ExtClass::Prereduced{}, of_, by_, cocycle_from_coords(coords),
                  cocycle_from_coords(reduce(coords)));
}

Matrix ExtSpace::class_coordinates(const ExtClass& e) const {
  if (e.of() != of_ || e.by() != by_) throw DomainError("class belongs to a different ext space");
  Matrix red = reduce(coords_of(e.cocycle()));
  Matrix out(of_.field(), 1, dim_);
  for (int k = 0; k < dim_; ++k) out.at(0, k) = red.at(0, free_coords_[k]);
  return out;
}

ExtClass::ExtClass(WeightedRep of, WeightedRep by, std::vector<Matrix> cocycle)
    : of_(std::move(of)), by_(std::move(by)), cocycle_(std::move(cocycle)) {
  ExtSpace space(of_, by_);
  reduced_ = space.cocycle_from_coords(space.reduce(space.coords_of(cocycle_)));
}

bool ExtClass::is_split() const {
  return std::all_of(reduced_.begin(), reduced_.end(),
                     [](const Matrix& m) { return m.is_zero(); });
}

bool operator==(const ExtClass& a, const ExtClass& b) {
  return a.of_ == b.of_ && a.by_ == b.by_ && a.reduced_ == b.reduced_;
}

Ext1Result ext1_space(const WeightedRep& m, const WeightedRep& n) {
  ExtSpace sp(m, n);
  return {sp.dim(), sp.basis()};
}

void validate_sequence(const ExtensionSeq& s) {
  validate_morphism(s.incl);
  validate_morphism(s.proj);
  if (s.incl.source != s.sub || s.incl.target != s.mid || s.proj.source != s.mid ||
      s.proj.target != s.quot)
    throw DomainError("sequence arrows have wrong endpoints");
  if (s.sub.total_dim() + s.quot.total_dim() != s.mid.total_dim())
    throw DomainError("sequence dimensions are not additive");
  if (exactla::rref(s.incl.matrix).rank != s.sub.total_dim())
    throw DomainError("sequence inclusion is not injective");
  if (exactla::rref(s.proj.matrix).rank != s.quot.total_dim())
    throw DomainError("sequence projection is not surjective");
  if (!(s.proj.matrix * s.incl.matrix).is_zero())
    throw DomainError("sequence composite is nonzero");
}

ExtensionSeq realize(const ExtClass& e) {
  auto parts = direct_sum({e.by(), e.of()});
  const Matrix& ib = parts.injections[0].matrix;
  const Matrix& po = parts.projections[1].matrix;
  std::vector<Matrix> ops;
  for (int t = 0; t < e.of().signature()->num_generators(); ++t)
    ops.push_back(parts.sum.op(t) + ib * e.reduced()[t] * po);
  WeightedRep mid(e.of().signature(), parts.sum.support(), ops);
  RepMorphism incl{e.by(), mid, ib};
  RepMorphism proj{mid, e.of(), po};
  return {e.by(), mid, e.of(), incl, proj};
}

ExtClass class_of(const ExtensionSeq& s) {
  validate_sequence(s);
  // Degree-0 linear splitting of the projection; the canonical solve keeps it
  // homogeneous because rows of different degrees touch disjoint unknowns.
  auto sec = exactla::solve(s.proj.matrix,
                            Matrix::identity(s.mid.field(), s.quot.total_dim()));
  if (!sec) throw DomainError("projection admits no section (internal)");
  std::vector<Matrix> cocycle;
  for (int t = 0; t < s.mid.signature()->num_generators(); ++t) {
    Matrix num = s.mid.op(t) * *sec - *sec * s.quot.op(t);
    auto phi = exactla::solve(s.incl.matrix, num);
    if (!phi) throw DomainError("cocycle extraction failed: sequence is not exact");
    cocycle.push_back(*phi);
  }
  return ExtClass(s.quot, s.sub, cocycle);
}

ExtClass baer_sum(const ExtClass& e1, const ExtClass& e2) {
  check_endpoints(e1, e2);
  std::vector<Matrix> sum;
  for (size_t t = 0; t < e1.cocycle().size(); ++t)
    sum.push_back(e1.reduced()[t] + e2.reduced()[t]);
  return ExtClass(e1.of(), e1.by(), sum);
}

ExtClass negate(const ExtClass& e) {
  std::vector<Matrix> neg;
  for (const auto& m : e.reduced()) neg.push_back(-m);
  return ExtClass(e.of(), e.by(), neg);
}

ExtClass pushforward(const ExtClass& e, const RepMorphism& f) {
  validate_morphism(f);
  if (f.source != e.by()) throw DomainError("pushforward: f must start at the by-object");
  std::vector<Matrix> cocycle;
  for (const auto& m : e.cocycle()) cocycle.push_back(f.matrix * m);
  return ExtClass(e.of(), f.target, cocycle);
}

ExtClass pullback(const ExtClass& e, const RepMorphism& g) {
  validate_morphism(g);
  if (g.target != e.of()) throw DomainError("pullback: g must land in the of-object");
  std::vector<Matrix> cocycle;
  for (const auto& m : e.cocycle()) cocycle.push_back(m * g.matrix);
  return ExtClass(g.source, e.by(), cocycle);
}

bool is_split(const ExtClass& e) { return e.is_split(); }

ExtClass transfer_unit(const ExtClass& e) {
  WeightedRep h = internal_hom(e.of(), e.by());
  WeightedRep one = WeightedRep::unit(e.of().signature());
  const auto& sig = *e.of().signature();
  std::vector<Matrix> cocycle;
  for (int t = 0; t < sig.num_generators(); ++t)
    cocycle.push_back(repcat::ihom_vector_of(e.of(), e.by(), e.cocycle()[t], sig.degree_of(t)));
  return ExtClass(one, h, cocycle);
}

ExtClass transfer_unit_inverse(const ExtClass& e, const WeightedRep& of, const WeightedRep& by) {
  WeightedRep h = internal_hom(of, by);
  if (e.by() != h || e.of() != WeightedRep::unit(of.signature()))
    throw DomainError("transfer_unit_inverse: class does not live on (1, Hom(of, by))");
  const auto& sig = *of.signature();
  std::vector<Matrix> cocycle;
  for (int t = 0; t < sig.num_generators(); ++t)
    cocycle.push_back(repcat::ihom_matrix_of(of, by, e.cocycle()[t], sig.degree_of(t)));
  return ExtClass(of, by, cocycle);
}

ExtensionSeq pullback_seq(const ExtensionSeq& s, const RepMorphism& g) {
  validate_morphism(g);
  if (g.target != s.quot) throw DomainError("pullback_seq: g must land in the quotient");
  // Fiber product inside mid + Q': kernel of (proj, -g).
  auto parts = direct_sum({s.mid, g.source});
  Matrix diff = s.proj.matrix * parts.projections[0].matrix -
                g.matrix * parts.projections[1].matrix;
  RepMorphism d{parts.sum, s.quot, diff};
  GradedSubspace ker = repcat::kernel_of(d);
  auto fib = repcat::sub_rep(parts.sum, ker);

  // sub -> P: a |-> (incl a, 0).
  auto sub_in = exactla::solve(fib.incl.matrix, parts.injections[0].matrix * s.incl.matrix);
  if (!sub_in) throw DomainError("pullback_seq: inclusion does not factor (internal)");
  // P -> Q': second coordinate.
  Matrix proj_mat = parts.projections[1].matrix * fib.incl.matrix;
  ExtensionSeq out{s.sub, fib.sub, g.source,
                   {s.sub, fib.sub, *sub_in},
                   {fib.sub, g.source, proj_mat}};
  validate_sequence(out);
  return out;
}

ExtensionSeq pushforward_seq(const ExtensionSeq& s, const RepMorphism& f) {
  validate_morphism(f);
  if (f.source != s.sub) throw DomainError("pushforward_seq: f must start at the sub");
  // Pushout (K' + mid) / {(f a, -incl a)}.
  auto parts = direct_sum({f.target, s.mid});
  GradedSubspace rel(parts.sum);
  Matrix gen = parts.injections[0].matrix * f.matrix - parts.injections[1].matrix * s.incl.matrix;
  for (int j = 0; j < gen.cols(); ++j) rel.add_vector(gen.col(j).transpose());
  rel.stabilize();
  auto quo = repcat::quotient_rep(parts.sum, rel);

  Matrix incl_mat = quo.proj.matrix * parts.injections[0].matrix;
  // M' -> quot: [k, m] |-> proj(m); solve through the quotient surjection.
  auto proj_mat = exactla::solve_left(
      quo.proj.matrix, s.proj.matrix * parts.projections[1].matrix);
  if (!proj_mat) throw DomainError("pushforward_seq: projection does not descend (internal)");
  ExtensionSeq out{f.target, quo.quot, s.quot,
                   {f.target, quo.quot, incl_mat},
                   {quo.quot, s.quot, *proj_mat}};
  validate_sequence(out);
  return out;
}

ExtensionSeq baer_sum_seq(const ExtensionSeq& s1, const ExtensionSeq& s2) {
  if (s1.sub != s2.sub || s1.quot != s2.quot)
    throw DomainError("baer_sum_seq: sequences must share sub and quot");
  // Fiber product over quot, then quotient by the antidiagonal copy of sub.
  auto parts = direct_sum({s1.mid, s2.mid});
  Matrix diff = s1.proj.matrix * parts.projections[0].matrix -
                s2.proj.matrix * parts.projections[1].matrix;
  GradedSubspace ker = repcat::kernel_of({parts.sum, s1.quot, diff});
  auto fib = repcat::sub_rep(parts.sum, ker);

  Matrix anti = parts.injections[0].matrix * s1.incl.matrix -
                parts.injections[1].matrix * s2.incl.matrix;
  auto anti_in_fib = exactla::solve(fib.incl.matrix, anti);
  if (!anti_in_fib) throw DomainError("baer_sum_seq: antidiagonal escapes the fiber product");
  GradedSubspace rel(fib.sub);
  for (int j = 0; j < anti_in_fib->cols(); ++j) rel.add_vector(anti_in_fib->col(j).transpose());
  rel.stabilize();
  auto quo = repcat::quotient_rep(fib.sub, rel);

  // sub -> middle: a |-> [(incl1 a, 0)].
  auto first = exactla::solve(fib.incl.matrix, parts.injections[0].matrix * s1.incl.matrix);
  if (!first) throw DomainError("baer_sum_seq: inclusion does not factor (internal)");
  Matrix incl_mat = quo.proj.matrix * *first;
  // middle -> quot: [(x, y)] |-> proj1 x.
  auto proj_mat = exactla::solve_left(
      quo.proj.matrix, s1.proj.matrix * parts.projections[0].matrix * fib.incl.matrix);
  if (!proj_mat) throw DomainError("baer_sum_seq: projection does not descend (internal)");
  ExtensionSeq out{s1.sub, quo.quot, s1.quot,
                   {s1.sub, quo.quot, incl_mat},
                   {quo.quot, s1.quot, *proj_mat}};
  validate_sequence(out);
  return out;
}

Subspace connecting_image(const ExtClass& n, const WeightedRep& a1) {
  // h in Hom(A2, A1) maps to the class of h_* n in Ext^1(A3, A1).
  ExtSpace target(n.of(), a1);
  Subspace homs = repcat::hom_space(n.by(), a1);
  Matrix rows(a1.field(), 0, target.coord_count());
  for (int r = 0; r < homs.dim(); ++r) {
    RepMorphism h{n.by(), a1, repcat::unflatten(n.by(), a1, homs.basis().row(r))};
    ExtClass image = pushforward(n, h);
    rows = Matrix::vstack(rows, target.reduce(target.coords_of(image.cocycle())));
  }
  return Subspace::span(rows);
}

}  // namespace panache::extmod
