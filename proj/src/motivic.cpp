#include "panache/motivic.hpp"

#include <algorithm>
#include <set>

#include "panache/exactla.hpp"

namespace panache::motivic {

using exactla::Field;
using repcat::Scalar;

int w_minus_one_end_dim(const WeightedRep& x) {
  int total = 0;
  for (const auto& [p, dp] : x.support())
    for (const auto& [q, dq] : x.support())
      if (p < q) total += dp * dq;
  return total;
}

bool totally_nonsplit(const ExtClass& e) {
  ExtClass te = extmod::transfer_unit(e);
  const WeightedRep& h = te.by();
  if (!h.is_zero_object() && h.highest_degree() >= 0)
    throw DomainError("totally_nonsplit: Hom(of, by) has a weight >= 0");
  auto seq = extmod::realize(te);
  const WeightedRep& mid = seq.mid;
  // The unit summand is the unique degree-0 line of the middle object.
  if (mid.dim_at(0) != 1)
    throw DomainError("totally_nonsplit: lift of the unit is not unique (internal)");
  Matrix v(mid.field(), 1, mid.total_dim());
  v.at(0, mid.offset_of(0)) = Scalar::one(mid.field());
  auto gen = repcat::subobject_generated(mid, v);
  return gen.sub.total_dim() == mid.total_dim();
}

bool tns_genext(const GenExt& g) {
  for (const auto& e : g.entries()) {
    auto [m, n] = e;
    if (n - m < 2) continue;
    if (!totally_nonsplit(extmod::class_of(g.vertical_seq(m, n)))) return false;
    if (!totally_nonsplit(extmod::class_of(g.horizontal_seq(m, n)))) return false;
  }
  return true;
}

bool end_scalar_check(const ExtClass& e) {
  if (!e.of().field().is_rational())
    throw DomainError("end_scalar_check: requires characteristic 0");
  if (e.by().is_zero_object() || e.of().is_zero_object() ||
      e.by().highest_degree() >= e.of().lowest_degree())
    throw DomainError("end_scalar_check: by-weights must lie strictly below of-weights");
  auto seq = extmod::realize(e);
  return repcat::hom_space(seq.mid, seq.mid).dim() == 1;
}

LieSubalgebra u_radical(const WeightedRep& x) {
  repcat::validate_rep(x);
  const Field& f = x.field();
  const int n = x.total_dim();
  Matrix rows(f, 0, n * n);
  for (int t = 0; t < x.signature()->num_generators(); ++t)
    if (!x.op(t).is_zero()) rows = Matrix::vstack(rows, repcat::flatten(x.op(t)));
  Subspace span = Subspace::span(rows);

  bool grew = true;
  while (grew) {
    grew = false;
    const Matrix& basis = span.basis();
    Matrix extra(f, 0, n * n);
    for (int a = 0; a < span.dim(); ++a)
      for (int b = a + 1; b < span.dim(); ++b) {
        Matrix ma = repcat::unflatten(x, x, basis.row(a));
        Matrix mb = repcat::unflatten(x, x, basis.row(b));
        Matrix bracket = ma * mb - mb * ma;
        Matrix flat = repcat::flatten(bracket);
        if (!span.contains_vector(flat)) {
          extra = Matrix::vstack(extra, flat);
          grew = true;
        }
      }
    if (grew) span = span + Subspace::span(extra);
  }

  // Sanity: everything in the closure lowers degrees strictly.
  for (int r = 0; r < span.dim(); ++r) {
    Matrix m = repcat::unflatten(x, x, span.basis().row(r));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!m.at(i, j).is_zero() && x.degree_of_index(i) >= x.degree_of_index(j))
          throw DomainError("u_radical: closure left the degree-lowering part (internal)");
  }
  return {x, span, true};
}

bool is_maximal(const WeightedRep& x) {
  return u_radical(x).basis.dim() == w_minus_one_end_dim(x);
}

namespace {

bool graded_independent_weights(const std::vector<int>& w) {
  const int k = static_cast<int>(w.size());
  // Adjacent differences pairwise distinct and distinct from all non-adjacent
  // differences.
  std::vector<int> adjacent;
  for (int r = 0; r + 1 < k; ++r) adjacent.push_back(w[r] - w[r + 1]);
  std::set<int> adj_set(adjacent.begin(), adjacent.end());
  if (adj_set.size() != adjacent.size()) return false;
  for (int i = 0; i < k; ++i)
    for (int j = i + 2; j < k; ++j)
      if (adj_set.count(w[i] - w[j])) return false;
  return true;
}

// The definition-level test: the objects C_r and C_0 share no weight.
bool graded_independent_general(const std::vector<WeightedRep>& gr_pieces) {
  const int k = static_cast<int>(gr_pieces.size());
  std::vector<std::set<int>> supports;  // index 0 = C_0, r = C_r
  std::set<int> c0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 2; j < k; ++j) {
      WeightedRep h = repcat::internal_hom(gr_pieces[j], gr_pieces[i]);
      for (const auto& [d, dim] : h.support()) c0.insert(d);
    }
  supports.push_back(c0);
  for (int r = 0; r + 1 < k; ++r) {
    WeightedRep h = repcat::internal_hom(gr_pieces[r + 1], gr_pieces[r]);
    std::set<int> s;
    for (const auto& [d, dim] : h.support()) s.insert(d);
    supports.push_back(s);
  }
  for (size_t a = 0; a < supports.size(); ++a)
    for (size_t b = a + 1; b < supports.size(); ++b)
      for (int d : supports[a])
        if (supports[b].count(d)) return false;
  return true;
}

}  // namespace

bool graded_independent(const WeightedRep& x) {
  std::vector<WeightedRep> pieces;
  std::vector<int> w;
  for (const auto& [d, dim] : x.support()) {
    pieces.push_back(WeightedRep::pure(x.signature(), d, dim));
    w.push_back(d);
  }
  bool general = graded_independent_general(pieces);
  bool reduced = graded_independent_weights(w);
  if (general != reduced)
    throw DomainError("graded_independent: reduction disagrees with the general test (internal)");
  return general;
}

bool graded_independent(const GradedFrame& frame) {
  bool general = graded_independent_general(frame.pieces());
  bool reduced = graded_independent_weights(frame.weights());
  if (general != reduced)
    throw DomainError("graded_independent: reduction disagrees with the general test (internal)");
  return general;
}

ExtClass adjacent_extension(const WeightedRep& x, int r) {
  std::vector<int> w = x.degrees();
  const int k = static_cast<int>(w.size());
  if (r < 1 || r >= k) throw DomainError("adjacent_extension: index out of range");
  const Field& f = x.field();
  // Slice of basis indices at the two adjacent weights.
  int from = x.offset_of(w[r - 1]);
  int to = x.offset_of(w[r]) + x.dim_at(w[r]);
  std::map<int, int> support{{w[r - 1], x.dim_at(w[r - 1])}, {w[r], x.dim_at(w[r])}};
  std::vector<Matrix> ops;
  for (int t = 0; t < x.signature()->num_generators(); ++t)
    ops.push_back(x.op(t).submatrix(from, from, to - from, to - from));
  WeightedRep mid(x.signature(), support, ops);
  WeightedRep sub = WeightedRep::pure(x.signature(), w[r - 1], x.dim_at(w[r - 1]));
  WeightedRep quot = WeightedRep::pure(x.signature(), w[r], x.dim_at(w[r]));
  Matrix incl(f, mid.total_dim(), sub.total_dim());
  for (int j = 0; j < sub.total_dim(); ++j) incl.at(j, j) = Scalar::one(f);
  Matrix proj(f, quot.total_dim(), mid.total_dim());
  for (int j = 0; j < quot.total_dim(); ++j)
    proj.at(j, sub.total_dim() + j) = Scalar::one(f);
  return extmod::class_of({sub, mid, quot, {sub, mid, incl}, {mid, quot, proj}});
}

MaximalityReport maximality_criterion(const WeightedRep& x) {
  if (!x.field().is_rational())
    throw DomainError("maximality_criterion: requires characteristic 0");
  if (!graded_independent(x))
    throw DomainError("maximality_criterion: object is not graded-independent");
  MaximalityReport out;
  const int k = static_cast<int>(x.support().size());
  bool all = true;
  for (int r = 1; r < k; ++r) {
    bool tns = totally_nonsplit(adjacent_extension(x, r));
    out.adjacent_tns.push_back(tns);
    all = all && tns;
  }
  out.radical_route = is_maximal(x);
  out.maximal = all;
  if (out.maximal != out.radical_route)
    throw DomainError("maximality_criterion: the two routes disagree (internal)");
  return out;
}

std::optional<ExtClass> find_tns_class(const WeightedRep& of, const WeightedRep& by,
                                       std::mt19937_64& rng) {
  extmod::ExtSpace sp(of, by);
  const Field& f = of.field();
  auto candidate = [&](const Matrix& coords) -> std::optional<ExtClass> {
    ExtClass e = sp.class_from_coords(coords);
    if (totally_nonsplit(e)) return e;
    return std::nullopt;
  };
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix coords(f, 1, sp.coord_count());
    for (int c = 0; c < sp.coord_count(); ++c) {
      long bound = f.is_rational() ? 9 : f.characteristic() - 1;
      std::uniform_int_distribution<long> d(f.is_rational() ? -bound : 0, bound);
      coords.at(0, c) = Scalar(f, d(rng));
    }
    if (auto e = candidate(coords)) return e;
  }
  const long radius = f.is_rational() ? 2 : f.characteristic() - 1;
  const long base = f.is_rational() ? 2 * radius + 1 : radius + 1;
  double count = 1;
  for (int c = 0; c < sp.coord_count(); ++c) count *= static_cast<double>(base);
  if (count > 2e5) count = 2e5;
  for (long code = 0; code < static_cast<long>(count); ++code) {
    long cc = code;
    Matrix coords(f, 1, sp.coord_count());
    for (int c = 0; c < sp.coord_count(); ++c) {
      long digit = cc % base;
      cc /= base;
      coords.at(0, c) = Scalar(f, f.is_rational() ? digit - radius : digit);
    }
    if (auto e = candidate(coords)) return e;
  }
  return std::nullopt;
}

StarLevel1 classify_star_level1(const GradedFrame& frame, std::mt19937_64& rng) {
  if (!graded_independent(frame))
    throw DomainError("classify_star: frame is not graded-independent");
  if (!frame.signature()->field().is_rational())
    throw DomainError("classify_star: requires characteristic 0");
  StarLevel1 out;
  out.nonempty = true;
  for (int r = 1; r < frame.k(); ++r) {
    StarFactor factor;
    factor.r = r;
    auto ext = extmod::ext1_space(frame.piece(r + 1), frame.piece(r));
    factor.ext_dim = ext.dim;
    factor.basis = ext.basis;
    factor.tns_class_exists = find_tns_class(frame.piece(r + 1), frame.piece(r), rng).has_value();
    out.nonempty = out.nonempty && factor.tns_class_exists;
    out.factors.push_back(std::move(factor));
  }
  return out;
}

StarFiber classify_star_fiber(const GenExt& chosen) {
  if (!graded_independent(chosen.frame()))
    throw DomainError("classify_star: frame is not graded-independent");
  if (!chosen.frame().signature()->field().is_rational())
    throw DomainError("classify_star: requires characteristic 0");
  if (!tns_genext(chosen))
    throw DomainError("classify_star: the chosen member is not totally nonsplit");
  StarFiber out{genext::fiber_classes(chosen), {}, true, false};
  for (const auto& g : out.fiber.groups()) out.group_dims.push_back(g.dim());
  // Prop-4.2.3-style triviality: every automorphism of the base extends, so
  // the stabilizer of a member's class is the whole group. Computed on the
  // standardized representative, which the lifts literally truncate to.
  GenExt base_std = genext::denormalize(out.fiber.base_blocks());
  auto info = genext::gamma_stabilizer(base_std, out.fiber.lift_zero());
  out.gamma_trivial = info.stabilizer == info.aut_base;
  return out;
}

}  // namespace panache::motivic
