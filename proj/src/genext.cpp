#include "panache/genext.hpp"

#include <algorithm>
#include <sstream>

#include "panache/exactla.hpp"

namespace panache::genext {

using exactla::Field;
using repcat::GradedSubspace;
using repcat::Scalar;
using repcat::VarSystem;
using repcat::direct_sum;
using repcat::validate_morphism;

namespace {

std::string entry_str(int m, int n) {
  return "(" + std::to_string(m) + "," + std::to_string(n) + ")";
}

}  // namespace

GradedFrame::GradedFrame(std::vector<WeightedRep> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.size() < 2) throw DomainError("frame needs k >= 2 pieces");
  for (size_t r = 0; r + 1 < pieces_.size(); ++r)
    if (*pieces_[r].signature() != *pieces_[r + 1].signature())
      throw DomainError("frame pieces have mismatched signatures");
  int prev = 0;
  for (size_t r = 0; r < pieces_.size(); ++r) {
    const WeightedRep& p = pieces_[r];
    if (p.is_zero_object() || !p.is_pure())
      throw DomainError("frame piece " + std::to_string(r + 1) + " must be nonzero pure");
    for (int t = 0; t < p.signature()->num_generators(); ++t)
      if (!p.op(t).is_zero())
        throw DomainError("frame piece " + std::to_string(r + 1) + " must have zero operators");
    int w = p.lowest_degree();
    if (r > 0 && w <= prev) throw DomainError("frame weights must strictly increase");
    prev = w;
  }
}

const WeightedRep& GradedFrame::piece(int r) const {
  if (r < 1 || r > k()) throw DomainError("frame index out of range");
  return pieces_[r - 1];
}

std::vector<int> GradedFrame::weights() const {
  std::vector<int> w;
  for (int r = 1; r <= k(); ++r) w.push_back(weight(r));
  return w;
}

bool operator==(const GradedFrame& a, const GradedFrame& b) { return a.pieces_ == b.pieces_; }

GenExt::GenExt(GradedFrame frame, int level, std::map<Entry, WeightedRep> objects,
               std::map<Entry, Matrix> vert, std::map<Entry, Matrix> horiz)
    : frame_(std::move(frame)), level_(level), objects_(std::move(objects)),
      vert_(std::move(vert)), horiz_(std::move(horiz)) {
  if (level_ < 1 || level_ > frame_.k() - 1) throw DomainError("level out of range");
  for (int r = 1; r <= frame_.k(); ++r) {
    auto it = objects_.find({r - 1, r});
    if (it == objects_.end())
      objects_.emplace(Entry{r - 1, r}, frame_.piece(r));
    else if (it->second != frame_.piece(r))
      throw DomainError("entry " + entry_str(r - 1, r) + " must be A_" + std::to_string(r) +
                        " literally");
  }
  for (const Entry& e : entries()) {
    if (!objects_.count(e)) throw DomainError("missing object at " + entry_str(e.first, e.second));
    if (e.second - e.first >= 2) {
      if (!vert_.count(e)) throw DomainError("missing vertical arrow at " +
                                             entry_str(e.first, e.second));
      if (!horiz_.count(e)) throw DomainError("missing horizontal arrow at " +
                                              entry_str(e.first, e.second));
    }
  }
}

bool GenExt::has_entry(int m, int n) const {
  return 0 <= m && m < n && n <= k() && n - m <= level_ + 1;
}

std::vector<Entry> GenExt::entries() const {
  std::vector<Entry> out;
  for (int d = 1; d <= level_ + 1; ++d)
    for (int m = 0; m + d <= k(); ++m) out.push_back({m, m + d});
  return out;
}

std::vector<Entry> GenExt::diagonal(int dist) const {
  std::vector<Entry> out;
  for (int m = 0; m + dist <= k(); ++m) out.push_back({m, m + dist});
  return out;
}

const WeightedRep& GenExt::object(int m, int n) const {
  auto it = objects_.find({m, n});
  if (it == objects_.end()) throw DomainError("no object at " + entry_str(m, n));
  return it->second;
}

const Matrix& GenExt::vert(int m, int n) const {
  auto it = vert_.find({m, n});
  if (it == vert_.end()) throw DomainError("no vertical arrow at " + entry_str(m, n));
  return it->second;
}

const Matrix& GenExt::horiz(int m, int n) const {
  auto it = horiz_.find({m, n});
  if (it == horiz_.end()) throw DomainError("no horizontal arrow at " + entry_str(m, n));
  return it->second;
}

RepMorphism GenExt::vert_morphism(int m, int n) const {
  return {object(m, n - 1), object(m, n), vert(m, n)};
}

RepMorphism GenExt::horiz_morphism(int m, int n) const {
  return {object(m, n), object(m + 1, n), horiz(m, n)};
}

Matrix GenExt::vert_composite(int m, int r, int n) const {
  Matrix acc = Matrix::identity(frame_.signature()->field(), object(m, r).total_dim());
  for (int s = r + 1; s <= n; ++s) acc = vert(m, s) * acc;
  return acc;
}

Matrix GenExt::horiz_composite(int m, int r, int n) const {
  Matrix acc = Matrix::identity(frame_.signature()->field(), object(m, n).total_dim());
  for (int s = m; s < r; ++s) acc = horiz(s, n) * acc;
  return acc;
}

ExtensionSeq GenExt::vertical_seq(int m, int n) const {
  return {object(m, n - 1), object(m, n), frame_.piece(n), vert_morphism(m, n),
          {object(m, n), frame_.piece(n), horiz_composite(m, n - 1, n)}};
}

ExtensionSeq GenExt::horizontal_seq(int m, int n) const {
  return {frame_.piece(m + 1), object(m, n), object(m + 1, n),
          {frame_.piece(m + 1), object(m, n), vert_composite(m, m + 1, n)},
          horiz_morphism(m, n)};
}

Blend GenExt::blend_at(int r) const {
  const int l = level_;
  if (r < 1 || r + l > k()) throw DomainError("blend_at: index out of range");
  Blend b{horizontal_seq(r - 1, r + l - 1),
          vertical_seq(r, r + l),
          object(r - 1, r + l),
          {frame_.piece(r), object(r - 1, r + l), vert_composite(r - 1, r, r + l)},
          horiz_morphism(r - 1, r + l),
          vert_morphism(r - 1, r + l),
          {object(r - 1, r + l), frame_.piece(r + l), horiz_composite(r - 1, r + l - 1, r + l)}};
  return b;
}

bool operator==(const GenExt& a, const GenExt& b) {
  return a.frame_ == b.frame_ && a.level_ == b.level_ && a.objects_ == b.objects_ &&
         a.vert_ == b.vert_ && a.horiz_ == b.horiz_;
}

void validate_genext(const GenExt& g) {
  for (const Entry& e : g.entries()) {
    auto [m, n] = e;
    try {
      repcat::validate_rep(g.object(m, n));
      if (n - m >= 2) {
        validate_morphism(g.vert_morphism(m, n));
        validate_morphism(g.horiz_morphism(m, n));
      }
    } catch (const DomainError& err) {
      throw DomainError("entry " + entry_str(m, n) + ": " + err.what());
    }
  }
  // Axiom (i): commuting squares.
  for (const Entry& e : g.entries()) {
    auto [m, n] = e;
    if (n - m < 3) continue;
    if (g.horiz(m, n) * g.vert(m, n) != g.vert(m + 1, n) * g.horiz(m, n - 1))
      throw DomainError("square at " + entry_str(m, n) + " does not commute");
  }
  // Axiom (ii): exact sequences 0 -> X_{m,n-1} -> X_{m,n} -> A_n -> 0.
  for (const Entry& e : g.entries()) {
    auto [m, n] = e;
    if (n - m < 2) continue;
    try {
      extmod::validate_sequence(g.vertical_seq(m, n));
    } catch (const DomainError& err) {
      throw DomainError("vertical sequence at " + entry_str(m, n) + " is not exact: " +
                        err.what());
    }
  }
  // Derived exactness of 0 -> A_{m+1} -> X_{m,n} -> X_{m+1,n} -> 0.
  for (const Entry& e : g.entries()) {
    auto [m, n] = e;
    if (n - m < 2) continue;
    try {
      extmod::validate_sequence(g.horizontal_seq(m, n));
    } catch (const DomainError& err) {
      throw DomainError("horizontal sequence at " + entry_str(m, n) + " is not exact: " +
                        err.what());
    }
  }
}

std::string BlockForm::key() const {
  std::ostringstream os;
  os << "level=" << level << ";";
  for (size_t t = 0; t < blocks.size(); ++t)
    for (const auto& [e, mat] : blocks[t])
      os << t << "@" << e.first << "," << e.second << ":" << mat.to_string() << ";";
  return os.str();
}

bool operator==(const BlockForm& a, const BlockForm& b) {
  return a.frame == b.frame && a.level == b.level && a.blocks == b.blocks;
}

BlockForm zero_block_form(const GradedFrame& frame, int level) {
  const Field& f = frame.signature()->field();
  BlockForm out{frame, level, {}};
  out.blocks.resize(frame.signature()->num_generators());
  for (int t = 0; t < frame.signature()->num_generators(); ++t)
    for (int j = 2; j <= frame.k(); ++j)
      for (int i = std::max(1, j - level); i < j; ++i)
        out.blocks[t][{i, j}] =
            Matrix(f, frame.piece(i).total_dim(), frame.piece(j).total_dim());
  return out;
}

GenExt denormalize(const BlockForm& b) {
  const auto& frame = b.frame;
  const Field& f = frame.signature()->field();
  const int k = frame.k();
  const int l = b.level;
  std::map<Entry, WeightedRep> objects;
  std::map<Entry, Matrix> vert, horiz;

  // Cache the standard sums and their injections per entry.
  std::map<Entry, repcat::SumParts> sums;
  for (int d = 1; d <= l + 1; ++d)
    for (int m = 0; m + d <= k; ++m) {
      int n = m + d;
      std::vector<WeightedRep> parts;
      for (int r = m + 1; r <= n; ++r) parts.push_back(frame.piece(r));
      sums.emplace(Entry{m, n}, direct_sum(parts));
    }

  for (int d = 1; d <= l + 1; ++d)
    for (int m = 0; m + d <= k; ++m) {
      int n = m + d;
      const auto& sp = sums.at({m, n});
      std::vector<Matrix> ops;
      for (int t = 0; t < frame.signature()->num_generators(); ++t) {
        Matrix op(f, sp.sum.total_dim(), sp.sum.total_dim());
        for (int j = m + 1; j <= n; ++j)
          for (int i = m + 1; i < j; ++i) {
            if (j - i > l) continue;
            auto it = b.blocks[t].find({i, j});
            if (it == b.blocks[t].end()) continue;
            op = op + sp.injections[i - m - 1].matrix * it->second *
                          sp.projections[j - m - 1].matrix;
          }
        ops.push_back(op);
      }
      objects.emplace(Entry{m, n}, WeightedRep(frame.signature(), sp.sum.support(), ops));
      if (d >= 2) {
        const auto& sub = sums.at({m, n - 1});
        Matrix v(f, sp.sum.total_dim(), sub.sum.total_dim());
        for (int r = m + 1; r <= n - 1; ++r)
          v = v + sp.injections[r - m - 1].matrix * sub.projections[r - m - 1].matrix;
        vert.emplace(Entry{m, n}, v);
        const auto& quo = sums.at({m + 1, n});
        Matrix h(f, quo.sum.total_dim(), sp.sum.total_dim());
        for (int r = m + 2; r <= n; ++r)
          h = h + quo.injections[r - m - 2].matrix * sp.projections[r - m - 1].matrix;
        horiz.emplace(Entry{m, n}, h);
      }
    }
  GenExt g(frame, l, std::move(objects), std::move(vert), std::move(horiz));
  return g;
}

BlockForm normalize(const GenExt& g) {
  const auto& frame = g.frame();
  const Field& f = frame.signature()->field();
  const int k = g.k();
  const int l = g.level();

  // Phi_{m,n} : A_{m+1} + ... + A_n -> X_{m,n}, compatible with the standard
  // inclusions (b) and projections (c); built by increasing distance.
  std::map<Entry, repcat::SumParts> sums;
  std::map<Entry, Matrix> phi;
  for (int r = 1; r <= k; ++r) {
    sums.emplace(Entry{r - 1, r}, direct_sum({frame.piece(r)}));
    phi.emplace(Entry{r - 1, r}, Matrix::identity(f, frame.piece(r).total_dim()));
  }
  for (int d = 2; d <= l + 1; ++d)
    for (int m = 0; m + d <= k; ++m) {
      int n = m + d;
      std::vector<WeightedRep> parts;
      for (int r = m + 1; r <= n; ++r) parts.push_back(frame.piece(r));
      auto sp = direct_sum(parts);
      Matrix mat(f, g.object(m, n).total_dim(), sp.sum.total_dim());
      // Columns for A_r with r < n come from the entry above.
      const auto& above = sums.at({m, n - 1});
      for (int r = m + 1; r < n; ++r) {
        Matrix col = g.vert(m, n) * phi.at({m, n - 1}) * above.injections[r - m - 1].matrix;
        mat = mat + col * sp.projections[r - m - 1].matrix;
      }
      // Column for A_n: any degree-0 lift through the horizontal surjection
      // of the corresponding column of Phi_{m+1,n}.
      const auto& right = sums.at({m + 1, n});
      Matrix target = phi.at({m + 1, n}) * right.injections[n - m - 2].matrix;
      auto lift = exactla::solve(g.horiz(m, n), target);
      if (!lift) throw DomainError("normalize: lift through surjection failed (internal)");
      mat = mat + *lift * sp.projections[n - m - 1].matrix;
      if (!exactla::is_invertible(mat))
        throw DomainError("normalize: coordinate change is singular (internal)");
      sums.emplace(Entry{m, n}, sp);
      phi.emplace(Entry{m, n}, mat);
    }

  BlockForm out{frame, l, {}};
  out.blocks.resize(frame.signature()->num_generators());
  for (int t = 0; t < frame.signature()->num_generators(); ++t) {
    for (int j = 2; j <= k; ++j)
      for (int i = std::max(1, j - l); i < j; ++i) {
        // Read block (i, j) off the minimal containing entry (i-1, j).
        Entry e{i - 1, j};
        const auto& sp = sums.at(e);
        auto inv = exactla::inverse(phi.at(e));
        Matrix conj = *inv * g.object(i - 1, j).op(t) * phi.at(e);
        out.blocks[t][{i, j}] = sp.projections[0].matrix * conj *
                                sp.injections[j - i].matrix;
      }
  }
  return out;
}

WeightedRep associated_graded(const WeightedRep& x) {
  std::vector<WeightedRep> parts;
  for (const auto& [d, dim] : x.support())
    parts.push_back(WeightedRep::pure(x.signature(), d, dim));
  if (parts.empty()) return WeightedRep::zero(x.signature());
  return direct_sum(parts).sum;
}

GenExt from_object(const WeightedRep& x, const RepMorphism& phi, const GradedFrame& frame) {
  const Field& f = x.field();
  const int k = frame.k();
  std::vector<int> w = frame.weights();
  repcat::validate_rep(x);
  validate_morphism(phi);
  WeightedRep gr = associated_graded(x);
  WeightedRep a = direct_sum(frame.pieces()).sum;
  if (phi.source != gr || phi.target != a)
    throw DomainError("from_object: phi must map Gr(x) onto the frame sum");
  if (!exactla::is_invertible(phi.matrix))
    throw DomainError("from_object: phi is not an isomorphism");
  for (const auto& [d, dim] : x.support())
    if (std::find(w.begin(), w.end(), d) == w.end())
      throw DomainError("from_object: x has a weight outside the frame");

  // X_{m,n} = W_{p_n} x / W_{p_m} x: the slice of basis indices with degree
  // in (p_m, p_n], with the corresponding operator blocks.
  auto slice_rep = [&](int m, int n) {
    int from = (m == 0) ? 0 : x.offset_of(w[m - 1] + 1);
    int to = x.offset_of(w[n - 1] + 1);  // one past the slice
    std::map<int, int> support;
    for (const auto& [d, dim] : x.support())
      if ((m == 0 || d > w[m - 1]) && d <= w[n - 1]) support[d] = dim;
    std::vector<Matrix> ops;
    for (int t = 0; t < x.signature()->num_generators(); ++t)
      ops.push_back(x.op(t).submatrix(from, from, to - from, to - from));
    if (support.empty()) throw DomainError("from_object: empty slice (internal)");
    return WeightedRep(x.signature(), support, ops);
  };
  auto slice_range = [&](int m, int n) {
    int from = (m == 0) ? 0 : x.offset_of(w[m - 1] + 1);
    int to = x.offset_of(w[n - 1] + 1);
    return std::pair<int, int>{from, to};
  };

  // phi components: gr piece at weight w[r-1] -> A_r.
  std::vector<Matrix> comp(k + 1, Matrix(f, 0, 0));
  for (int r = 1; r <= k; ++r) {
    int gr_off = gr.offset_of(w[r - 1]);
    int a_off = a.offset_of(w[r - 1]);
    int dim = frame.piece(r).total_dim();
    comp[r] = phi.matrix.submatrix(a_off, gr_off, dim, dim);
    if (!exactla::is_invertible(comp[r]))
      throw DomainError("from_object: phi does not respect the grading");
  }

  std::map<Entry, WeightedRep> objects;
  std::map<Entry, Matrix> vert, horiz;
  for (int d = 1; d <= k; ++d)
    for (int m = 0; m + d <= k; ++m) {
      int n = m + d;
      if (d == 1) {
        objects.emplace(Entry{m, n}, frame.piece(n));
        continue;
      }
      objects.emplace(Entry{m, n}, slice_rep(m, n));
      auto [from, to] = slice_range(m, n);
      auto [ufrom, uto] = slice_range(m, n - 1);
      Matrix v(f, to - from, uto - ufrom);
      for (int j = 0; j < uto - ufrom; ++j) v.at(j, j) = Scalar::one(f);
      // Entry (m, n-1) may itself be a transported A_{n-1}: compose with the
      // identification below once boundary transports are applied.
      vert.emplace(Entry{m, n}, v);
      auto [qfrom, qto] = slice_range(m + 1, n);
      Matrix h(f, qto - qfrom, to - from);
      int drop = qfrom - from;
      for (int j = 0; j < qto - qfrom; ++j) h.at(j, drop + j) = Scalar::one(f);
      horiz.emplace(Entry{m, n}, h);
    }

  // Transport the diagonal entries to the literal A_r via phi.
  for (int r = 1; r <= k; ++r) {
    auto inv = exactla::inverse(comp[r]);
    Entry from_ar{r - 1, r + 1};  // vertical arrow A_r -> X_{r-1,r+1}
    if (vert.count(from_ar)) vert[from_ar] = vert[from_ar] * *inv;
    Entry into_ar{r - 2, r};  // horizontal arrow X_{r-2,r} -> A_r
    if (horiz.count(into_ar)) horiz[into_ar] = comp[r] * horiz[into_ar];
  }

  GenExt g(frame, k - 1, std::move(objects), std::move(vert), std::move(horiz));
  validate_genext(g);
  return g;
}

GenExt truncate(const GenExt& g) {
  if (g.level() < 2) throw DomainError("truncate: level must be at least 2");
  std::map<Entry, WeightedRep> objects;
  std::map<Entry, Matrix> vert, horiz;
  for (const Entry& e : g.entries()) {
    if (e.second - e.first == g.level() + 1) continue;
    objects.emplace(e, g.object(e.first, e.second));
    if (e.second - e.first >= 2) {
      vert.emplace(e, g.vert(e.first, e.second));
      horiz.emplace(e, g.horiz(e.first, e.second));
    }
  }
  return GenExt(g.frame(), g.level() - 1, std::move(objects), std::move(vert),
                std::move(horiz));
}

GenExt truncate_to(const GenExt& g, int level) {
  GenExt out = g;
  while (out.level() > level) out = truncate(out);
  return out;
}

GenExt crop(const GenExt& g, int i, int j) {
  if (i < 0 || j > g.k() || i + 1 >= j) throw DomainError("crop: invalid window");
  std::vector<WeightedRep> pieces;
  for (int r = i + 1; r <= j; ++r) pieces.push_back(g.frame().piece(r));
  GradedFrame frame(pieces);
  int level = std::min(g.level(), j - i - 1);
  std::map<Entry, WeightedRep> objects;
  std::map<Entry, Matrix> vert, horiz;
  for (int d = 1; d <= level + 1; ++d)
    for (int m = i; m + d <= j; ++m) {
      int n = m + d;
      Entry local{m - i, n - i};
      objects.emplace(local, g.object(m, n));
      if (d >= 2) {
        vert.emplace(local, g.vert(m, n));
        horiz.emplace(local, g.horiz(m, n));
      }
    }
  return GenExt(frame, level, std::move(objects), std::move(vert), std::move(horiz));
}

namespace {

// Common shape checks for a pair of diagrams.
void check_same_shape(const GenExt& g1, const GenExt& g2) {
  if (g1.frame() != g2.frame() || g1.level() != g2.level())
    throw DomainError("diagrams have different frames or levels");
}

std::optional<MorphFamily> strict_equiv(const GenExt& g1, const GenExt& g2) {
  MorphFamily fam;
  const Field& f = g1.frame().signature()->field();
  for (int r = 1; r <= g1.k(); ++r)
    fam[{r - 1, r}] = Matrix::identity(f, g1.frame().piece(r).total_dim());

  if (g1.level() >= 2) {
    auto sub = strict_equiv(truncate(g1), truncate(g2));
    if (!sub) return std::nullopt;
    fam = *sub;
  }
  const int l = g1.level();
  for (int m = 0; m + l + 1 <= g1.k(); ++m) {
    int n = m + l + 1;
    // f : X_{m,n} -> X'_{m,n} with f vert = vert' f_{m,n-1} and
    // horiz' f = f_{m+1,n} horiz.
    VarSystem sys(f);
    int var = sys.add_var(g1.object(m, n), g2.object(m, n), /*intertwine=*/true);
    sys.add_eq({{var, std::nullopt, g1.vert(m, n), false}},
               g2.vert(m, n) * fam.at({m, n - 1}));
    sys.add_eq({{var, g2.horiz(m, n), std::nullopt, false}},
               fam.at({m + 1, n}) * g1.horiz(m, n));
    auto sol = sys.solve();
    if (!sol.solvable) return std::nullopt;
    fam[{m, n}] = sol.particular[0];
  }
  return fam;
}

}  // namespace

std::optional<MorphFamily> equiv(const GenExt& g1, const GenExt& g2, EquivMode mode,
                                 std::mt19937_64* rng) {
  check_same_shape(g1, g2);
  if (mode == EquivMode::strict) return strict_equiv(g1, g2);

  // iso mode: one linear system over all entries, then an invertibility
  // search over the solution space.
  const Field& f = g1.frame().signature()->field();
  VarSystem sys(f);
  std::map<Entry, int> var_of;
  for (const Entry& e : g1.entries())
    var_of[e] = sys.add_var(g1.object(e.first, e.second), g2.object(e.first, e.second),
                            /*intertwine=*/true);
  for (const Entry& e : g1.entries()) {
    auto [m, n] = e;
    if (n - m < 2) continue;
    // f_{m,n} vert = vert' f_{m,n-1}
    sys.add_eq_zero({{var_of[e], std::nullopt, g1.vert(m, n), false},
                     {var_of[{m, n - 1}], g2.vert(m, n), std::nullopt, true}});
    // f_{m+1,n} horiz = horiz' f_{m,n}
    sys.add_eq_zero({{var_of[{m + 1, n}], std::nullopt, g1.horiz(m, n), false},
                     {var_of[e], g2.horiz(m, n), std::nullopt, true}});
  }
  auto sol = sys.solve();
  if (!sol.solvable) return std::nullopt;
  const int dim = sol.dim();
  auto materialize = [&](const std::vector<Scalar>& coeffs) {
    auto mats = sol.element(coeffs);
    MorphFamily fam;
    for (const Entry& e : g1.entries()) fam[e] = mats[var_of[e]];
    return fam;
  };
  auto all_invertible = [&](const MorphFamily& fam) {
    for (const auto& [e, m] : fam)
      if (!exactla::is_invertible(m)) return false;
    return true;
  };
  std::mt19937_64 local_rng(0x9e3779b97f4a7c15ull);
  std::mt19937_64& r = rng ? *rng : local_rng;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<Scalar> coeffs;
    for (int i = 0; i < dim; ++i) {
      long bound = f.is_rational() ? 9 : f.characteristic() - 1;
      std::uniform_int_distribution<long> d(f.is_rational() ? -bound : 0, bound);
      coeffs.push_back(Scalar(f, d(r)));
    }
    MorphFamily fam = materialize(coeffs);
    if (all_invertible(fam)) return fam;
  }
  const long radius = f.is_rational() ? 2 : f.characteristic() - 1;
  const long base = f.is_rational() ? 2 * radius + 1 : radius + 1;
  double count = 1;
  for (int i = 0; i < dim; ++i) count *= static_cast<double>(base);
  if (count > 2e6) count = 2e6;
  for (long code = 0; code < static_cast<long>(count); ++code) {
    long c = code;
    std::vector<Scalar> coeffs;
    for (int i = 0; i < dim; ++i) {
      long digit = c % base;
      c /= base;
      coeffs.push_back(Scalar(f, f.is_rational() ? digit - radius : digit));
    }
    MorphFamily fam = materialize(coeffs);
    if (all_invertible(fam)) return fam;
  }
  return std::nullopt;
}

GenExt act_autA(const AutA& sigma, const GenExt& g) {
  if (static_cast<int>(sigma.size()) != g.k())
    throw DomainError("act_autA: one component per A_r required");
  for (int r = 1; r <= g.k(); ++r) {
    if (sigma[r - 1].rows() != g.frame().piece(r).total_dim() ||
        !exactla::is_invertible(sigma[r - 1]))
      throw DomainError("act_autA: component " + std::to_string(r) + " is not invertible");
  }
  std::map<Entry, WeightedRep> objects;
  std::map<Entry, Matrix> vert, horiz;
  for (const Entry& e : g.entries()) {
    objects.emplace(e, g.object(e.first, e.second));
    if (e.second - e.first < 2) continue;
    vert.emplace(e, g.vert(e.first, e.second));
    horiz.emplace(e, g.horiz(e.first, e.second));
  }
  for (int r = 1; r <= g.k(); ++r) {
    Entry out{r - 1, r + 1};  // arrow out of A_r
    if (vert.count(out)) {
      auto inv = exactla::inverse(sigma[r - 1]);
      vert[out] = vert[out] * *inv;
    }
    Entry in{r - 2, r};  // arrow into A_r
    if (horiz.count(in)) horiz[in] = sigma[r - 1] * horiz[in];
  }
  return GenExt(g.frame(), g.level(), std::move(objects), std::move(vert), std::move(horiz));
}

std::vector<ExtClass> act_autA_on_classes(const AutA& sigma, const std::vector<ExtClass>& e,
                                          const GradedFrame& frame, int dist) {
  std::vector<ExtClass> out;
  for (size_t idx = 0; idx < e.size(); ++idx) {
    int r = static_cast<int>(idx) + 1;
    RepMorphism push{frame.piece(r), frame.piece(r), sigma[r - 1]};
    auto inv = exactla::inverse(sigma[r + dist - 1]);
    RepMorphism pull{frame.piece(r + dist), frame.piece(r + dist), *inv};
    out.push_back(extmod::pushforward(extmod::pullback(e[idx], pull), push));
  }
  return out;
}

MorphFamily spread_morphism(const GenExt& g1, const GenExt& g2, Entry at, const Matrix& f) {
  check_same_shape(g1, g2);
  auto [i, j] = at;
  MorphFamily fam;
  fam[at] = f;
  // First column of the window: restrict along the weight filtration.
  for (int n = j - 1; n > i; --n) {
    if (!g1.has_entry(i, n)) continue;
    Matrix up1 = g1.vert_composite(i, n, j);
    Matrix up2 = g2.vert_composite(i, n, j);
    auto restricted = exactla::solve(up2, fam.at({i, j}) * up1);
    if (!restricted) throw DomainError("spread: restriction failed (map not filtered?)");
    fam[{i, n}] = *restricted;
  }
  // Push right along the surjections.
  for (int m = i; m + 1 < j; ++m)
    for (int n = j; n > m + 1; --n) {
      if (!g1.has_entry(m + 1, n) || !fam.count({m, n})) continue;
      auto descended = exactla::solve_left(g1.horiz(m, n), g2.horiz(m, n) * fam.at({m, n}));
      if (!descended) throw DomainError("spread: descent failed (internal)");
      fam[{m + 1, n}] = *descended;
    }
  // The construction guarantees commutation; verify as a safeguard.
  for (const auto& [e, mat] : fam) {
    auto [m, n] = e;
    if (n - m < 2 || !fam.count({m, n - 1})) continue;
    if (mat * g1.vert(m, n) != g2.vert(m, n) * fam.at({m, n - 1}))
      throw DomainError("spread: vertical square violated (internal)");
  }
  return fam;
}

GlueResult glue_lowest(const GenExt& g1, const GenExt& g2, const std::map<Entry, Matrix>& fs) {
  check_same_shape(g1, g2);
  const int l = g1.level();
  for (const Entry& e : g1.diagonal(l + 1))
    if (!fs.count(e)) throw DomainError("glue_lowest: missing map at lowest diagonal");

  // Induced maps on the diagonal just above: restriction along vert and
  // descent along horiz must agree where both are defined.
  GlueResult out;
  std::map<Entry, Matrix> from_vert, from_horiz;
  for (const auto& [e, mat] : fs) {
    auto [m, n] = e;
    auto fv = exactla::solve(g2.vert(m, n), mat * g1.vert(m, n));
    if (!fv) throw DomainError("glue_lowest: map does not respect the filtration");
    from_vert[{m, n - 1}] = *fv;
    auto fh = exactla::solve_left(g1.horiz(m, n), g2.horiz(m, n) * mat);
    if (!fh) throw DomainError("glue_lowest: descent failed (internal)");
    from_horiz[{m + 1, n}] = *fh;
  }
  for (const Entry& e : g1.diagonal(l)) {
    bool has_v = from_vert.count(e), has_h = from_horiz.count(e);
    if (has_v && has_h && from_vert.at(e) != from_horiz.at(e)) {
      out.violation = e;
      return out;
    }
  }
  MorphFamily fam;
  for (const auto& [e, mat] : fs) {
    MorphFamily piece = spread_morphism(g1, g2, e, mat);
    for (const auto& [pe, pmat] : piece) {
      auto it = fam.find(pe);
      if (it != fam.end() && it->second != pmat) {
        out.violation = pe;
        return out;
      }
      fam[pe] = pmat;
    }
  }
  out.family = fam;
  return out;
}

FiberDescriptor::FiberDescriptor(const GenExt& base)
    : base_(base), base_blocks_(normalize(base)), level_(base.level() + 1) {
  if (level_ > base.k() - 1)
    throw DomainError("fiber_classes: base already has full level");
  for (int r = 1; r + level_ <= base.k(); ++r)
    groups_.emplace_back(base.frame().piece(r + level_), base.frame().piece(r));
}

int FiberDescriptor::group_dim() const {
  int d = 0;
  for (const auto& g : groups_) d += g.dim();
  return d;
}

std::vector<ExtClass> FiberDescriptor::zero_coords() const {
  std::vector<ExtClass> out;
  for (const auto& g : groups_)
    out.push_back(g.class_from_coords(Matrix(base_.frame().signature()->field(), 1,
                                             g.coord_count())));
  return out;
}

GenExt FiberDescriptor::lift(const std::vector<ExtClass>& coords) const {
  if (static_cast<int>(coords.size()) != static_cast<int>(groups_.size()))
    throw DomainError("lift: one class per torsor factor required");
  BlockForm blocks = base_blocks_;
  blocks.level = level_;
  for (size_t idx = 0; idx < coords.size(); ++idx) {
    int r = static_cast<int>(idx) + 1;
    if (coords[idx].of() != base_.frame().piece(r + level_) ||
        coords[idx].by() != base_.frame().piece(r))
      throw DomainError("lift: class endpoints do not match the torsor factor");
    for (size_t t = 0; t < blocks.blocks.size(); ++t)
      blocks.blocks[t][{r, r + level_}] = coords[idx].reduced()[t];
  }
  return denormalize(blocks);
}

std::vector<ExtClass> FiberDescriptor::coords(const GenExt& member) const {
  if (member.level() != level_) throw DomainError("coords: member has wrong level");
  BlockForm mb = normalize(member);
  BlockForm trunc = mb;
  trunc.level = level_ - 1;
  for (auto& per_gen : trunc.blocks)
    for (auto it = per_gen.begin(); it != per_gen.end();)
      it = (it->first.second - it->first.first > trunc.level) ? per_gen.erase(it)
                                                              : std::next(it);
  if (!(trunc == base_blocks_))
    throw DomainError("coords: member does not lie over the base's class");
  std::vector<ExtClass> out;
  for (size_t idx = 0; idx < groups_.size(); ++idx) {
    int r = static_cast<int>(idx) + 1;
    std::vector<Matrix> cocycle;
    for (size_t t = 0; t < mb.blocks.size(); ++t) {
      auto it = mb.blocks[t].find({r, r + level_});
      cocycle.push_back(it != mb.blocks[t].end()
                            ? it->second
                            : Matrix(base_.frame().signature()->field(),
                                     base_.frame().piece(r).total_dim(),
                                     base_.frame().piece(r + level_).total_dim()));
    }
    out.push_back(ExtClass(base_.frame().piece(r + level_), base_.frame().piece(r), cocycle));
  }
  return out;
}

FiberDescriptor fiber_classes(const GenExt& base) { return FiberDescriptor(base); }

GenExt translate_member(const GenExt& member, const std::vector<ExtClass>& e, Construction c) {
  const int l = member.level();
  if (l < 2) throw DomainError("translate_member: level must be at least 2");
  std::map<Entry, WeightedRep> objects;
  std::map<Entry, Matrix> vert, horiz;
  for (const Entry& en : member.entries()) {
    if (en.second - en.first == l + 1) continue;
    objects.emplace(en, member.object(en.first, en.second));
    if (en.second - en.first >= 2) {
      vert.emplace(en, member.vert(en.first, en.second));
      horiz.emplace(en, member.horiz(en.first, en.second));
    }
  }
  if (static_cast<int>(e.size()) != member.k() - l)
    throw DomainError("translate_member: one class per lowest-diagonal entry required");
  for (int r = 1; r + l <= member.k(); ++r) {
    Blend b = member.blend_at(r);
    Blend tb = blended::translate(e[r - 1], b, c);
    Entry en{r - 1, r + l};
    objects.emplace(en, tb.middle);
    vert.emplace(en, tb.col_incl.matrix);
    horiz.emplace(en, tb.mid_proj.matrix);
  }
  return GenExt(member.frame(), l, std::move(objects), std::move(vert), std::move(horiz));
}

GenExt transport(const GenExt& g, const MorphFamily& f, const GenExt& target_base) {
  const int l = g.level();
  GenExt trunc = truncate(g);
  check_same_shape(trunc, target_base);
  for (const Entry& e : trunc.entries()) {
    auto it = f.find(e);
    if (it == f.end()) throw DomainError("transport: family misses entry " +
                                         entry_str(e.first, e.second));
    if (!exactla::is_invertible(it->second))
      throw DomainError("transport: family is not an isomorphism at " +
                        entry_str(e.first, e.second));
    RepMorphism fm{trunc.object(e.first, e.second), target_base.object(e.first, e.second),
                   it->second};
    validate_morphism(fm);
  }
  // Family must commute with the truncation arrows.
  for (const Entry& e : trunc.entries()) {
    auto [m, n] = e;
    if (n - m < 2) continue;
    if (f.at(e) * trunc.vert(m, n) != target_base.vert(m, n) * f.at({m, n - 1}))
      throw DomainError("transport: family breaks a vertical square");
    if (f.at({m + 1, n}) * trunc.horiz(m, n) != target_base.horiz(m, n) * f.at(e))
      throw DomainError("transport: family breaks a horizontal square");
  }

  std::map<Entry, WeightedRep> objects;
  std::map<Entry, Matrix> vert, horiz;
  for (const Entry& e : target_base.entries()) {
    objects.emplace(e, target_base.object(e.first, e.second));
    if (e.second - e.first >= 2) {
      vert.emplace(e, target_base.vert(e.first, e.second));
      horiz.emplace(e, target_base.horiz(e.first, e.second));
    }
  }
  for (int m = 0; m + l + 1 <= g.k(); ++m) {
    int n = m + l + 1;
    Entry e{m, n};
    objects.emplace(e, g.object(m, n));
    auto inv = exactla::inverse(f.at({m, n - 1}));
    vert.emplace(e, g.vert(m, n) * *inv);
    horiz.emplace(e, f.at({m + 1, n}) * g.horiz(m, n));
  }
  return GenExt(g.frame(), l, std::move(objects), std::move(vert), std::move(horiz));
}

Subspace aut_family_space(const GenExt& g) {
  const Field& f = g.frame().signature()->field();
  VarSystem sys(f);
  std::map<Entry, int> var_of;
  for (const Entry& e : g.entries())
    var_of[e] = sys.add_var(g.object(e.first, e.second), g.object(e.first, e.second),
                            /*intertwine=*/true);
  for (const Entry& e : g.entries()) {
    auto [m, n] = e;
    if (n - m < 2) continue;
    sys.add_eq_zero({{var_of[e], std::nullopt, g.vert(m, n), false},
                     {var_of[{m, n - 1}], g.vert(m, n), std::nullopt, true}});
    sys.add_eq_zero({{var_of[{m + 1, n}], std::nullopt, g.horiz(m, n), false},
                     {var_of[e], g.horiz(m, n), std::nullopt, true}});
  }
  auto sol = sys.solve();
  // Project to the action on A; by the spreading lemma this is injective on
  // solution families once the frame weights are distinct.
  int acoords = 0;
  for (int r = 1; r <= g.k(); ++r) {
    int d = g.frame().piece(r).total_dim();
    acoords += d * d;
  }
  Matrix rows(f, 0, acoords);
  for (const auto& elt : sol.kernel) {
    Matrix row(f, 1, acoords);
    int off = 0;
    for (int r = 1; r <= g.k(); ++r) {
      Matrix m = elt[var_of[{r - 1, r}]];
      row.set_block(0, off, repcat::flatten(m));
      off += m.rows() * m.cols();
    }
    rows = Matrix::vstack(rows, row);
  }
  return Subspace::span(rows);
}

GammaInfo gamma_stabilizer(const GenExt& base, const GenExt& member) {
  if (member.level() != base.level() + 1)
    throw DomainError("gamma_stabilizer: member must have level one above the base");
  if (truncate(member) != base)
    throw DomainError("gamma_stabilizer: member does not truncate to the base");
  return {aut_family_space(base), aut_family_space(member)};
}

}  // namespace panache::genext
