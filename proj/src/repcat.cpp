#include "panache/repcat.hpp"

#include <algorithm>
#include <set>

namespace panache::repcat {

ModelSignature::ModelSignature(const Field& field, std::vector<Generator> generators)
    : field_(field), gens_(std::move(generators)) {
  std::set<std::string> names;
  for (const auto& g : gens_) {
    if (g.degree >= 0)
      throw DomainError("generator '" + g.name + "' must have strictly negative degree");
    if (!names.insert(g.name).second)
      throw DomainError("duplicate generator name '" + g.name + "'");
  }
}

int ModelSignature::index_of(const std::string& name) const {
  for (size_t t = 0; t < gens_.size(); ++t)
    if (gens_[t].name == name) return static_cast<int>(t);
  return -1;
}

bool operator==(const ModelSignature& a, const ModelSignature& b) {
  if (a.field_ != b.field_ || a.gens_.size() != b.gens_.size()) return false;
  for (size_t t = 0; t < a.gens_.size(); ++t)
    if (a.gens_[t].name != b.gens_[t].name || a.gens_[t].degree != b.gens_[t].degree)
      return false;
  return true;
}

WeightedRep::WeightedRep(SignaturePtr sig, std::map<int, int> support,
                         std::vector<Matrix> operators)
    : sig_(std::move(sig)), support_(std::move(support)), operators_(std::move(operators)) {
  for (auto& [deg, dim] : support_)
    if (dim <= 0) throw DomainError("support dimension must be positive at degree " +
                                    std::to_string(deg));
  for (auto& [deg, dim] : support_) total_dim_ += dim;
  if (static_cast<int>(operators_.size()) != sig_->num_generators())
    throw DomainError("expected one operator per generator");
  for (const auto& m : operators_)
    if (m.rows() != total_dim_ || m.cols() != total_dim_ || m.field() != field())
      throw DomainError("operator matrix must be square on the total space");
}

WeightedRep::WeightedRep(SignaturePtr sig) : sig_(std::move(sig)) {
  for (int t = 0; t < sig_->num_generators(); ++t)
    operators_.emplace_back(field(), 0, 0);
}

WeightedRep WeightedRep::pure(SignaturePtr sig, int degree, int dim) {
  if (dim == 0) return zero(std::move(sig));
  const Field f = sig->field();
  std::vector<Matrix> ops(sig->num_generators(), Matrix(f, dim, dim));
  return WeightedRep(std::move(sig), {{degree, dim}}, std::move(ops));
}

int WeightedRep::dim_at(int degree) const {
  auto it = support_.find(degree);
  return it == support_.end() ? 0 : it->second;
}

int WeightedRep::offset_of(int degree) const {
  int off = 0;
  for (const auto& [d, dim] : support_) {
    if (d >= degree) break;
    off += dim;
  }
  return off;
}

int WeightedRep::degree_of_index(int i) const {
  int off = 0;
  for (const auto& [d, dim] : support_) {
    if (i < off + dim) return d;
    off += dim;
  }
  throw DomainError("basis index out of range");
}

std::vector<int> WeightedRep::degrees() const {
  std::vector<int> out;
  for (const auto& [d, dim] : support_) out.push_back(d);
  return out;
}

int WeightedRep::lowest_degree() const {
  if (support_.empty()) throw DomainError("zero object has no degrees");
  return support_.begin()->first;
}

int WeightedRep::highest_degree() const {
  if (support_.empty()) throw DomainError("zero object has no degrees");
  return support_.rbegin()->first;
}

bool operator==(const WeightedRep& a, const WeightedRep& b) {
  return *a.sig_ == *b.sig_ && a.support_ == b.support_ && a.operators_ == b.operators_;
}

RepMorphism RepMorphism::identity(const WeightedRep& x) {
  return {x, x, Matrix::identity(x.field(), x.total_dim())};
}

RepMorphism RepMorphism::then(const RepMorphism& next) const {
  if (next.source != target) throw DomainError("morphism composition mismatch");
  return {source, next.target, next.matrix * matrix};
}

bool is_homogeneous(const WeightedRep& src, const WeightedRep& dst, const Matrix& m, int degree) {
  if (m.rows() != dst.total_dim() || m.cols() != src.total_dim()) return false;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!m.at(i, j).is_zero() &&
          dst.degree_of_index(i) != src.degree_of_index(j) + degree)
        return false;
  return true;
}

void validate_rep(const WeightedRep& x) {
  const auto& sig = *x.signature();
  for (int t = 0; t < sig.num_generators(); ++t) {
    const Matrix& op = x.op(t);
    const int dt = sig.degree_of(t);
    for (int i = 0; i < op.rows(); ++i)
      for (int j = 0; j < op.cols(); ++j)
        if (!op.at(i, j).is_zero() && x.degree_of_index(i) != x.degree_of_index(j) + dt)
          throw DomainError("operator '" + sig.generators()[t].name +
                            "' has an inhomogeneous block from degree " +
                            std::to_string(x.degree_of_index(j)) + " to degree " +
                            std::to_string(x.degree_of_index(i)));
  }
}

void validate_morphism(const RepMorphism& f) {
  if (*f.source.signature() != *f.target.signature())
    throw DomainError("morphism endpoints have different signatures");
  if (!is_homogeneous(f.source, f.target, f.matrix, 0))
    throw DomainError("morphism matrix is not homogeneous of degree 0");
  for (int t = 0; t < f.source.signature()->num_generators(); ++t)
    if (f.matrix * f.source.op(t) != f.target.op(t) * f.matrix)
      throw DomainError("morphism fails to intertwine generator '" +
                        f.source.signature()->generators()[t].name + "'");
}

WeightParts weight_parts(const WeightedRep& x, int n) {
  // Ascending basis order puts W_n in the leading block.
  std::map<int, int> wsupport;
  int wdim = 0;
  for (const auto& [d, dim] : x.support())
    if (d <= n) {
      wsupport[d] = dim;
      wdim += dim;
    }
  const Field& f = x.field();
  std::vector<Matrix> ops;
  for (int t = 0; t < x.signature()->num_generators(); ++t)
    ops.push_back(x.op(t).submatrix(0, 0, wdim, wdim));
  WeightedRep w = wsupport.empty() ? WeightedRep::zero(x.signature())
                                   : WeightedRep(x.signature(), wsupport, ops);
  Matrix incl(f, x.total_dim(), wdim);
  for (int j = 0; j < wdim; ++j) incl.at(j, j) = Scalar::one(f);
  WeightedRep gr = WeightedRep::pure(x.signature(), n, x.dim_at(n));
  return {w, {w, x, incl}, gr};
}

Matrix flatten(const Matrix& mat) {
  Matrix v(mat.field(), 1, mat.rows() * mat.cols());
  for (int i = 0; i < mat.rows(); ++i)
    for (int j = 0; j < mat.cols(); ++j) v.at(0, i * mat.cols() + j) = mat.at(i, j);
  return v;
}

Matrix unflatten(const WeightedRep& m, const WeightedRep& n, const Matrix& row_vec) {
  Matrix out(row_vec.field(), n.total_dim(), m.total_dim());
  if (row_vec.cols() != n.total_dim() * m.total_dim())
    throw DomainError("unflatten: length mismatch");
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out.at(i, j) = row_vec.at(0, i * out.cols() + j);
  return out;
}

Subspace hom_space(const WeightedRep& m, const WeightedRep& n) {
  if (*m.signature() != *n.signature()) throw DomainError("hom_space: signature mismatch");
  VarSystem sys(m.field());
  sys.add_var(m, n, /*intertwine=*/true);
  auto sol = sys.solve();
  Matrix rows(m.field(), 0, n.total_dim() * m.total_dim());
  for (const auto& basis_elt : sol.kernel)
    rows = Matrix::vstack(rows, flatten(basis_elt[0]));
  return Subspace::span(rows);
}

namespace detail {

// Canonical basis of degree-d maps m -> n: ascending source degree p, then
// target index i within n_{p+d}, then source index j within m_p.
struct IhomLayout {
  std::map<int, int> support;                               // degree -> dim
  std::map<int, std::vector<std::tuple<int, int, int>>> slots;  // degree -> (p, i, j)
  std::map<int, int> offset;
  int total = 0;

  IhomLayout(const WeightedRep& m, const WeightedRep& n) {
    for (const auto& [p, dm] : m.support())
      for (const auto& [q, dn] : n.support()) {
        int d = q - p;
        for (int i = 0; i < dn; ++i)
          for (int j = 0; j < dm; ++j) slots[d].emplace_back(p, i, j);
      }
    for (auto& [d, list] : slots) {
      std::sort(list.begin(), list.end());
      support[d] = static_cast<int>(list.size());
    }
    for (auto& [d, dim] : support) {
      offset[d] = total;
      total += dim;
    }
  }

  int offset_of(int d) const {
    auto it = offset.find(d);
    return it == offset.end() ? -1 : it->second;
  }
};

Matrix ihom_vec(const IhomLayout& lay, const WeightedRep& m, const WeightedRep& n,
                const Matrix& map, int degree) {
  Matrix v(m.field(), lay.total, 1);
  auto it = lay.slots.find(degree);
  if (it == lay.slots.end()) return v;
  int off = lay.offset_of(degree);
  for (size_t s = 0; s < it->second.size(); ++s) {
    auto [p, i, j] = it->second[s];
    v.at(off + static_cast<int>(s), 0) = map.at(n.offset_of(p + degree) + i, m.offset_of(p) + j);
  }
  return v;
}

}  // namespace detail

WeightedRep internal_hom(const WeightedRep& m, const WeightedRep& n) {
  if (*m.signature() != *n.signature()) throw DomainError("internal_hom: signature mismatch");
  const Field& f = m.field();
  detail::IhomLayout lay(m, n);
  if (lay.total == 0) return WeightedRep::zero(m.signature());

  std::vector<Matrix> ops;
  for (int t = 0; t < m.signature()->num_generators(); ++t) {
    Matrix op(f, lay.total, lay.total);
    const int dt = m.signature()->degree_of(t);
    for (const auto& [d, list] : lay.slots) {
      if (!lay.support.count(d + dt)) continue;
      for (size_t s = 0; s < list.size(); ++s) {
        auto [p, i, j] = list[s];
        Matrix basis_map(f, n.total_dim(), m.total_dim());
        basis_map.at(n.offset_of(p + d) + i, m.offset_of(p) + j) = Scalar::one(f);
        Matrix moved = n.op(t) * basis_map - basis_map * m.op(t);
        op.set_block(0, lay.offset_of(d) + static_cast<int>(s),
                     detail::ihom_vec(lay, m, n, moved, d + dt));
      }
    }
    ops.push_back(op);
  }
  return WeightedRep(m.signature(), lay.support, ops);
}

Matrix ihom_vector_of(const WeightedRep& m, const WeightedRep& n, const Matrix& map, int degree) {
  if (!is_homogeneous(m, n, map, degree))
    throw DomainError("ihom_vector_of: map is not homogeneous of the stated degree");
  detail::IhomLayout lay(m, n);
  return detail::ihom_vec(lay, m, n, map, degree);
}

Matrix ihom_matrix_of(const WeightedRep& m, const WeightedRep& n, const Matrix& vec, int degree) {
  detail::IhomLayout lay(m, n);
  if (vec.rows() != lay.total || vec.cols() != 1)
    throw DomainError("ihom_matrix_of: vector has wrong shape");
  Matrix map(m.field(), n.total_dim(), m.total_dim());
  auto it = lay.slots.find(degree);
  if (it == lay.slots.end()) return map;
  int off = lay.offset_of(degree);
  for (size_t s = 0; s < it->second.size(); ++s) {
    auto [p, i, j] = it->second[s];
    map.at(n.offset_of(p + degree) + i, m.offset_of(p) + j) = vec.at(off + static_cast<int>(s), 0);
  }
  return map;
}

SumParts direct_sum(const std::vector<WeightedRep>& parts) {
  if (parts.empty()) throw DomainError("direct_sum of an empty list");
  const auto sig = parts[0].signature();
  const Field& f = parts[0].field();
  std::map<int, int> support;
  for (const auto& p : parts) {
    if (*p.signature() != *sig) throw DomainError("direct_sum: signature mismatch");
    for (const auto& [d, dim] : p.support()) support[d] += dim;
  }
  int total = 0;
  for (auto& [d, dim] : support) total += dim;

  // Injection matrices: within each degree, blocks appear in part order.
  std::vector<Matrix> injections;
  std::map<int, int> used;  // per-degree slots consumed so far
  int total_off = 0;
  std::map<int, int> new_offset;
  for (auto& [d, dim] : support) {
    new_offset[d] = total_off;
    total_off += dim;
  }
  for (const auto& p : parts) {
    Matrix inj(f, total, p.total_dim());
    for (const auto& [d, dim] : p.support()) {
      for (int i = 0; i < dim; ++i)
        inj.at(new_offset[d] + used[d] + i, p.offset_of(d) + i) = Scalar::one(f);
      used[d] += dim;
    }
    injections.push_back(inj);
  }

  std::vector<Matrix> ops;
  for (int t = 0; t < sig->num_generators(); ++t) {
    Matrix op(f, total, total);
    for (size_t q = 0; q < parts.size(); ++q)
      op = op + injections[q] * parts[q].op(t) * injections[q].transpose();
    ops.push_back(op);
  }
  WeightedRep sum = support.empty() ? WeightedRep::zero(sig) : WeightedRep(sig, support, ops);

  SumParts out{sum, {}, {}};
  for (size_t q = 0; q < parts.size(); ++q) {
    out.injections.push_back({parts[q], sum, injections[q]});
    out.projections.push_back({sum, parts[q], injections[q].transpose()});
  }
  return out;
}

WeightedRep tensor(const WeightedRep& m, const WeightedRep& n) {
  if (*m.signature() != *n.signature()) throw DomainError("tensor: signature mismatch");
  const Field& f = m.field();
  const auto sig = m.signature();
  if (m.is_zero_object() || n.is_zero_object()) return WeightedRep::zero(sig);

  // Basis of degree d: (p, i, j) with i in m_p, j in n_{d-p}, ordered by
  // ascending p then i then j.
  std::map<int, int> support;
  for (const auto& [p, dm] : m.support())
    for (const auto& [q, dn] : n.support()) support[p + q] += dm * dn;

  std::map<int, int> offset;
  int total = 0;
  for (auto& [d, dim] : support) {
    offset[d] = total;
    total += dim;
  }
  // Explicit slot table per degree.
  std::map<int, std::vector<std::tuple<int, int, int>>> slots;
  for (const auto& [p, dm] : m.support())
    for (const auto& [q, dn] : n.support())
      for (int i = 0; i < dm; ++i)
        for (int j = 0; j < dn; ++j) slots[p + q].emplace_back(p, i, j);
  std::map<std::tuple<int, int, int, int>, int> slot_index;  // (p, q, i, j) -> total index
  for (auto& [d, list] : slots) {
    std::sort(list.begin(), list.end());
    for (size_t s = 0; s < list.size(); ++s) {
      auto [p, i, j] = list[s];
      slot_index[{p, d - p, i, j}] = offset[d] + static_cast<int>(s);
    }
  }

  std::vector<Matrix> ops;
  for (int t = 0; t < sig->num_generators(); ++t) {
    const int dt = sig->degree_of(t);
    Matrix op(f, total, total);
    for (auto& [key, src_idx] : slot_index) {
      auto [p, q, i, j] = key;
      // X_t (e_i x f_j) = (X_t e_i) x f_j + e_i x (X_t f_j)
      int dmp = m.dim_at(p + dt);
      for (int i2 = 0; i2 < dmp; ++i2) {
        const Scalar& c = m.op(t).at(m.offset_of(p + dt) + i2, m.offset_of(p) + i);
        if (c.is_zero()) continue;
        op.at(slot_index.at({p + dt, q, i2, j}), src_idx) += c;
      }
      int dnq = n.dim_at(q + dt);
      for (int j2 = 0; j2 < dnq; ++j2) {
        const Scalar& c = n.op(t).at(n.offset_of(q + dt) + j2, n.offset_of(q) + j);
        if (c.is_zero()) continue;
        op.at(slot_index.at({p, q + dt, i, j2}), src_idx) += c;
      }
    }
    ops.push_back(op);
  }
  return WeightedRep(sig, support, ops);
}

WeightedRep dual(const WeightedRep& m) {
  const Field& f = m.field();
  const auto sig = m.signature();
  if (m.is_zero_object()) return WeightedRep::zero(sig);
  std::map<int, int> support;
  for (const auto& [d, dim] : m.support()) support[-d] = dim;
  int total = m.total_dim();
  std::map<int, int> offset;
  {
    int off = 0;
    for (auto& [d, dim] : support) {
      offset[d] = off;
      off += dim;
    }
  }
  std::vector<Matrix> ops;
  for (int t = 0; t < sig->num_generators(); ++t) {
    const int dt = sig->degree_of(t);
    Matrix op(f, total, total);
    // Block D_{-d} -> D_{-d+dt} is minus the transpose of m_{d-dt} -> m_d.
    for (const auto& [d, dim] : m.support()) {
      int src_dim = m.dim_at(d - dt);
      if (!src_dim) continue;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < src_dim; ++j)
          op.at(offset[-d + dt] + j, offset[-d] + i) =
              -m.op(t).at(m.offset_of(d) + i, m.offset_of(d - dt) + j);
    }
    ops.push_back(op);
  }
  return WeightedRep(sig, support, ops);
}

GradedSubspace::GradedSubspace(const WeightedRep& ambient) : ambient_(ambient) {
  for (const auto& [d, dim] : ambient.support()) parts_.emplace(d, Subspace(ambient.field(), dim));
}

int GradedSubspace::dim() const {
  int n = 0;
  for (const auto& [d, s] : parts_) n += s.dim();
  return n;
}

int GradedSubspace::dim_at(int degree) const {
  auto it = parts_.find(degree);
  return it == parts_.end() ? 0 : it->second.dim();
}

const Subspace& GradedSubspace::part(int degree) const {
  auto it = parts_.find(degree);
  if (it == parts_.end()) throw DomainError("degree outside ambient support");
  return it->second;
}

void GradedSubspace::add_vector(const Matrix& total_row) {
  if (total_row.cols() != ambient_.total_dim() || total_row.rows() != 1)
    throw DomainError("GradedSubspace::add_vector: shape mismatch");
  for (auto& [d, s] : parts_) {
    Matrix slice = total_row.submatrix(0, ambient_.offset_of(d), 1, ambient_.dim_at(d));
    if (slice.is_zero()) continue;
    s = s + Subspace::span(slice);
  }
}

void GradedSubspace::add(const GradedSubspace& other) {
  if (other.ambient_ != ambient_) throw DomainError("GradedSubspace::add: ambient mismatch");
  for (auto& [d, s] : parts_) s = s + other.part(d);
}

bool GradedSubspace::contains_vector(const Matrix& total_row) const {
  for (const auto& [d, s] : parts_) {
    Matrix slice = total_row.submatrix(0, ambient_.offset_of(d), 1, ambient_.dim_at(d));
    if (!s.contains_vector(slice)) return false;
  }
  return true;
}

bool GradedSubspace::contains(const GradedSubspace& other) const {
  for (const auto& [d, s] : parts_)
    if (!s.contains(other.part(d))) return false;
  return true;
}

bool GradedSubspace::is_full() const {
  for (const auto& [d, s] : parts_)
    if (s.dim() != ambient_.dim_at(d)) return false;
  return true;
}

Matrix GradedSubspace::total_basis() const {
  Matrix rows(ambient_.field(), 0, ambient_.total_dim());
  for (const auto& [d, s] : parts_) {
    for (int r = 0; r < s.dim(); ++r) {
      Matrix row(ambient_.field(), 1, ambient_.total_dim());
      row.set_block(0, ambient_.offset_of(d), s.basis().row(r));
      rows = Matrix::vstack(rows, row);
    }
  }
  return rows;
}

void GradedSubspace::stabilize() {
  bool changed = true;
  while (changed) {
    changed = false;
    Matrix basis = total_basis();
    for (int t = 0; t < ambient_.signature()->num_generators(); ++t) {
      for (int r = 0; r < basis.rows(); ++r) {
        Matrix image = (ambient_.op(t) * basis.row(r).transpose()).transpose();
        if (!contains_vector(image)) {
          add_vector(image);
          changed = true;
        }
      }
    }
  }
}

bool GradedSubspace::is_stable() const {
  Matrix basis = total_basis();
  for (int t = 0; t < ambient_.signature()->num_generators(); ++t)
    for (int r = 0; r < basis.rows(); ++r) {
      Matrix image = (ambient_.op(t) * basis.row(r).transpose()).transpose();
      if (!contains_vector(image)) return false;
    }
  return true;
}

bool operator==(const GradedSubspace& a, const GradedSubspace& b) {
  return a.ambient_ == b.ambient_ && a.parts_ == b.parts_;
}

GradedSubspace kernel_of(const RepMorphism& f) {
  GradedSubspace out(f.source);
  for (const auto& [d, dim] : f.source.support()) {
    int tdim = f.target.dim_at(d);
    Matrix block = tdim ? f.matrix.submatrix(f.target.offset_of(d), f.source.offset_of(d),
                                             tdim, dim)
                        : Matrix(f.matrix.field(), 0, dim);
    auto ki = exactla::rref_kernel_image(block);
    for (int r = 0; r < ki.kernel.dim(); ++r) {
      Matrix row(f.matrix.field(), 1, f.source.total_dim());
      row.set_block(0, f.source.offset_of(d), ki.kernel.basis().row(r));
      out.add_vector(row);
    }
  }
  return out;
}

GradedSubspace image_of(const RepMorphism& f) {
  GradedSubspace out(f.target);
  for (const auto& [d, dim] : f.target.support()) {
    int sdim = f.source.dim_at(d);
    if (!sdim) continue;
    Matrix block = f.matrix.submatrix(f.target.offset_of(d), f.source.offset_of(d), dim, sdim);
    auto ki = exactla::rref_kernel_image(block);
    for (int r = 0; r < ki.image.dim(); ++r) {
      Matrix row(f.matrix.field(), 1, f.target.total_dim());
      row.set_block(0, f.target.offset_of(d), ki.image.basis().row(r));
      out.add_vector(row);
    }
  }
  return out;
}

SubRep sub_rep(const WeightedRep& x, const GradedSubspace& s) {
  if (s.ambient() != x) throw DomainError("sub_rep: ambient mismatch");
  if (!s.is_stable()) throw DomainError("sub_rep: subspace is not operator-stable");
  std::map<int, int> support;
  for (const auto& [d, dim] : x.support())
    if (s.dim_at(d)) support[d] = s.dim_at(d);
  const Field& f = x.field();
  Matrix incl = s.total_basis().transpose();  // x.total x s.dim
  std::vector<Matrix> ops;
  for (int t = 0; t < x.signature()->num_generators(); ++t) {
    auto op = exactla::solve(incl, x.op(t) * incl);
    if (!op) throw DomainError("sub_rep: operator restriction failed (internal)");
    ops.push_back(*op);
  }
  WeightedRep sub = support.empty() ? WeightedRep::zero(x.signature())
                                    : WeightedRep(x.signature(), support, ops);
  return {sub, {sub, x, incl}};
}

QuotientRep quotient_rep(const WeightedRep& x, const GradedSubspace& s) {
  if (s.ambient() != x) throw DomainError("quotient_rep: ambient mismatch");
  if (!s.is_stable()) throw DomainError("quotient_rep: subspace is not operator-stable");
  const Field& f = x.field();
  std::map<int, int> support;
  for (const auto& [d, dim] : x.support()) {
    int q = dim - s.dim_at(d);
    if (q) support[d] = q;
  }
  int qtotal = 0;
  for (auto& [d, dim] : support) qtotal += dim;

  // Per degree: quotient coordinates are the non-pivot coordinates after
  // reducing modulo the subspace basis.
  Matrix proj(f, qtotal, x.total_dim());
  Matrix sec(f, x.total_dim(), qtotal);
  int qoff = 0;
  for (const auto& [d, dim] : x.support()) {
    const Subspace& sd = s.part(d);
    std::vector<bool> is_pivot(dim, false);
    for (int c : sd.pivot_cols()) is_pivot[c] = true;
    std::vector<int> comp;
    for (int j = 0; j < dim; ++j)
      if (!is_pivot[j]) comp.push_back(j);
    for (size_t c = 0; c < comp.size(); ++c) {
      // Functional on V_d: coefficient comp[c] of (v reduced mod basis).
      proj.at(qoff + static_cast<int>(c), x.offset_of(d) + comp[c]) = Scalar::one(f);
      for (int r = 0; r < sd.dim(); ++r)
        proj.at(qoff + static_cast<int>(c), x.offset_of(d) + sd.pivot_cols()[r]) =
            -sd.basis().at(r, comp[c]);
      sec.at(x.offset_of(d) + comp[c], qoff + static_cast<int>(c)) = Scalar::one(f);
    }
    qoff += static_cast<int>(comp.size());
  }

  std::vector<Matrix> ops;
  for (int t = 0; t < x.signature()->num_generators(); ++t)
    ops.push_back(proj * x.op(t) * sec);
  WeightedRep quot = support.empty() ? WeightedRep::zero(x.signature())
                                     : WeightedRep(x.signature(), support, ops);
  return {quot, {x, quot, proj}};
}

SubRep subobject_generated(const WeightedRep& x, const Matrix& vectors) {
  GradedSubspace s(x);
  for (int r = 0; r < vectors.rows(); ++r) s.add_vector(vectors.row(r));
  s.stabilize();
  return sub_rep(x, s);
}

IsoResult is_isomorphic(const WeightedRep& m, const WeightedRep& n, std::mt19937_64& rng) {
  IsoResult out;
  if (*m.signature() != *n.signature()) return out;
  if (m.support() != n.support()) return out;  // degree-0 isos preserve graded dims
  if (m.is_zero_object()) {
    out.iso = RepMorphism{m, n, Matrix(m.field(), 0, 0)};
    return out;
  }
  if (m == n) {
    out.iso = RepMorphism::identity(m);
    return out;
  }
  Subspace hom = hom_space(m, n);
  const Field& f = m.field();
  const int dim = hom.dim();
  auto candidate = [&](const std::vector<Scalar>& coeffs) -> std::optional<RepMorphism> {
    Matrix v(f, 1, hom.ambient());
    for (int i = 0; i < dim; ++i) v = v + coeffs[i] * hom.basis().row(i);
    Matrix mat = unflatten(m, n, v);
    if (!exactla::is_invertible(mat)) return std::nullopt;
    return RepMorphism{m, n, mat};
  };

  // An invertible intertwiner exists iff a generic element of the hom space
  // is invertible, so a few random draws almost always settle it.
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<Scalar> coeffs;
    for (int i = 0; i < dim; ++i) {
      if (f.is_rational()) {
        std::uniform_int_distribution<long> d(-9, 9);
        coeffs.push_back(Scalar(f, d(rng)));
      } else {
        std::uniform_int_distribution<long> d(0, f.characteristic() - 1);
        coeffs.push_back(Scalar(f, d(rng)));
      }
    }
    if (auto iso = candidate(coeffs)) {
      out.iso = std::move(iso);
      return out;
    }
  }

  // Deterministic sweep over a bounded coefficient grid.
  out.deterministic = true;
  const long radius = f.is_rational() ? 3 : f.characteristic() - 1;
  const long base = 2 * radius + 1;
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
    if (auto iso = candidate(coeffs)) {
      out.iso = std::move(iso);
      return out;
    }
  }
  return out;
}

int VarSystem::add_var(const WeightedRep& src, const WeightedRep& dst, bool intertwine) {
  VarInfo info{src, dst, {}, total_unknowns_};
  for (int r = 0; r < dst.total_dim(); ++r)
    for (int c = 0; c < src.total_dim(); ++c)
      if (dst.degree_of_index(r) == src.degree_of_index(c)) info.entries.emplace_back(r, c);
  total_unknowns_ += static_cast<int>(info.entries.size());
  vars_.push_back(std::move(info));
  int id = static_cast<int>(vars_.size()) - 1;
  if (intertwine) {
    for (int t = 0; t < src.signature()->num_generators(); ++t) {
      // X_t^dst * U - U * X_t^src = 0
      add_eq_zero({{id, dst.op(t), std::nullopt, false}, {id, std::nullopt, src.op(t), true}});
    }
  }
  return id;
}

void VarSystem::add_eq_zero(const std::vector<VarTerm>& lhs) {
  if (lhs.empty()) return;
  const VarInfo& v0 = vars_[lhs[0].var];
  int rows = lhs[0].left ? lhs[0].left->rows() : v0.dst.total_dim();
  int cols = lhs[0].right ? lhs[0].right->cols() : v0.src.total_dim();
  add_eq(lhs, Matrix(field_, rows, cols));
}

void VarSystem::add_eq(const std::vector<VarTerm>& lhs, const Matrix& rhs) {
  for (int a = 0; a < rhs.rows(); ++a)
    for (int b = 0; b < rhs.cols(); ++b) {
      std::vector<Scalar> row(total_unknowns_, Scalar::zero(field_));
      bool nonzero = !rhs.at(a, b).is_zero();
      for (const auto& term : lhs) {
        const VarInfo& v = vars_[term.var];
        for (size_t e = 0; e < v.entries.size(); ++e) {
          auto [r, c] = v.entries[e];
          Scalar lcoef = term.left ? term.left->at(a, r)
                                   : (a == r ? Scalar::one(field_) : Scalar::zero(field_));
          if (lcoef.is_zero()) continue;
          Scalar rcoef = term.right ? term.right->at(c, b)
                                    : (c == b ? Scalar::one(field_) : Scalar::zero(field_));
          if (rcoef.is_zero()) continue;
          Scalar contrib = lcoef * rcoef;
          if (term.negate) contrib = -contrib;
          row[v.offset + e] += contrib;
          nonzero = true;
        }
      }
      if (!nonzero) continue;
      rows_.push_back(std::move(row));
      rhs_.push_back(rhs.at(a, b));
    }
}

VarSystem::Solutions VarSystem::solve() const {
  Matrix m(field_, static_cast<int>(rows_.size()), total_unknowns_);
  Matrix b(field_, static_cast<int>(rows_.size()), 1);
  for (size_t i = 0; i < rows_.size(); ++i) {
    // Rows recorded before later add_var calls are shorter; the missing
    // trailing coefficients are zero.
    for (size_t j = 0; j < rows_[i].size(); ++j)
      m.at(static_cast<int>(i), static_cast<int>(j)) = rows_[i][j];
    b.at(static_cast<int>(i), 0) = rhs_[i];
  }
  Solutions out;
  auto x = exactla::solve(m, b);
  if (!x) return out;
  out.solvable = true;
  auto materialize = [&](const Matrix& colvec) {
    std::vector<Matrix> mats;
    for (const auto& v : vars_) {
      Matrix mat(field_, v.dst.total_dim(), v.src.total_dim());
      for (size_t e = 0; e < v.entries.size(); ++e) {
        auto [r, c] = v.entries[e];
        mat.at(r, c) = colvec.at(v.offset + static_cast<int>(e), 0);
      }
      mats.push_back(std::move(mat));
    }
    return mats;
  };
  out.particular = materialize(*x);
  auto ki = exactla::rref_kernel_image(m);
  for (int r = 0; r < ki.kernel.dim(); ++r)
    out.kernel.push_back(materialize(ki.kernel.basis().row(r).transpose()));
  return out;
}

std::vector<Matrix> VarSystem::Solutions::element(const std::vector<Scalar>& coeffs) const {
  std::vector<Matrix> out = particular;
  for (size_t k = 0; k < kernel.size(); ++k)
    for (size_t v = 0; v < out.size(); ++v) out[v] = out[v] + coeffs[k] * kernel[k][v];
  return out;
}

}  // namespace panache::repcat
