#include "panache/exactla.hpp"

#include <algorithm>
#include <sstream>

namespace panache::exactla {

namespace {

bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint32_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t acc = 1 % p;
  base %= p;
  while (exp) {
    if (exp & 1) acc = acc * base % p;
    base = base * base % p;
    exp >>= 1;
  }
  return static_cast<std::uint32_t>(acc);
}

}  // namespace

Field Field::prime(std::uint32_t p) {
  if (p >= (1u << 16) || !is_prime_u32(p))
    throw DomainError("field characteristic must be a prime < 2^16, got " + std::to_string(p));
  Field f;
  f.p_ = p;
  return f;
}

std::string Field::to_string() const {
  return is_rational() ? "Q" : "F" + std::to_string(p_);
}

Scalar::Scalar(const Field& f, long value) : field_(f), rat_(0), res_(0) {
  if (f.is_rational()) {
    rat_ = value;
  } else {
    long p = static_cast<long>(f.characteristic());
    long r = value % p;
    if (r < 0) r += p;
    res_ = static_cast<std::uint32_t>(r);
  }
}

Scalar Scalar::rational(const mpq_class& q) {
  Scalar s;
  s.rat_ = q;
  s.rat_.canonicalize();
  return s;
}

Scalar Scalar::residue(const Field& f, long r) {
  if (f.is_rational()) throw DomainError("residue requires a prime field");
  return Scalar(f, r);
}

void Scalar::check_same_field(const Scalar& other) const {
  if (field_ != other.field_)
    throw DomainError("mixed-field arithmetic: " + field_.to_string() + " vs " +
                      other.field_.to_string());
}

bool Scalar::is_zero() const {
  return field_.is_rational() ? rat_ == 0 : res_ == 0;
}

bool Scalar::is_one() const {
  return field_.is_rational() ? rat_ == 1 : res_ == 1;
}

Scalar Scalar::operator-() const {
  Scalar s(*this);
  if (field_.is_rational())
    s.rat_ = -rat_;
  else if (res_ != 0)
    s.res_ = field_.characteristic() - res_;
  return s;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw DomainError("scalar inverse of zero");
  Scalar s(*this);
  if (field_.is_rational())
    s.rat_ = 1 / rat_;
  else
    s.res_ = mod_pow(res_, field_.characteristic() - 2, field_.characteristic());
  return s;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  a.check_same_field(b);
  Scalar s(a);
  if (a.field_.is_rational())
    s.rat_ = a.rat_ + b.rat_;
  else
    s.res_ = (a.res_ + b.res_) % a.field_.characteristic();
  return s;
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  a.check_same_field(b);
  Scalar s(a);
  if (a.field_.is_rational())
    s.rat_ = a.rat_ * b.rat_;
  else
    s.res_ = static_cast<std::uint32_t>(static_cast<std::uint64_t>(a.res_) * b.res_ %
                                        a.field_.characteristic());
  return s;
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.field_ != b.field_) return false;
  return a.field_.is_rational() ? a.rat_ == b.rat_ : a.res_ == b.res_;
}

std::string Scalar::to_string() const {
  if (!field_.is_rational()) return std::to_string(res_);
  if (rat_.get_den() == 1) return rat_.get_num().get_str();
  return rat_.get_num().get_str() + "/" + rat_.get_den().get_str();
}

Scalar Scalar::from_string(const Field& f, const std::string& s) {
  try {
    if (f.is_rational()) {
      mpq_class q(s);
      q.canonicalize();
      if (q.get_den() <= 0) throw ParseError("invalid rational: " + s);
      return Scalar::rational(q);
    }
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw ParseError("invalid residue: " + s);
    return Scalar(f, v);
  } catch (const std::invalid_argument&) {
    throw ParseError("invalid scalar literal: " + s);
  }
}

Matrix::Matrix(const Field& f, int rows, int cols)
    : rows_(rows), cols_(cols), field_(f),
      data_(static_cast<size_t>(rows) * cols, Scalar::zero(f)) {
  if (rows < 0 || cols < 0) throw DomainError("negative matrix dimension");
}

Matrix Matrix::identity(const Field& f, int n) {
  Matrix m(f, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Scalar::one(f);
  return m;
}

Matrix Matrix::row_vector(const std::vector<Scalar>& entries) {
  if (entries.empty()) throw DomainError("row_vector needs at least one entry");
  Matrix m(entries[0].field(), 1, static_cast<int>(entries.size()));
  for (size_t j = 0; j < entries.size(); ++j) m.at(0, static_cast<int>(j)) = entries[j];
  return m;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Scalar& s) { return s.is_zero(); });
}

Matrix Matrix::transpose() const {
  Matrix t(field_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

Matrix Matrix::operator-() const {
  Matrix m(*this);
  for (auto& s : m.data_) s = -s;
  return m;
}

void Matrix::check_compatible(const Matrix& other) const {
  if (field_ != other.field_)
    throw DomainError("mixed-field matrix arithmetic: " + field_.to_string() + " vs " +
                      other.field_.to_string());
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  a.check_compatible(b);
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DomainError("matrix shape mismatch in +");
  Matrix m(a);
  for (size_t i = 0; i < m.data_.size(); ++i) m.data_[i] += b.data_[i];
  return m;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-b); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  a.check_compatible(b);
  if (a.cols_ != b.rows_) throw DomainError("matrix shape mismatch in *");
  Matrix m(a.field_, a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const Scalar& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < b.cols_; ++j) {
        if (b.at(k, j).is_zero()) continue;
        m.at(i, j) += aik * b.at(k, j);
      }
    }
  return m;
}

Matrix operator*(const Scalar& c, const Matrix& a) {
  Matrix m(a);
  for (auto& s : m.data_) s = c * s;
  return m;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.field_ == b.field_ && a.data_ == b.data_;
}

Matrix Matrix::vstack(const Matrix& a, const Matrix& b) {
  a.check_compatible(b);
  if (a.cols_ != b.cols_) throw DomainError("vstack column mismatch");
  Matrix m(a.field_, a.rows_ + b.rows_, a.cols_);
  m.set_block(0, 0, a);
  m.set_block(a.rows_, 0, b);
  return m;
}

Matrix Matrix::hstack(const Matrix& a, const Matrix& b) {
  a.check_compatible(b);
  if (a.rows_ != b.rows_) throw DomainError("hstack row mismatch");
  Matrix m(a.field_, a.rows_, a.cols_ + b.cols_);
  m.set_block(0, 0, a);
  m.set_block(0, a.cols_, b);
  return m;
}

Matrix Matrix::submatrix(int row0, int col0, int nrows, int ncols) const {
  if (row0 < 0 || col0 < 0 || row0 + nrows > rows_ || col0 + ncols > cols_)
    throw DomainError("submatrix out of range");
  Matrix m(field_, nrows, ncols);
  for (int i = 0; i < nrows; ++i)
    for (int j = 0; j < ncols; ++j) m.at(i, j) = at(row0 + i, col0 + j);
  return m;
}

void Matrix::set_block(int row0, int col0, const Matrix& block) {
  check_compatible(block);
  if (row0 + block.rows_ > rows_ || col0 + block.cols_ > cols_)
    throw DomainError("set_block out of range");
  for (int i = 0; i < block.rows_; ++i)
    for (int j = 0; j < block.cols_; ++j) at(row0 + i, col0 + j) = block.at(i, j);
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows_; ++i) {
    os << (i ? " [" : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << at(i, j).to_string();
    os << "]";
  }
  os << "]";
  return os.str();
}

RrefResult rref(const Matrix& m) {
  RrefResult r;
  r.rref = m;
  Matrix& a = r.rref;
  int pivot_row = 0;
  for (int col = 0; col < a.cols() && pivot_row < a.rows(); ++col) {
    int sel = -1;
    for (int i = pivot_row; i < a.rows(); ++i)
      if (!a.at(i, col).is_zero()) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != pivot_row)
      for (int j = 0; j < a.cols(); ++j) std::swap(a.at(sel, j), a.at(pivot_row, j));
    Scalar inv = a.at(pivot_row, col).inverse();
    for (int j = col; j < a.cols(); ++j) a.at(pivot_row, j) = inv * a.at(pivot_row, j);
    for (int i = 0; i < a.rows(); ++i) {
      if (i == pivot_row || a.at(i, col).is_zero()) continue;
      Scalar factor = a.at(i, col);
      for (int j = col; j < a.cols(); ++j)
        a.at(i, j) -= factor * a.at(pivot_row, j);
    }
    r.pivot_cols.push_back(col);
    ++pivot_row;
  }
  r.rank = pivot_row;
  return r;
}

Subspace::Subspace(const Field& f, int ambient)
    : ambient_(ambient), basis_(f, 0, ambient) {}

Subspace Subspace::span(const Matrix& span_rows) {
  RrefResult r = rref(span_rows);
  Subspace s(span_rows.field(), span_rows.cols());
  s.basis_ = r.rref.submatrix(0, 0, r.rank, span_rows.cols());
  s.pivots_ = r.pivot_cols;
  return s;
}

Subspace Subspace::full(const Field& f, int ambient) {
  return span(Matrix::identity(f, ambient));
}

Matrix Subspace::reduce_vector(const Matrix& row_vec) const {
  if (row_vec.cols() != ambient_ || row_vec.rows() != 1)
    throw DomainError("reduce_vector: ambient mismatch");
  Matrix v = row_vec;
  for (int r = 0; r < dim(); ++r) {
    const Scalar& c = v.at(0, pivots_[r]);
    if (c.is_zero()) continue;
    Scalar factor = c;
    for (int j = 0; j < ambient_; ++j) v.at(0, j) -= factor * basis_.at(r, j);
  }
  return v;
}

bool Subspace::contains_vector(const Matrix& row_vec) const {
  return reduce_vector(row_vec).is_zero();
}

std::optional<Matrix> Subspace::coordinates_of(const Matrix& row_vec) const {
  if (row_vec.cols() != ambient_ || row_vec.rows() != 1)
    throw DomainError("coordinates_of: ambient mismatch");
  Matrix coords(field(), 1, dim());
  Matrix v = row_vec;
  for (int r = 0; r < dim(); ++r) {
    Scalar c = v.at(0, pivots_[r]);
    coords.at(0, r) = c;
    if (c.is_zero()) continue;
    for (int j = 0; j < ambient_; ++j) v.at(0, j) -= c * basis_.at(r, j);
  }
  if (!v.is_zero()) return std::nullopt;
  return coords;
}

bool Subspace::contains(const Subspace& other) const {
  if (other.ambient_ != ambient_) throw DomainError("subspace ambient mismatch");
  for (int r = 0; r < other.dim(); ++r)
    if (!contains_vector(other.basis_.row(r))) return false;
  return true;
}

Subspace operator+(const Subspace& u, const Subspace& v) {
  if (u.ambient_ != v.ambient_) throw DomainError("subspace ambient mismatch");
  return Subspace::span(Matrix::vstack(u.basis_, v.basis_));
}

// Zassenhaus: row-reduce [U U; V 0]; rows whose left half is zero carry an
// intersection basis in the right half.
Subspace Subspace::intersection(const Subspace& u, const Subspace& v) {
  if (u.ambient_ != v.ambient_) throw DomainError("subspace ambient mismatch");
  int n = u.ambient_;
  const Field& f = u.field();
  Matrix top = Matrix::hstack(u.basis_, u.basis_);
  Matrix bottom = Matrix::hstack(v.basis_, Matrix(f, v.dim(), n));
  RrefResult r = rref(Matrix::vstack(top, bottom));
  Matrix inter(f, 0, n);
  for (int i = 0; i < r.rank; ++i) {
    if (r.pivot_cols[i] >= n)
      inter = Matrix::vstack(inter, r.rref.submatrix(i, n, 1, n));
  }
  return Subspace::span(inter);
}

bool operator==(const Subspace& u, const Subspace& v) {
  return u.ambient_ == v.ambient_ && u.basis_ == v.basis_;
}

KernelImage rref_kernel_image(const Matrix& m) {
  KernelImage out;
  RrefResult r = rref(m);
  out.rref = r.rref;
  out.rank = r.rank;

  // Kernel: one basis vector per free column.
  const Field& f = m.field();
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : r.pivot_cols) is_pivot[c] = true;
  Matrix kbasis(f, 0, m.cols());
  for (int j = 0; j < m.cols(); ++j) {
    if (is_pivot[j]) continue;
    Matrix v(f, 1, m.cols());
    v.at(0, j) = Scalar::one(f);
    for (int i = 0; i < r.rank; ++i)
      v.at(0, r.pivot_cols[i]) = -r.rref.at(i, j);
    kbasis = Matrix::vstack(kbasis, v);
  }
  out.kernel = Subspace::span(kbasis);

  // Image = column space, canonicalized as the row space of the transpose.
  out.image = Subspace::span(m.transpose());

  if (out.kernel.dim() + out.rank != m.cols())
    throw DomainError("rank-nullity violated (internal)");
  if (out.image.dim() != out.rank)
    throw DomainError("row rank != column rank (internal)");
  return out;
}

std::optional<Matrix> solve(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DomainError("solve: a.rows != b.rows");
  if (a.field() != b.field()) throw DomainError("solve: mixed fields");
  RrefResult r = rref(Matrix::hstack(a, b));
  // Inconsistent iff some pivot lands in the augmented block.
  for (int c : r.pivot_cols)
    if (c >= a.cols()) return std::nullopt;
  Matrix x(a.field(), a.cols(), b.cols());
  for (int i = 0; i < r.rank; ++i)
    for (int j = 0; j < b.cols(); ++j)
      x.at(r.pivot_cols[i], j) = r.rref.at(i, a.cols() + j);
  return x;
}

std::optional<Matrix> solve_left(const Matrix& a, const Matrix& b) {
  auto xt = solve(a.transpose(), b.transpose());
  if (!xt) return std::nullopt;
  return xt->transpose();
}

SubspaceOps subspace_ops(const Subspace& u, const Subspace& v) {
  if (u.ambient() != v.ambient() || u.field() != v.field())
    throw DomainError("subspace_ops: ambient or field mismatch");
  SubspaceOps out;
  out.sum = u + v;
  out.intersection = Subspace::intersection(u, v);
  out.contains = u.contains(v);
  if (out.sum.dim() + out.intersection.dim() != u.dim() + v.dim())
    throw DomainError("dimension formula violated (internal)");
  return out;
}

bool is_invertible(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  return rref(m).rank == m.rows();
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  RrefResult r = rref(Matrix::hstack(m, Matrix::identity(m.field(), m.rows())));
  if (r.rank != m.rows()) return std::nullopt;
  return r.rref.submatrix(0, m.cols(), m.rows(), m.cols());
}

}  // namespace panache::exactla
