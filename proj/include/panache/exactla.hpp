#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "panache/errors.hpp"

namespace panache::exactla {

/// Coefficient field: the rationals, or a prime field F_p with p < 2^16.
class Field {
 public:
  Field() : p_(0) {}
  static Field rationals() { return Field(); }
  static Field prime(std::uint32_t p);

  bool is_rational() const { return p_ == 0; }
  std::uint32_t characteristic() const { return p_; }
  std::string to_string() const;

  friend bool operator==(const Field& a, const Field& b) { return a.p_ == b.p_; }
  friend bool operator!=(const Field& a, const Field& b) { return a.p_ != b.p_; }

 private:
  std::uint32_t p_;  // 0 = Q
};

/// An exact scalar: a rational in lowest terms, or a residue in [0, p).
class Scalar {
 public:
  Scalar() : field_(Field::rationals()), rat_(0), res_(0) {}
  Scalar(const Field& f, long value);
  static Scalar rational(const mpq_class& q);
  static Scalar residue(const Field& f, long r);
  static Scalar zero(const Field& f) { return Scalar(f, 0); }
  static Scalar one(const Field& f) { return Scalar(f, 1); }

  const Field& field() const { return field_; }
  bool is_zero() const;
  bool is_one() const;
  const mpq_class& rat() const { return rat_; }
  std::uint32_t res() const { return res_; }

  Scalar operator-() const;
  Scalar inverse() const;  // throws DomainError on zero

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
  Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
  Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

  friend bool operator==(const Scalar& a, const Scalar& b);
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  /// "num/den" for rationals (den omitted when 1), decimal residue for F_p.
  std::string to_string() const;
  static Scalar from_string(const Field& f, const std::string& s);

 private:
  void check_same_field(const Scalar& other) const;
  Field field_;
  mpq_class rat_;       // canonical lowest terms, positive denominator (Q only)
  std::uint32_t res_;   // residue in [0, p) (F_p only)
};

/// Dense row-major matrix over a single field.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(const Field& f, int rows, int cols);  // zero matrix
  static Matrix identity(const Field& f, int n);
  static Matrix zero(const Field& f, int rows, int cols) { return Matrix(f, rows, cols); }
  static Matrix row_vector(const std::vector<Scalar>& entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Field& field() const { return field_; }
  bool is_zero() const;

  Scalar& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Scalar& at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  Matrix transpose() const;
  Matrix operator-() const;
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Scalar& c, const Matrix& a);
  friend bool operator==(const Matrix& a, const Matrix& b);
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  /// Rows of `b` appended below `a`.
  static Matrix vstack(const Matrix& a, const Matrix& b);
  /// Columns of `b` appended to the right of `a`.
  static Matrix hstack(const Matrix& a, const Matrix& b);
  Matrix submatrix(int row0, int col0, int nrows, int ncols) const;
  void set_block(int row0, int col0, const Matrix& block);
  Matrix row(int i) const { return submatrix(i, 0, 1, cols_); }
  Matrix col(int j) const { return submatrix(0, j, rows_, 1); }

  std::string to_string() const;

 private:
  void check_compatible(const Matrix& other) const;
  int rows_, cols_;
  Field field_;
  std::vector<Scalar> data_;
};

struct RrefResult {
  Matrix rref;
  std::vector<int> pivot_cols;  // one per nonzero row, ascending
  int rank = 0;
};

RrefResult rref(const Matrix& m);

/// A subspace of k^n in canonical form: basis rows form an RREF matrix
/// with no zero rows, so equal subspaces have bit-identical bases.
class Subspace {
 public:
  Subspace() : ambient_(0) {}
  /// Zero subspace of k^n.
  Subspace(const Field& f, int ambient);
  /// Canonicalizes the row span of `span_rows`.
  static Subspace span(const Matrix& span_rows);
  static Subspace full(const Field& f, int ambient);

  int ambient() const { return ambient_; }
  int dim() const { return basis_.rows(); }
  const Field& field() const { return basis_.field(); }
  const Matrix& basis() const { return basis_; }
  const std::vector<int>& pivot_cols() const { return pivots_; }

  bool contains_vector(const Matrix& row_vec) const;
  bool contains(const Subspace& other) const;
  /// Remainder of `row_vec` after eliminating all pivot coordinates.
  Matrix reduce_vector(const Matrix& row_vec) const;
  /// Coordinates of `row_vec` in the basis; nullopt if not a member.
  std::optional<Matrix> coordinates_of(const Matrix& row_vec) const;

  friend Subspace operator+(const Subspace& u, const Subspace& v);
  static Subspace intersection(const Subspace& u, const Subspace& v);
  friend bool operator==(const Subspace& u, const Subspace& v);
  friend bool operator!=(const Subspace& u, const Subspace& v) { return !(u == v); }

 private:
  int ambient_;
  Matrix basis_;
  std::vector<int> pivots_;
};

struct KernelImage {
  Matrix rref;
  Subspace kernel;  // subspace of k^cols
  Subspace image;   // column space, as subspace of k^rows
  int rank = 0;
};

/// RREF together with canonical kernel and image; rank-nullity is enforced.
KernelImage rref_kernel_image(const Matrix& m);

/// Some x with a*x = b, free variables set to zero; nullopt when inconsistent.
std::optional<Matrix> solve(const Matrix& a, const Matrix& b);

/// Solves x*a = b (i.e. through a row-vector system).
std::optional<Matrix> solve_left(const Matrix& a, const Matrix& b);

struct SubspaceOps {
  Subspace sum;
  Subspace intersection;
  bool contains = false;  // v subseteq u
};
SubspaceOps subspace_ops(const Subspace& u, const Subspace& v);

bool is_invertible(const Matrix& m);
std::optional<Matrix> inverse(const Matrix& m);

}  // namespace panache::exactla
