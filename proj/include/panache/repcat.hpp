#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "panache/exactla.hpp"

namespace panache::repcat {

using exactla::Field;
using exactla::Matrix;
using exactla::Scalar;
using exactla::Subspace;

struct Generator {
  std::string name;
  int degree;  // strictly negative
};

/// Fixes the ambient category: graded representations of the free Lie algebra
/// on the listed generators, over the given field. Strictly negative degrees
/// make every operator nilpotent and the weight filtration finite.
class ModelSignature {
 public:
  ModelSignature(const Field& field, std::vector<Generator> generators);
  const Field& field() const { return field_; }
  const std::vector<Generator>& generators() const { return gens_; }
  int num_generators() const { return static_cast<int>(gens_.size()); }
  int degree_of(int t) const { return gens_[t].degree; }
  int index_of(const std::string& name) const;  // -1 when absent

  friend bool operator==(const ModelSignature& a, const ModelSignature& b);
  friend bool operator!=(const ModelSignature& a, const ModelSignature& b) { return !(a == b); }

 private:
  Field field_;
  std::vector<Generator> gens_;
};

using SignaturePtr = std::shared_ptr<const ModelSignature>;

/// An object of the model category: a finitely supported Z-graded space with
/// one degree-homogeneous operator per generator. Basis convention: ascending
/// degree, then index within the degree.
class WeightedRep {
 public:
  WeightedRep(SignaturePtr sig, std::map<int, int> support, std::vector<Matrix> operators);
  /// Zero object.
  explicit WeightedRep(SignaturePtr sig);

  static WeightedRep zero(SignaturePtr sig) { return WeightedRep(std::move(sig)); }
  static WeightedRep unit(SignaturePtr sig) { return pure(std::move(sig), 0, 1); }
  static WeightedRep pure(SignaturePtr sig, int degree, int dim);

  const SignaturePtr& signature() const { return sig_; }
  const Field& field() const { return sig_->field(); }
  const std::map<int, int>& support() const { return support_; }
  const std::vector<Matrix>& operators() const { return operators_; }
  const Matrix& op(int t) const { return operators_[t]; }

  int total_dim() const { return total_dim_; }
  int dim_at(int degree) const;
  int offset_of(int degree) const;  // first basis index of the degree block
  int degree_of_index(int i) const;
  bool is_zero_object() const { return total_dim_ == 0; }
  bool is_pure() const { return support_.size() <= 1; }
  std::vector<int> degrees() const;
  int lowest_degree() const;
  int highest_degree() const;

  friend bool operator==(const WeightedRep& a, const WeightedRep& b);
  friend bool operator!=(const WeightedRep& a, const WeightedRep& b) { return !(a == b); }

 private:
  SignaturePtr sig_;
  std::map<int, int> support_;  // degree -> dim > 0
  std::vector<Matrix> operators_;
  int total_dim_ = 0;
};

/// A degree-0 linear map intertwining all generator operators.
struct RepMorphism {
  WeightedRep source;
  WeightedRep target;
  Matrix matrix;  // target.total_dim x source.total_dim

  static RepMorphism identity(const WeightedRep& x);
  RepMorphism then(const RepMorphism& next) const;  // next o this
};

/// Throws DomainError naming the first violated invariant.
void validate_rep(const WeightedRep& x);
/// Throws unless f is degree-0 and intertwines every generator.
void validate_morphism(const RepMorphism& f);

bool is_homogeneous(const WeightedRep& src, const WeightedRep& dst, const Matrix& m, int degree);

struct WeightParts {
  WeightedRep w;        // W_n x
  RepMorphism incl;     // W_n x -> x
  WeightedRep gr;       // Gr^W_n x (pure at n)
};
WeightParts weight_parts(const WeightedRep& x, int n);

/// Basis of intertwiners m -> n, as a subspace of flattened
/// (n.total_dim x m.total_dim) matrices in row-major order.
Subspace hom_space(const WeightedRep& m, const WeightedRep& n);

Matrix unflatten(const WeightedRep& m, const WeightedRep& n, const Matrix& row_vec);
Matrix flatten(const Matrix& mat);

/// Internal Hom: degree-d part is the space of degree-d linear maps m -> n,
/// with generators acting by t.f = X_t^n o f - f o X_t^m.
WeightedRep internal_hom(const WeightedRep& m, const WeightedRep& n);
/// A homogeneous degree-d map m -> n as a column vector in internal_hom(m,n).
Matrix ihom_vector_of(const WeightedRep& m, const WeightedRep& n, const Matrix& map, int degree);
/// Inverse of ihom_vector_of on the degree-d homogeneous part.
Matrix ihom_matrix_of(const WeightedRep& m, const WeightedRep& n, const Matrix& vec, int degree);

struct SumParts {
  WeightedRep sum;
  std::vector<RepMorphism> injections;
  std::vector<RepMorphism> projections;
};
SumParts direct_sum(const std::vector<WeightedRep>& parts);

WeightedRep tensor(const WeightedRep& m, const WeightedRep& n);
WeightedRep dual(const WeightedRep& m);

/// A graded subspace, stored per degree in that degree block's coordinates.
class GradedSubspace {
 public:
  explicit GradedSubspace(const WeightedRep& ambient);
  const WeightedRep& ambient() const { return ambient_; }
  int dim() const;
  int dim_at(int degree) const;
  const Subspace& part(int degree) const;

  /// Adds the homogeneous components of a total-space row vector.
  void add_vector(const Matrix& total_row);
  void add(const GradedSubspace& other);
  bool contains_vector(const Matrix& total_row) const;
  bool contains(const GradedSubspace& other) const;
  bool is_full() const;
  /// Rows = total-space coordinates of the per-degree bases, degree-ascending.
  Matrix total_basis() const;
  /// Closes under all generator operators of the ambient object.
  void stabilize();
  bool is_stable() const;

  friend bool operator==(const GradedSubspace& a, const GradedSubspace& b);

 private:
  WeightedRep ambient_;
  std::map<int, Subspace> parts_;
};

GradedSubspace kernel_of(const RepMorphism& f);
GradedSubspace image_of(const RepMorphism& f);

struct SubRep {
  WeightedRep sub;
  RepMorphism incl;
};
/// The graded subspace must be operator-stable.
SubRep sub_rep(const WeightedRep& x, const GradedSubspace& s);

struct QuotientRep {
  WeightedRep quot;
  RepMorphism proj;
};
QuotientRep quotient_rep(const WeightedRep& x, const GradedSubspace& s);

/// Smallest operator-stable graded subspace containing the rows of `vectors`,
/// returned as a subobject with its inclusion.
SubRep subobject_generated(const WeightedRep& x, const Matrix& vectors);

struct IsoResult {
  std::optional<RepMorphism> iso;
  bool deterministic = false;  // true when the exhaustive fallback ran
};
/// Randomized invertibility search over the intertwiner space (8 seeded
/// retries), then a deterministic coefficient sweep.
IsoResult is_isomorphic(const WeightedRep& m, const WeightedRep& n, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Affine systems in several unknown degree-0 matrices. Each equation has the
// shape  sum_k  L_k * U_{i_k} * R_k  =  C  with known L_k, R_k, C.
// ---------------------------------------------------------------------------

struct VarTerm {
  int var;
  std::optional<Matrix> left;   // defaults to identity
  std::optional<Matrix> right;  // defaults to identity
  bool negate = false;
};

class VarSystem {
 public:
  explicit VarSystem(const Field& field) : field_(field) {}
  /// Declares a degree-0 matrix unknown dst.total_dim x src.total_dim;
  /// when intertwine is set, the commutation equations are added.
  int add_var(const WeightedRep& src, const WeightedRep& dst, bool intertwine);
  void add_eq(const std::vector<VarTerm>& lhs, const Matrix& rhs);
  void add_eq_zero(const std::vector<VarTerm>& lhs);

  struct Solutions {
    bool solvable = false;
    std::vector<Matrix> particular;              // one matrix per variable
    std::vector<std::vector<Matrix>> kernel;     // basis of the homogeneous space
    int dim() const { return static_cast<int>(kernel.size()); }
    std::vector<Matrix> element(const std::vector<Scalar>& coeffs) const;
  };
  Solutions solve() const;

 private:
  struct VarInfo {
    WeightedRep src, dst;
    std::vector<std::pair<int, int>> entries;  // allowed (row, col) pairs
    int offset = 0;
  };
  Field field_;
  std::vector<VarInfo> vars_;
  int total_unknowns_ = 0;
  std::vector<std::vector<Scalar>> rows_;
  std::vector<Scalar> rhs_;
};

}  // namespace panache::repcat
