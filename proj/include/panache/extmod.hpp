#pragma once

#include <optional>
#include <vector>

#include "panache/repcat.hpp"

namespace panache::blended {
struct Blend;
}

namespace panache::extmod {

using repcat::Matrix;
using repcat::RepMorphism;
using repcat::Scalar;
using repcat::Subspace;
using repcat::WeightedRep;

/// An element of Ext^1(of, by), stored as one cocycle matrix per generator
/// (the off-diagonal block of a middle object's operators) together with the
/// canonical representative modulo coboundaries. Two classes are equal iff
/// their reduced forms are bit-identical.
class ExtClass {
 public:
  ExtClass(WeightedRep of, WeightedRep by, std::vector<Matrix> cocycle);

  const WeightedRep& of() const { return of_; }
  const WeightedRep& by() const { return by_; }
  const std::vector<Matrix>& cocycle() const { return cocycle_; }
  const std::vector<Matrix>& reduced() const { return reduced_; }
  bool is_split() const;

  friend bool operator==(const ExtClass& a, const ExtClass& b);
  friend bool operator!=(const ExtClass& a, const ExtClass& b) { return !(a == b); }

 private:
  friend class ExtSpace;
  struct Prereduced {};
  ExtClass(Prereduced, WeightedRep of, WeightedRep by, std::vector<Matrix> cocycle,
           std::vector<Matrix> reduced)
      : of_(std::move(of)), by_(std::move(by)), cocycle_(std::move(cocycle)),
        reduced_(std::move(reduced)) {}

  WeightedRep of_, by_;
  std::vector<Matrix> cocycle_;
  std::vector<Matrix> reduced_;
};

/// A short exact sequence 0 -> sub -> mid -> quot -> 0.
struct ExtensionSeq {
  WeightedRep sub, mid, quot;
  RepMorphism incl;  // sub -> mid, mono
  RepMorphism proj;  // mid -> quot, epi
};

/// Throws DomainError unless the sequence is exact with valid morphisms.
void validate_sequence(const ExtensionSeq& s);

/// The coordinate model of Ext^1(of, by): cocycles Z = direct sum over
/// generators of the homogeneous maps of the generator's degree, coboundaries
/// B = image of h |-> (X_t^by h - h X_t^of)_t over degree-0 maps h.
class ExtSpace {
 public:
  ExtSpace(WeightedRep of, WeightedRep by);

  const WeightedRep& of() const { return of_; }
  const WeightedRep& by() const { return by_; }
  int dim() const { return dim_; }
  int coord_count() const { return coord_count_; }
  const std::vector<ExtClass>& basis() const { return basis_; }

  /// Flat Z-coordinates of a cocycle tuple.
  Matrix coords_of(const std::vector<Matrix>& cocycle) const;
  /// Canonical representative coordinates (reduce modulo coboundaries).
  Matrix reduce(const Matrix& coords) const;
  std::vector<Matrix> cocycle_from_coords(const Matrix& coords) const;
  ExtClass class_from_coords(const Matrix& coords) const;
  /// Coordinates of a class in the canonical basis of Ext^1.
  Matrix class_coordinates(const ExtClass& e) const;

 private:
  WeightedRep of_, by_;
  std::vector<std::vector<std::pair<int, int>>> layout_;  // allowed (i,j) per generator
  Subspace coboundaries_;
  std::vector<int> free_coords_;  // non-pivot coordinates of B: one per basis class
  int coord_count_ = 0;
  int dim_ = 0;
  std::vector<ExtClass> basis_;
};

struct Ext1Result {
  int dim = 0;
  std::vector<ExtClass> basis;
};
Ext1Result ext1_space(const WeightedRep& m, const WeightedRep& n);

/// Builds the middle object on by + of with operators [[X^by, phi],[0, X^of]].
ExtensionSeq realize(const ExtClass& e);
/// Reads the class off an arbitrary exact sequence via a degree-0 splitting.
ExtClass class_of(const ExtensionSeq& s);

ExtClass baer_sum(const ExtClass& e1, const ExtClass& e2);
ExtClass negate(const ExtClass& e);
ExtClass pushforward(const ExtClass& e, const RepMorphism& f);  // f : by -> by'
ExtClass pullback(const ExtClass& e, const RepMorphism& g);     // g : of' -> of
bool is_split(const ExtClass& e);

/// The canonical isomorphism Ext^1(Y, X) = Ext^1(1, Hom(Y, X)).
ExtClass transfer_unit(const ExtClass& e);
ExtClass transfer_unit_inverse(const ExtClass& e, const WeightedRep& of, const WeightedRep& by);

/// Sequence-level constructions (used by the blended-extension translations).
ExtensionSeq pullback_seq(const ExtensionSeq& s, const RepMorphism& g);   // g : Q' -> quot
ExtensionSeq pushforward_seq(const ExtensionSeq& s, const RepMorphism& f);  // f : sub -> K'
ExtensionSeq baer_sum_seq(const ExtensionSeq& s1, const ExtensionSeq& s2);

/// Image of the connecting map Hom(A2, A1) -> Ext^1(A3, A1) attached to
/// n in EXT(A3, A2), i.e. the span of the classes h_* n. Returned in the
/// flat Z-coordinates of Ext^1(A3, A1).
Subspace connecting_image(const ExtClass& n, const WeightedRep& a1);

/// In this model Ext^2 vanishes, so the obstruction of Lemma-2.1 type is
/// certified by an explicit witness blend; see blended::make_blend.
blended::Blend yoneda_obstruction(const ExtClass& l, const ExtClass& n);

}  // namespace panache::extmod
