#pragma once

#include <optional>

#include "panache/extmod.hpp"

namespace panache::blended {

using extmod::ExtClass;
using extmod::ExtensionSeq;
using repcat::Matrix;
using repcat::RepMorphism;
using repcat::Subspace;
using repcat::WeightedRep;

/// A blended extension: the 3x3 exact commuting diagram interlocking a top
/// row 0 -> A1 -> L -> A2 -> 0 with a right column 0 -> A2 -> N -> A3 -> 0
/// through a middle object X. The frame (both sequences) is stored so that
/// equivalence is a constrained linear solve.
struct Blend {
  ExtensionSeq l;        // top row
  ExtensionSeq n;        // right column
  WeightedRep middle;    // X
  RepMorphism mid_incl;  // A1 -> X    (second row)
  RepMorphism mid_proj;  // X  -> N    (second row)
  RepMorphism col_incl;  // L  -> X    (middle column)
  RepMorphism col_proj;  // X  -> A3   (middle column)

  const WeightedRep& a1() const { return l.sub; }
  const WeightedRep& a2() const { return l.quot; }
  const WeightedRep& a3() const { return n.quot; }
};

/// Checks exactness of all rows and columns and commutativity of all squares.
void validate_blend(const Blend& b);

bool same_frame(const Blend& b1, const Blend& b2);

/// Canonical blend on A1 + A2 + A3 with zero distance-2 block; the top row
/// is l and the right column is n (l.quot and n.sub must coincide literally).
Blend make_blend(const ExtensionSeq& l, const ExtensionSeq& n);

enum class Construction { row, column };

/// Torsor translation by e in EXT(A3, A1). The row construction Baer-sums
/// the second row with the pullback of e along N ->> A3; the column
/// construction pushes e forward along A1 -> L and Baer-sums the middle
/// column. The two agree on equivalence classes.
Blend translate(const ExtClass& e, const Blend& b, Construction c);

/// The unique middle-object morphism inducing identity on L and N, if any.
std::optional<RepMorphism> blend_equiv(const Blend& b1, const Blend& b2);

struct SecondRowReport {
  ExtClass cls;                 // class of 0 -> A1 -> X -> N -> 0
  int hom_a2_a1_dim = 0;
  int connecting_image_dim = 0;  // Image(Hom(A2,A1) -> Ext^1(A3,A1))
  bool injective_on_classes = false;
};
SecondRowReport second_row(const Blend& b);

/// Automorphisms of the blend are id + G for G in the returned space; its
/// dimension equals dim Hom(A3, A1).
Subspace aut_blend(const Blend& b);

}  // namespace panache::blended
