#pragma once

#include <optional>
#include <vector>

#include "panache/genext.hpp"

namespace panache::motivic {

using extmod::ExtClass;
using genext::GenExt;
using genext::GradedFrame;
using repcat::Matrix;
using repcat::Subspace;
using repcat::WeightedRep;

/// A bracket-closed subspace of the strictly degree-lowering endomorphisms,
/// in flattened End-coordinates of the ambient object.
struct LieSubalgebra {
  WeightedRep ambient;
  Subspace basis;         // flattened (dim x dim) matrices
  bool bracket_closed = true;
};

/// dim W_{-1} End(x) = sum over weight pairs p < q of dim x_q * dim x_p.
int w_minus_one_end_dim(const WeightedRep& x);

/// Bertrand-style total nonsplitting, decided by the generated-subobject
/// criterion: transfer to an extension of the unit, realize, and test that
/// the canonical degree-0 lift of the unit generates the middle object.
bool totally_nonsplit(const ExtClass& e);

/// All vertical and horizontal extensions of the diagram totally nonsplit.
bool tns_genext(const GenExt& g);

/// dim End(middle) == 1; requires characteristic 0 and the by-weights
/// strictly below the of-weights.
bool end_scalar_check(const ExtClass& e);

/// Bracket closure of the generator operators inside End(x).
LieSubalgebra u_radical(const WeightedRep& x);

bool is_maximal(const WeightedRep& x);

bool graded_independent(const WeightedRep& x);
bool graded_independent(const GradedFrame& frame);

struct MaximalityReport {
  bool maximal = false;
  std::vector<bool> adjacent_tns;    // one per r = 1..k-1
  bool radical_route = false;        // is_maximal via the bracket closure
};
/// Requires graded-independence and characteristic 0; computes both routes
/// independently and checks they agree.
MaximalityReport maximality_criterion(const WeightedRep& x);

/// The adjacent subquotient extension 0 -> Gr_{p_r} -> W_{p_{r+1}}x/W_{p_{r-1}}x
/// -> Gr_{p_{r+1}} -> 0 (1-based r).
ExtClass adjacent_extension(const WeightedRep& x, int r);

struct StarFactor {
  int r = 0;
  int ext_dim = 0;
  bool tns_class_exists = false;
  std::vector<ExtClass> basis;
};

struct StarLevel1 {
  std::vector<StarFactor> factors;
  bool nonempty = false;  // a totally nonsplit tuple exists
};
/// Description of S*_1: per-r Ext^1(A_{r+1}, A_r) with its totally nonsplit
/// locus; the Aut(A) action is by pushforwards and pullbacks, so nonzero
/// orbits are parametrized by the basis up to component scaling.
StarLevel1 classify_star_level1(const GradedFrame& frame, std::mt19937_64& rng);

struct StarFiber {
  genext::FiberDescriptor fiber;
  std::vector<int> group_dims;
  bool surjective = true;
  bool gamma_trivial = false;  // the Gamma-action on the fiber is trivial
};
/// The fiber of S*_l -> S*_{l-1} over the class of `chosen` (a totally
/// nonsplit generalized extension of level l-1), as a torsor with explicit
/// coordinates. Requires a graded-independent frame and characteristic 0.
StarFiber classify_star_fiber(const GenExt& chosen);

/// A totally nonsplit class in Ext^1(of, by) when one exists: generic search
/// (seeded draws, then a bounded deterministic sweep).
std::optional<ExtClass> find_tns_class(const WeightedRep& of, const WeightedRep& by,
                                       std::mt19937_64& rng);

}  // namespace panache::motivic
