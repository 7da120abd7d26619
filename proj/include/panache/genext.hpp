#pragma once

#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "panache/blended.hpp"
#include "panache/extmod.hpp"

namespace panache::genext {

using blended::Blend;
using blended::Construction;
using extmod::ExtClass;
using extmod::ExtensionSeq;
using extmod::ExtSpace;
using repcat::Matrix;
using repcat::RepMorphism;
using repcat::SignaturePtr;
using repcat::Subspace;
using repcat::WeightedRep;

/// Entry (m, n) of the staircase diagram, 0 <= m < n <= k.
using Entry = std::pair<int, int>;

/// The fixed graded object A = A_1 + ... + A_k: nonzero pure pieces with
/// strictly increasing weights.
class GradedFrame {
 public:
  explicit GradedFrame(std::vector<WeightedRep> pieces);
  int k() const { return static_cast<int>(pieces_.size()); }
  /// 1-based, following the staircase indexing: piece(r) = A_r.
  const WeightedRep& piece(int r) const;
  const std::vector<WeightedRep>& pieces() const { return pieces_; }
  int weight(int r) const { return piece(r).lowest_degree(); }
  std::vector<int> weights() const;
  const SignaturePtr& signature() const { return pieces_[0].signature(); }

  friend bool operator==(const GradedFrame& a, const GradedFrame& b);
  friend bool operator!=(const GradedFrame& a, const GradedFrame& b) { return !(a == b); }

 private:
  std::vector<WeightedRep> pieces_;
};

/// A generalized extension of level l: objects X_{m,n} for n - m <= l + 1
/// with X_{r-1,r} = A_r literally, injective arrows X_{m,n-1} -> X_{m,n} and
/// surjective arrows X_{m,n} -> X_{m+1,n}.
class GenExt {
 public:
  GenExt(GradedFrame frame, int level, std::map<Entry, WeightedRep> objects,
         std::map<Entry, Matrix> vert, std::map<Entry, Matrix> horiz);

  const GradedFrame& frame() const { return frame_; }
  int level() const { return level_; }
  int k() const { return frame_.k(); }
  bool has_entry(int m, int n) const;
  std::vector<Entry> entries() const;          // all eligible (m, n)
  std::vector<Entry> diagonal(int dist) const;  // entries with n - m = dist

  const WeightedRep& object(int m, int n) const;
  const Matrix& vert(int m, int n) const;   // X_{m,n-1} -> X_{m,n}
  const Matrix& horiz(int m, int n) const;  // X_{m,n} -> X_{m+1,n}
  RepMorphism vert_morphism(int m, int n) const;
  RepMorphism horiz_morphism(int m, int n) const;

  /// Composite of vertical arrows X_{m,r} -> X_{m,n} (identity when r = n).
  Matrix vert_composite(int m, int r, int n) const;
  /// Composite of horizontal arrows X_{m,n} -> X_{r,n} (identity when r = m).
  Matrix horiz_composite(int m, int r, int n) const;

  /// 0 -> X_{m,n-1} -> X_{m,n} -> A_n -> 0.
  ExtensionSeq vertical_seq(int m, int n) const;
  /// 0 -> A_{m+1} -> X_{m,n} -> X_{m+1,n} -> 0.
  ExtensionSeq horizontal_seq(int m, int n) const;

  /// The blended extension at lowest-diagonal entry (r-1, r+l), whose top row
  /// and right column come from the truncation.
  Blend blend_at(int r) const;

  friend bool operator==(const GenExt& a, const GenExt& b);
  friend bool operator!=(const GenExt& a, const GenExt& b) { return !(a == b); }

 private:
  GradedFrame frame_;
  int level_;
  std::map<Entry, WeightedRep> objects_;
  std::map<Entry, Matrix> vert_, horiz_;
};

/// Throws DomainError naming the first failing square or sequence.
void validate_genext(const GenExt& g);

/// Block coordinates: per generator, one matrix A_j -> A_i for every
/// 1 <= j - i <= level. The standard diagram with these operator blocks is a
/// normal form; over strictly increasing weights it is unique per ~'-class.
struct BlockForm {
  GradedFrame frame;
  int level;
  std::vector<std::map<Entry, Matrix>> blocks;  // [generator][(i, j)], 1-based

  friend bool operator==(const BlockForm& a, const BlockForm& b);
  std::string key() const;  // deterministic serialization for partitioning
};

/// Dense zero block form: every eligible (i, j) slot present.
BlockForm zero_block_form(const GradedFrame& frame, int level);

BlockForm normalize(const GenExt& g);
GenExt denormalize(const BlockForm& b);

/// The generalized extension of the frame attached to (x, phi), where phi is
/// a graded isomorphism Gr(x) -> A_1 + ... + A_k.
GenExt from_object(const WeightedRep& x, const RepMorphism& phi, const GradedFrame& frame);

/// Gr(x) as an object (pure pieces of x, zero operators).
WeightedRep associated_graded(const WeightedRep& x);

GenExt truncate(const GenExt& g);                  // level l -> l - 1
GenExt truncate_to(const GenExt& g, int level);    // repeated truncation
GenExt crop(const GenExt& g, int i, int j);

/// A compatible family f_{m,n} between two diagrams of the same shape.
using MorphFamily = std::map<Entry, Matrix>;

enum class EquivMode { strict, iso };

/// strict: the unique isomorphism that is identity on A, if one exists.
/// iso: any isomorphism of generalized extensions.
std::optional<MorphFamily> equiv(const GenExt& g1, const GenExt& g2, EquivMode mode,
                                 std::mt19937_64* rng = nullptr);

/// One automorphism component per A_r.
using AutA = std::vector<Matrix>;

/// Twists the arrows to and from the A_r: the arrow out of A_r picks up
/// sigma_r^{-1}, the arrow into A_r picks up sigma_r.
GenExt act_autA(const AutA& sigma, const GenExt& g);

/// The induced action on tuples of extension classes (pushforward along
/// sigma_r, pullback along sigma_{r+dist}^{-1}).
std::vector<ExtClass> act_autA_on_classes(const AutA& sigma, const std::vector<ExtClass>& e,
                                          const GradedFrame& frame, int dist);

/// Unique extension of f at entry `at` to the part of the diagrams above and
/// to the right of it.
MorphFamily spread_morphism(const GenExt& g1, const GenExt& g2, Entry at, const Matrix& f);

struct GlueResult {
  std::optional<MorphFamily> family;
  Entry violation{-1, -1};  // first (m, n) where the induced maps disagree
};
/// Glues maps given on the lowest diagonal; succeeds iff the induced maps
/// agree on the diagonal just above it.
GlueResult glue_lowest(const GenExt& g1, const GenExt& g2, const std::map<Entry, Matrix>& fs);

/// The fiber of truncation over a base of level l-1, coordinatized by the
/// torsor group prod_r Ext^1(A_{r+l}, A_r). The base point is the base's
/// block form with zero distance-l blocks.
class FiberDescriptor {
 public:
  explicit FiberDescriptor(const GenExt& base);
  int level() const { return level_; }
  const GenExt& base() const { return base_; }
  const BlockForm& base_blocks() const { return base_blocks_; }
  const std::vector<ExtSpace>& groups() const { return groups_; }
  int group_dim() const;
  bool surjective() const { return true; }  // Ext^2 vanishes in the model

  std::vector<ExtClass> zero_coords() const;
  GenExt lift(const std::vector<ExtClass>& coords) const;
  GenExt lift_zero() const { return lift(zero_coords()); }
  /// Torsor coordinates of a member whose truncation is ~'-equivalent to the
  /// base; throws if it is not.
  std::vector<ExtClass> coords(const GenExt& member) const;

 private:
  GenExt base_;
  BlockForm base_blocks_;
  int level_;
  std::vector<ExtSpace> groups_;
};

FiberDescriptor fiber_classes(const GenExt& base);

/// The torsor action E * member on the truncation fiber, realized by
/// translating each lowest-diagonal blended extension.
GenExt translate_member(const GenExt& member, const std::vector<ExtClass>& e,
                        Construction c = Construction::row);

/// Rebuilds g over the target base along an isomorphism f of its truncation.
GenExt transport(const GenExt& g, const MorphFamily& f, const GenExt& target_base);

/// Endomorphism families of a diagram, projected to their action on A.
/// Tuples (f_{r-1,r})_r are flattened and concatenated; a family is an
/// automorphism iff every A_r-component is invertible.
Subspace aut_family_space(const GenExt& g);

struct GammaInfo {
  Subspace aut_base;    // A-coordinates of all endo-families of the base
  Subspace stabilizer;  // image of the member's endo-families (Lemma-type restriction)
};
/// member must lie in the literal truncation fiber over base.
GammaInfo gamma_stabilizer(const GenExt& base, const GenExt& member);

}  // namespace panache::genext
