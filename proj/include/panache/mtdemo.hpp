#pragma once

#include <map>
#include <string>
#include <vector>

#include "panache/motivic.hpp"

namespace panache::mtdemo {

using extmod::ExtClass;
using genext::GenExt;
using genext::GradedFrame;
using repcat::SignaturePtr;
using repcat::WeightedRep;

/// Mixed-Tate-style model: weight convention weight(Q(n)) = -2n. One
/// generator of degree -2 per Kummer label (a finite-rank slice of the
/// n = 1 ext group) and one generator of degree -2n per odd n in (1, cutoff].
struct MTModel {
  SignaturePtr sig;
  std::vector<int> labels;
  int cutoff = 0;

  WeightedRep tate(int n) const;  // Q(n)
  WeightedRep unit() const;
  std::string label_gen_name(int label) const;
  std::string zeta_gen_name(int n) const;
};

/// Builds the model and verifies the ext-group pattern dim Ext^1(1, Q(n)):
/// |labels| at n = 1, 1 for odd n > 1 up to the cutoff, 0 otherwise.
MTModel build_mt(const std::vector<int>& labels, int cutoff);

/// dim Ext^1(1, Q(n)) for n in [-2, cutoff], computed via the ext machinery.
std::map<int, int> ext_table(const MTModel& m);

/// x tensor Q(n).
WeightedRep twist(const MTModel& m, const WeightedRep& x, int n);

/// Middle object of the nonsplit extension of 1 by Q(n), n odd > 1.
WeightedRep z_object(const MTModel& m, int n);
/// Middle object of the Kummer extension of 1 by Q(1) for the given label.
WeightedRep kummer_object(const MTModel& m, int label);
/// Middle of the blended extension of Z_a by L_r(a).
WeightedRep m_object(const MTModel& m, int a, int label);
/// Middle of the blended extension of L_r by Z_c(1).
WeightedRep mprime_object(const MTModel& m, int c, int label);

struct PeriodEntry {
  bool zero = false;
  int tate_power = 0;  // exponent of 2*pi*i
  std::string symbol;  // "1", "zeta(a)", "log(r)", "p_{a,r}", ...
};

struct FourWeightReport {
  int a = 0, c = 0, label = 0, cutoff = 0;
  bool graded_indep = false;
  std::vector<int> frame_weights;      // ascending
  std::vector<int> level1_ext_dims;    // per adjacent gap
  bool level1_nonempty = false;
  std::vector<int> level2_fiber_dims;  // expected all zero
  bool level2_unique = false;
  int level3_fiber_dim = -1;           // expected 1
  bool gamma_trivial = false;
  int u_dim = -1;
  int galois_dim = -1;  // 1 + u_dim
  bool maximal = false;
  std::vector<std::vector<PeriodEntry>> period_matrix;  // 4 x 4
};

/// The b = 1 four-weight pipeline over the frame
/// Q(a+1+c) + Q(a+1) + Q(a) + 1; requires a, c odd, distinct, >= 3,
/// a + 1 != c, c + 1 != a and a + 1 + c <= cutoff.
FourWeightReport four_weight_pipeline(int a, int c, int label, int cutoff = 11);

}  // namespace panache::mtdemo
