#include "panache/mtdemo.hpp"

#include <algorithm>

#include "panache/exactla.hpp"

namespace panache::mtdemo {

using exactla::Field;
using repcat::Generator;
using repcat::Matrix;
using repcat::ModelSignature;
using repcat::Scalar;

WeightedRep MTModel::tate(int n) const { return WeightedRep::pure(sig, -2 * n, 1); }

WeightedRep MTModel::unit() const { return WeightedRep::unit(sig); }

std::string MTModel::label_gen_name(int label) const {
  return "log" + std::to_string(label);
}

std::string MTModel::zeta_gen_name(int n) const { return "zeta" + std::to_string(n); }

MTModel build_mt(const std::vector<int>& labels, int cutoff) {
  if (cutoff < 3 || cutoff % 2 == 0)
    throw DomainError("build_mt: cutoff must be an odd integer >= 3");
  if (labels.empty()) throw DomainError("build_mt: at least one Kummer label required");
  for (int r : labels)
    if (r < 2) throw DomainError("build_mt: labels must be integers >= 2");

  MTModel m;
  m.labels = labels;
  m.cutoff = cutoff;
  std::vector<Generator> gens;
  for (int r : labels) gens.push_back({m.label_gen_name(r), -2});
  for (int n = 3; n <= cutoff; n += 2) gens.push_back({m.zeta_gen_name(n), -2 * n});
  m.sig = std::make_shared<ModelSignature>(Field::rationals(), gens);

  // The ext pattern is a model invariant; verify it entry by entry.
  auto table = ext_table(m);
  for (int n = -2; n <= cutoff; ++n) {
    int expect = 0;
    if (n == 1)
      expect = static_cast<int>(labels.size());
    else if (n > 1 && n % 2 == 1)
      expect = 1;
    if (table.at(n) != expect)
      throw DomainError("build_mt: ext table does not match the mixed-Tate pattern at n = " +
                        std::to_string(n));
  }
  return m;
}

std::map<int, int> ext_table(const MTModel& m) {
  std::map<int, int> out;
  for (int n = -2; n <= m.cutoff; ++n)
    out[n] = extmod::ext1_space(m.unit(), m.tate(n)).dim;
  return out;
}

WeightedRep twist(const MTModel& m, const WeightedRep& x, int n) {
  return repcat::tensor(x, m.tate(n));
}

namespace {

// The class of Q(of_n) by Q(by_n) whose cocycle is the unit at `gen`.
ExtClass slot_class(const MTModel& m, int of_n, int by_n, const std::string& gen) {
  const Field q = Field::rationals();
  std::vector<Matrix> cocycle;
  for (int t = 0; t < m.sig->num_generators(); ++t) {
    Matrix mat(q, 1, 1);
    if (m.sig->generators()[t].name == gen) mat.at(0, 0) = Scalar(q, 1);
    cocycle.push_back(mat);
  }
  return ExtClass(m.tate(of_n), m.tate(by_n), cocycle);
}

void check_label(const MTModel& m, int label) {
  if (std::find(m.labels.begin(), m.labels.end(), label) == m.labels.end())
    throw DomainError("unknown Kummer label " + std::to_string(label));
}

void check_zeta(const MTModel& m, int n) {
  if (n < 3 || n % 2 == 0 || n > m.cutoff)
    throw DomainError("n must be odd with 1 < n <= cutoff, got " + std::to_string(n));
}

}  // namespace

WeightedRep z_object(const MTModel& m, int n) {
  check_zeta(m, n);
  return extmod::realize(slot_class(m, 0, n, m.zeta_gen_name(n))).mid;
}

WeightedRep kummer_object(const MTModel& m, int label) {
  check_label(m, label);
  return extmod::realize(slot_class(m, 0, 1, m.label_gen_name(label))).mid;
}

WeightedRep m_object(const MTModel& m, int a, int label) {
  check_zeta(m, a);
  check_label(m, label);
  // Blend of Z_a (right column) by L_r(a) (top row): frame Q(a+1), Q(a), 1.
  ExtClass lra = slot_class(m, a, a + 1, m.label_gen_name(label));
  ExtClass za = slot_class(m, 0, a, m.zeta_gen_name(a));
  return blended::make_blend(extmod::realize(lra), extmod::realize(za)).middle;
}

WeightedRep mprime_object(const MTModel& m, int c, int label) {
  check_zeta(m, c);
  check_label(m, label);
  // Blend of L_r (right column) by Z_c(1) (top row): frame Q(1+c), Q(1), 1.
  ExtClass zc1 = slot_class(m, 1, 1 + c, m.zeta_gen_name(c));
  ExtClass lr = slot_class(m, 0, 1, m.label_gen_name(label));
  return blended::make_blend(extmod::realize(zc1), extmod::realize(lr)).middle;
}

FourWeightReport four_weight_pipeline(int a, int c, int label, int cutoff) {
  if (a < 3 || c < 3 || a % 2 == 0 || c % 2 == 0)
    throw DomainError("four_weight_pipeline: a and c must be odd integers >= 3");
  if (a == c) throw DomainError("four_weight_pipeline: a and c must be distinct");
  if (a + 1 == c || c + 1 == a)
    throw DomainError("four_weight_pipeline: graded independence needs a+1 != c and c+1 != a");
  if (cutoff < a + 1 + c)
    throw DomainError("four_weight_pipeline: cutoff must be at least a+1+c");

  FourWeightReport rep;
  rep.a = a;
  rep.c = c;
  rep.label = label;
  rep.cutoff = cutoff;

  MTModel m = build_mt({label}, cutoff);
  GradedFrame frame({m.tate(a + 1 + c), m.tate(a + 1), m.tate(a), m.unit()});
  rep.frame_weights = frame.weights();
  rep.graded_indep = motivic::graded_independent(frame);

  std::mt19937_64 rng(0x5eed0001u);
  auto s1 = motivic::classify_star_level1(frame, rng);
  for (const auto& f : s1.factors) rep.level1_ext_dims.push_back(f.ext_dim);
  rep.level1_nonempty = s1.nonempty;

  // The chosen level-1 member: Z_c(a+1), L_r(a), Z_a.
  genext::BlockForm blocks = genext::zero_block_form(frame, 1);
  const int t_zc = m.sig->index_of(m.zeta_gen_name(c));
  const int t_lr = m.sig->index_of(m.label_gen_name(label));
  const int t_za = m.sig->index_of(m.zeta_gen_name(a));
  blocks.blocks[t_zc].at({1, 2}).at(0, 0) = Scalar(Field::rationals(), 1);
  blocks.blocks[t_lr].at({2, 3}).at(0, 0) = Scalar(Field::rationals(), 1);
  blocks.blocks[t_za].at({3, 4}).at(0, 0) = Scalar(Field::rationals(), 1);
  GenExt level1 = genext::denormalize(blocks);

  auto fib2 = motivic::classify_star_fiber(level1);
  rep.level2_fiber_dims = fib2.group_dims;
  rep.level2_unique = std::all_of(fib2.group_dims.begin(), fib2.group_dims.end(),
                                  [](int d) { return d == 0; });
  GenExt level2 = fib2.fiber.lift_zero();

  auto fib3 = motivic::classify_star_fiber(level2);
  rep.level3_fiber_dim = fib3.group_dims.at(0);
  rep.gamma_trivial = fib2.gamma_trivial && fib3.gamma_trivial;
  GenExt level3 = fib3.fiber.lift_zero();

  const WeightedRep& x = level3.object(0, 4);
  rep.u_dim = motivic::u_radical(x).basis.dim();
  rep.galois_dim = 1 + rep.u_dim;
  rep.maximal = motivic::maximality_criterion(x).maximal;

  // Symbolic period matrix, factored as (2*pi*i)-power times a symbol.
  auto entry = [](int tate, const std::string& symbol) {
    return PeriodEntry{false, tate, symbol};
  };
  PeriodEntry zero{true, 0, "0"};
  std::string sa = std::to_string(a), sc = std::to_string(c), sr = std::to_string(label);
  rep.period_matrix = {
      {entry(-(a + 1 + c), "1"), entry(-(a + 1 + c), "zeta(" + sc + ")"),
       entry(-(a + 1 + c), "p'_{" + sc + "," + sr + "}"),
       entry(0, "p_{" + sa + "," + sr + "," + sc + "}(X)")},
      {zero, entry(-(a + 1), "1"), entry(-(a + 1), "log(" + sr + ")"),
       entry(-(a + 1), "p_{" + sa + "," + sr + "}")},
      {zero, zero, entry(-a, "1"), entry(-a, "zeta(" + sa + ")")},
      {zero, zero, zero, entry(0, "1")}};
  return rep;
}

}  // namespace panache::mtdemo
