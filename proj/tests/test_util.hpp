#pragma once

// Shared generators for randomized suites. All draws go through an explicit
// seeded engine so failures reproduce.

#include <random>
#include <vector>

#include "panache/repcat.hpp"

namespace testutil {

using namespace panache::repcat;

inline SignaturePtr make_sig(const Field& f,
                             const std::vector<std::pair<std::string, int>>& gens) {
  std::vector<Generator> gs;
  for (const auto& [name, deg] : gens) gs.push_back({name, deg});
  return std::make_shared<ModelSignature>(f, gs);
}

inline Scalar random_scalar(const Field& f, std::mt19937_64& rng, bool allow_zero = true) {
  if (f.is_rational()) {
    std::uniform_int_distribution<long> num(-3, 3);
    std::uniform_int_distribution<long> den(1, 2);
    long n = num(rng);
    if (!allow_zero && n == 0) n = 1;
    return Scalar::rational(mpq_class(n, den(rng)));
  }
  std::uniform_int_distribution<long> d(allow_zero ? 0 : 1, f.characteristic() - 1);
  return Scalar(f, d(rng));
}

// Random homogeneous operators on a given support.
inline WeightedRep random_rep(const SignaturePtr& sig, const std::map<int, int>& support,
                              std::mt19937_64& rng, int zero_percent = 25) {
  int total = 0;
  for (auto& [d, dim] : support) total += dim;
  const Field& f = sig->field();
  std::uniform_int_distribution<int> pct(0, 99);
  std::vector<Matrix> ops;
  for (int t = 0; t < sig->num_generators(); ++t) {
    Matrix op(f, total, total);
    WeightedRep shell = WeightedRep::pure(sig, 0, 1);  // only for field access
    (void)shell;
    // offsets
    auto offset_of = [&](int degree) {
      int off = 0;
      for (auto& [d, dim] : support) {
        if (d >= degree) break;
        off += dim;
      }
      return off;
    };
    const int dt = sig->degree_of(t);
    for (auto& [d, dim] : support) {
      auto it = support.find(d + dt);
      if (it == support.end()) continue;
      for (int i = 0; i < it->second; ++i)
        for (int j = 0; j < dim; ++j)
          if (pct(rng) >= zero_percent)
            op.at(offset_of(d + dt) + i, offset_of(d) + j) = random_scalar(f, rng);
    }
    ops.push_back(op);
  }
  return WeightedRep(sig, support, ops);
}

}  // namespace testutil
