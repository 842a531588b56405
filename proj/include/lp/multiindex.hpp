#pragma once

#include <array>
#include <string>
#include <vector>

#include "lp/errors.hpp"

namespace lp {

// Multiindex k = (k_1,...,k_d) for d <= 2; the unused component stays zero,
// so the same code paths serve both dimensions.
struct MultiIndex {
  std::array<int, 2> k{0, 0};

  constexpr MultiIndex() = default;
  constexpr explicit MultiIndex(int k0) : k{k0, 0} {}
  constexpr MultiIndex(int k0, int k1) : k{k0, k1} {}

  int order() const { return k[0] + k[1]; }  // |k|
  bool is_zero() const { return k[0] == 0 && k[1] == 0; }
  double factorial() const;

  bool operator==(const MultiIndex&) const = default;
  bool operator<(const MultiIndex& o) const { return k < o.k; }
  MultiIndex operator+(const MultiIndex& o) const { return {k[0] + o.k[0], k[1] + o.k[1]}; }

  // componentwise l <= k, the domain of the binomial coefficient
  bool contains(const MultiIndex& o) const { return o.k[0] <= k[0] && o.k[1] <= k[1]; }
  MultiIndex minus(const MultiIndex& o) const;

  int packed() const { return k[0] * 64 + k[1]; }
  std::string str() const;
};

double binom(const MultiIndex& k, const MultiIndex& l);
double multinom(const MultiIndex& k, const std::vector<MultiIndex>& parts);

// h^k = prod h_a^{k_a}
double pow_multi(const std::array<double, 2>& h, const MultiIndex& k, int dim);

// all k with |k| < theta (theta > 0), ordered by |k| then lexicographically
std::vector<MultiIndex> multiindices_below(double theta, int dim);
std::vector<MultiIndex> multiindices_upto(int max_order, int dim);

// ordered componentwise splits k = k_1 + ... + k_r
std::vector<std::vector<MultiIndex>> index_splits(const MultiIndex& k, int r, int dim);

}  // namespace lp
