#pragma once

#include <vector>

#include "lp/block_sequence.hpp"
#include "lp/field.hpp"
#include "lp/multiindex.hpp"

namespace lp {

// Smooth dyadic partition of unity on frequency space, bound to a grid.
//
// The radial profile is built from the smooth step S(t) = h(t)/(h(t)+h(1-t)),
// h(t) = exp(-1/t) for t > 0:
//   chi(xi) = 1 - S(sharpness * (|xi| - 1)),
// so chi = 1 on |xi| <= 1 and chi = 0 on |xi| >= 1 + 1/sharpness (exactly; the
// plateaus are exact in floating point). rho(xi) = chi(xi/2) - chi(xi) is
// supported in 1 <= |xi| <= 2 + 2/sharpness, and
//   chi(xi) + sum_{j=0..J} rho(2^-j xi) = chi(2^-(J+1) xi)
// telescopes to 1 on |xi| <= 2^(J+1).
//
// Symbol derivatives (for the moment-weighted blocks) are central finite
// differences on the profile, mean-subtracted so plateau regions give exact
// zeros, and clamped to zero outside the open support annulus.
class DyadicPartition {
 public:
  DyadicPartition(int dim, int n, double sharpness, int k_max);

  int dim() const { return dim_; }
  int n() const { return n_; }
  int j_max() const { return j_max_; }
  int k_max() const { return k_max_; }
  double sharpness() const { return sharpness_; }

  // number of sequence slots used by decompositions: blocks j = 0 .. j_cap-1
  // hold Delta_{j-1}; every resolvable field is covered
  int j_cap() const { return j_max_ + 2; }

  // outer edge of supp rho (2 + 2/sharpness) and of supp chi (1 + 1/sharpness)
  double rho_outer() const { return 2.0 + 2.0 / sharpness_; }
  double chi_outer() const { return 1.0 + 1.0 / sharpness_; }

  // fields with band <= resolvable_band() are reproduced exactly by the
  // blocks j = -1 .. j_max
  double resolvable_band() const { return static_cast<double>(1 << (j_max_ + 1)); }

  double chi(double r) const;
  double rho(double r) const;
  // rho_j(r) for j >= 0, chi(r) for j = -1 (radial argument)
  double rho_j(int j, double r) const;

  // d^k rho_j at the frequency vector xi; exact zero outside the support
  double symbol_deriv(int j, const MultiIndex& k, const std::array<double, 2>& xi) const;

  void check_field(const Field& f) const;

 private:
  double profile_deriv(bool is_chi, const MultiIndex& k, const std::array<double, 2>& xi) const;

  int dim_;
  int n_;
  int j_max_;
  int k_max_;
  double sharpness_;
  std::vector<long double> fd_steps_;                 // per derivative order
  std::vector<std::vector<long double>> fd_weights_;  // per derivative order
};

// Validates grid and parameters; GRID_TOO_SMALL when fewer than five dyadic
// scales fit.
DyadicPartition make_partition(int dim, int n, double sharpness = 3.0, int k_max = 6);

// Littlewood-Paley block Delta_j f (j >= -1)
Field lp_block(const Field& f, int j, const DyadicPartition& part);

// all blocks {Delta_{j-1} f} for j = 0 .. j_cap-1; the blocks sum back to f
BlockSequence lp_decompose(const Field& f, const DyadicPartition& part, double alpha_tag);
BlockSequence lp_decompose(const Field& f, const DyadicPartition& part);

// spectrum multiplied by (i kappa)^k
Field spectral_derivative(const Field& f, const MultiIndex& k, const DyadicPartition& part);

// moment-weighted block: multiplier (-i)^{|k|} d^k rho_j(kappa) / k!,
// the transform of the kernel F^{-1}(rho_j)(x-y) (y-x)^k / k!
Field moment_block(const Field& g, int j, const MultiIndex& k, const DyadicPartition& part);

// finite-difference weights for the m-th derivative at 0 on the given nodes
std::vector<double> fd_weights(int m, const std::vector<double>& nodes);

}  // namespace lp
