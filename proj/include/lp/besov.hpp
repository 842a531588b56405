#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "lp/block_sequence.hpp"
#include "lp/field.hpp"
#include "lp/partition.hpp"

namespace lp {

// Positive non-integer regularities only; partial-sum arithmetic downstream
// assumes a safe distance from the integers.
void check_regularity(double alpha);

// sup_j 2^{j alpha} ||Delta_j f||_inf, j from -1 (field case)
double besov_norm(const Field& f, double alpha, const DyadicPartition& part);
// sup_j 2^{j alpha} ||f^j||_inf, j from 0 (sequence case)
double besov_norm(const BlockSequence& seq, double alpha);

// Lacunary series sum_j 2^{-j alpha} a_j cos(2^j x + phi_j), a_j in [1/2,1],
// phi_j in [0,2pi), drawn from a seeded SplitMix64 stream. Each mode lands in
// exactly one block. In two dimensions the mode for scale j points in a
// random direction with |kappa| ~ 2^j.
Field synth_lacunary(double alpha, std::uint64_t seed, int j_top, const DyadicPartition& part);

// Dense variant: every annulus 2^{j-1} < |kappa| <= 2^j filled with
// random-phase modes, each shell normalized to sup-norm 2^{-j alpha}. Needed
// wherever moment-weighted blocks must be nontrivial (lacunary modes sit at
// the flat points of the bump, where all symbol derivatives vanish).
Field synth_dense(double alpha, std::uint64_t seed, int j_top, const DyadicPartition& part);

// Taylor data of f at orders |k| < theta; remainder(x,y) evaluates
// f(y) - sum_{|k|<theta} h^k/k! d^k f(x) with h the lifted displacement.
class ClassicalJet {
 public:
  ClassicalJet(const Field& f, double theta, const DyadicPartition& part);
  double remainder(const GridIndex& x, const GridIndex& y) const;
  double theta() const { return theta_; }
  const Field& field() const { return f_; }

 private:
  Field f_;
  double theta_;
  std::vector<MultiIndex> orders_;
  std::vector<Field> derivs_;
  std::vector<double> inv_fact_;
};

double classical_remainder(const Field& f, double theta, const GridIndex& x, const GridIndex& y,
                           const DyadicPartition& part);

// least-squares slope of log2 ||f^j|| against j over [j_lo, j_hi], skipping
// blocks with norm < 1e-14; INSUFFICIENT_SCALES with fewer than 4 usable j
double block_decay_slope(const BlockSequence& seq, int j_lo, int j_hi);

// plain least squares, shared by the decay and scaling fits
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  double max_residual = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lp
