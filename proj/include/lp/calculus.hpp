#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "lp/besov.hpp"
#include "lp/block_sequence.hpp"
#include "lp/field.hpp"
#include "lp/paraproduct.hpp"
#include "lp/partition.hpp"
#include "lp/word.hpp"

namespace lp {

// Pointwise grid function. The correction fields of the recursive calculus
// are combined and read pointwise only, never transformed, so no spectrum is
// carried.
struct GridFn {
  int dim = 1;
  int n = 0;
  std::vector<double> v;

  double at(const GridIndex& p) const {
    return v[dim == 2 ? static_cast<std::size_t>(p.i0) * n + p.i1 : p.i0];
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

GridFn to_gridfn(const Field& f);

// Evaluation context for the recursive correction calculus on a word of
// block sequences. Contiguous subwords are addressed by (start, len); all
// per-block and summed correction fields are memoized, since suffix subwords
// share work across the recursion. Map nodes are stable and values are
// write-once, so reads after warm-up are safe from concurrent workers.
class CalcContext {
 public:
  CalcContext(const DyadicPartition& part, Word word, std::vector<BlockSequence> comps,
              int shift = 1);

  const DyadicPartition& partition() const { return *part_; }
  const Word& word() const { return word_; }
  int shift() const { return shift_; }
  int j_cap() const { return j_cap_; }
  int size() const { return word_.size(); }
  double alpha(int s, int len) const { return word_.alpha_sum(s, len); }

  // blocks, prefix sums f^{<j} and full sums of the iterated pair operator
  // on the subword [s, s+len); prefix index may be <= 0 (zero) or >= j_cap
  // (full sum)
  const Field& f_block(int s, int len, int j) const;
  const Field& f_prefix(int s, int len, int j) const;
  const Field& f_sum(int s, int len) const;

  // per-block correction D^{k,j}; defined for every k
  const GridFn& d_kj(int s, int len, const MultiIndex& k, int j) const;
  // summed correction D^k; only for |k| < subword regularity
  const GridFn& d_k(int s, int len, const MultiIndex& k) const;
  // cumulative correction C^{k,j}; any integer j
  const GridFn& c_kj(int s, int len, const MultiIndex& k, int j) const;

  // generalized Taylor polynomial of the subword, truncated at theta
  // (default: the subword regularity)
  double t_poly(int s, int len, const GridIndex& x, const GridIndex& y,
                std::optional<double> theta = std::nullopt) const;

  // generalized Taylor remainder of the subword
  double omega(int s, int len, const GridIndex& x, const GridIndex& y) const;

  // per-block remainder at truncation theta, and its prefix sum over i < j_excl
  double omega_theta_j(int s, int len, double theta, int j, const GridIndex& x,
                       const GridIndex& y) const;
  double omega_theta_prefix(int s, int len, double theta, int j_excl, const GridIndex& x,
                            const GridIndex& y) const;

 private:
  const DyadicPartition* part_;
  Word word_;
  std::vector<BlockSequence> comps_;
  int shift_;
  int j_cap_;

  void build_level(int s, int len) const;

  using Key = std::uint64_t;
  static Key key(int s, int len, int kpacked, int j) {
    return (static_cast<Key>(s) << 48) | (static_cast<Key>(len) << 40) |
           (static_cast<Key>(static_cast<std::uint64_t>(kpacked)) << 16) |
           static_cast<Key>(static_cast<std::uint16_t>(j + 64));
  }

  mutable std::mutex mu_;
  mutable std::map<Key, Field> blocks_;
  mutable std::map<Key, Field> prefixes_;
  mutable std::map<Key, Field> sums_;
  mutable std::map<Key, GridFn> dkj_;
  mutable std::map<Key, GridFn> dk_;
  mutable std::map<Key, GridFn> ckj_;
};

// ---- concrete two- and three-component objects ----

// d^k(f<g) - sum_{k1+k2=k, |k1|<alpha, |k2|>=beta} binom(k,k1) d^{k1}f d^{k2}g
Field d2_correction(const Field& f, const Field& g, const MultiIndex& k, double alpha, double beta,
                    const DyadicPartition& part);

// two-component generalized Taylor remainder of f<g with precomputed
// coefficient fields for repeated evaluation
class Omega2 {
 public:
  Omega2(const Field& f, const Field& g, double alpha, double beta, const DyadicPartition& part);
  double value(const GridIndex& x, const GridIndex& y) const;
  // low-regularity form (alpha+beta < 1 only):
  // (f<g)(y) - (f<g)(x) - f(x)(g(y) - g(x))
  double low_reg_value(const GridIndex& x, const GridIndex& y) const;
  const Field& pp() const { return pp_; }
  const Field& d2(const MultiIndex& k) const;
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  const DyadicPartition* part_;
  double alpha_, beta_;
  Field f_;
  Field pp_;
  std::vector<MultiIndex> dk_orders_;
  std::vector<Field> dk_fields_;
  std::vector<MultiIndex> f_orders_;
  std::vector<Field> f_derivs_;
  std::unique_ptr<ClassicalJet> jet_g_;
};

double omega2(const Field& f, const Field& g, double alpha, double beta, const GridIndex& x,
              const GridIndex& y, const DyadicPartition& part);

// residual blocks R^j = Delta_{j-1}(f<g) - sum_{|k|<alpha} Delta_{<j-2}(d^k f) Delta^k_{j-1} g
BlockSequence r_seq(const Field& f, const Field& g, double alpha, double beta,
                    const DyadicPartition& part);

// moment sequence {Delta^k_{j-1} g}_j as a block sequence tagged beta + |k|
BlockSequence moment_seq(const Field& g, const MultiIndex& k, double beta,
                         const DyadicPartition& part);

// three-component generalized Taylor remainder of (f<g)<h. The correction
// coefficients d3 are the canonical choice produced by reorganizing the
// abstract remainders of the split f<g = sum_k f^(k)_{12} + f_3.
class Omega3 {
 public:
  Omega3(const Field& f, const Field& g, const Field& h, double alpha, double beta, double gamma,
         const DyadicPartition& part);
  double value(const GridIndex& x, const GridIndex& y) const;
  // the same quantity assembled directly from the abstract remainders
  double reorg_reference(const GridIndex& x, const GridIndex& y) const;
  const GridFn& d3(const MultiIndex& l) const;
  const Field& pph() const { return pph_; }

 private:
  const DyadicPartition* part_;
  double alpha_, beta_, gamma_;
  Field pp_, pph_;
  std::vector<MultiIndex> d3_orders_;
  std::vector<GridFn> d3_fields_;
  std::vector<MultiIndex> d2_orders_;
  std::vector<Field> d2_fields_;
  std::vector<MultiIndex> f_orders_;  // |k| < alpha
  std::vector<Field> f_derivs_;
  std::unique_ptr<Omega2> omega_gh_;
  std::vector<std::unique_ptr<ClassicalJet>> mpl_jets_;  // aligned with f_orders_, null at l = 0
  std::unique_ptr<ClassicalJet> jet_h_;
  std::vector<std::unique_ptr<CalcContext>> ctx_k_;  // word (1^(k), 2^(k), 4)
  std::unique_ptr<CalcContext> ctx_34_;
};

}  // namespace lp
