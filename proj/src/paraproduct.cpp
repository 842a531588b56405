#include "lp/paraproduct.hpp"

#include <cmath>
#include <vector>

namespace lp {

namespace {

// accumulate a*b into acc (samples only; the caller builds the Field once at
// the end, which keeps the whole sum a single transform)
void mul_acc(std::vector<double>& acc, const Field& a, const Field& b) {
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += sa[i] * sb[i];
}

struct PaddedPair {
  Field f, g;
  DyadicPartition part;
};

// move f, g to a grid where all block products are exact
PaddedPair prepare(const Field& f0, const Field& g0, const DyadicPartition& part0) {
  require_same_grid(f0, g0);
  part0.check_field(f0);
  int n = part0.n();
  double band = f0.band() + g0.band();
  if (band < n / 2.0) return {f0, g0, part0};
  while (band >= n / 2.0) n *= 2;
  require(n <= (part0.dim() == 2 ? 4096 : 1 << 22), errc::aliasing,
          "inputs too wide even for a padded grid");
  return {f0.upsampled(n), g0.upsampled(n),
          DyadicPartition(part0.dim(), n, part0.sharpness(), part0.k_max())};
}

}  // namespace

Field paraproduct(const Field& f0, const Field& g0, const DyadicPartition& part0) {
  auto [f, g, part] = prepare(f0, g0, part0);
  require(g.band() <= part.resolvable_band(), errc::unresolved_bandwidth,
          "high-frequency factor not fully covered by dyadic blocks");
  std::vector<double> acc(f.size(), 0.0);
  Field prefix = Field::zero(f.dim(), f.n());  // sum of Delta_i f over i < j-1
  for (int j = -1; j <= part.j_max(); ++j) {
    if (j > 0) mul_acc(acc, prefix, lp_block(g, j, part));  // prefix empty before j = 1
    if (j - 1 >= -1) prefix = prefix + lp_block(f, j - 1, part);
  }
  double band = std::min(f.band() + g.band(), f.n() / 2.0 - 1.0);
  return Field::from_samples(f.dim(), f.n(), std::move(acc), band);
}

Field resonant(const Field& f0, const Field& g0, const DyadicPartition& part0) {
  auto [f, g, part] = prepare(f0, g0, part0);
  require(f.band() <= part.resolvable_band() && g.band() <= part.resolvable_band(),
          errc::unresolved_bandwidth, "factors not fully covered by dyadic blocks");
  int jtop = part.j_max();
  std::vector<Field> bf, bg;
  bf.reserve(jtop + 2);
  bg.reserve(jtop + 2);
  for (int j = -1; j <= jtop; ++j) {
    bf.push_back(lp_block(f, j, part));
    bg.push_back(lp_block(g, j, part));
  }
  std::vector<double> acc(f.size(), 0.0);
  for (int i = -1; i <= jtop; ++i)
    for (int j = std::max(-1, i - 1); j <= std::min(jtop, i + 1); ++j)
      mul_acc(acc, bf[static_cast<std::size_t>(i + 1)], bg[static_cast<std::size_t>(j + 1)]);
  double band = std::min(f.band() + g.band(), f.n() / 2.0 - 1.0);
  return Field::from_samples(f.dim(), f.n(), std::move(acc), band);
}

BlockSequence pair_op(const BlockSequence& f, const BlockSequence& g, int shift,
                      const DyadicPartition& part) {
  require(!f.blocks.empty() && !g.blocks.empty(), errc::unbound_component, "empty sequence");
  part.check_field(f.blocks[0]);
  part.check_field(g.blocks[0]);
  require(f.blocks.size() == g.blocks.size(), errc::grid_mismatch,
          "sequences have different lengths");
  require(shift >= 0, errc::order_out_of_range, "shift must be nonnegative");
  require(f.alpha > 0.0 && g.alpha > 0.0, errc::nonpositive_regularity,
          "pair operator requires positive regularity tags");

  BlockSequence out;
  out.alpha = g.alpha;
  out.ball = f.ball * std::ldexp(1.0, -shift - 1) + g.ball;
  out.provenance = "pair_op";
  int count = f.size();
  Field prefix = Field::zero(f.blocks[0].dim(), f.blocks[0].n());
  out.blocks.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    // prefix holds sum_{i < j - shift} f^i
    out.blocks.push_back(Field::product(prefix, g[j]));
    int incoming = j - shift;  // becomes visible at step j+1
    if (incoming >= 0 && incoming < count) prefix = prefix + f[incoming];
  }
  return out;
}

BlockSequence multi_op(std::span<const BlockSequence> seqs, int shift,
                       const DyadicPartition& part) {
  require(!seqs.empty(), errc::unbound_component, "need at least one sequence");
  BlockSequence acc = seqs[0];
  for (std::size_t i = 1; i < seqs.size(); ++i) acc = pair_op(acc, seqs[i], shift, part);
  return acc;
}

Field mpl(const Field& g, const Field& h, const MultiIndex& l, const DyadicPartition& part) {
  require(!l.is_zero(), errc::zero_multiindex,
          "moment paraproduct needs l != 0; use paraproduct for l = 0");
  require_same_grid(g, h);
  part.check_field(g);
  require(g.band() + h.band() < part.n() / 2.0, errc::aliasing,
          "product band does not fit the grid");
  require(h.band() <= part.resolvable_band(), errc::unresolved_bandwidth,
          "high-frequency factor not fully covered by dyadic blocks");
  std::vector<double> acc(g.size(), 0.0);
  Field prefix = Field::zero(g.dim(), g.n());  // sum of Delta^l_{i-1} g, i < j-1
  for (int j = 0; j < part.j_cap(); ++j) {
    mul_acc(acc, prefix, lp_block(h, j - 1, part));
    int incoming = j - 1;  // moment block Delta^l_{incoming-1} enters at j+1
    if (incoming >= 0) prefix = prefix + moment_block(g, incoming - 1, l, part);
  }
  double band = std::min(g.band() + h.band(), g.n() / 2.0 - 1.0);
  return Field::from_samples(g.dim(), g.n(), std::move(acc), band);
}

}  // namespace lp
