#include <doctest.h>

#include <cmath>

#include "lp/calculus.hpp"
#include "lp/rng.hpp"
#include "lp/verify.hpp"

using namespace lp;

namespace {

double max_diff(const Field& a, const Field& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

double max_diff(const GridFn& a, const Field& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i)
    m = std::max(m, std::abs(a.v[i] - b.samples()[i]));
  return m;
}

CalcContext make_ctx(const DyadicPartition& part, const std::vector<double>& regs,
                     std::uint64_t seed, int j_top, bool dense = true) {
  SplitMix64 sub(seed);
  std::vector<BlockSequence> comps;
  for (double a : regs) {
    Field f = dense ? synth_dense(a, sub.next(), j_top, part)
                    : synth_lacunary(a, sub.next(), j_top, part);
    comps.push_back(lp_decompose(f, part, a));
  }
  return CalcContext(part, Word(regs), std::move(comps), 1);
}

// strip the two lowest blocks so a constant companion absorbs exactly
Field strip_low(const Field& f, const DyadicPartition& part) {
  return f - lp_block(f, -1, part) - lp_block(f, 0, part);
}

}  // namespace

TEST_CASE("words reject integer partial sums and bad regularities") {
  CHECK_THROWS_AS(Word({0.5, 0.5}), error);          // sum hits 1
  CHECK_THROWS_AS(Word({1.0, 0.3}), error);          // integer component
  CHECK_THROWS_AS(Word({0.3, 0.4, 0.3}), error);     // total hits 1
  CHECK_THROWS_AS(Word({-0.5}), error);              // nonpositive
  CHECK_THROWS_AS(Word({0.6, 0.7, 0.9, 0.8}), error);  // 0.9+0.8+0.7+0.6 = 3
  try {
    Word({0.5, 0.5});
  } catch (const error& e) {
    CHECK(e.code() == errc::integer_regularity);
  }
  Word w({0.6, 0.7, 0.9});
  CHECK(w.label() == "123");
  CHECK(w.alpha_sum(1, 2) == doctest::Approx(1.6));
}

TEST_CASE("single-component word reduces to the bound sequence") {
  DyadicPartition part = make_partition(1, 2048);
  Field f = synth_lacunary(0.7, 3, 7, part);
  CalcContext ctx(part, Word({0.7}), {lp_decompose(f, part, 0.7)}, 1);
  CHECK(max_diff(ctx.f_sum(0, 1), f) <= 1e-12);
  for (int j = 0; j < ctx.j_cap(); ++j)
    CHECK(max_diff(ctx.f_block(0, 1, j), lp_block(f, j - 1, part)) == 0.0);
}

TEST_CASE("two-component word sums to the paraproduct") {
  DyadicPartition part = make_partition(1, 8192);
  SplitMix64 sub(17);
  Field f = synth_lacunary(0.6, sub.next(), 9, part);
  Field g = synth_lacunary(0.7, sub.next(), 9, part);
  CalcContext ctx(part, Word({0.6, 0.7}),
                  {lp_decompose(f, part, 0.6), lp_decompose(g, part, 0.7)}, 1);
  Field pp = paraproduct(f, g, part);
  CHECK(max_diff(ctx.f_sum(0, 2), pp) / std::max(1.0, pp.max_abs()) <= 1e-10);
}

TEST_CASE("per-block corrections: base cases") {
  DyadicPartition part = make_partition(1, 2048);
  CalcContext ctx = make_ctx(part, {0.6, 0.7}, 5, 7);
  // single component: D^{k,j} is the plain derivative of the block
  for (int j : {0, 3, 7}) {
    Field expect = spectral_derivative(ctx.f_block(0, 1, j), MultiIndex{1}, part);
    CHECK(max_diff(ctx.d_kj(0, 1, MultiIndex{1}, j), expect) == 0.0);
  }
  // two components below unit regularity at k = 0: the subtraction is empty
  for (int j : {0, 4, 8})
    CHECK(max_diff(ctx.d_kj(0, 2, MultiIndex{0}, j), ctx.f_block(0, 2, j)) == 0.0);
}

TEST_CASE("summed corrections: telescoping and range guard") {
  DyadicPartition part = make_partition(1, 8192);
  SplitMix64 sub(19);
  Field f = synth_lacunary(0.6, sub.next(), 9, part);
  Field g = synth_lacunary(0.7, sub.next(), 9, part);
  CalcContext ctx(part, Word({0.6, 0.7}),
                  {lp_decompose(f, part, 0.6), lp_decompose(g, part, 0.7)}, 1);
  // k = 0 below unit total regularity: D^0 = paraproduct
  Field pp = paraproduct(f, g, part);
  CHECK(max_diff(ctx.d_k(0, 2, MultiIndex{0}), pp) / std::max(1.0, pp.max_abs()) <= 1e-10);
  // out of range: |k| = 2 >= 1.3
  CHECK_THROWS_AS(ctx.d_k(0, 2, MultiIndex{2}), error);
  // single word: D^k is the plain derivative of the sum
  Field df = spectral_derivative(f, MultiIndex{0}, part);
  CHECK(max_diff(ctx.d_k(0, 1, MultiIndex{0}), df) <= 1e-12);
}

TEST_CASE("abstract and concrete correction coefficients agree above regularity one") {
  DyadicPartition part = make_partition(1, 8192);
  double alpha = 1.3, beta = 0.4;
  SplitMix64 sub(23);
  Field f = synth_dense(alpha, sub.next(), 9, part);
  Field g = synth_dense(beta, sub.next(), 9, part);
  CalcContext ctx(part, Word({alpha, beta}),
                  {lp_decompose(f, part, alpha), lp_decompose(g, part, beta)}, 1);
  for (int k = 0; k <= 1; ++k) {
    Field concrete = d2_correction(f, g, MultiIndex{k}, alpha, beta, part);
    double scale = std::max(1.0, concrete.max_abs());
    CHECK(max_diff(ctx.d_k(0, 2, MultiIndex{k}), concrete) / scale <= 1e-8);
  }
}

TEST_CASE("cumulative correction base case") {
  DyadicPartition part = make_partition(1, 2048);
  Field f = synth_dense(0.8, 29, 7, part);
  CalcContext ctx(part, Word({0.8}), {lp_decompose(f, part, 0.8)}, 1);
  // |k| < alpha: C^{k,j} = -d^k (f - f^{<j}) = -d^k f^{>=j}
  for (int j : {0, 2, 5, 9}) {
    Field tail = f - ctx.f_prefix(0, 1, j);
    Field expect = spectral_derivative(tail, MultiIndex{0}, part).scaled(-1.0);
    CHECK(max_diff(ctx.c_kj(0, 1, MultiIndex{0}, j), expect) <= 1e-11);
  }
  // |k| >= alpha: C^{k,j} = d^k f^{<j}
  for (int j : {0, 3, 8}) {
    Field expect = spectral_derivative(ctx.f_prefix(0, 1, j), MultiIndex{1}, part);
    CHECK(max_diff(ctx.c_kj(0, 1, MultiIndex{1}, j), expect) <= 1e-11);
  }
}

TEST_CASE("Taylor polynomial of words") {
  DyadicPartition part = make_partition(1, 4096);
  SplitMix64 sub(31);
  Field f = synth_dense(0.6, sub.next(), 8, part);
  Field g = synth_dense(0.3, sub.next(), 8, part);
  CalcContext ctx(part, Word({0.6, 0.3}),
                  {lp_decompose(f, part, 0.6), lp_decompose(g, part, 0.3)}, 1);
  GridIndex x{100, 0}, y{160, 0};
  // single word, truncation below 1: the polynomial is the point value
  CHECK(ctx.t_poly(0, 1, x, y, 0.6) == doctest::Approx(f.at(x)).epsilon(1e-12));
  // total regularity below 1: T = paraproduct value at x
  Field pp = paraproduct(f, g, part);
  CHECK(ctx.t_poly(0, 2, x, y) == doctest::Approx(pp.at(x)).epsilon(2e-10));
}

TEST_CASE("Taylor truncation differences are exactly the dropped terms") {
  DyadicPartition part = make_partition(1, 4096);
  CalcContext ctx = make_ctx(part, {1.3, 1.4}, 37, 8);
  SplitMix64 rng(7);
  int n = part.n();
  for (int trial = 0; trial < 20; ++trial) {
    GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
    GridIndex y{(x.i0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)))) % n, 0};
    Displacement d = displacement(1, n, x, y);
    double t_low = ctx.t_poly(0, 2, x, y, 1.5);
    double t_high = ctx.t_poly(0, 2, x, y, 2.5);
    double dropped = d.h[0] * d.h[0] / 2.0 * ctx.d_k(0, 2, MultiIndex{2}).at(x);
    CHECK(std::abs(t_high - t_low - dropped) <= 1e-10 * (1.0 + std::abs(t_high)));
  }
}

TEST_CASE("word remainder of a single component is the classical remainder") {
  DyadicPartition part = make_partition(1, 4096);
  Field f = synth_lacunary(1.4, 3, 8, part);
  CalcContext ctx(part, Word({1.4}), {lp_decompose(f, part, 1.4)}, 1);
  ClassicalJet jet(f, 1.4, part);
  SplitMix64 rng(11);
  int n = part.n();
  for (int trial = 0; trial < 30; ++trial) {
    GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
    GridIndex y{(x.i0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)))) % n, 0};
    CHECK(std::abs(ctx.omega(0, 1, x, y) - jet.remainder(x, y)) <=
          1e-11 * (1.0 + std::abs(jet.remainder(x, y))));
  }
}

TEST_CASE("word remainder of two constant components vanishes") {
  DyadicPartition part = make_partition(1, 2048);
  int n = part.n();
  BlockSequence cseq = lp_decompose(Field::constant(1, n, 2.0), part, 0.6);
  BlockSequence cseq2 = lp_decompose(Field::constant(1, n, -1.5), part, 0.7);
  CalcContext ctx(part, Word({0.6, 0.7}), {cseq, cseq2}, 1);
  for (int i : {0, 57, 901}) {
    CHECK(std::abs(ctx.omega(0, 2, GridIndex{i, 0}, GridIndex{(i + 99) % n, 0})) <= 1e-12);
  }
}

TEST_CASE("per-block remainders sum back to the word remainder") {
  DyadicPartition part = make_partition(1, 4096);
  for (auto regs : std::vector<std::vector<double>>{{0.6, 0.7}, {0.6, 0.7, 0.9}}) {
    CalcContext ctx = make_ctx(part, regs, 41, 7);
    int len = static_cast<int>(regs.size());
    double a_w = ctx.alpha(0, len);
    SplitMix64 rng(13);
    int n = part.n();
    for (int trial = 0; trial < 100; ++trial) {
      GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
      GridIndex y{(x.i0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)))) % n, 0};
      double total = 0;
      for (int j = 0; j < ctx.j_cap(); ++j) total += ctx.omega_theta_j(0, len, a_w, j, x, y);
      double direct = ctx.omega(0, len, x, y);
      CHECK(std::abs(total - direct) <= 1e-8 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("per-block remainder ignores the truncation inside its window") {
  DyadicPartition part = make_partition(1, 4096);
  CalcContext ctx = make_ctx(part, {0.6, 0.7}, 43, 7);
  GridIndex x{123, 0}, y{190, 0};
  for (int j : {0, 3, 6, 9}) {
    double a = ctx.omega_theta_j(0, 2, 1.4, j, x, y);
    double b = ctx.omega_theta_j(0, 2, 1.9, j, x, y);
    CHECK(a == b);  // same index set |k| < theta for any theta in ([a_w], [a_w]+1]
  }
}

TEST_CASE("per-block remainder decays away from the crossover scale") {
  // at fixed displacement the pre-crossover growth of the per-block
  // remainder follows the regularity minus the next integer order
  DyadicPartition part = make_partition(1, 16384);
  for (auto regs : std::vector<std::vector<double>>{{0.6}, {0.6, 0.7}}) {
    CalcContext ctx = make_ctx(part, regs, 47, part.j_max(), false);
    int len = static_cast<int>(regs.size());
    double a_w = ctx.alpha(0, len);
    double theta = std::floor(a_w) + 0.97;
    int n = part.n();
    int steps = n / 512;  // |h| = 2pi/512 ~ 2^-6.3
    SplitMix64 rng(3);
    std::vector<double> xs, ys;
    for (int j = 1; j <= 5; ++j) {  // pre-crossover window for this h
      double worst = 0;
      for (int t = 0; t < 64; ++t) {
        GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
        GridIndex y{(x.i0 + steps) % n, 0};
        worst = std::max(worst, std::abs(ctx.omega_theta_j(0, len, theta, j, x, y)));
      }
      if (worst > 1e-14) {
        xs.push_back(j);
        ys.push_back(std::log2(worst));
      }
    }
    REQUIRE(xs.size() >= 4);
    double slope = least_squares(xs, ys).slope;
    double expected = -(a_w - std::floor(a_w) - 1.0);
    CHECK(std::abs(slope - expected) <= 0.2);
  }
}

TEST_CASE("concrete correction coefficient: degenerate cases") {
  DyadicPartition part = make_partition(1, 4096);
  SplitMix64 sub(51);
  Field f = synth_dense(0.3, sub.next(), 8, part);
  Field g = synth_dense(0.4, sub.next(), 8, part);
  // below unit total regularity the only coefficient is the paraproduct itself
  Field d0 = d2_correction(f, g, MultiIndex{0}, 0.3, 0.4, part);
  Field pp = paraproduct(f, g, part);
  CHECK(max_diff(d0, pp) == 0.0);
  // constant high factor: everything dies
  Field c = Field::constant(1, part.n(), 7.0);
  for (int k = 0; k <= 1; ++k)
    CHECK(d2_correction(f, c, MultiIndex{k}, 1.3, 0.4, part).max_abs() == 0.0);
  CHECK_THROWS_AS(d2_correction(f, g, MultiIndex{1}, 0.3, 0.4, part), error);
}

TEST_CASE("two-component remainder: constant factors annihilate") {
  DyadicPartition part = make_partition(1, 4096);
  int n = part.n();
  Field f = synth_lacunary(0.6, 61, 8, part);
  Field c = Field::constant(1, n, 3.0);
  Omega2 fc(f, c, 0.6, 0.7, part);
  Omega2 cf(c, strip_low(f, part), 0.7, 0.6, part);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
    GridIndex y{(x.i0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)))) % n, 0};
    CHECK(std::abs(fc.value(x, y)) <= 1e-12);
    CHECK(std::abs(cf.value(x, y)) <= 1e-12);
  }
}

TEST_CASE("two-component remainder reduces to the first-order form below one") {
  DyadicPartition part = make_partition(1, 8192);
  SplitMix64 sub(67);
  Field f = synth_lacunary(0.3, sub.next(), 9, part);
  Field g = synth_lacunary(0.4, sub.next(), 9, part);
  Omega2 om(f, g, 0.3, 0.4, part);
  SplitMix64 rng(7);
  int n = part.n();
  for (int trial = 0; trial < 100; ++trial) {
    GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
    GridIndex y{(x.i0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)))) % n, 0};
    double a = om.value(x, y);
    double b = om.low_reg_value(x, y);
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)));
  }
}

TEST_CASE("residual blocks: low-regularity form and reconstruction") {
  DyadicPartition part = make_partition(1, 8192);
  SplitMix64 sub(71);
  double alpha = 0.6, beta = 0.7;
  Field f = synth_dense(alpha, sub.next(), 9, part);
  Field g = synth_dense(beta, sub.next(), 9, part);
  Field pp = paraproduct(f, g, part);
  BlockSequence rs = r_seq(f, g, alpha, beta, part);
  CHECK(rs.alpha == doctest::Approx(alpha + beta));

  // single moment order below alpha: R^j = block of pp minus prefix * block
  for (int j : {0, 2, 5, 9}) {
    Field prefix = Field::zero(1, part.n());
    for (int i = -1; i <= j - 3; ++i) prefix = prefix + lp_block(f, i, part);
    Field expect = lp_block(pp, j - 1, part) - Field::product(prefix, lp_block(g, j - 1, part));
    CHECK(max_diff(rs.blocks[static_cast<std::size_t>(j)], expect) <= 1e-12);
  }

  // rearrangement: blocks of pp recompose exactly
  Field total = sum_blocks(rs);
  Field prefix = Field::zero(1, part.n());
  for (int j = 0; j < part.j_cap(); ++j) {
    total = total + Field::product(prefix, moment_block(g, j - 1, MultiIndex{0}, part));
    if (j - 2 >= -1) prefix = prefix + lp_block(f, j - 2, part);
  }
  CHECK(max_diff(total, pp) / std::max(1.0, pp.max_abs()) <= 1e-10);
}

TEST_CASE("three-component remainder: constant last factor annihilates") {
  DyadicPartition part = make_partition(1, 4096);
  SplitMix64 sub(73);
  Field f = synth_lacunary(0.6, sub.next(), 8, part);
  Field g = synth_lacunary(0.7, sub.next(), 8, part);
  Field c = Field::constant(1, part.n(), -2.0);
  Omega3 om(f, g, c, 0.6, 0.7, 0.9, part);
  SplitMix64 rng(9);
  int n = part.n();
  for (int trial = 0; trial < 30; ++trial) {
    GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
    GridIndex y{(x.i0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)))) % n, 0};
    CHECK(std::abs(om.value(x, y)) <= 1e-12);
  }
}

TEST_CASE("three-component remainder: reorganization identity") {
  DyadicPartition part = make_partition(1, 4096);
  for (auto regs : std::vector<std::array<double, 3>>{{0.6, 0.7, 0.9}, {1.3, 0.4, 0.9}}) {
    SplitMix64 sub(79 + static_cast<std::uint64_t>(regs[0] * 100));
    Field f = synth_dense(regs[0], sub.next(), 8, part);
    Field g = synth_dense(regs[1], sub.next(), 8, part);
    Field h = synth_dense(regs[2], sub.next(), 8, part);
    Omega3 om(f, g, h, regs[0], regs[1], regs[2], part);
    SplitMix64 rng(11);
    int n = part.n();
    for (int trial = 0; trial < 100; ++trial) {
      GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
      GridIndex y{(x.i0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)))) % n, 0};
      double a = om.value(x, y);
      double b = om.reorg_reference(x, y);
      double scale = std::max({std::abs(a), std::abs(b), std::abs(om.pph().at(y)), 1e-30});
      CHECK(std::abs(a - b) / scale <= 1e-8);
    }
  }
}

TEST_CASE("identity suites pass at unit-test scale") {
  IdentityParams p;
  p.grid_n = 2048;
  p.pairs = 40;
  for (int n : {2, 3}) {
    p.n_components = n;
    p.regs.clear();
    CHECK(run_identity_suite("wdofd", p).max_rel_residual <= 1e-8);
    CHECK(run_identity_suite("explicit_c", p).max_rel_residual <= 1e-8);
    CHECK(run_identity_suite("lmm1", p).max_rel_residual <= 1e-8);
    CHECK(run_identity_suite("lmm2", p).max_rel_residual <= 1e-8);
  }
  CHECK(run_identity_suite("bony", p).max_rel_residual <= 1e-10);
  CHECK(run_identity_suite("leibniz", p).max_rel_residual <= 1e-10);
  p.n_components = 3;
  CHECK(run_identity_suite("reorg", p).max_rel_residual <= 1e-8);
  CHECK_THROWS_AS(run_identity_suite("nosuch", p), error);
}

TEST_CASE("summed word remainder stays bounded by the displacement power") {
  DyadicPartition part = make_partition(1, 8192);
  CalcContext ctx = make_ctx(part, {0.6, 0.7}, 83, part.j_max() - 1, false);
  double a_w = ctx.alpha(0, 2);
  SplitMix64 rng(17);
  int n = part.n();
  double worst = 0;
  for (int trial = 0; trial < 300; ++trial) {
    GridIndex x{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), 0};
    int steps = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 8)));
    GridIndex y{(x.i0 + steps) % n, 0};
    Displacement d = displacement(1, n, x, y);
    worst = std::max(worst, std::abs(ctx.omega(0, 2, x, y)) / std::pow(d.norm, a_w));
  }
  CHECK(std::isfinite(worst));
  CHECK(worst <= 100.0);
}

TEST_CASE("two dimensions run through the same machinery") {
  DyadicPartition part = make_partition(2, 256);
  SplitMix64 sub(91);
  Field f = synth_lacunary(0.6, sub.next(), part.j_max(), part);
  Field g = synth_lacunary(0.7, sub.next(), part.j_max(), part);

  // product split
  Field fg = Field::product(f, g);
  Field split = paraproduct(f, g, part) + paraproduct(g, f, part) + resonant(f, g, part);
  double scale = std::max(fg.max_abs(), 1e-30);
  double diff = 0;
  for (std::size_t i = 0; i < fg.samples().size(); ++i)
    diff = std::max(diff, std::abs(fg.samples()[i] - split.samples()[i]));
  CHECK(diff / scale <= 1e-10);

  // reconstruction
  Field back = sum_blocks(lp_decompose(f, part));
  double rec = 0;
  for (std::size_t i = 0; i < f.samples().size(); ++i)
    rec = std::max(rec, std::abs(f.samples()[i] - back.samples()[i]));
  CHECK(rec / std::max(f.max_abs(), 1e-30) <= 1e-10);

  // two-component remainder evaluates and scales reasonably with mixed indices
  Omega2 om(f, g, 0.6, 0.7, part);
  double v = om.value(GridIndex{10, 20}, GridIndex{14, 22});
  CHECK(std::isfinite(v));

  // correction coefficients for a genuinely two-dimensional multiindex
  Field d11 = d2_correction(f, g, MultiIndex{1, 0}, 1.3, 0.4, part);
  CHECK(std::isfinite(d11.max_abs()));

  // word machinery with mixed-index corrections
  CalcContext ctx(part, Word({0.6, 0.7}),
                  {lp_decompose(f, part, 0.6), lp_decompose(g, part, 0.7)}, 1);
  const GridFn& dk = ctx.d_kj(0, 2, MultiIndex{0, 1}, 3);
  CHECK(std::isfinite(dk.max_abs()));

  // per-block remainder sums back to the word remainder in 2d as well
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    GridIndex x{static_cast<int>(rng.below(256)), static_cast<int>(rng.below(256))};
    GridIndex y{(x.i0 + 3) % 256, (x.i1 + 2) % 256};
    double total = 0;
    for (int j = 0; j < ctx.j_cap(); ++j) total += ctx.omega_theta_j(0, 2, 1.3, j, x, y);
    double direct = ctx.omega(0, 2, x, y);
    CHECK(std::abs(total - direct) <= 1e-8 * (1.0 + std::abs(direct)));
  }
}
