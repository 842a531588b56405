#include <doctest.h>

#include <cmath>

#include "lp/verify.hpp"

using namespace lp;

namespace {

// synthetic samples following a prescribed law |omega| = fn(h)
std::vector<RemainderSample> law_samples(int r_lo, int r_hi, int per_bin,
                                         double (*fn)(double)) {
  std::vector<RemainderSample> out;
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int i = 0; i < per_bin; ++i) {
      RemainderSample s;
      s.hnorm = std::ldexp(1.0 + (i + 0.5) / per_bin, -r - 1);
      s.h0 = s.hnorm;
      s.abs_omega = fn(s.hnorm);
      s.scale_bin = r;
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("exponent fit on an exact power law") {
  auto samples = law_samples(1, 11, 20, [](double h) { return std::pow(h, 1.3); });
  ScalingFit fit = fit_exponent(samples, 2);
  CHECK(std::abs(fit.slope - 1.3) <= 1e-10);
  CHECK(fit.r_min == 3);
  CHECK(fit.r_max == 9);
  CHECK(fit.min_bin_samples == 20);
  CHECK(!fit.degenerate);
}

TEST_CASE("exponent fit on a modulated power law") {
  auto samples = law_samples(1, 11, 20, [](double h) {
    return std::pow(h, 2.1) * (1.0 + 0.1 * std::sin(std::log(h)));
  });
  ScalingFit fit = fit_exponent(samples, 2);
  CHECK(std::abs(fit.slope - 2.1) <= 0.05);
}

TEST_CASE("degenerate and undersampled bins") {
  auto zeros = law_samples(1, 11, 20, [](double) { return 0.0; });
  ScalingFit fit = fit_exponent(zeros, 2);
  CHECK(fit.degenerate);

  // a sparse bin of garbage must be ignored by the 16-sample rule
  auto samples = law_samples(1, 11, 20, [](double h) { return std::pow(h, 1.3); });
  for (int i = 0; i < 10; ++i) {
    RemainderSample s;
    s.hnorm = std::ldexp(1.0, -13);
    s.abs_omega = 1e6;
    s.scale_bin = 12;
    samples.push_back(s);
  }
  ScalingFit fit2 = fit_exponent(samples, 2);
  CHECK(std::abs(fit2.slope - 1.3) <= 1e-10);

  auto narrow = law_samples(1, 6, 20, [](double h) { return h; });
  CHECK_THROWS_AS(fit_exponent(narrow, 2), error);
}

TEST_CASE("remainder sampling is deterministic and job-count independent") {
  DyadicPartition part = make_partition(1, 2048);
  Field f = synth_lacunary(0.7, 3, 7, part);
  ClassicalJet jet(f, 0.7, part);
  OmegaFn omega = [&](const GridIndex& x, const GridIndex& y) { return jet.remainder(x, y); };
  SampleSpec spec;
  spec.r_lo = 2;
  spec.r_hi = 8;
  spec.base_points = 16;
  spec.disps = 4;
  spec.seed = 99;
  auto a = sample_remainder(omega, 1, 2048, spec, 1);
  auto b = sample_remainder(omega, 1, 2048, spec, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].abs_omega == b[i].abs_omega);
    CHECK(a[i].hnorm == b[i].hnorm);
    CHECK(a[i].scale_bin == b[i].scale_bin);
  }
}

TEST_CASE("scaling run recovers a classical exponent at small scale") {
  ScalingParams p;
  p.formula = "omega1";
  p.regs = {0.7};
  p.grid_n = 4096;
  p.seeds = 3;
  p.sample.base_points = 32;
  p.jobs = 2;
  ScalingReport rep = run_scaling(p);
  CHECK(std::abs(rep.median_slope - 0.7) <= 0.10);
  CHECK(rep.pass);
}

TEST_CASE("scaling reports are byte-identical across runs") {
  ScalingParams p;
  p.formula = "omega1";
  p.regs = {0.9};
  p.grid_n = 4096;
  p.seeds = 2;
  p.sample.r_hi = 9;
  p.sample.base_points = 16;
  ScalingReport a = run_scaling(p);
  ScalingReport b = run_scaling(p);
  CHECK(scaling_report_json(a, {}).dump() == scaling_report_json(b, {}).dump());
}

TEST_CASE("decay suite smoke runs") {
  DecayParams p;
  p.grid_n = 8192;
  p.seeds = 2;
  p.regs = {0.6, 0.7};
  p.k = MultiIndex{0};
  DecayReport c = run_decay_suite("c_kj", p);
  CHECK(std::abs(c.median_slope + 1.3) <= 0.15);
  CHECK(c.pass);

  DecayReport d = run_decay_suite("d_kj", p);
  CHECK(d.median_slope < -0.02);

  p.regs = {0.7};
  p.k = MultiIndex{1};
  DecayReport m = run_decay_suite("moment_block", p);
  CHECK(std::abs(m.median_slope + 1.7) <= 0.15);

  CHECK_THROWS_AS(run_decay_suite("nosuch", p), error);
}

TEST_CASE("identity residuals do not degrade under refinement") {
  IdentityParams p;
  p.grid_n = 2048;
  p.pairs = 20;
  p.n_components = 2;
  double res1 = run_identity_suite("bony", p).max_rel_residual;
  p.grid_n = 4096;
  double res2 = run_identity_suite("bony", p).max_rel_residual;
  CHECK(res2 <= 10.0 * res1 + 1e-14);
}
