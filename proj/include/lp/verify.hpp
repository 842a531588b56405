#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lp/calculus.hpp"

namespace lp {

// ---- scaling-exponent machinery ----

struct RemainderSample {
  double x0 = 0, x1 = 0;  // base point
  double h0 = 0, h1 = 0;  // lifted displacement
  double hnorm = 0;
  double abs_omega = 0;
  int scale_bin = 0;  // r with |h| in [2^-r-1, 2^-r)
};

struct ScalingFit {
  double slope = 0, intercept = 0, r2 = 0, max_residual = 0;
  int r_min = 0, r_max = 0;  // retained scale bins
  int min_bin_samples = 0;
  bool degenerate = false;
};

// Least-squares fit of log2(max |omega| per scale bin) against log2 |h|.
// Bins with fewer than 16 samples are ignored; drop_extremes finest and
// coarsest bins are excluded; at least 5 bins must remain.
ScalingFit fit_exponent(const std::vector<RemainderSample>& samples, int drop_extremes = 2);

struct SampleSpec {
  int r_lo = 1, r_hi = 11;  // scale bins 2^-r
  int base_points = 64;
  int disps = 8;  // displacements per bin
  std::uint64_t seed = 1;
};

using OmegaFn = std::function<double(const GridIndex&, const GridIndex&)>;

// max-sampling of |omega(y,x)| over seeded base points and dyadic
// displacements; pairs are grid nodes, so evaluation is exact
std::vector<RemainderSample> sample_remainder(const OmegaFn& omega, int dim, int n,
                                              const SampleSpec& spec, int jobs = 1);

struct ScalingParams {
  std::string formula;  // omega1 | omega2 | omega3 | omega_word
  std::vector<double> regs;
  int grid_n = 16384;
  int dim = 1;
  int seeds = 10;
  std::uint64_t seed0 = 1000;
  SampleSpec sample;
  int drop_extremes = 2;
  std::string generator = "lacunary";  // lacunary | dense
  int j_top = -1;                      // synthesis scales; -1: grid maximum
  int jobs = 1;
  double tolerance = -1;  // -1: default per formula
};

struct ScalingReport {
  std::string formula;
  std::vector<double> regs;
  double expected = 0;
  double median_slope = 0;
  double tolerance = 0;
  bool pass = false;
  std::vector<ScalingFit> fits;            // one per seed
  std::vector<std::uint64_t> seeds;
  std::vector<RemainderSample> samples;    // all seeds concatenated
};

ScalingReport run_scaling(const ScalingParams& p);

// ---- exact identity suite ----

struct IdentityParams {
  int grid_n = 4096;
  int dim = 1;
  std::uint64_t seed = 20260810;
  int n_components = 3;
  int k_top = 2;    // largest |k| exercised
  int pairs = 100;  // random evaluation pairs for the pointwise identities
  int j_top = -1;
  std::vector<double> regs;           // default chosen per n_components
  std::string generator = "dense";
  double theta_shift = 0.5;           // theta = [alpha_w] + theta_shift
};

struct IdentityReport {
  std::string id;
  std::string params;
  double max_rel_residual = 0;
  double largest_scale = 0;
};

// id: bony | wdofd | explicit_c | lmm1 | lmm2 | reorg | leibniz
IdentityReport run_identity_suite(const std::string& id, const IdentityParams& p);

// ---- decay suite ----

struct DecayParams {
  int grid_n = 16384;
  int dim = 1;
  int seeds = 5;
  std::uint64_t seed0 = 7;
  std::vector<double> regs;
  MultiIndex k{0, 0};
  int j_top = -1;  // -1: per-target default
  int j_lo = -1;   // -1: per-target default
  int j_hi = -1;   // -1: per-target default
  std::string generator;  // empty: per-target default
  double tolerance = 0.15;
};

struct DecayReport {
  std::string target;
  std::string params;
  double expected_slope = 0;
  double median_slope = 0;
  double tolerance = 0;
  bool pass = false;
  std::vector<double> per_seed;
};

// target: c_kj | r_seq | d_kj | moment_block
DecayReport run_decay_suite(const std::string& target, const DecayParams& p);

// ---- report serialization ----

nlohmann::ordered_json to_json(const ScalingFit& fit);
nlohmann::ordered_json scaling_report_json(const ScalingReport& r,
                                           const nlohmann::ordered_json& config);
nlohmann::ordered_json identity_report_json(const IdentityReport& r, double tolerance,
                                            const nlohmann::ordered_json& config);
nlohmann::ordered_json decay_report_json(const DecayReport& r,
                                         const nlohmann::ordered_json& config);

void write_samples_csv(const std::string& path, const std::string& formula,
                       const std::string& word, double alpha_total,
                       const std::vector<RemainderSample>& samples,
                       const std::string& config_comment);
void write_decay_csv(const std::string& path, const std::vector<double>& sup_norms, int j_lo,
                     const std::string& config_comment);

std::vector<double> default_regs(int n_components);
double median(std::vector<double> v);

}  // namespace lp
