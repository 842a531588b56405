#include "lp/partition.hpp"

#include <cmath>
#include <complex>
#include <limits>

namespace lp {

namespace {

double smooth_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// S(t): 0 for t <= 0, 1 for t >= 1, strictly increasing in between, all
// derivatives vanish at both ends
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = smooth_h(t);
  double b = smooth_h(1.0 - t);
  return a / (a + b);
}

// extended-precision profile for the derivative stencils; the bump is
// Gevrey-regular, so its high derivatives are enormous and the difference
// quotients would otherwise drown in double roundoff
long double smooth_step_ld(long double t) {
  if (t <= 0.0L) return 0.0L;
  if (t >= 1.0L) return 1.0L;
  long double a = expl(-1.0L / t);
  long double b = expl(-1.0L / (1.0L - t));
  return a / (a + b);
}

std::complex<double> minus_i_pow(int m) {
  switch (m & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

std::vector<long double> fd_weights_ld(int m, const std::vector<long double>& nodes) {
  int n = static_cast<int>(nodes.size());
  std::vector<std::vector<long double>> c(n, std::vector<long double>(m + 1, 0.0L));
  long double c1 = 1.0L;
  c[0][0] = 1.0L;
  for (int i = 1; i < n; ++i) {
    long double c2 = 1.0L;
    for (int j = 0; j < i; ++j) {
      long double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = std::min(i, m); k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - nodes[i - 1] * c[i - 1][k]) / c2;
        c[i][0] = -c1 * nodes[i - 1] * c[i - 1][0] / c2;
      }
      for (int k = std::min(i, m); k >= 1; --k)
        c[j][k] = (nodes[i] * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = nodes[i] * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<long double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

}  // namespace

std::vector<double> fd_weights(int m, const std::vector<double>& nodes) {
  // Fornberg's recursion for the weights of the m-th derivative at 0.
  int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = std::min(i, m); k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - nodes[i - 1] * c[i - 1][k]) / c2;
        c[i][0] = -c1 * nodes[i - 1] * c[i - 1][0] / c2;
      }
      for (int k = std::min(i, m); k >= 1; --k)
        c[j][k] = (nodes[i] * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = nodes[i] * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

DyadicPartition::DyadicPartition(int dim, int n, double sharpness, int k_max)
    : dim_(dim), n_(n), k_max_(k_max), sharpness_(sharpness) {
  require(dim == 1 || dim == 2, errc::grid_mismatch, "dimension must be 1 or 2");
  require(n >= 8 && (n & (n - 1)) == 0, errc::grid_too_small, "grid size must be a power of two");
  // chi must vanish by |xi| = 4/3, so the step has to be at least this sharp
  require(sharpness >= 3.0, errc::grid_too_small, "step sharpness below 3 widens chi past 4/3");
  require(k_max >= 0 && k_max <= 8, errc::order_exceeded, "derivative order cap must be in [0,8]");

  j_max_ = -1;
  while (std::ldexp(rho_outer(), j_max_ + 1) < n / 2.0) ++j_max_;
  require(j_max_ >= 4, errc::grid_too_small,
          "only " + std::to_string(j_max_) + " dyadic scales fit this grid");

  // per-order steps and widths, tuned so that orders up to 3 stay within
  // 1e-8 absolute error against a series oracle; beyond that the profile's
  // derivative growth limits FD to relative accuracy
  fd_steps_.resize(static_cast<std::size_t>(k_max_) + 1, 0.0L);
  fd_weights_.resize(static_cast<std::size_t>(k_max_) + 1);
  for (int m = 1; m <= k_max_; ++m) {
    long double step = m <= 2 ? 1.0L / 1024.0L : 1.0L / 2048.0L;
    int half = m <= 2 ? 6 : 8;
    fd_steps_[static_cast<std::size_t>(m)] = step;
    std::vector<long double> nodes;
    for (int i = -half; i <= half; ++i) nodes.push_back(i * step);
    fd_weights_[static_cast<std::size_t>(m)] = fd_weights_ld(m, nodes);
  }
}

double DyadicPartition::chi(double r) const { return 1.0 - smooth_step(sharpness_ * (r - 1.0)); }

double DyadicPartition::rho(double r) const { return chi(0.5 * r) - chi(r); }

double DyadicPartition::rho_j(int j, double r) const {
  if (j < 0) return chi(r);
  return rho(std::ldexp(r, -j));
}

double DyadicPartition::profile_deriv(bool is_chi, const MultiIndex& k,
                                      const std::array<double, 2>& xi) const {
  // tensor finite-difference stencil in extended precision, mean-subtracted
  // so that constant plateaus contribute exactly zero
  long double s = sharpness_;
  auto chi_ld = [&](long double r) { return 1.0L - smooth_step_ld(s * (r - 1.0L)); };
  auto eval = [&](long double x0, long double x1) {
    long double r = dim_ == 2 ? hypotl(x0, x1) : fabsl(x0);
    return is_chi ? chi_ld(r) : chi_ld(0.5L * r) - chi_ld(r);
  };
  int m0 = k.k[0];
  int m1 = dim_ == 2 ? k.k[1] : 0;
  const std::vector<long double> one{1.0L};
  const std::vector<long double>& w0 = m0 > 0 ? fd_weights_[static_cast<std::size_t>(m0)] : one;
  const std::vector<long double>& w1 = m1 > 0 ? fd_weights_[static_cast<std::size_t>(m1)] : one;
  long double s0 = m0 > 0 ? fd_steps_[static_cast<std::size_t>(m0)] : 0.0L;
  long double s1 = m1 > 0 ? fd_steps_[static_cast<std::size_t>(m1)] : 0.0L;
  int h0 = (static_cast<int>(w0.size()) - 1) / 2;
  int h1 = (static_cast<int>(w1.size()) - 1) / 2;
  // weights were generated on the step-scaled nodes, so they already carry
  // the 1/h^m factor
  long double center = eval(xi[0], xi[1]);
  long double acc = 0.0L;
  for (std::size_t a = 0; a < w0.size(); ++a) {
    long double x0 = xi[0] + (static_cast<int>(a) - h0) * s0;
    for (std::size_t b = 0; b < w1.size(); ++b) {
      long double x1 = dim_ == 2 ? xi[1] + (static_cast<int>(b) - h1) * s1 : 0.0L;
      acc += w0[a] * w1[b] * (eval(x0, x1) - center);
    }
  }
  return static_cast<double>(acc);
}

double DyadicPartition::symbol_deriv(int j, const MultiIndex& k,
                                     const std::array<double, 2>& xi) const {
  require(k.order() <= k_max_, errc::order_exceeded,
          "derivative order " + std::to_string(k.order()) + " exceeds configured cap");
  double r = dim_ == 2 ? std::hypot(xi[0], xi[1]) : std::abs(xi[0]);
  if (j < 0) {
    if (r >= chi_outer()) return 0.0;
    if (k.order() == 0) return chi(r);
    return profile_deriv(true, k, xi);
  }
  double scale = std::ldexp(1.0, -j);
  double rs = r * scale;
  // supp rho = [1, rho_outer]; derivatives vanish at the edges, so clamping
  // to the open annulus is exact and keeps block supports disjoint
  if (rs <= 1.0 || rs >= rho_outer()) return 0.0;
  if (k.order() == 0) return rho(rs);
  std::array<double, 2> xs{xi[0] * scale, xi[1] * scale};
  double base = profile_deriv(false, k, xs);
  double pw = 1.0;
  for (int i = 0; i < k.order(); ++i) pw *= scale;
  return base * pw;
}

void DyadicPartition::check_field(const Field& f) const {
  require(f.dim() == dim_ && f.n() == n_, errc::grid_mismatch,
          "field grid does not match partition grid");
}

DyadicPartition make_partition(int dim, int n, double sharpness, int k_max) {
  return DyadicPartition(dim, n, sharpness, k_max);
}

Field lp_block(const Field& f, int j, const DyadicPartition& part) {
  part.check_field(f);
  require(j >= -1, errc::order_out_of_range, "block index below -1");
  require(j <= part.j_max(), errc::unresolved_bandwidth,
          "block " + std::to_string(j) + " beyond resolvable scale " + std::to_string(part.j_max()));
  double band_hint =
      j < 0 ? part.chi_outer() : std::ldexp(part.rho_outer(), j);
  return f.apply_multiplier(
      [&](const std::array<double, 2>& kap) -> std::complex<double> {
        double r = part.dim() == 2 ? std::hypot(kap[0], kap[1]) : std::abs(kap[0]);
        return part.rho_j(j, r);
      },
      band_hint);
}

BlockSequence lp_decompose(const Field& f, const DyadicPartition& part, double alpha_tag) {
  part.check_field(f);
  require(f.band() <= part.resolvable_band(), errc::unresolved_bandwidth,
          "field band exceeds the range covered by the dyadic blocks");
  BlockSequence seq;
  seq.alpha = alpha_tag;
  seq.ball = part.rho_outer() / 2.0;  // supp Delta_{j-1} within ball of radius (outer/2)*2^j
  seq.provenance = "lp_decompose";
  seq.blocks.reserve(static_cast<std::size_t>(part.j_cap()));
  for (int j = 0; j < part.j_cap(); ++j) seq.blocks.push_back(lp_block(f, j - 1, part));
  return seq;
}

BlockSequence lp_decompose(const Field& f, const DyadicPartition& part) {
  return lp_decompose(f, part, std::numeric_limits<double>::quiet_NaN());
}

Field spectral_derivative(const Field& f, const MultiIndex& k, const DyadicPartition& part) {
  part.check_field(f);
  require(k.order() <= part.k_max(), errc::order_exceeded,
          "derivative order " + std::to_string(k.order()) + " exceeds configured cap");
  if (k.order() == 0) return f;
  int dim = part.dim();
  return f.apply_multiplier(
      [&](const std::array<double, 2>& kap) -> std::complex<double> {
        std::complex<double> mu{1.0, 0.0};
        for (int a = 0; a < dim; ++a) {
          std::complex<double> ik{0.0, kap[a]};
          for (int i = 0; i < k.k[a]; ++i) mu *= ik;
        }
        return mu;
      },
      f.band());
}

Field moment_block(const Field& g, int j, const MultiIndex& k, const DyadicPartition& part) {
  part.check_field(g);
  require(k.order() <= part.k_max(), errc::order_exceeded,
          "moment order " + std::to_string(k.order()) + " exceeds configured cap");
  require(j >= -1, errc::order_out_of_range, "block index below -1");
  require(j <= part.j_max(), errc::unresolved_bandwidth,
          "block " + std::to_string(j) + " beyond resolvable scale " + std::to_string(part.j_max()));
  if (k.order() == 0) return lp_block(g, j, part);
  double band_hint = j < 0 ? part.chi_outer() : std::ldexp(part.rho_outer(), j);
  std::complex<double> phase = minus_i_pow(k.order());
  double inv_fact = 1.0 / k.factorial();
  return g.apply_multiplier(
      [&](const std::array<double, 2>& kap) -> std::complex<double> {
        return phase * (part.symbol_deriv(j, k, kap) * inv_fact);
      },
      band_hint);
}

Field sum_blocks(const BlockSequence& seq) {
  require(!seq.blocks.empty(), errc::unbound_component, "cannot sum an empty sequence");
  Field acc = seq.blocks[0];
  for (std::size_t j = 1; j < seq.blocks.size(); ++j) acc = acc + seq.blocks[j];
  return acc;
}

}  // namespace lp
