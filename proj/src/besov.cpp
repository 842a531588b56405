#include "lp/besov.hpp"

#include <cmath>
#include <numbers>

#include "lp/rng.hpp"

namespace lp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kIntegerTol = 1e-9;
}  // namespace

void check_regularity(double alpha) {
  require(alpha > 0.0, errc::nonpositive_regularity, "regularity must be positive");
  require(std::abs(alpha - std::round(alpha)) > kIntegerTol, errc::integer_regularity,
          "regularity must be non-integer");
}

double besov_norm(const Field& f, double alpha, const DyadicPartition& part) {
  require(alpha > 0.0, errc::nonpositive_regularity, "regularity must be positive");
  part.check_field(f);
  double norm = 0.0;
  for (int j = -1; j <= part.j_max(); ++j) {
    double w = std::exp2(j * alpha);
    norm = std::max(norm, w * lp_block(f, j, part).max_abs());
  }
  return norm;
}

double besov_norm(const BlockSequence& seq, double alpha) {
  require(alpha > 0.0, errc::nonpositive_regularity, "regularity must be positive");
  double norm = 0.0;
  for (int j = 0; j < seq.size(); ++j) norm = std::max(norm, std::exp2(j * alpha) * seq.block_norm(j));
  return norm;
}

Field synth_lacunary(double alpha, std::uint64_t seed, int j_top, const DyadicPartition& part) {
  check_regularity(alpha);
  require(j_top >= 0, errc::unresolved_bandwidth, "need at least one scale");
  require(std::ldexp(part.rho_outer(), j_top) < part.n() / 2.0, errc::unresolved_bandwidth,
          "top mode 2^" + std::to_string(j_top) + " not resolvable on this grid");
  SplitMix64 rng(seed);
  Field f = Field::zero(part.dim(), part.n());
  for (int j = 0; j <= j_top; ++j) {
    double a = rng.uniform(0.5, 1.0);
    double phi = rng.uniform(0.0, kTwoPi);
    std::array<int, 2> kappa{1 << j, 0};
    if (part.dim() == 2) {
      double theta = rng.uniform(0.0, kTwoPi);
      double r = std::ldexp(1.0, j);
      kappa[0] = static_cast<int>(std::lround(r * std::cos(theta)));
      kappa[1] = static_cast<int>(std::lround(r * std::sin(theta)));
      if (kappa[0] == 0 && kappa[1] == 0) kappa[0] = 1;
    }
    f = f + Field::mode(part.dim(), part.n(), kappa, std::exp2(-j * alpha) * a, phi);
  }
  return f;
}

Field synth_dense(double alpha, std::uint64_t seed, int j_top, const DyadicPartition& part) {
  check_regularity(alpha);
  require(j_top >= 0, errc::unresolved_bandwidth, "need at least one scale");
  require(std::ldexp(part.rho_outer(), j_top) < part.n() / 2.0, errc::unresolved_bandwidth,
          "top shell 2^" + std::to_string(j_top) + " not resolvable on this grid");
  SplitMix64 rng(seed);
  int dim = part.dim();
  int n = part.n();
  Field f = Field::zero(dim, n);
  for (int j = 0; j <= j_top; ++j) {
    double lo = j == 0 ? 0.5 : std::ldexp(1.0, j - 1);
    double hi = std::ldexp(1.0, j);
    std::size_t total = dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
    std::vector<std::complex<double>> spec(total, 0.0);
    auto add_mode = [&](int k0, int k1) {
      double r = dim == 2 ? std::hypot(k0, k1) : std::abs(static_cast<double>(k0));
      if (r <= lo || r > hi) return;
      double phi = rng.uniform(0.0, kTwoPi);
      std::complex<double> c = 0.5 * std::complex<double>(std::cos(phi), std::sin(phi));
      auto slot = [&](int a, int b) {
        int i0 = (a % n + n) % n;
        int i1 = (b % n + n) % n;
        return dim == 2 ? static_cast<std::size_t>(i0) * n + i1 : static_cast<std::size_t>(i0);
      };
      spec[slot(k0, k1)] += c;
      spec[slot(-k0, -k1)] += std::conj(c);
    };
    int top = static_cast<int>(hi);
    if (dim == 1) {
      for (int k0 = 1; k0 <= top; ++k0) add_mode(k0, 0);
    } else {
      // upper half-plane representatives; conjugates fill the rest
      for (int k0 = -top; k0 <= top; ++k0)
        for (int k1 = (k0 > 0 ? 0 : 1); k1 <= top; ++k1) add_mode(k0, k1);
    }
    Field shell = Field::from_spectrum(dim, n, std::move(spec), hi);
    double m = shell.max_abs();
    if (m > 0.0) f = f + shell.scaled(std::exp2(-j * alpha) / m);
  }
  return f;
}

ClassicalJet::ClassicalJet(const Field& f, double theta, const DyadicPartition& part)
    : f_(f), theta_(theta) {
  require(theta > 0.0, errc::nonpositive_regularity, "remainder order must be positive");
  orders_ = multiindices_below(theta, part.dim());
  for (const auto& k : orders_) {
    require(k.order() <= part.k_max(), errc::order_exceeded,
            "Taylor order exceeds the partition's derivative cap");
    derivs_.push_back(spectral_derivative(f, k, part));
    inv_fact_.push_back(1.0 / k.factorial());
  }
}

double ClassicalJet::remainder(const GridIndex& x, const GridIndex& y) const {
  Displacement d = displacement(f_.dim(), f_.n(), x, y);
  double v = f_.at(y);
  for (std::size_t i = 0; i < orders_.size(); ++i)
    v -= pow_multi(d.h, orders_[i], f_.dim()) * inv_fact_[i] * derivs_[i].at(x);
  return v;
}

double classical_remainder(const Field& f, double theta, const GridIndex& x, const GridIndex& y,
                           const DyadicPartition& part) {
  return ClassicalJet(f, theta, part).remainder(x, y);
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
    ss_tot += (y[i] - mean) * (y[i] - mean);
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double block_decay_slope(const BlockSequence& seq, int j_lo, int j_hi) {
  std::vector<double> xs, ys;
  for (int j = std::max(0, j_lo); j <= std::min(j_hi, seq.size() - 1); ++j) {
    double norm = seq.block_norm(j);
    if (norm < 1e-14) continue;
    xs.push_back(j);
    ys.push_back(std::log2(norm));
  }
  require(xs.size() >= 4, errc::insufficient_scales,
          "only " + std::to_string(xs.size()) + " usable scales for the decay fit");
  return least_squares(xs, ys).slope;
}

}  // namespace lp
