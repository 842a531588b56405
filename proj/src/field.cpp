#include "lp/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lp/fft.hpp"

namespace lp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t total_points(int dim, int n) {
  return dim == 2 ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
}

int axis_freq(int index, int n) { return index <= n / 2 ? index : index - n; }

void check_grid(int dim, int n) {
  require(dim == 1 || dim == 2, errc::grid_mismatch, "dimension must be 1 or 2");
  require(n >= 8 && (n & (n - 1)) == 0, errc::grid_too_small, "grid size must be a power of two >= 8");
}

}  // namespace

void Field::wavevector(std::size_t m, std::array<double, 2>& kappa) const {
  if (dim_ == 2) {
    kappa[0] = axis_freq(static_cast<int>(m) / n_, n_);
    kappa[1] = axis_freq(static_cast<int>(m) % n_, n_);
  } else {
    kappa[0] = axis_freq(static_cast<int>(m), n_);
    kappa[1] = 0.0;
  }
}

Field Field::from_samples(int dim, int n, std::vector<double> samples, double band) {
  check_grid(dim, n);
  std::size_t total = total_points(dim, n);
  require(samples.size() == total, errc::grid_mismatch, "sample array size does not match grid");
  require(band < n / 2.0, errc::aliasing, "declared band reaches the Nyquist frequency");

  Field f;
  f.dim_ = dim;
  f.n_ = n;
  f.band_ = band;
  f.samples_ = std::move(samples);

  std::vector<std::complex<double>> buf(total);
  for (std::size_t i = 0; i < total; ++i) buf[i] = f.samples_[i];
  f.spec_.resize(total);
  fft::forward(dim, n, buf.data(), f.spec_.data());
  double inv = 1.0 / static_cast<double>(total);
  std::array<double, 2> kap;
  for (std::size_t m = 0; m < total; ++m) {
    f.wavevector(m, kap);
    double r2 = kap[0] * kap[0] + kap[1] * kap[1];
    // declared band is authoritative: outside it the coefficients are exact zeros
    f.spec_[m] = (r2 > band * band) ? 0.0 : f.spec_[m] * inv;
  }
  return f;
}

Field Field::from_spectrum(int dim, int n, std::vector<std::complex<double>> spec, double band) {
  check_grid(dim, n);
  std::size_t total = total_points(dim, n);
  require(spec.size() == total, errc::grid_mismatch, "spectrum size does not match grid");
  require(band < n / 2.0, errc::aliasing, "declared band reaches the Nyquist frequency");

  Field f;
  f.dim_ = dim;
  f.n_ = n;
  f.band_ = band;
  f.spec_ = std::move(spec);
  std::array<double, 2> kap;
  for (std::size_t m = 0; m < total; ++m) {
    f.wavevector(m, kap);
    double r2 = kap[0] * kap[0] + kap[1] * kap[1];
    if (r2 > band * band) f.spec_[m] = 0.0;
  }
  std::vector<std::complex<double>> buf(total);
  fft::backward(dim, n, f.spec_.data(), buf.data());
  f.samples_.resize(total);
  for (std::size_t i = 0; i < total; ++i) f.samples_[i] = buf[i].real();
  return f;
}

Field Field::zero(int dim, int n) {
  check_grid(dim, n);
  Field f;
  f.dim_ = dim;
  f.n_ = n;
  f.band_ = 0.0;
  f.samples_.assign(total_points(dim, n), 0.0);
  f.spec_.assign(total_points(dim, n), 0.0);
  return f;
}

Field Field::constant(int dim, int n, double value) {
  Field f = zero(dim, n);
  f.spec_[0] = value;
  std::fill(f.samples_.begin(), f.samples_.end(), value);
  return f;
}

Field Field::mode(int dim, int n, std::array<int, 2> kappa, double amp, double phase) {
  check_grid(dim, n);
  double r = std::hypot(kappa[0], dim == 2 ? kappa[1] : 0);
  require(r < n / 2.0, errc::aliasing, "mode frequency reaches the Nyquist frequency");
  std::size_t total = total_points(dim, n);
  std::vector<std::complex<double>> spec(total, 0.0);
  auto slot = [&](int k0, int k1) {
    int i0 = (k0 % n + n) % n;
    int i1 = (k1 % n + n) % n;
    return dim == 2 ? static_cast<std::size_t>(i0) * n + i1 : static_cast<std::size_t>(i0);
  };
  std::complex<double> half = 0.5 * amp * std::complex<double>(std::cos(phase), std::sin(phase));
  if (kappa[0] == 0 && (dim == 1 || kappa[1] == 0)) {
    spec[0] = amp * std::cos(phase);
  } else {
    spec[slot(kappa[0], kappa[1])] += half;
    spec[slot(-kappa[0], -kappa[1])] += std::conj(half);
  }
  return from_spectrum(dim, n, std::move(spec), r);
}

double Field::coord(int i) const { return kTwoPi * static_cast<double>(i) / n_; }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double Field::measured_band(double tol) const {
  double cmax = 0.0;
  for (const auto& c : spec_) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) return 0.0;
  double band = 0.0;
  std::array<double, 2> kap;
  for (std::size_t m = 0; m < spec_.size(); ++m) {
    if (std::abs(spec_[m]) <= tol * cmax) continue;
    wavevector(m, kap);
    band = std::max(band, std::hypot(kap[0], kap[1]));
  }
  return band;
}

Field Field::scaled(double c) const {
  Field f = *this;
  for (auto& v : f.samples_) v *= c;
  for (auto& v : f.spec_) v *= c;
  if (c == 0.0) f.band_ = 0.0;
  return f;
}

void require_same_grid(const Field& a, const Field& b) {
  require(a.dim() == b.dim() && a.n() == b.n(), errc::grid_mismatch,
          "fields live on different grids");
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field f = a;
  for (std::size_t i = 0; i < f.samples_.size(); ++i) f.samples_[i] += b.samples_[i];
  for (std::size_t i = 0; i < f.spec_.size(); ++i) f.spec_[i] += b.spec_[i];
  f.band_ = std::max(a.band_, b.band_);
  return f;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field f = a;
  for (std::size_t i = 0; i < f.samples_.size(); ++i) f.samples_[i] -= b.samples_[i];
  for (std::size_t i = 0; i < f.spec_.size(); ++i) f.spec_[i] -= b.spec_[i];
  f.band_ = std::max(a.band_, b.band_);
  return f;
}

Field Field::product(const Field& a, const Field& b) {
  require_same_grid(a, b);
  double band = a.band_ + b.band_;
  require(band < a.n_ / 2.0, errc::aliasing,
          "product band " + std::to_string(band) + " does not fit grid " + std::to_string(a.n_));
  std::vector<double> s(a.samples_.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.samples_[i] * b.samples_[i];
  return from_samples(a.dim_, a.n_, std::move(s), band);
}

Field Field::product_padded(const Field& a, const Field& b) {
  require(a.dim() == b.dim(), errc::grid_mismatch, "fields live on different dimensions");
  int n = std::max(a.n_, b.n_);
  double band = a.band_ + b.band_;
  while (band >= n / 2.0) n *= 2;
  require(n <= (a.dim_ == 2 ? 4096 : 1 << 22), errc::aliasing, "padded grid would be unreasonably large");
  Field a2 = (a.n_ == n) ? a : a.upsampled(n);
  Field b2 = (b.n_ == n) ? b : b.upsampled(n);
  return product(a2, b2);
}

Field Field::upsampled(int n2) const {
  require(n2 >= n_ && (n2 & (n2 - 1)) == 0, errc::grid_mismatch, "upsample target must be a power of two >= n");
  if (n2 == n_) return *this;
  std::size_t total = total_points(dim_, n2);
  std::vector<std::complex<double>> spec(total, 0.0);
  auto slot = [&](int k0, int k1) {
    int i0 = (k0 % n2 + n2) % n2;
    int i1 = (k1 % n2 + n2) % n2;
    return dim_ == 2 ? static_cast<std::size_t>(i0) * n2 + i1 : static_cast<std::size_t>(i0);
  };
  std::array<double, 2> kap;
  for (std::size_t m = 0; m < spec_.size(); ++m) {
    if (spec_[m] == std::complex<double>(0.0)) continue;
    wavevector(m, kap);
    spec[slot(static_cast<int>(kap[0]), static_cast<int>(kap[1]))] = spec_[m];
  }
  return from_spectrum(dim_, n2, std::move(spec), band_);
}

Field Field::apply_multiplier(
    const std::function<std::complex<double>(const std::array<double, 2>&)>& mu,
    double band_hint) const {
  std::vector<std::complex<double>> spec(spec_.size());
  std::array<double, 2> kap;
  for (std::size_t m = 0; m < spec_.size(); ++m) {
    if (spec_[m] == std::complex<double>(0.0)) {
      spec[m] = 0.0;
      continue;
    }
    wavevector(m, kap);
    spec[m] = mu(kap) * spec_[m];
  }
  return from_spectrum(dim_, n_, std::move(spec), std::min(band_, band_hint));
}

double Field::representation_error() const {
  std::vector<std::complex<double>> buf(spec_.size());
  fft::backward(dim_, n_, spec_.data(), buf.data());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    num = std::max(num, std::abs(buf[i].real() - samples_[i]));
    den = std::max(den, std::abs(samples_[i]));
  }
  return den > 0 ? num / den : num;
}

Displacement displacement(int dim, int n, const GridIndex& x, const GridIndex& y) {
  Displacement d;
  auto lift = [&](int a, int b) {
    int dm = ((b - a) % n + n) % n;
    if (dm > n / 2) dm -= n;
    return kTwoPi * static_cast<double>(dm) / n;
  };
  d.h[0] = lift(x.i0, y.i0);
  if (dim == 2) d.h[1] = lift(x.i1, y.i1);
  d.norm = std::hypot(d.h[0], d.h[1]);
  return d;
}

}  // namespace lp
