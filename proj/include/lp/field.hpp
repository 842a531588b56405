#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "lp/errors.hpp"
#include "lp/multiindex.hpp"

namespace lp {

// A grid node; only i0 is used in one dimension.
struct GridIndex {
  int i0 = 0;
  int i1 = 0;
};

// Periodic displacement y - x lifted to the representative in (-pi, pi]^d.
struct Displacement {
  std::array<double, 2> h{0.0, 0.0};
  double norm = 0.0;
};

// A real-valued function on the torus [0,2pi)^d sampled on an n^d grid,
// band-limited by construction. Both the sample array and the Fourier
// coefficients (convention f(x) = sum_k c_k e^{i k.x}) are stored, so every
// operation has an exact spectral counterpart. Fields are immutable.
class Field {
 public:
  Field() = default;

  static Field from_samples(int dim, int n, std::vector<double> samples, double band);
  static Field from_spectrum(int dim, int n, std::vector<std::complex<double>> spec, double band);
  static Field zero(int dim, int n);
  static Field constant(int dim, int n, double value);
  // amp * cos(kappa.x + phase)
  static Field mode(int dim, int n, std::array<int, 2> kappa, double amp, double phase);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return samples_.size(); }
  double band() const { return band_; }
  bool empty() const { return samples_.empty(); }

  const std::vector<double>& samples() const { return samples_; }
  const std::vector<std::complex<double>>& spectrum() const { return spec_; }

  double at(const GridIndex& p) const {
    return samples_[dim_ == 2 ? static_cast<std::size_t>(p.i0) * n_ + p.i1 : p.i0];
  }
  double coord(int i) const;  // grid coordinate 2pi i / n

  double max_abs() const;
  // largest |kappa| carrying a coefficient above `tol` * max coefficient
  double measured_band(double tol = 1e-13) const;

  // frequency vector of the m-th spectral entry, components in (-n/2, n/2]
  void wavevector(std::size_t m, std::array<double, 2>& kappa) const;

  Field scaled(double c) const;
  friend Field operator+(const Field& a, const Field& b);
  friend Field operator-(const Field& a, const Field& b);

  // pointwise product; throws ALIASING when the result band does not fit
  static Field product(const Field& a, const Field& b);
  // pointwise product on a zero-padded grid when needed for exactness
  static Field product_padded(const Field& a, const Field& b);

  Field upsampled(int n2) const;

  // new field with spectrum multiplied by mu(kappa); band_hint caps the
  // declared band of the result
  Field apply_multiplier(const std::function<std::complex<double>(const std::array<double, 2>&)>& mu,
                         double band_hint) const;

  // relative deviation between samples and the inverse transform of the
  // stored spectrum (consistency diagnostic)
  double representation_error() const;

 private:
  int dim_ = 1;
  int n_ = 0;
  double band_ = 0.0;
  std::vector<double> samples_;
  std::vector<std::complex<double>> spec_;
};

void require_same_grid(const Field& a, const Field& b);

Displacement displacement(int dim, int n, const GridIndex& x, const GridIndex& y);

}  // namespace lp
