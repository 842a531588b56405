#include <doctest.h>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "lp/besov.hpp"
#include "lp/field.hpp"
#include "lp/io.hpp"
#include "lp/partition.hpp"

using namespace lp;

TEST_CASE("samples and spectrum stay consistent") {
  int n = 1024;
  DyadicPartition part = make_partition(1, n);
  Field f = synth_dense(0.8, 77, 6, part);
  CHECK(f.representation_error() <= 1e-12);
  Field g = lp_block(f, 3, part);
  CHECK(g.representation_error() <= 1e-12);
}

TEST_CASE("mode factory produces exact cosines") {
  int n = 256;
  Field f = Field::mode(1, n, {3, 0}, 2.0, 0.5);
  for (int i = 0; i < n; ++i) {
    double x = f.coord(i);
    CHECK(f.samples()[static_cast<std::size_t>(i)] ==
          doctest::Approx(2.0 * std::cos(3 * x + 0.5)).epsilon(1e-13));
  }
  CHECK(f.band() == doctest::Approx(3.0));
}

TEST_CASE("product respects the band budget") {
  int n = 256;
  Field a = Field::mode(1, n, {80, 0}, 1.0, 0.0);
  Field b = Field::mode(1, n, {60, 0}, 1.0, 0.0);
  // 140 >= 128: must refuse on this grid
  CHECK_THROWS_AS(Field::product(a, b), error);
  Field c = Field::product_padded(a, b);
  CHECK(c.n() == 512);
  // cos(80x)cos(60x) = (cos 140x + cos 20x)/2: check the high coefficient
  std::array<double, 2> kap;
  bool found = false;
  for (std::size_t m = 0; m < c.spectrum().size(); ++m) {
    c.wavevector(m, kap);
    if (kap[0] == 140.0) {
      CHECK(std::abs(c.spectrum()[m] - std::complex<double>(0.25, 0.0)) <= 1e-12);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("upsampling preserves values at shared nodes") {
  int n = 256;
  Field f = Field::mode(1, n, {5, 0}, 1.3, 1.1);
  Field u = f.upsampled(1024);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(u.samples()[static_cast<std::size_t>(4 * i)] -
                   f.samples()[static_cast<std::size_t>(i)]) <= 1e-13);
}

TEST_CASE("displacements are lifted to the symmetric representative") {
  int n = 256;
  Displacement d = displacement(1, n, GridIndex{250, 0}, GridIndex{2, 0});
  CHECK(d.h[0] == doctest::Approx(8.0 * 2.0 * std::numbers::pi / n));  // wraps forward
  Displacement e = displacement(1, n, GridIndex{2, 0}, GridIndex{250, 0});
  CHECK(e.h[0] == doctest::Approx(-8.0 * 2.0 * std::numbers::pi / n));
  Displacement far = displacement(1, n, GridIndex{0, 0}, GridIndex{128, 0});
  CHECK(far.h[0] == doctest::Approx(std::numbers::pi));  // half turn maps to +pi
}

TEST_CASE("field files round-trip") {
  namespace fs = std::filesystem;
  int n = 512;
  DyadicPartition part = make_partition(1, n);
  Field f = synth_lacunary(0.7, 4242, 6, part);
  fs::path path = fs::temp_directory_path() / "lp_test_field.pfld";
  write_pfld(f, path.string(), "round trip test");
  Field g = read_pfld(path.string());
  CHECK(g.dim() == f.dim());
  CHECK(g.n() == f.n());
  CHECK(g.band() == doctest::Approx(f.band()));
  for (std::size_t i = 0; i < f.samples().size(); ++i)
    CHECK(f.samples()[i] == g.samples()[i]);  // bit-exact payload
  fs::remove(path);
}

TEST_CASE("reading garbage fails cleanly") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "lp_test_garbage.pfld";
  std::FILE* out = std::fopen(path.string().c_str(), "wb");
  std::fputs("not a field file at all", out);
  std::fclose(out);
  CHECK_THROWS_AS(read_pfld(path.string()), error);
  fs::remove(path);
}

TEST_CASE("two-dimensional fields transform consistently") {
  int n = 64;
  Field f = Field::mode(2, n, {3, 4}, 1.0, 0.3);
  CHECK(f.band() == doctest::Approx(5.0));
  CHECK(f.representation_error() <= 1e-12);
  for (int i : {0, 5, 17}) {
    for (int j : {0, 9, 33}) {
      double x = f.coord(i), y = f.coord(j);
      GridIndex p{i, j};
      CHECK(f.at(p) == doctest::Approx(std::cos(3 * x + 4 * y + 0.3)).epsilon(1e-12));
    }
  }
}
