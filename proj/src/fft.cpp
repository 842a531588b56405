#include "lp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace lp::fft {

namespace {

// The FFTW planner is not thread-safe; plan creation is serialized and plans
// are reused for the life of the process. FFTW_UNALIGNED lets us execute on
// whatever buffers std::vector hands us.
class PlanCache {
 public:
  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t total = (dim == 2) ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n);
    fftw_complex* a = fftw_alloc_complex(total);
    fftw_complex* b = fftw_alloc_complex(total);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = (dim == 2) ? fftw_plan_dft_2d(n, n, a, b, sign, flags)
                             : fftw_plan_dft_1d(n, a, b, sign, flags);
    fftw_free(a);
    fftw_free(b);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(int dim, int n, int sign, const std::complex<double>* in, std::complex<double>* out) {
  fftw_plan p = cache().get(dim, n, sign);
  // c2c out-of-place with ESTIMATE preserves the input; the const_cast is an
  // FFTW API artifact only.
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void forward(int dim, int n, const std::complex<double>* in, std::complex<double>* out) {
  execute(dim, n, FFTW_FORWARD, in, out);
}

void backward(int dim, int n, const std::complex<double>* in, std::complex<double>* out) {
  execute(dim, n, FFTW_BACKWARD, in, out);
}

}  // namespace lp::fft
