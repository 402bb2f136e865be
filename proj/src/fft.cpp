#include "birddet/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace birddet {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex plan_mutex;

fftw_plan plan_for(int n) {
  static std::map<int, fftw_plan> plans;
  std::lock_guard lock(plan_mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (p == nullptr) throw std::runtime_error("power_spectrum: FFTW planning failed");
  plans.emplace(n, p);
  return p;
}

struct FftwBuffers {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  explicit FftwBuffers(int n) : in(fftw_alloc_real(n)), out(fftw_alloc_complex(n / 2 + 1)) {}
  ~FftwBuffers() {
    fftw_free(in);
    fftw_free(out);
  }
  FftwBuffers(const FftwBuffers&) = delete;
  FftwBuffers& operator=(const FftwBuffers&) = delete;
};

}  // namespace

std::vector<double> power_spectrum(const std::vector<double>& frame) {
  int n = static_cast<int>(frame.size());
  if (n < 2) throw std::invalid_argument("power_spectrum: frame must have at least 2 samples");
  fftw_plan p = plan_for(n);

  FftwBuffers buf(n);
  std::memcpy(buf.in, frame.data(), sizeof(double) * frame.size());
  fftw_execute_dft_r2c(p, buf.in, buf.out);

  std::vector<double> power(static_cast<std::size_t>(n / 2 + 1));
  for (std::size_t k = 0; k < power.size(); ++k) {
    double re = buf.out[k][0];
    double im = buf.out[k][1];
    power[k] = re * re + im * im;
  }
  return power;
}

}  // namespace birddet
