#ifndef GENLAB_FFT_FFT_HPP
#define GENLAB_FFT_FFT_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "genlab/types.hpp"

namespace genlab {

// Complex-to-complex FFT engine backed by FFTW3. One instance per thread of
// use; plans are cached per transform size. FFTW_ESTIMATE keeps plan choice
// (and therefore output bits) independent of runtime timing.
//
// forward:  X[k] = sum_n x[n] exp(-j 2 pi k n / N)
// inverse:  x[n] = (1/N) sum_k X[k] exp(+j 2 pi k n / N)
class Fft {
  public:
    Fft() = default;
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward(std::vector<cplx>& data);
    void inverse(std::vector<cplx>& data);  // includes the 1/N factor

  private:
    struct Plans;
    Plans* plans_for(std::size_t n);
    std::map<std::size_t, Plans*> cache_;
};

// Angular frequency grid in FFT bin order: omega[k] = 2*pi*f_k where
// f_k = k/(N*dt) for k < N/2 and (k-N)/(N*dt) above.
std::vector<double> fft_angular_freqs(std::size_t n, double dt);

std::size_t next_pow2(std::size_t n);

}  // namespace genlab

#endif
