#pragma once

#include <complex>
#include <vector>

namespace rss_sentry {

// In-place iterative radix-2 FFT; data.size() must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

std::size_t next_pow2(std::size_t n);

}  // namespace rss_sentry
