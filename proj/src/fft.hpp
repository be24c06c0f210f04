#pragma once

// Thin RAII layer over FFTW's real transforms. Plan creation is serialized
// because the FFTW planner is not reentrant; execution is.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lzs::detail {

/// Smallest 2^a 3^b 5^c 7^d that is >= n.
std::size_t good_fft_length(std::size_t n);

/// Forward real-to-complex transform of `x` zero-padded to `length`.
/// Returns length/2 + 1 bins, unnormalized, e^{-i w t} kernel.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t length);

/// Inverse of rfft including the 1/length normalization.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t length);

}  // namespace lzs::detail
