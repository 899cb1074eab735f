#pragma once

// Thin RAII layer over FFTW. Transforms are unnormalised in the forward
// direction; inverse transforms divide by the length.

#include <complex>
#include <span>
#include <vector>

namespace evmag::fft {

using Complex = std::complex<double>;

// Real-to-half-complex transform of one series: n/2 + 1 bins.
std::vector<Complex> rfft(std::span<const double> x);

// Inverse of rfft for a length-n series.
std::vector<double> irfft(std::span<const Complex> bins, std::size_t n);

// Batched transforms over `count` interleaved series of length n, where
// sample t of series j lives at data[t * count + j] (a frame stack laid out
// time-major). Output bins use the same layout: bin k of series j at
// [k * count + j].
std::vector<Complex> rfft_strided(std::span<const double> data, std::size_t n, std::size_t count);
std::vector<double> irfft_strided(std::span<const Complex> bins, std::size_t n, std::size_t count);

// 2D complex transforms on a row-major height x width grid.
std::vector<Complex> fft2(std::span<const Complex> data, int width, int height);
std::vector<Complex> ifft2(std::span<const Complex> data, int width, int height);

// Frequency in Hz of DFT bin k for a length-n series sampled at fps (k <= n/2).
inline double bin_frequency(std::size_t k, std::size_t n, double fps) {
    return static_cast<double>(k) * fps / static_cast<double>(n);
}

}  // namespace evmag::fft
