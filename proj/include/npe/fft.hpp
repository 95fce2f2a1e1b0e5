#pragma once

#include <complex>
#include <vector>

#include "npe/grid.hpp"

namespace npe::fft {

// Forward DFT of real samples (row-major, samples[x*n+y]) into Fourier
// coefficients normalized so that f(x) = sum_k fhat_k e^{ik.x}, i.e. the
// raw DFT divided by n^2. Coefficients are stored row-major in FFT order,
// coeffs[i*n+j] with k = (wavenumber(i), wavenumber(j)).
void forward(const Grid& grid, const double* samples, std::complex<double>* coeffs);

// Inverse transform; returns the real part of the complex inverse DFT.
// For Hermitian-symmetric input the imaginary part is roundoff.
void inverse(const Grid& grid, const std::complex<double>* coeffs, double* samples);

std::vector<std::complex<double>> forward(const Grid& grid, const std::vector<double>& samples);
std::vector<double> inverse(const Grid& grid, const std::vector<std::complex<double>>& coeffs);

} // namespace npe::fft
