#pragma once

#include "npe/field.hpp"

namespace npe {

enum class Deriv { Dx, Dy, Laplacian };

// Spectral differentiation: multiplication by ik1, ik2 or -|k|^2. The
// Nyquist mode k_j = -n/2 is zeroed for odd derivatives so the result
// stays real-symmetric.
SpectralField2D derivative(const SpectralField2D& f, Deriv kind);

// Solve Laplacian(g) = f for mean-zero f; g is mean-zero. Throws
// NonZeroMeanError if |fhat_0| > 1e-12 * max_k |fhat_k|.
SpectralField2D inverse_laplacian(const SpectralField2D& f);

// Two-thirds rule: zero all modes with max(|k1|,|k2|) > floor(n/3).
SpectralField2D dealias(const SpectralField2D& f);
void dealias_in_place(SpectralField2D& f);

// Mollifier J_ell as the Gaussian Fourier multiplier exp(-ell^2 |k|^2 / 2).
// ell = 0 is the identity; the mean is preserved exactly and every L^2
// norm is non-increasing.
SpectralField2D mollify(const SpectralField2D& f, double ell);

// Retain the m lowest modes ordered by |k|^2 with lexicographic (k1,k2)
// tie-break; conjugate partners are kept together.
SpectralField2D project_low_modes(const SpectralField2D& f, int m);

// Number of modes with |k| <= kmax; the m to feed project_low_modes when
// realizing the projector P_{floor(1/kappa)}.
int count_modes_within(const Grid& grid, int kmax);

} // namespace npe
