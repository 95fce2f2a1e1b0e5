#pragma once

#include <cmath>
#include <numbers>

#include "npe/errors.hpp"

namespace npe {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Uniform collocation grid on the 2pi-periodic square. n points per
// dimension, wavenumbers k_j in {-n/2, ..., n/2-1} in FFT storage order.
struct Grid {
    int n = 0;

    Grid() = default;
    explicit Grid(int points) : n(points) {
        if (n < 8 || n % 2 != 0)
            throw ValidationError("grid.n must be even and >= 8, got " + std::to_string(n));
    }

    int size() const { return n * n; }
    double cell_size() const { return two_pi / n; }

    // Storage index -> signed wavenumber.
    int wavenumber(int idx) const { return idx < n / 2 ? idx : idx - n; }
    // Signed wavenumber -> storage index.
    int index_of(int k) const { return k >= 0 ? k : k + n; }

    bool operator==(const Grid&) const = default;
};

} // namespace npe
