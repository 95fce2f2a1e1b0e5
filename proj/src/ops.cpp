#include "npe/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "npe/errors.hpp"

namespace npe {

SpectralField2D derivative(const SpectralField2D& f, Deriv kind) {
    const Grid& g = f.grid();
    const int n = g.n;
    SpectralField2D out(g);
    for (int i = 0; i < n; ++i) {
        const int k1 = g.wavenumber(i);
        for (int j = 0; j < n; ++j) {
            const int k2 = g.wavenumber(j);
            const std::complex<double> v = f.at(i, j);
            switch (kind) {
            case Deriv::Dx:
                out.at(i, j) = (k1 == -n / 2) ? 0.0
                                              : std::complex<double>(0.0, k1) * v;
                break;
            case Deriv::Dy:
                out.at(i, j) = (k2 == -n / 2) ? 0.0
                                              : std::complex<double>(0.0, k2) * v;
                break;
            case Deriv::Laplacian:
                out.at(i, j) = -static_cast<double>(k1 * k1 + k2 * k2) * v;
                break;
            }
        }
    }
    return out;
}

SpectralField2D inverse_laplacian(const SpectralField2D& f) {
    const double mean = std::abs(f.mean());
    if (mean > 1e-12 * f.max_abs_coeff())
        throw NonZeroMeanError("inverse_laplacian: input has nonzero mean " +
                               std::to_string(mean));
    const Grid& g = f.grid();
    const int n = g.n;
    SpectralField2D out(g);
    for (int i = 0; i < n; ++i) {
        const int k1 = g.wavenumber(i);
        for (int j = 0; j < n; ++j) {
            const int k2 = g.wavenumber(j);
            const double k2sum = static_cast<double>(k1 * k1 + k2 * k2);
            out.at(i, j) = (k2sum == 0.0) ? 0.0 : -f.at(i, j) / k2sum;
        }
    }
    return out;
}

void dealias_in_place(SpectralField2D& f) {
    const Grid& g = f.grid();
    const int n = g.n;
    const int cutoff = n / 3;
    for (int i = 0; i < n; ++i) {
        const int k1 = std::abs(g.wavenumber(i));
        for (int j = 0; j < n; ++j) {
            const int k2 = std::abs(g.wavenumber(j));
            if (std::max(k1, k2) > cutoff) f.at(i, j) = 0.0;
        }
    }
}

SpectralField2D dealias(const SpectralField2D& f) {
    SpectralField2D out = f;
    dealias_in_place(out);
    return out;
}

SpectralField2D mollify(const SpectralField2D& f, double ell) {
    if (ell < 0.0) throw ValidationError("mollify: ell must be >= 0");
    if (ell == 0.0) return f;
    const Grid& g = f.grid();
    const int n = g.n;
    SpectralField2D out(g);
    for (int i = 0; i < n; ++i) {
        const int k1 = g.wavenumber(i);
        for (int j = 0; j < n; ++j) {
            const int k2 = g.wavenumber(j);
            const double k2sum = static_cast<double>(k1 * k1 + k2 * k2);
            out.at(i, j) = f.at(i, j) * std::exp(-0.5 * ell * ell * k2sum);
        }
    }
    return out;
}

namespace {

// All modes sorted by |k|^2 ascending, (k1,k2) lexicographic within ties.
std::vector<std::pair<int, int>> sorted_modes(const Grid& g) {
    std::vector<std::pair<int, int>> modes;
    modes.reserve(static_cast<size_t>(g.size()));
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            modes.emplace_back(g.wavenumber(i), g.wavenumber(j));
    std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
        const long la = static_cast<long>(a.first) * a.first + static_cast<long>(a.second) * a.second;
        const long lb = static_cast<long>(b.first) * b.first + static_cast<long>(b.second) * b.second;
        return std::tie(la, a.first, a.second) < std::tie(lb, b.first, b.second);
    });
    return modes;
}

} // namespace

SpectralField2D project_low_modes(const SpectralField2D& f, int m) {
    if (m < 1) throw ValidationError("project_low_modes: m must be >= 1");
    const Grid& g = f.grid();
    const int n = g.n;
    if (m >= g.size()) return f;

    std::vector<char> keep(static_cast<size_t>(g.size()), 0);
    const auto modes = sorted_modes(g);
    for (int r = 0; r < m; ++r) {
        const auto [k1, k2] = modes[static_cast<size_t>(r)];
        const int i = g.index_of(k1), j = g.index_of(k2);
        keep[static_cast<size_t>(i) * n + j] = 1;
        // conjugate partner (-k mod n)
        keep[static_cast<size_t>((n - i) % n) * n + (n - j) % n] = 1;
    }
    SpectralField2D out(g);
    for (size_t idx = 0; idx < keep.size(); ++idx)
        out[idx] = keep[idx] ? f[idx] : 0.0;
    return out;
}

int count_modes_within(const Grid& grid, int kmax) {
    int count = 0;
    const long limit = static_cast<long>(kmax) * kmax;
    for (int i = 0; i < grid.n; ++i) {
        const long k1 = grid.wavenumber(i);
        for (int j = 0; j < grid.n; ++j) {
            const long k2 = grid.wavenumber(j);
            if (k1 * k1 + k2 * k2 <= limit) ++count;
        }
    }
    return count;
}

} // namespace npe
