#pragma once

#include <complex>
#include <vector>

#include "npe/fft.hpp"
#include "npe/grid.hpp"

namespace npe {

// Real scalar field on the 2pi-periodic square stored as complex Fourier
// coefficients, f(x) = sum_k fhat_k e^{ik.x}. Hermitian symmetry
// fhat_{-k} = conj(fhat_k) is maintained by every operation in ops.hpp.
// Value-semantic; safe to copy/move between threads.
class SpectralField2D {
public:
    SpectralField2D() = default;
    explicit SpectralField2D(Grid g) : grid_(g), c_(static_cast<size_t>(g.size())) {}
    SpectralField2D(Grid g, std::vector<std::complex<double>> coeffs);

    static SpectralField2D from_samples(Grid g, const std::vector<double>& samples);
    std::vector<double> to_samples() const { return fft::inverse(grid_, c_); }

    const Grid& grid() const { return grid_; }
    int n() const { return grid_.n; }
    size_t size() const { return c_.size(); }

    std::complex<double>& operator[](size_t i) { return c_[i]; }
    const std::complex<double>& operator[](size_t i) const { return c_[i]; }
    std::complex<double>& at(int i, int j) { return c_[static_cast<size_t>(i) * grid_.n + j]; }
    const std::complex<double>& at(int i, int j) const {
        return c_[static_cast<size_t>(i) * grid_.n + j];
    }
    // Access by signed wavenumber.
    std::complex<double> coeff(int k1, int k2) const {
        return at(grid_.index_of(k1), grid_.index_of(k2));
    }
    void set_coeff(int k1, int k2, std::complex<double> v) {
        at(grid_.index_of(k1), grid_.index_of(k2)) = v;
    }

    std::complex<double> mean() const { return c_.empty() ? 0.0 : c_[0]; }
    void set_mean(std::complex<double> v) { c_[0] = v; }

    std::vector<std::complex<double>>& coeffs() { return c_; }
    const std::vector<std::complex<double>>& coeffs() const { return c_; }

    bool is_finite() const;
    double max_abs_coeff() const;

    // Symmetrize fhat(k) and conj(fhat(-k)); used when assembling fields
    // coefficient-by-coefficient.
    void enforce_hermitian();

    SpectralField2D& operator+=(const SpectralField2D& o);
    SpectralField2D& operator-=(const SpectralField2D& o);
    SpectralField2D& operator*=(double s);

private:
    Grid grid_;
    std::vector<std::complex<double>> c_;
};

SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b);
SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b);
SpectralField2D operator*(double s, SpectralField2D f);

void require_same_grid(const SpectralField2D& a, const SpectralField2D& b, const char* where);

} // namespace npe
