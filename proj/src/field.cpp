#include "npe/field.hpp"

#include <algorithm>
#include <cmath>

#include "npe/errors.hpp"

namespace npe {

SpectralField2D::SpectralField2D(Grid g, std::vector<std::complex<double>> coeffs)
    : grid_(g), c_(std::move(coeffs)) {
    if (c_.size() != static_cast<size_t>(g.size()))
        throw DimensionMismatchError("SpectralField2D: coefficient count does not match grid");
}

SpectralField2D SpectralField2D::from_samples(Grid g, const std::vector<double>& samples) {
    return SpectralField2D(g, fft::forward(g, samples));
}

bool SpectralField2D::is_finite() const {
    for (const auto& z : c_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double SpectralField2D::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& z : c_) m = std::max(m, std::abs(z));
    return m;
}

void SpectralField2D::enforce_hermitian() {
    const int n = grid_.n;
    for (int i = 0; i < n; ++i) {
        const int mi = (n - i) % n;
        for (int j = 0; j < n; ++j) {
            const int mj = (n - j) % n;
            if (i > mi || (i == mi && j > mj)) continue;
            const std::complex<double> a = at(i, j);
            const std::complex<double> b = at(mi, mj);
            const std::complex<double> avg = 0.5 * (a + std::conj(b));
            at(i, j) = avg;
            at(mi, mj) = std::conj(avg);
        }
    }
    c_[0] = std::complex<double>(c_[0].real(), 0.0);
}

SpectralField2D& SpectralField2D::operator+=(const SpectralField2D& o) {
    require_same_grid(*this, o, "operator+=");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SpectralField2D& SpectralField2D::operator-=(const SpectralField2D& o) {
    require_same_grid(*this, o, "operator-=");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

SpectralField2D& SpectralField2D::operator*=(double s) {
    for (auto& z : c_) z *= s;
    return *this;
}

SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b) { return a += b; }
SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b) { return a -= b; }
SpectralField2D operator*(double s, SpectralField2D f) { return f *= s; }

void require_same_grid(const SpectralField2D& a, const SpectralField2D& b, const char* where) {
    if (!(a.grid() == b.grid()))
        throw DimensionMismatchError(std::string(where) + ": fields live on different grids");
}

} // namespace npe
