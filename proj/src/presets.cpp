#include "npe/presets.hpp"

#include <cmath>
#include <random>

#include "npe/errors.hpp"

namespace npe {

namespace {

// Platform-stable uniforms; std::uniform_real_distribution is
// implementation-defined.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SimState single_mode(Grid g, const PresetOptions& o) {
    if (o.sigma_bar < std::abs(o.a) + std::abs(o.b))
        throw ValidationError("single-mode preset requires sigma_bar >= |a| + |b|");
    SimState s;
    s.rho = SpectralField2D(g);
    s.sigma = SpectralField2D(g);
    s.omega = SpectralField2D(g);
    s.rho.set_coeff(1, 0, 0.5 * o.a);
    s.rho.set_coeff(-1, 0, 0.5 * o.a);
    s.sigma.set_mean(o.sigma_bar);
    s.sigma.set_coeff(0, 1, 0.5 * o.b);
    s.sigma.set_coeff(0, -1, 0.5 * o.b);
    for (int k1 : {-1, 1})
        for (int k2 : {-1, 1}) s.omega.set_coeff(k1, k2, 0.5 * o.w);
    return s;
}

// Periodized Gaussian bump centered at (x0, y0).
double periodic_gaussian(double x, double y, double x0, double y0, double width) {
    double acc = 0.0;
    for (int mx = -3; mx <= 3; ++mx)
        for (int my = -3; my <= 3; ++my) {
            const double dx = x - x0 + two_pi * mx;
            const double dy = y - y0 + two_pi * my;
            acc += std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        }
    return acc;
}

SimState gaussian_blobs(Grid g, const PresetOptions& o) {
    if (!(o.blob_width > 0.0)) throw ValidationError("gaussian-blobs requires blob_width > 0");
    if (o.background < 0.0 || o.blob_amplitude < 0.0)
        throw ValidationError("gaussian-blobs requires nonnegative background and amplitude");
    const int n = g.n;
    const double h = g.cell_size();
    const double cx = std::numbers::pi, cy = std::numbers::pi;
    const double off = std::numbers::pi / 2.0;

    std::vector<double> c1(static_cast<size_t>(g.size())), c2(c1.size()), w(c1.size());
    for (int i = 0; i < n; ++i) {
        const double x = i * h;
        for (int j = 0; j < n; ++j) {
            const double y = j * h;
            const size_t idx = static_cast<size_t>(i) * n + j;
            c1[idx] = o.background +
                      o.blob_amplitude * periodic_gaussian(x, y, cx - off, cy, o.blob_width);
            c2[idx] = o.background +
                      o.blob_amplitude * periodic_gaussian(x, y, cx + off, cy, o.blob_width);
            w[idx] = o.blob_omega * (std::cos(x + y) + std::cos(x - y));
        }
    }

    SpectralField2D f1 = SpectralField2D::from_samples(g, c1);
    SpectralField2D f2 = SpectralField2D::from_samples(g, c2);
    // Neutralize: give both species the common mean.
    const double mbar = 0.5 * (f1.mean().real() + f2.mean().real());
    f1.set_mean(mbar);
    f2.set_mean(mbar);

    SimState s;
    auto [rho, sigma] = combine(f1, f2);
    s.rho = std::move(rho);
    s.sigma = std::move(sigma);
    s.omega = SpectralField2D::from_samples(g, w);
    return s;
}

// Random mean-zero field with Hermitian symmetry on 1 <= |k| <= kmax,
// spectrum ~ e^{-|k|}, normalized to unit sup.
SpectralField2D random_smooth_field(Grid g, int kmax, std::mt19937_64& rng) {
    SpectralField2D f(g);
    for (int k1 = 0; k1 <= kmax; ++k1) {
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 <= 0) continue; // self-conjugate half handled by symmetry
            const double r2 = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
            if (r2 > static_cast<double>(kmax) * kmax) continue;
            const double mag = std::exp(-std::sqrt(r2));
            const double phase = two_pi * next_unit(rng);
            const double scale = 0.5 + 0.5 * next_unit(rng);
            const std::complex<double> z = std::polar(mag * scale, phase);
            f.set_coeff(k1, k2, z);
            f.set_coeff(-k1, -k2, std::conj(z));
        }
    }
    const auto samples = f.to_samples();
    double sup = 0.0;
    for (double v : samples) sup = std::max(sup, std::abs(v));
    if (sup > 0.0) f *= 1.0 / sup;
    return f;
}

SimState random_smooth(Grid g, const PresetOptions& o) {
    if (o.kmax < 1 || o.kmax > g.n / 3)
        throw ValidationError("random-smooth requires 1 <= kmax <= n/3");
    if (o.conc_background < o.amplitude)
        throw ValidationError("random-smooth requires conc_background >= amplitude "
                              "(positivity of the concentrations)");
    std::mt19937_64 rng(o.seed);
    const SpectralField2D g1 = random_smooth_field(g, o.kmax, rng);
    const SpectralField2D g2 = random_smooth_field(g, o.kmax, rng);
    SpectralField2D w = random_smooth_field(g, o.kmax, rng);

    // c_i = conc_background + amplitude * g_i >= 0 since |g_i| <= 1.
    SimState s;
    s.rho = o.amplitude * (g1 - g2);
    s.sigma = o.amplitude * (g1 + g2);
    s.sigma.set_mean(s.sigma.mean() + 2.0 * o.conc_background);
    w *= o.omega_amplitude;
    s.omega = std::move(w);
    return s;
}

} // namespace

SimState make_preset(const std::string& name, Grid grid, const PresetOptions& opt) {
    SimState s;
    if (name == "single-mode")
        s = single_mode(grid, opt);
    else if (name == "gaussian-blobs")
        s = gaussian_blobs(grid, opt);
    else if (name == "random-smooth")
        s = random_smooth(grid, opt);
    else
        throw ValidationError("unknown preset '" + name +
                              "' (single-mode|gaussian-blobs|random-smooth)");
    s.time = 0.0;
    dealias_in_place(s.rho);
    dealias_in_place(s.sigma);
    dealias_in_place(s.omega);
    s.rho.set_mean(0.0);
    s.omega.set_mean(0.0);
    return s;
}

} // namespace npe
