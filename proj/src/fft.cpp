#include "npe/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "npe/errors.hpp"

namespace npe::fft {

namespace {

// Plans are created once per grid size with FFTW_ESTIMATE so that the
// algorithm choice (and hence the roundoff pattern) is identical across
// runs; FFTW_UNALIGNED lets us execute on plain std::vector storage.
// fftw_execute_dft is thread-safe, plan creation is not.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(int n) {
    static std::mutex mutex;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> a(static_cast<size_t>(n) * n);
    std::vector<std::complex<double>> b(static_cast<size_t>(n) * n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    PlanPair p;
    p.fwd = fftw_plan_dft_2d(n, n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_2d(n, n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

} // namespace

void forward(const Grid& grid, const double* samples, std::complex<double>* coeffs) {
    const int n = grid.n;
    const size_t sz = static_cast<size_t>(n) * n;
    std::vector<std::complex<double>> in(sz);
    for (size_t i = 0; i < sz; ++i) in[i] = samples[i];

    PlanPair& p = plans_for(n);
    fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(coeffs));
    const double scale = 1.0 / static_cast<double>(sz);
    for (size_t i = 0; i < sz; ++i) coeffs[i] *= scale;
}

void inverse(const Grid& grid, const std::complex<double>* coeffs, double* samples) {
    const int n = grid.n;
    const size_t sz = static_cast<size_t>(n) * n;
    std::vector<std::complex<double>> in(coeffs, coeffs + sz);
    std::vector<std::complex<double>> out(sz);

    PlanPair& p = plans_for(n);
    fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    for (size_t i = 0; i < sz; ++i) samples[i] = out[i].real();
}

std::vector<std::complex<double>> forward(const Grid& grid, const std::vector<double>& samples) {
    if (samples.size() != static_cast<size_t>(grid.size()))
        throw DimensionMismatchError("forward transform: sample array size does not match grid");
    std::vector<std::complex<double>> coeffs(samples.size());
    forward(grid, samples.data(), coeffs.data());
    return coeffs;
}

std::vector<double> inverse(const Grid& grid, const std::vector<std::complex<double>>& coeffs) {
    if (coeffs.size() != static_cast<size_t>(grid.size()))
        throw DimensionMismatchError("inverse transform: coefficient array size does not match grid");
    std::vector<double> samples(coeffs.size());
    inverse(grid, coeffs.data(), samples.data());
    return samples;
}

} // namespace npe::fft
