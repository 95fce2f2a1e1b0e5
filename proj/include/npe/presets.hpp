#pragma once

#include <cstdint>
#include <string>

#include "npe/model.hpp"

namespace npe {

// Parameters of the named initial-condition presets. Only the fields of
// the selected preset matter.
struct PresetOptions {
    uint64_t seed = 1;

    // single-mode: rho = a cos x, sigma = sigma_bar + b cos y,
    // omega = w (cos(x+y) + cos(x-y)); requires sigma_bar >= |a| + |b|.
    double a = 0.5;
    double b = 0.25;
    double sigma_bar = 1.0;
    double w = 0.5;

    // gaussian-blobs: two offset positive bumps for c1 and c2 on a
    // constant background, neutralized.
    double blob_amplitude = 0.5;
    double blob_width = 0.8;
    double background = 0.6;
    double blob_omega = 0.5;

    // random-smooth: seeded low-mode random data projected to
    // admissibility, c_i = conc_background + amplitude * g_i with
    // normalized mean-zero g_i supported on 1 <= |k| <= kmax.
    double amplitude = 0.2;
    double conc_background = 0.25;
    double omega_amplitude = 0.5;
    int kmax = 4;
};

// name: "single-mode" | "gaussian-blobs" | "random-smooth".
SimState make_preset(const std::string& name, Grid grid, const PresetOptions& opt);

} // namespace npe
