#pragma once

#include <string>
#include <vector>

#include "npe/experiments.hpp"
#include "npe/presets.hpp"
#include "npe/timestep.hpp"

namespace npe {

struct OutputConfig {
    std::string series_path;        // empty: no series file
    double series_interval = 1e-2;  // seconds between diagnostics rows
    std::string snapshot_path;      // prefix; empty: no snapshots
    double snapshot_interval = 0.0; // 0: only the final snapshot
    std::string report_path;        // experiment reports (JSON)
};

enum class ExperimentKind { None, InviscidSweep, MollificationSweep, Picard };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::None;
    std::vector<double> nu_list;
    InviscidMode mode = InviscidMode::Matched;
    std::vector<double> ell_list;
    std::vector<double> sample_times{1.0};
    double T0 = 0.0; // 0 selects the documented default
    int n_iters = 10;
    double dt = 0.0; // 0 falls back to time.dt
};

struct RunConfig {
    Grid grid{128};
    PhysParams params;
    StepperConfig stepper;
    std::string ic_preset = "random-smooth";
    std::string ic_snapshot; // load the initial state from a snapshot instead
    PresetOptions preset;
    OutputConfig output;
    ExperimentConfig experiment;
};

// Parse a flat `key = value` document ('#' comments, dotted keys). Unknown
// and duplicate keys are rejected (strict mode); omitted keys take the
// documented defaults. Overrides are applied after the document, same key
// space. Throws ParseError with the offending line/key, ValidationError
// for violated invariants.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

// Deterministic full emission; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& cfg);

RunConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides = {});

} // namespace npe
