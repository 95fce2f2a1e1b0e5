#pragma once

#include <string>

#include "npe/config.hpp"

namespace npe {

struct RunnerOptions {
    bool strict_invariants = false;
    std::string resume_snapshot; // continue from this snapshot
    unsigned max_threads = 1;    // sweep-member parallelism
};

// Initial state from the configured preset, admissibility-checked.
SimState build_initial_state(const RunConfig& cfg);

// Executes the configured run or experiment and writes series, snapshots
// and reports. Throws; the CLI maps exceptions to exit codes.
void execute(const RunConfig& cfg, const RunnerOptions& opts = {});

// NPE_THREADS, falling back to the hardware concurrency.
unsigned thread_cap_from_env();

std::string sweep_report_json(const SweepReport& report);
std::string picard_report_json(const PicardReport& report);

} // namespace npe
