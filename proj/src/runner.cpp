#include "npe/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>

#include "npe/errors.hpp"
#include "npe/series.hpp"
#include "npe/snapshot.hpp"

namespace npe {

using nlohmann::json;

SimState build_initial_state(const RunConfig& cfg) {
    SimState s = make_preset(cfg.ic_preset, cfg.grid, cfg.preset);
    validate_state(s);
    return s;
}

unsigned thread_cap_from_env() {
    if (const char* env = std::getenv("NPE_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

// Emits records at t0 and every interval; aligned to step indices when the
// interval is an integer number of steps so that checkpointed and
// uninterrupted runs sample identically.
class RecordScheduler {
public:
    RecordScheduler(double t0, double interval, double dt)
        : t0_(t0), interval_(interval) {
        const double ratio = interval / dt;
        const long n = std::lround(ratio);
        if (n >= 1 && std::abs(ratio - static_cast<double>(n)) < 1e-9) steps_per_record_ = n;
    }

    bool due_after_step(long step_index, double time) {
        if (steps_per_record_ > 0) return step_index % steps_per_record_ == 0;
        if (time >= t0_ + static_cast<double>(next_) * interval_ - 1e-12) {
            ++next_;
            return true;
        }
        return false;
    }

private:
    double t0_, interval_;
    long steps_per_record_ = 0;
    long next_ = 1;
};

std::string snapshot_name(const std::string& prefix, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "-%04d.npe2", index);
    return prefix + buf;
}

void check_invariants_or_throw(const SimState& s, const PhysParams& p, double sigma0) {
    for (const auto& check : invariant_report(s, p, sigma0)) {
        if (!check.pass)
            throw NonFiniteError("invariant '" + check.name + "' violated at t=" +
                                     std::to_string(s.time) +
                                     " (residual " + std::to_string(check.residual) + ")",
                                 s.time);
    }
}

void execute_plain_run(const RunConfig& cfg, const RunnerOptions& opts, SimState state,
                       const PhysParams& params) {
    const double sigma0 = state.sigma.mean().real();
    std::unique_ptr<SeriesWriter> series;
    if (!cfg.output.series_path.empty()) series = std::make_unique<SeriesWriter>(cfg.output.series_path);

    auto record = [&](const SimState& s) {
        if (series) series->append(compute_diagnostics(s, params));
        if (opts.strict_invariants) check_invariants_or_throw(s, params, sigma0);
    };

    record(state);
    int snap_index = 0;
    if (cfg.stepper.t_end > state.time) {
        RecordScheduler rec(state.time, cfg.output.series_interval, cfg.stepper.dt);
        std::unique_ptr<RecordScheduler> snap;
        if (!cfg.output.snapshot_path.empty() && cfg.output.snapshot_interval > 0.0)
            snap = std::make_unique<RecordScheduler>(state.time, cfg.output.snapshot_interval,
                                                     cfg.stepper.dt);
        long step_index = 0;
        double last_recorded = state.time;
        StepperConfig st = cfg.stepper;
        state = integrate(std::move(state), params, st, [&](const SimState& s) {
            ++step_index;
            if (rec.due_after_step(step_index, s.time) && s.time < st.t_end) {
                record(s);
                last_recorded = s.time;
            }
            if (snap && snap->due_after_step(step_index, s.time) && s.time < st.t_end)
                write_snapshot(s, params, snapshot_name(cfg.output.snapshot_path, ++snap_index));
        });
        if (state.time != last_recorded) record(state);
    }
    if (!cfg.output.snapshot_path.empty())
        write_snapshot(state, params, cfg.output.snapshot_path + "-final.npe2");
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed on " + path);
}

json difference_table(const std::vector<SweepSample>& samples) {
    json rows = json::array();
    for (const auto& sample : samples) {
        json norms = json::array();
        for (const auto& d : sample.norms)
            norms.push_back({{"s", d.s},
                             {"rho", d.rho},
                             {"sigma", d.sigma},
                             {"u", d.u},
                             {"combined", d.combined()}});
        rows.push_back({{"time", sample.time}, {"norms", norms}});
    }
    return rows;
}

} // namespace

std::string sweep_report_json(const SweepReport& report) {
    json members = json::array();
    for (const auto& m : report.members) {
        json entry = {{"param", m.param},
                      {"completed", m.completed},
                      {"energy_l2_initial", m.energy_l2_initial},
                      {"sup_energy_l2", m.sup_energy_l2},
                      {"sup_omega_l2", m.sup_omega_l2},
                      {"sup_grad_phi", m.sup_grad_phi},
                      {"decay_envelope_ok", m.decay_envelope_ok},
                      {"samples", difference_table(m.samples)}};
        if (!m.error.empty()) entry["error"] = m.error;
        members.push_back(entry);
    }
    json slopes = json::array();
    for (const auto& f : report.slopes)
        slopes.push_back({{"s", f.s}, {"slope", f.slope}, {"rms_residual", f.rms_residual}});
    const json j = {{"parameter", report.parameter}, {"mode", report.mode},
                    {"values", report.values},       {"sample_times", report.sample_times},
                    {"members", members},            {"slopes", slopes},
                    {"partial", report.partial}};
    return j.dump(2) + "\n";
}

std::string picard_report_json(const PicardReport& report) {
    const json j = {{"T0", report.T0},
                    {"dt", report.dt},
                    {"n_iters", report.n_iters},
                    {"m_r_proxy", report.m_r_proxy},
                    {"t0_from_heuristic", report.t0_from_heuristic},
                    {"delta", report.delta},
                    {"upsilon", report.upsilon},
                    {"q", report.q},
                    {"nonlinear_residual", report.nonlinear_residual},
                    {"direct_solve_distance", report.direct_solve_distance}};
    return j.dump(2) + "\n";
}

void execute(const RunConfig& cfg, const RunnerOptions& opts) {
    SimState state;
    PhysParams params = cfg.params;
    if (!opts.resume_snapshot.empty()) {
        auto [s, p] = read_snapshot(opts.resume_snapshot);
        state = std::move(s);
        params = p;
    } else if (!cfg.ic_snapshot.empty()) {
        auto [s, p] = read_snapshot(cfg.ic_snapshot);
        state = std::move(s);
        params = p;
    } else {
        state = build_initial_state(cfg);
    }

    switch (cfg.experiment.kind) {
    case ExperimentKind::None:
        execute_plain_run(cfg, opts, std::move(state), params);
        return;
    case ExperimentKind::InviscidSweep: {
        const SweepReport report =
            inviscid_sweep(state, params, cfg.stepper, cfg.experiment.nu_list,
                           cfg.experiment.sample_times, cfg.experiment.mode, opts.max_threads);
        const std::string path =
            cfg.output.report_path.empty() ? "inviscid_sweep.json" : cfg.output.report_path;
        write_text_file(path, sweep_report_json(report));
        if (report.partial) throw NonFiniteError("sweep aborted by a non-finite member; partial "
                                                 "report written to " + path, 0.0);
        return;
    }
    case ExperimentKind::MollificationSweep: {
        const SweepReport report =
            mollification_sweep(state, params, cfg.stepper, cfg.experiment.ell_list,
                                cfg.experiment.sample_times, opts.max_threads);
        const std::string path =
            cfg.output.report_path.empty() ? "mollification_sweep.json" : cfg.output.report_path;
        write_text_file(path, sweep_report_json(report));
        if (report.partial) throw NonFiniteError("sweep aborted by a non-finite member; partial "
                                                 "report written to " + path, 0.0);
        return;
    }
    case ExperimentKind::Picard: {
        PicardConfig pc;
        pc.T0 = cfg.experiment.T0;
        pc.n_iters = cfg.experiment.n_iters;
        pc.dt = cfg.experiment.dt > 0.0 ? cfg.experiment.dt : cfg.stepper.dt;
        PhysParams pp = params;
        if (pp.variant != Variant::Regularized) {
            if (pp.ell <= 0.0)
                throw ValidationError("picard requires params.ell > 0 (regularized variant)");
            pp.variant = Variant::Regularized;
        }
        const PicardReport report = picard_solve(state, pp, pc);
        const std::string path =
            cfg.output.report_path.empty() ? "picard.json" : cfg.output.report_path;
        write_text_file(path, picard_report_json(report));
        return;
    }
    }
}

} // namespace npe
