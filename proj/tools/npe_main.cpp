#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "npe/diagnostics.hpp"
#include "npe/errors.hpp"
#include "npe/runner.hpp"
#include "npe/snapshot.hpp"

namespace {

// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 I/O.
int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const npe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const npe::SnapshotError& e) {
        std::cerr << "snapshot error: " << e.what() << "\n";
        return 4;
    } catch (const npe::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const npe::NonFiniteError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const npe::NoContractionError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const npe::NonZeroMeanError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

void inspect_snapshot(const std::string& path) {
    const auto [state, params] = npe::read_snapshot(path);
    std::printf("snapshot %s\n", path.c_str());
    std::printf("  n        = %d\n", state.rho.grid().n);
    std::printf("  time     = %.17g\n", state.time);
    std::printf("  variant  = %s\n", npe::variant_name(params.variant).c_str());
    std::printf("  D        = %.17g\n", params.D);
    std::printf("  eps      = %.17g\n", params.eps);
    std::printf("  kbtk     = %.17g\n", params.kbtk);
    std::printf("  nu       = %.17g\n", params.nu);
    std::printf("  ell      = %.17g\n", params.ell);
    std::printf("  mean rho   = %.6e\n", state.rho.mean().real());
    std::printf("  mean sigma = %.6e\n", state.sigma.mean().real());
    std::printf("  |rho|_L2   = %.10e   |rho|_H1   = %.10e\n", npe::l2_norm(state.rho),
                npe::sobolev_norm(state.rho, 1.0));
    std::printf("  |sigma|_L2 = %.10e   |sigma|_H1 = %.10e\n", npe::l2_norm(state.sigma),
                npe::sobolev_norm(state.sigma, 1.0));
    std::printf("  |omega|_L2 = %.10e   |u|_H1     = %.10e\n", npe::l2_norm(state.omega),
                npe::velocity_sobolev_norm(state.omega, 1.0));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral Nernst-Planck-Euler / Navier-Stokes solver on the 2D torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string resume_path;
    std::vector<std::string> overrides;
    bool strict = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "run configuration file")->required();
        cmd->add_option("--override", overrides, "key=value overrides, repeatable");
    };

    CLI::App* run = app.add_subcommand("run", "integrate a configured run");
    add_common(run);
    run->add_flag("--strict-invariants", strict, "abort when an invariant check fails");
    run->add_option("--resume", resume_path, "resume from a snapshot");

    CLI::App* sweep = app.add_subcommand("sweep", "run a configured parameter sweep");
    add_common(sweep);

    CLI::App* picard = app.add_subcommand("picard", "run the Picard iteration experiment");
    add_common(picard);

    std::string snapshot_path;
    CLI::App* inspect = app.add_subcommand("inspect", "print a snapshot header and norms");
    inspect->add_option("snapshot", snapshot_path, "snapshot file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (inspect->parsed())
        return run_guarded([&] { inspect_snapshot(snapshot_path); });

    return run_guarded([&] {
        const npe::RunConfig cfg = npe::load_config_file(config_path, overrides);
        if (sweep->parsed() && cfg.experiment.kind != npe::ExperimentKind::InviscidSweep &&
            cfg.experiment.kind != npe::ExperimentKind::MollificationSweep)
            throw npe::ValidationError("sweep: config has no sweep experiment block");
        if (picard->parsed() && cfg.experiment.kind != npe::ExperimentKind::Picard)
            throw npe::ValidationError("picard: config has no picard experiment block");

        npe::RunnerOptions opts;
        opts.strict_invariants = strict;
        opts.resume_snapshot = resume_path;
        opts.max_threads = npe::thread_cap_from_env();
        npe::execute(cfg, opts);
    });
}
