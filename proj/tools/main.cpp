#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nicholson/io.hpp"
#include "nicholson/lyapunov.hpp"
#include "nicholson/persistence.hpp"
#include "nicholson/robustness.hpp"

namespace fs = std::filesystem;
using namespace nicholson;

namespace {

struct CommonOptions {
    std::string out_dir;
    bool strict = false;
};

void write_file(const CommonOptions& common, const std::string& name,
                const std::function<void(std::ostream&)>& writer) {
    if (common.out_dir.empty()) return;
    fs::create_directories(common.out_dir);
    std::ofstream os(fs::path(common.out_dir) / name);
    if (!os) throw std::runtime_error("cannot write " + name + " under " + common.out_dir);
    writer(os);
}

void add_lyapunov_options(CLI::App* cmd, LyapunovOptions& opts) {
    cmd->add_option("--T", opts.T, "exponent horizon (time units)")->check(CLI::PositiveNumber);
    cmd->add_option("--step", opts.h, "integration step")->check(CLI::PositiveNumber);
    cmd->add_option("--renorm-period", opts.renorm_period, "renormalization period")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--slope-tol", opts.slope_tol, "window-slope dispersion tolerance")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--t-cap", opts.T_cap, "horizon cap for automatic extension")
        ->check(CLI::PositiveNumber);
    cmd->add_flag_callback("--no-extend", [&opts] { opts.extend = false; },
                           "disable automatic horizon extension");
    cmd->add_flag_callback("--l2-norm", [&opts] { opts.norm = SegmentNormKind::L2; },
                           "use the L2-style segment norm (diagnostic)");
}

int run_validate(const std::string& path, const ValidationOptions& vopts) {
    const DelaySystem sys = load_system(path);
    const ValidationReport report = validate(sys, vopts);
    print_validation(std::cout, report);
    return report.all_pass() ? 0 : 2;
}

int run_structure(const std::string& path, const CommonOptions& common) {
    const DelaySystem sys = load_system(path);
    const ValidationReport report = validate(sys);
    if (!report.all_pass()) {
        print_validation(std::cerr, report);
        return 2;
    }
    const BlockStructure structure = condense(zero_pattern(sys));
    print_structure(std::cout, structure);
    write_file(common, "structure.json",
               [&](std::ostream& os) { os << structure_to_json(structure) << "\n"; });
    return 0;
}

int run_exponents(const std::string& path, const LyapunovOptions& lopts,
                  const CommonOptions& common) {
    const DelaySystem sys = load_system(path);
    const auto exponents = block_exponents(sys, lopts);
    std::cout << "block exponents:\n";
    print_exponents(std::cout, exponents);
    write_file(common, "exponents.csv",
               [&](std::ostream& os) { write_exponents_csv(os, exponents); });
    write_file(common, "window_slopes.csv",
               [&](std::ostream& os) { write_window_slopes_csv(os, exponents); });
    return 0;
}

int run_classify(const std::string& path, const ClassifyOptions& copts,
                 const CommonOptions& common) {
    const DelaySystem sys = load_system(path);
    const PersistenceVerdict verdict = classify(sys, copts);
    print_verdict(std::cout, verdict);
    write_file(common, "verdict.json",
               [&](std::ostream& os) { os << verdict_to_json(verdict) << "\n"; });
    write_file(common, "exponents.csv",
               [&](std::ostream& os) { write_exponents_csv(os, verdict.exponents); });
    write_file(common, "window_slopes.csv",
               [&](std::ostream& os) { write_window_slopes_csv(os, verdict.exponents); });
    if (common.strict && (verdict.u0 == Answer::Uncertain || verdict.s0 == Answer::Uncertain)) {
        return 3;
    }
    return 0;
}

int run_simulate(const std::string& path, const std::vector<scalar_t>& phi_values,
                 EmpiricalOptions eopts, const CommonOptions& common) {
    const DelaySystem sys = load_system(path);
    std::vector<InitialHistory> histories;
    if (phi_values.empty()) {
        histories = default_probe_histories(sys);
    } else {
        for (scalar_t v : phi_values) histories.push_back(InitialHistory::constant(sys.n, v));
    }
    const EmpiricalReport report = empirical_check(sys, histories, eopts);
    print_empirical(std::cout, report);
    if (!common.out_dir.empty()) {
        for (std::size_t k = 0; k < histories.size(); ++k) {
            const Trajectory traj = integrate(sys, histories[k], eopts.T, eopts.h);
            write_file(common, "trajectory_" + std::to_string(k + 1) + ".csv",
                       [&](std::ostream& os) { write_trajectory_csv(os, traj); });
        }
        write_file(common, "empirical.csv", [&](std::ostream& os) {
            os << "history,patch,tail_min,tail_max,clamp_events\n";
            for (std::size_t k = 0; k < report.histories.size(); ++k) {
                const auto& hr = report.histories[k];
                for (int i = 0; i < sys.n; ++i) {
                    os << (k + 1) << "," << (i + 1) << ","
                       << format_number(hr.tail_min[static_cast<std::size_t>(i)]) << ","
                       << format_number(hr.tail_max[static_cast<std::size_t>(i)]) << ","
                       << hr.clamp_events << "\n";
                }
            }
        });
    }
    if (common.strict && report.verdict.has_value() &&
        (report.verdict->u0 == Answer::Uncertain || report.verdict->s0 == Answer::Uncertain)) {
        return 3;
    }
    return 0;
}

int run_hull_demo(int N, scalar_t T, const std::vector<scalar_t>& shifts,
                  const std::vector<scalar_t>& scan_args, scalar_t tol, std::uint64_t default_seed,
                  const CommonOptions& common) {
    HullDemoReport report;
    if (!scan_args.empty()) {
        const int num = static_cast<int>(scan_args[0]);
        const std::uint64_t seed =
            scan_args.size() > 1 ? static_cast<std::uint64_t>(scan_args[1]) : default_seed;
        const auto scan = recurrence_scan(conley_miller(N), T, num, seed, tol);
        report = hull_demo(N, T, {}, tol);
        report.translates = scan.translates;
        report.recurrent_fraction = scan.recurrent_fraction;
        std::cout << "seeded scan: seed = " << seed << ", shifts = " << num << "\n";
    } else {
        report = hull_demo(N, T, shifts, tol);
    }
    print_hull_demo(std::cout, report);
    write_file(common, "hull.csv",
               [&](std::ostream& os) { write_translates_csv(os, report.translates); });
    write_file(common, "profile.csv", [&](std::ostream& os) {
        write_profile_csv(os, report.base_checkpoints, report.base_F);
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniform/strict persistence analysis for almost periodic Nicholson-type delay systems"};
    app.require_subcommand(1);

    CommonOptions common;
    std::uint64_t seed = 1;
    app.add_option("--out", common.out_dir, "directory for CSV and JSON outputs");
    app.add_flag("--strict", common.strict, "exit 3 when a verdict is uncertain");
    app.add_option("--seed", seed, "seed for randomized scans");

    std::string path;
    ValidationOptions vopts;
    auto* cmd_validate = app.add_subcommand("validate", "check hypotheses (a1)-(a6)");
    cmd_validate->add_option("system", path, "system definition file")->required();
    cmd_validate->add_option("--grid-step", vopts.grid_step, "hypothesis grid step")
        ->check(CLI::PositiveNumber);
    cmd_validate->add_option("--horizon", vopts.horizon, "hypothesis grid horizon")
        ->check(CLI::PositiveNumber);

    auto* cmd_structure = app.add_subcommand("structure", "block decomposition and index sets");
    cmd_structure->add_option("system", path, "system definition file")->required();

    LyapunovOptions lopts;
    auto* cmd_exponents = app.add_subcommand("exponents", "per-block top Lyapunov exponents");
    cmd_exponents->add_option("system", path, "system definition file")->required();
    add_lyapunov_options(cmd_exponents, lopts);

    ClassifyOptions copts;
    auto* cmd_classify = app.add_subcommand("classify", "u0/s0 persistence verdict");
    cmd_classify->add_option("system", path, "system definition file")->required();
    cmd_classify->add_option("--margin-tol", copts.margin_tol, "sign margin for yes/no decisions")
        ->check(CLI::PositiveNumber);
    add_lyapunov_options(cmd_classify, copts.lyapunov);

    EmpiricalOptions eopts;
    std::vector<scalar_t> phi_values;
    auto* cmd_simulate = app.add_subcommand("simulate", "nonlinear simulation cross-check");
    cmd_simulate->add_option("system", path, "system definition file")->required();
    cmd_simulate->add_option("--T", eopts.T, "simulation horizon")->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--W", eopts.W, "tail window length")->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--step", eopts.h, "integration step")->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--phi", phi_values, "constant initial histories (one value each)")
        ->delimiter(',');
    cmd_simulate->add_flag_callback("--no-check", [&eopts] { eopts.run_classify = false; },
                                    "skip the classify cross-check");

    int demo_N = 6;
    scalar_t demo_T = 1e4;
    scalar_t demo_tol = 0.1;
    std::vector<scalar_t> demo_shifts;
    std::vector<scalar_t> scan_args;
    auto* cmd_hull = app.add_subcommand("hull-demo", "zero-mean translation demo");
    cmd_hull->add_option("--N", demo_N, "truncation order")->check(CLI::PositiveNumber);
    cmd_hull->add_option("--T", demo_T, "horizon")->check(CLI::PositiveNumber);
    cmd_hull->add_option("--shifts", demo_shifts, "explicit hull shifts")->delimiter(',');
    cmd_hull->add_option("--scan", scan_args, "seeded scan: NUM [SEED]")->expected(1, 2);
    cmd_hull->add_option("--tol", demo_tol, "recurrence tolerance")->check(CLI::PositiveNumber);

    auto* cmd_oracle = app.add_subcommand("oracle", "validation oracles");
    scalar_t ord = 0.0, orbeta = 0.0, ortau = 0.0;
    auto* cmd_char = cmd_oracle->add_subcommand("char-root", "real root of lambda + d = beta e^{-lambda tau}");
    cmd_char->add_option("d", ord, "decay rate")->required();
    cmd_char->add_option("beta", orbeta, "delayed feedback gain")->required();
    cmd_char->add_option("tau", ortau, "delay")->required();

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough(true);
        for (CLI::App* nested : sub->get_subcommands([](const CLI::App*) { return true; })) {
            nested->fallthrough(true);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (cmd_validate->parsed()) return run_validate(path, vopts);
        if (cmd_structure->parsed()) return run_structure(path, common);
        if (cmd_exponents->parsed()) return run_exponents(path, lopts, common);
        if (cmd_classify->parsed()) return run_classify(path, copts, common);
        if (cmd_simulate->parsed()) return run_simulate(path, phi_values, eopts, common);
        if (cmd_hull->parsed()) {
            return run_hull_demo(demo_N, demo_T, demo_shifts, scan_args, demo_tol, seed, common);
        }
        if (cmd_oracle->parsed() && cmd_char->parsed()) {
            std::cout << format_number(characteristic_root(ord, orbeta, ortau)) << "\n";
            return 0;
        }
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const ValidationFailure& e) {
        std::cerr << "validation failed:\n";
        print_validation(std::cerr, e.report);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
