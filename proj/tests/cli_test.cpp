// End-to-end checks of the command line front end: exit codes, report
// content, and byte-identical reruns. The binary path and the system files
// directory come from the environment (set by ctest).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAIL: " << what << "\n";
    }
}

std::string require_env(const char* name) {
    const char* value = std::getenv(name);
    if (value == nullptr) {
        std::cerr << "environment variable " << name << " not set\n";
        std::exit(1);
    }
    return value;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& command) {
    const fs::path tmp = fs::temp_directory_path() / "nicholson_cli_out.txt";
    const std::string full = command + " > " + tmp.string() + " 2>&1";
    const int raw = std::system(full.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(raw);
    std::ifstream in(tmp);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

int main() {
    const std::string cli = require_env("NICHOLSON_CLI");
    const std::string systems = require_env("NICHOLSON_SYSTEMS");
    const fs::path workdir = fs::temp_directory_path() / "nicholson_cli_test";
    fs::remove_all(workdir);
    fs::create_directories(workdir);

    // Oracle subcommand prints the root and exits 0.
    {
        const auto r = run(cli + " oracle char-root 1 2 1");
        check(r.exit_code == 0, "char-root exit code");
        check(contains(r.output, "0.3748"), "char-root value, got: " + r.output);
    }

    // A failing hypothesis names itself and yields exit 2 with a witness.
    {
        const auto r = run(cli + " validate " + systems + "/bad_a6.json");
        check(r.exit_code == 2, "validate exit code on (a6) failure");
        check(contains(r.output, "(a6)"), "report names (a6)");
        check(contains(r.output, "4.7"), "witness time reported");
    }
    {
        const auto r = run(cli + " validate " + systems + "/scalar_nicholson.json");
        check(r.exit_code == 0, "validate exit code on a passing system");
    }

    // classify --strict on the supercritical scalar: exit 0 and yes/yes.
    {
        const auto r = run(cli + " classify " + systems + "/scalar_nicholson.json --strict --no-extend --T 1000");
        check(r.exit_code == 0, "classify exit code");
        check(contains(r.output, "u0-persistent: yes"), "u0 yes");
        check(contains(r.output, "s0-persistent: yes"), "s0 yes");
    }

    // Usage and IO errors exit 1.
    {
        check(run(cli + " classify /nonexistent.json").exit_code == 1, "missing file exit code");
        check(run(cli + " frobnicate").exit_code == 1, "unknown subcommand exit code");
        check(run(cli + " classify").exit_code == 1, "missing argument exit code");
    }

    // The boundary case beta = d sits inside the sign margin: uncertain, and
    // --strict maps that to exit 3.
    {
        const auto r = run(cli + " classify " + systems +
                           "/scalar_critical.json --strict --no-extend --T 1000");
        check(r.exit_code == 3, "uncertain verdict exits 3 under --strict");
        check(contains(r.output, "uncertain"), "verdict printed as uncertain");
    }

    // Structure subcommand emits the machine-readable record.
    {
        const fs::path out = workdir / "structure";
        const auto r = run(cli + " structure " + systems + "/two_patch_source_sink.json --out " +
                           out.string());
        check(r.exit_code == 0, "structure exit code");
        check(contains(r.output, "I = { 1 }"), "I printed");
        check(contains(r.output, "J = { 2 }"), "J printed");
        check(fs::exists(out / "structure.json"), "structure.json written");
    }

    // Determinism: identical runs produce byte-identical CSV files.
    {
        const fs::path out1 = workdir / "run1";
        const fs::path out2 = workdir / "run2";
        const std::string base = cli + " classify " + systems +
                                 "/two_patch_source_sink.json --no-extend --T 1000 --out ";
        check(run(base + out1.string()).exit_code == 0, "classify run 1");
        check(run(base + out2.string()).exit_code == 0, "classify run 2");
        check(slurp(out1 / "exponents.csv") == slurp(out2 / "exponents.csv"),
              "exponents.csv byte-identical");
        check(slurp(out1 / "verdict.json") == slurp(out2 / "verdict.json"),
              "verdict.json byte-identical");
        check(!slurp(out1 / "exponents.csv").empty(), "exponents.csv nonempty");
    }
    {
        const fs::path out1 = workdir / "hull1";
        const fs::path out2 = workdir / "hull2";
        const std::string base =
            cli + " hull-demo --N 4 --T 2000 --scan 25 99 --out ";
        check(run(base + out1.string()).exit_code == 0, "hull-demo run 1");
        check(run(base + out2.string()).exit_code == 0, "hull-demo run 2");
        check(slurp(out1 / "hull.csv") == slurp(out2 / "hull.csv"), "hull.csv byte-identical");
        const std::string csv = slurp(out1 / "hull.csv");
        check(contains(csv, "shift,minF_secondhalf,recurrent"), "hull.csv header");
    }

    // simulate reports decaying tails for the subcritical system.
    {
        const auto r = run(cli + " simulate " + systems +
                           "/scalar_subcritical.json --T 100 --W 20 --phi 1.0 --no-check");
        check(r.exit_code == 0, "simulate exit code");
        check(contains(r.output, "history 1"), "history report present");
    }

    // exponents emits CSV with the documented schema.
    {
        const fs::path out = workdir / "exponents";
        const auto r = run(cli + " exponents " + systems +
                           "/scalar_nicholson.json --no-extend --T 1000 --out " + out.string());
        check(r.exit_code == 0, "exponents exit code");
        check(contains(slurp(out / "exponents.csv"), "block,value,status,dispersion,T,renorm_count"),
              "exponents.csv header");
        check(contains(slurp(out / "window_slopes.csv"), "block,window,slope"),
              "window_slopes.csv header");
    }

    if (failures == 0) {
        std::cout << "cli_test: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_test: " << failures << " check(s) failed\n";
    return 1;
}
