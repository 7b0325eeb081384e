// Command-line front end: run, sweep, drift, coeffs.
// Exit codes: 0 ok, 2 configuration error, 3 solver failure.

#include "structural/errors.hpp"
#include "structural/harness.hpp"
#include "structural/secoeff.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace structural;

namespace {

struct Flags {
    RunConfig cfg;
    std::string precision = "double";
    std::vector<long> Ns;
    std::string quantity = "H";
    int samples = 200;
    int threads = 1;
};

void add_run_flags(CLI::App* sub, Flags& f, bool single_N)
{
    sub->add_option("--problem", f.cfg.problem, "benchmark name")->required();
    sub->add_option("--scheme", f.cfg.scheme, "zd, zds, sv2, sv4, sv6 or sv8")->capture_default_str();
    sub->add_option("--R", f.cfg.R, "block size (structural schemes)");
    if (single_N) {
        sub->add_option("--N", f.cfg.N, "number of steps")->required();
    }
    sub->add_option("--T", f.cfg.T, "final time (default: problem horizon)");
    sub->add_option("--tol", f.cfg.tol, "fixed-point tolerance (default by precision)");
    sub->add_option("--max-iter", f.cfg.max_iter, "fixed-point sweep cap")->capture_default_str();
    sub->add_option("--precision", f.precision, "double or ddouble")->capture_default_str();
    sub->add_flag("--project-lrl", f.cfg.project, "project accepted nodes onto the LRL level set (kepler)");
    sub->add_flag("--interior", f.cfg.interior, "measure errors at block-interior nodes too, not only block ends");
    sub->add_option("--out", f.cfg.out, "CSV output path (default stdout)");
    sub->add_option("--manifest", f.cfg.manifest, "write a JSON manifest of the config");
}

// Writes to the --out file or stdout.
template <class F>
void emit(const std::string& path, F&& write)
{
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw ConfigError("cannot open " + path + " for writing");
    }
    write(f);
}

int cmd_coeffs(const std::string& formulation, int R)
{
    const Formulation f = parse_formulation(formulation);
    if (R < 1 || R > kMaxBlockSize) {
        throw ConfigError("R outside [1, " + std::to_string(kMaxBlockSize) + "]");
    }
    write_basis_csv(std::cout, kernel_basis(R, f), true);
    const auto tab = coeff_table<DoubleDouble>(R, f, DoubleDouble(1.0));
    std::fprintf(stderr, "condition(A_z) = %.3e\n", static_cast<double>(tab.condition_Az));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"structural-scheme integrator and benchmark harness"};
    app.require_subcommand(1);
    Flags f;

    auto* run_cmd = app.add_subcommand("run", "integrate one configuration and print its error row");
    add_run_flags(run_cmd, f, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "errors and convergence orders over a list of N");
    add_run_flags(sweep_cmd, f, false);
    sweep_cmd->add_option("--N", f.Ns, "ascending step counts")->required()->delimiter(',');
    sweep_cmd->add_option("--threads", f.threads, "rows evaluated concurrently")->capture_default_str();

    auto* drift_cmd = app.add_subcommand("drift", "invariant deviation over time");
    add_run_flags(drift_cmd, f, true);
    drift_cmd->add_option("--quantity", f.quantity, "H, L or A")->capture_default_str();
    drift_cmd->add_option("--samples", f.samples, "evenly spaced output points (0 = all)")->capture_default_str();
    drift_cmd->add_option("--decimation", f.cfg.decimation, "keep every n-th node before sampling");

    std::string formulation = "zds";
    int coeff_R = 1;
    auto* coeffs_cmd = app.add_subcommand("coeffs", "dump the unit-grid kernel basis as CSV");
    coeffs_cmd->add_option("--scheme", formulation, "zd or zds")->capture_default_str();
    coeffs_cmd->add_option("--R", coeff_R, "block size")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (coeffs_cmd->parsed()) {
            return cmd_coeffs(formulation, coeff_R);
        }
        f.cfg.precision = parse_precision(f.precision);
        if (!f.cfg.manifest.empty()) {
            write_manifest(f.cfg.manifest, f.cfg);
        }
        if (run_cmd->parsed()) {
            const ErrorReport r = run(f.cfg);
            emit(f.cfg.out, [&](std::ostream& os) { write_run_csv(os, r); });
            std::fprintf(stderr, "%.2f s\n", r.seconds);
            return 0;
        }
        if (sweep_cmd->parsed()) {
            validate([&] {
                RunConfig c = f.cfg;
                c.N = f.Ns.empty() ? 0 : f.Ns.back();
                return c;
            }());
            const auto rows = sweep(f.cfg, f.Ns, f.threads);
            emit(f.cfg.out, [&](std::ostream& os) { write_sweep_csv(os, f.cfg, rows); });
            for (const auto& row : rows) {
                if (!row.report) {
                    std::fprintf(stderr, "N=%ld failed: %s\n", row.N, row.error.c_str());
                }
            }
            for (const auto& row : rows) {
                if (!row.report) {
                    return 3;
                }
            }
            return 0;
        }
        if (drift_cmd->parsed()) {
            const auto series = drift_series(f.cfg, f.quantity, f.samples);
            emit(f.cfg.out, [&](std::ostream& os) { write_drift_csv(os, series); });
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    }
    return 0;
}
