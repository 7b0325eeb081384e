#pragma once

// Measurement layer: run a (problem, scheme, R, N, T, precision) config,
// collect position and invariant errors, iteration counters, and write CSV.

#include "structural/scalar.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace structural {

struct RunConfig {
    std::string problem;
    std::string scheme = "zds"; // zd, zds, sv2, sv4, sv6, sv8
    int R = 0;                  // structural schemes only
    long N = 0;
    double T = 0.0;   // <= 0 picks the problem's default horizon
    double tol = 0.0; // <= 0 picks the precision default
    int max_iter = 200;
    Precision precision = Precision::Double;
    bool project = false; // LRL projection, kepler only
    long decimation = 0;  // keep every n-th node in drift series; 0 = automatic
    // Errors are measured at block endpoints (every R-th step and step N).
    // Set to also count the interior nodes of each block.
    bool interior = false;
    std::string out;      // CSV path, empty for none
    std::string manifest; // JSON path echoing the config, empty for none
};

// Throws ConfigError on inconsistent fields.
void validate(const RunConfig& c);
bool is_structural(const std::string& scheme);
std::string to_string(Precision p);
Precision parse_precision(const std::string& s);
std::string describe(const RunConfig& c);

// Every n-th node kept when N exceeds 1e5 nodes.
long auto_decimation(long N);

// Whether the node at `step` enters error maxima and drift series.
bool measured(const RunConfig& c, long step);

struct ErrorReport {
    RunConfig config; // with defaults resolved
    double dt = 0.0;
    // max over recorded nodes; empty when the quantity is unavailable
    std::optional<double> ex, eH, eL, eA;
    long total_iter = 0;
    long pe1_calls = 0;
    long pe2_calls = 0;
    double nb_iter_avg = 0.0; // total_iter / N
    double nb_call_avg = 0.0; // R * nb_iter_avg (structural); first_rhs calls / N (baselines)
    double seconds = 0.0;
};

ErrorReport run(const RunConfig& c);

// log(e1/e2)/log(dt1/dt2); empty when either error is zero or negative.
std::optional<double> convergence_order(double e1, double e2, double dt1, double dt2);

struct SweepRow {
    long N = 0;
    std::optional<ErrorReport> report;
    std::string error; // set when the run failed
    std::optional<double> ordx, ordH, ordL, ordA;
};

// Rows in input order; failed rows keep their error tag and the sweep goes on.
// Orders are computed from the values as they are printed in the CSV.
std::vector<SweepRow> sweep(const RunConfig& base, const std::vector<long>& Ns, int threads = 1);

void write_sweep_csv(std::ostream& os, const RunConfig& base, const std::vector<SweepRow>& rows);
void write_run_csv(std::ostream& os, const ErrorReport& r);

// Scientific notation with 6 significant digits, locale independent.
std::string format_sci(double v);

// |q(t) - q(0)| at `samples` evenly spaced measured nodes (all of them when
// samples <= 0). quantity is "H", "L" or "A".
std::vector<std::pair<double, double>> drift_series(const RunConfig& c, const std::string& quantity, int samples);

void write_drift_csv(std::ostream& os, const std::vector<std::pair<double, double>>& series);

void write_manifest(const std::string& path, const RunConfig& c);

} // namespace structural
