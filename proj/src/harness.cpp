#include "structural/harness.hpp"

#include "structural/baselines.hpp"
#include "structural/block_solver.hpp"
#include "structural/errors.hpp"
#include "structural/problems.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

namespace structural {

namespace {

constexpr long kStoreLimit = 100000;

struct Resolved {
    double T;
    SolverConfig cfg;
};

template <Real T>
Resolved resolve(const RunConfig& c, const HamiltonianProblem<T>& pr)
{
    Resolved r;
    r.T = c.T > 0.0 ? c.T : pr.default_T;
    r.cfg = default_solver_config<T>();
    if (c.tol > 0.0) {
        r.cfg.tol = c.tol;
    }
    r.cfg.max_iter = c.max_iter;
    return r;
}

template <Real T>
Trajectory<T> integrate_any(const HamiltonianProblem<T>& pr, const RunConfig& c, const Resolved& rs,
                            const NodeObserver<T>& obs)
{
    IntegrateOptions opt;
    opt.store_every = 0;
    opt.project = c.project;
    const T T_end(rs.T);
    if (is_structural(c.scheme)) {
        return integrate(pr, parse_formulation(c.scheme), c.R, c.N, T_end, rs.cfg, obs, opt);
    }
    return integrate_sv(pr, parse_sv_scheme(c.scheme), c.N, T_end, rs.cfg, obs, opt);
}

// Deviation of one invariant from its initial value.
template <Real T>
struct Deviation {
    const InvariantSpec<T>* spec = nullptr;
    std::vector<T> q0;
    T scale = T(1.0);

    Deviation(const InvariantSpec<T>* s, const HamiltonianProblem<T>& pr) : spec(s)
    {
        q0 = spec->eval(pr.X0, pr.P0);
        if (spec->relative) {
            T m(0.0);
            for (const T& v : q0) {
                m = num::max(m, num::abs(v));
            }
            if (m > T(0.0)) {
                scale = m;
            }
        }
    }

    T operator()(const BodySpace<T>& X, const BodySpace<T>& P) const
    {
        const std::vector<T> q = spec->eval(X, P);
        T d(0.0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            d = num::max(d, num::abs(q[i] - q0[i]));
        }
        return spec->relative ? d / scale : d;
    }
};

// Rethrow with the config prepended, keeping the exception type.
[[noreturn]] void rethrow_with(const RunConfig& c)
{
    const std::string pre = "[" + describe(c) + "] ";
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(pre + e.what());
    } catch (const NonConvergenceError& e) {
        throw NonConvergenceError(pre + e.what(), e.last_residual());
    } catch (const DivergenceError& e) {
        throw DivergenceError(pre + e.what());
    } catch (const SingularityError& e) {
        throw SingularityError(pre + e.what());
    } catch (const DomainError& e) {
        throw DomainError(pre + e.what());
    } catch (...) {
        throw;
    }
}

template <Real T>
ErrorReport run_impl(const RunConfig& c)
{
    const HamiltonianProblem<T> pr = make_problem<T>(c.problem);
    const Resolved rs = resolve(c, pr);
    const T T_end(rs.T);

    std::vector<Deviation<T>> devs;
    std::vector<T> dev_max;
    for (const auto& inv : pr.invariants) {
        devs.emplace_back(&inv, pr);
        dev_max.push_back(T(0.0));
    }

    const bool all_nodes = pr.position_mode == PositionErrorMode::AllNodes && pr.exact_solution.has_value();
    std::vector<const ReferenceValue<T>*> end_refs;
    if (pr.position_mode == PositionErrorMode::Endpoint) {
        for (const auto& ref : pr.reference_values) {
            if (ref.quantity == 'x' && num::abs(ref.t - T_end) <= T(1e-12) * num::abs(T_end)) {
                end_refs.push_back(&ref);
            }
        }
    }
    const bool have_x = all_nodes || !end_refs.empty();
    T ex(0.0);
    BodySpace<T> Xe = pr.zeros(), Pe = pr.zeros();

    NodeObserver<T> obs;
    obs.on_node = [&](long step, const T& t, const BodySpace<T>& X, const BodySpace<T>& P) {
        if (!measured(c, step)) {
            return;
        }
        for (std::size_t q = 0; q < devs.size(); ++q) {
            dev_max[q] = num::max(dev_max[q], devs[q](X, P));
        }
        if (all_nodes) {
            (*pr.exact_solution)(t, Xe, Pe);
            ex = num::max(ex, max_abs_diff(X, Xe));
        } else if (step == c.N) {
            for (const auto* ref : end_refs) {
                ex = num::max(ex, num::abs(X(ref->i, ref->k) - ref->value));
            }
        }
    };

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory<T> tr = integrate_any(pr, c, rs, obs);
    const auto t1 = std::chrono::steady_clock::now();

    ErrorReport r;
    r.config = c;
    r.config.T = rs.T;
    r.config.tol = rs.cfg.tol;
    r.dt = rs.T / static_cast<double>(c.N);
    if (have_x) {
        r.ex = num::to_double(ex);
    }
    for (std::size_t q = 0; q < devs.size(); ++q) {
        const double v = num::to_double(dev_max[q]);
        const std::string& name = devs[q].spec->name;
        if (name == "H") {
            r.eH = v;
        } else if (name == "L") {
            r.eL = v;
        } else if (name == "A") {
            r.eA = v;
        }
    }
    r.total_iter = tr.stats.iterations;
    r.pe1_calls = tr.stats.pe1_calls;
    r.pe2_calls = tr.stats.pe2_calls;
    r.nb_iter_avg = static_cast<double>(r.total_iter) / static_cast<double>(c.N);
    r.nb_call_avg = is_structural(c.scheme) ? c.R * r.nb_iter_avg
                                            : static_cast<double>(r.pe1_calls) / static_cast<double>(c.N);
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    return r;
}

template <Real T>
std::vector<std::pair<double, double>> drift_impl(const RunConfig& c, const std::string& quantity, int samples)
{
    const HamiltonianProblem<T> pr = make_problem<T>(c.problem);
    const InvariantSpec<T>* spec = pr.invariant(quantity);
    if (!spec) {
        throw ConfigError("problem " + c.problem + " has no invariant '" + quantity + "'");
    }
    const Resolved rs = resolve(c, pr);
    const long every = c.decimation > 0 ? c.decimation : auto_decimation(c.N);
    const Deviation<T> dev(spec, pr);

    std::vector<std::pair<double, double>> all;
    long seen = 0;
    NodeObserver<T> obs;
    obs.on_node = [&](long step, const T& t, const BodySpace<T>& X, const BodySpace<T>& P) {
        if (!measured(c, step)) {
            return;
        }
        if (seen++ % every == 0 || step == c.N) {
            all.emplace_back(num::to_double(t), num::to_double(dev(X, P)));
        }
    };
    integrate_any(pr, c, rs, obs);

    if (samples <= 0 || static_cast<std::size_t>(samples) >= all.size()) {
        return all;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(samples);
    const double span = static_cast<double>(all.size() - 1);
    for (int j = 0; j < samples; ++j) {
        const double pos = samples == 1 ? span : span * j / (samples - 1);
        out.push_back(all[static_cast<std::size_t>(std::llround(pos))]);
    }
    return out;
}

std::string opt_field(const std::optional<double>& v) { return v ? format_sci(*v) : std::string(); }

// value as it appears in the CSV
std::optional<double> printed(const std::optional<double>& v)
{
    if (!v) {
        return std::nullopt;
    }
    return std::strtod(format_sci(*v).c_str(), nullptr);
}

std::optional<double> order_between(const std::optional<double>& e1, const std::optional<double>& e2, double dt1,
                                    double dt2)
{
    const auto a = printed(e1), b = printed(e2);
    if (!a || !b) {
        return std::nullopt;
    }
    return convergence_order(*a, *b, dt1, dt2);
}

const char* kCsvHeader =
    "problem,scheme,R,precision,N,dt,ex,ordx,eH,ordH,eL,ordL,eA,ordA,total_iter,nb_iter_avg,nb_call_avg,status\n";

void write_row(std::ostream& os, const RunConfig& c, long N, const SweepRow* row, const ErrorReport* r,
               const std::string& status)
{
    os << c.problem << ',' << c.scheme << ',' << (is_structural(c.scheme) ? std::to_string(c.R) : std::string())
       << ',' << to_string(c.precision) << ',' << N << ',';
    auto order = [&](const std::optional<double> SweepRow::*m) {
        return row ? opt_field(row->*m) : std::string();
    };
    if (r) {
        os << format_sci(r->dt) << ',' << opt_field(r->ex) << ',' << order(&SweepRow::ordx) << ','
           << opt_field(r->eH) << ',' << order(&SweepRow::ordH) << ',' << opt_field(r->eL) << ','
           << order(&SweepRow::ordL) << ',' << opt_field(r->eA) << ',' << order(&SweepRow::ordA) << ','
           << r->total_iter << ',' << format_sci(r->nb_iter_avg) << ',' << format_sci(r->nb_call_avg) << ',';
    } else {
        os << ",,,,,,,,,,,,";
    }
    std::string s = status;
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '"') {
            ch = ';';
        }
    }
    os << s << '\n';
}

} // namespace

bool is_structural(const std::string& scheme) { return scheme == "zd" || scheme == "zds"; }

std::string to_string(Precision p) { return p == Precision::Double ? "double" : "ddouble"; }

Precision parse_precision(const std::string& s)
{
    if (s == "double") {
        return Precision::Double;
    }
    if (s == "ddouble") {
        return Precision::DDouble;
    }
    throw ConfigError("unknown precision '" + s + "' (expected double or ddouble)");
}

std::string describe(const RunConfig& c)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "problem=%s scheme=%s R=%d N=%ld T=%g tol=%g precision=%s%s%s", c.problem.c_str(),
                  c.scheme.c_str(), c.R, c.N, c.T, c.tol, to_string(c.precision).c_str(),
                  c.project ? " project" : "", c.interior ? " interior" : "");
    return buf;
}

void validate(const RunConfig& c)
{
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), c.problem) == names.end()) {
        throw ConfigError("unknown problem '" + c.problem + "'");
    }
    if (is_structural(c.scheme)) {
        if (c.R < 1 || c.R > kMaxBlockSize) {
            throw ConfigError("scheme " + c.scheme + " needs R in [1, " + std::to_string(kMaxBlockSize) + "]");
        }
        if (c.N < c.R) {
            throw ConfigError("N must be at least R");
        }
    } else if (parse_sv_scheme(c.scheme) == 0) {
        throw ConfigError("unknown scheme '" + c.scheme + "'");
    } else if (c.R != 0) {
        throw ConfigError("R applies to the structural schemes only");
    }
    if (c.N < 1) {
        throw ConfigError("N must be positive");
    }
    if (c.project && c.problem != "kepler") {
        throw ConfigError("projection is only available for kepler");
    }
    if (c.project && !is_structural(c.scheme)) {
        throw ConfigError("projection is only available for the structural schemes");
    }
    if (c.max_iter < 1) {
        throw ConfigError("max_iter must be at least 1");
    }
    if (!std::isfinite(c.T) || !std::isfinite(c.tol)) {
        throw ConfigError("T and tol must be finite");
    }
}

bool measured(const RunConfig& c, long step)
{
    const long R = is_structural(c.scheme) ? c.R : 1;
    return c.interior || step % R == 0 || step == c.N;
}

long auto_decimation(long N) { return N <= kStoreLimit ? 1 : (N + kStoreLimit - 1) / kStoreLimit; }

std::string format_sci(double v)
{
    if (!std::isfinite(v)) {
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

ErrorReport run(const RunConfig& c)
{
    try {
        validate(c);
        if (c.precision == Precision::Double) {
            return run_impl<double>(c);
        }
        return run_impl<DoubleDouble>(c);
    } catch (const Error&) {
        rethrow_with(c);
    }
}

std::optional<double> convergence_order(double e1, double e2, double dt1, double dt2)
{
    if (!(dt1 > 0.0) || !(dt2 > 0.0) || dt1 == dt2) {
        throw ConfigError("convergence order needs two distinct positive steps");
    }
    if (!(e1 > 0.0) || !(e2 > 0.0) || !std::isfinite(e1) || !std::isfinite(e2)) {
        return std::nullopt;
    }
    return std::log(e1 / e2) / std::log(dt1 / dt2);
}

std::vector<SweepRow> sweep(const RunConfig& base, const std::vector<long>& Ns, int threads)
{
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) {
            throw ConfigError("sweep step counts must be strictly ascending");
        }
    }
    std::vector<SweepRow> rows(Ns.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < Ns.size(); i = next++) {
            RunConfig c = base;
            c.N = Ns[i];
            rows[i].N = Ns[i];
            try {
                rows[i].report = run(c);
            } catch (const Error& e) {
                rows[i].error = e.what();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(Ns.size())));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1].report;
        const auto& b = rows[i].report;
        if (!a || !b) {
            continue;
        }
        rows[i].ordx = order_between(a->ex, b->ex, a->dt, b->dt);
        rows[i].ordH = order_between(a->eH, b->eH, a->dt, b->dt);
        rows[i].ordL = order_between(a->eL, b->eL, a->dt, b->dt);
        rows[i].ordA = order_between(a->eA, b->eA, a->dt, b->dt);
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const RunConfig& base, const std::vector<SweepRow>& rows)
{
    os << kCsvHeader;
    for (const auto& row : rows) {
        const ErrorReport* r = row.report ? &*row.report : nullptr;
        write_row(os, base, row.N, &row, r, r ? "ok" : "error: " + row.error);
    }
}

void write_run_csv(std::ostream& os, const ErrorReport& r)
{
    os << kCsvHeader;
    write_row(os, r.config, r.config.N, nullptr, &r, "ok");
}

std::vector<std::pair<double, double>> drift_series(const RunConfig& c, const std::string& quantity, int samples)
{
    try {
        validate(c);
        if (c.precision == Precision::Double) {
            return drift_impl<double>(c, quantity, samples);
        }
        return drift_impl<DoubleDouble>(c, quantity, samples);
    } catch (const Error&) {
        rethrow_with(c);
    }
}

void write_drift_csv(std::ostream& os, const std::vector<std::pair<double, double>>& series)
{
    os << "t,deviation\n";
    for (const auto& [t, d] : series) {
        os << format_sci(t) << ',' << format_sci(d) << '\n';
    }
}

void write_manifest(const std::string& path, const RunConfig& c)
{
    nlohmann::json j;
    j["problem"] = c.problem;
    j["scheme"] = c.scheme;
    if (is_structural(c.scheme)) {
        j["R"] = c.R;
    }
    j["N"] = c.N;
    j["T"] = c.T;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
    j["precision"] = to_string(c.precision);
    j["project"] = c.project;
    j["decimation"] = c.decimation;
    j["interior"] = c.interior;
    j["out"] = c.out;
    std::ofstream f(path);
    if (!f) {
        throw ConfigError("cannot write manifest " + path);
    }
    f << j.dump(2) << '\n';
}

} // namespace structural
