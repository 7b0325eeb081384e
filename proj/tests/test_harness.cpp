#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "structural/block_solver.hpp"
#include "structural/errors.hpp"
#include "structural/harness.hpp"
#include "structural/problems.hpp"
#include "structural/secoeff.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace structural;

namespace {

RunConfig cfg(const std::string& problem, const std::string& scheme, int R, long N, double T = 0.0)
{
    RunConfig c;
    c.problem = problem;
    c.scheme = scheme;
    c.R = R;
    c.N = N;
    c.T = T;
    return c;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

// least-squares slope of y against x
double slope(const std::vector<std::pair<double, double>>& s)
{
    double mx = 0, my = 0;
    for (const auto& [x, y] : s) {
        mx += x;
        my += y;
    }
    mx /= s.size();
    my /= s.size();
    double num = 0, den = 0;
    for (const auto& [x, y] : s) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    return num / den;
}

std::pair<double, double> half_maxima(const std::vector<std::pair<double, double>>& s, double T)
{
    double a = 0, b = 0;
    for (const auto& [t, d] : s) {
        (t <= T / 2 ? a : b) = std::max(t <= T / 2 ? a : b, d);
    }
    return {a, b};
}

} // namespace

TEST_CASE("convergence order examples")
{
    CHECK(*convergence_order(1.0, 0.5, 0.1, 0.05) == doctest::Approx(1.0).epsilon(1e-15));
    const double o = *convergence_order(5.43e-2, 3.57e-3, 100.0 / 240, 100.0 / 480);
    CHECK(std::round(o * 10) / 10 == 3.9);
    CHECK(*convergence_order(1e-3, 16e-3, 0.2, 0.1) == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK_FALSE(convergence_order(0.0, 1e-3, 0.2, 0.1).has_value());
    CHECK_FALSE(convergence_order(1e-3, 0.0, 0.2, 0.1).has_value());
    CHECK_THROWS_AS(convergence_order(1.0, 0.5, 0.1, 0.1), ConfigError);
    CHECK_THROWS_AS(convergence_order(1.0, 0.5, 0.0, 0.1), ConfigError);
}

TEST_CASE("configuration checks")
{
    CHECK_THROWS_AS(run(cfg("mass_spring", "zds", 1, 0)), ConfigError);
    CHECK_THROWS_AS(run(cfg("mass_spring", "sv2", 0, 0)), ConfigError);
    CHECK_THROWS_AS(run(cfg("mass_spring", "zds", 0, 10)), ConfigError);
    CHECK_THROWS_AS(run(cfg("mass_spring", "zds", kMaxBlockSize + 1, 100)), ConfigError);
    CHECK_THROWS_AS(run(cfg("mass_spring", "sv2", 2, 10)), ConfigError);
    CHECK_THROWS_AS(run(cfg("mass_spring", "rk4", 1, 10)), ConfigError);
    CHECK_THROWS_AS(run(cfg("mass_spring", "zd", 4, 3)), ConfigError);
    CHECK_THROWS_AS(run(cfg("sho", "zd", 1, 10)), ConfigError);
    auto c = cfg("pendulum", "zds", 1, 10);
    c.project = true;
    CHECK_THROWS_AS(run(c), ConfigError);
    c = cfg("kepler", "sv2", 0, 10);
    c.project = true;
    CHECK_THROWS_AS(run(c), ConfigError);
    CHECK(parse_precision("ddouble") == Precision::DDouble);
    CHECK_THROWS_AS(parse_precision("quad"), ConfigError);
    CHECK(auto_decimation(1000) == 1);
    CHECK(auto_decimation(100000) == 1);
    CHECK(auto_decimation(100001) == 2);
    CHECK(auto_decimation(3000000) == 30);
}

TEST_CASE("solver failures carry the configuration")
{
    try {
        run(cfg("pendulum", "zds", 2, 10, 100.0));
        FAIL("expected a solver failure");
    } catch (const ConfigError&) {
        FAIL("wrong error class");
    } catch (const Error& e) {
        const std::string w = e.what();
        CHECK(w.find("problem=pendulum") != std::string::npos);
        CHECK(w.find("N=10") != std::string::npos);
    }
}

TEST_CASE("mass-spring run example and accounting")
{
    const auto r = run(cfg("mass_spring", "zds", 1, 960, 100.0));
    REQUIRE(r.ex.has_value());
    CHECK(*r.ex >= 1.41e-5 / 3);
    CHECK(*r.ex <= 1.41e-5 * 3);
    CHECK(r.eH.has_value());
    CHECK_FALSE(r.eL.has_value());
    CHECK_FALSE(r.eA.has_value());
    CHECK(r.dt == doctest::Approx(100.0 / 960).epsilon(1e-15));
    CHECK(r.nb_iter_avg == static_cast<double>(r.total_iter) / 960);
    CHECK(r.nb_call_avg == 1 * r.nb_iter_avg);
    CHECK(r.config.tol > 0.0);
    CHECK(r.config.T == 100.0);

    const auto r3 = run(cfg("two_spring", "zd", 3, 480, 100.0));
    CHECK(r3.nb_call_avg == 3 * r3.nb_iter_avg);
    // R evaluations per sweep plus R for the predictor, over 160 blocks
    CHECK(r3.pe1_calls == 3 * (r3.total_iter + 160));
    CHECK(r3.pe2_calls == 0);

    const auto sv = run(cfg("mass_spring", "sv4", 0, 100, 10.0));
    CHECK(sv.nb_call_avg == static_cast<double>(sv.pe1_calls) / 100);

    // repeated runs are bit-identical
    const auto again = run(cfg("mass_spring", "zds", 1, 960, 100.0));
    CHECK(*again.ex == *r.ex);
    CHECK(*again.eH == *r.eH);
    CHECK(again.total_iter == r.total_iter);
}

TEST_CASE("kepler reports every invariant; endpoint problems report ex only at the reference time")
{
    const auto k = run(cfg("kepler", "zds", 1, 200, 10.0));
    CHECK(k.eH.has_value());
    CHECK(k.eL.has_value());
    CHECK(k.eA.has_value());
    CHECK_FALSE(k.ex.has_value());

    const auto p = run(cfg("pendulum", "zds", 2, 960));
    CHECK(p.config.T == 100.0);
    REQUIRE(p.ex.has_value());
    CHECK(*p.ex == doctest::Approx(6.906e-9).epsilon(0.05));
    const auto q = run(cfg("pendulum", "zds", 2, 960, 50.0));
    CHECK_FALSE(q.ex.has_value());
}

TEST_CASE("sweep CSV layout and orders recomputed from the printed values")
{
    const auto base = cfg("mass_spring", "zd", 2, 0, 100.0);
    const std::vector<long> Ns = {120, 240, 480, 960};
    const auto rows = sweep(base, Ns, 2);
    REQUIRE(rows.size() == 4);
    std::ostringstream os;
    write_sweep_csv(os, base, rows);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "problem,scheme,R,precision,N,dt,ex,ordx,eH,ordH,eL,ordL,eA,ordA,total_iter,nb_iter_avg,nb_call_avg,status");
    std::vector<std::vector<std::string>> cells;
    while (std::getline(is, line)) {
        cells.push_back(split(line));
        CHECK(cells.back().size() == 18);
    }
    REQUIRE(cells.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(cells[i][0] == "mass_spring");
        CHECK(cells[i][1] == "zd");
        CHECK(cells[i][2] == "2");
        CHECK(cells[i][3] == "double");
        CHECK(cells[i][4] == std::to_string(Ns[i]));
        CHECK(cells[i][10].empty());
        CHECK(cells[i][12].empty());
        CHECK(cells[i][17] == "ok");
        // 6 significant digits
        CHECK(cells[i][6].size() == std::string("1.23456e-01").size());
    }
    CHECK(cells[0][7].empty());
    for (std::size_t i = 1; i < 4; ++i) {
        const double e1 = std::stod(cells[i - 1][6]), e2 = std::stod(cells[i][6]);
        const double d1 = std::stod(cells[i - 1][5]), d2 = std::stod(cells[i][5]);
        const double o = std::log(e1 / e2) / std::log(d1 / d2);
        CHECK(std::stod(cells[i][7]) == doctest::Approx(o).epsilon(1e-4));
    }
    // the last order is close to four
    CHECK(*rows[3].ordx == doctest::Approx(4.0).epsilon(0.05));

    // threads do not change the numbers
    const auto serial = sweep(base, Ns, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(*serial[i].report->ex == *rows[i].report->ex);
    }

    const auto single = sweep(base, {240});
    CHECK_FALSE(single[0].ordx.has_value());
    CHECK_THROWS_AS(sweep(base, {480, 240}), ConfigError);
}

TEST_CASE("a failed row is tagged and the sweep goes on")
{
    const auto base = cfg("pendulum", "zds", 2, 0, 100.0);
    const auto rows = sweep(base, {10, 240, 480});
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[0].report.has_value());
    CHECK_FALSE(rows[0].error.empty());
    REQUIRE(rows[1].report.has_value());
    CHECK_FALSE(rows[1].ordx.has_value());
    REQUIRE(rows[2].ordx.has_value());
    CHECK(*rows[2].ordx > 5.0);
    std::ostringstream os;
    write_sweep_csv(os, base, rows);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    const auto c = split(line);
    REQUIRE(c.size() == 18);
    CHECK(c[6].empty());
    CHECK(c[17] != "ok");
    CHECK_FALSE(c[17].empty());
}

TEST_CASE("format and manifest")
{
    CHECK(format_sci(1.41e-5) == "1.41000e-05");
    CHECK(format_sci(0.0) == "0.00000e+00");
    CHECK(format_sci(123456.7) == "1.23457e+05");

    const std::string path = "test_harness_manifest.json";
    auto c = cfg("kepler", "zds", 2, 480, 100.0);
    c.project = true;
    c.precision = Precision::DDouble;
    write_manifest(path, c);
    std::ifstream f(path);
    const auto j = nlohmann::json::parse(f);
    CHECK(j["problem"] == "kepler");
    CHECK(j["scheme"] == "zds");
    CHECK(j["R"] == 2);
    CHECK(j["N"] == 480);
    CHECK(j["precision"] == "ddouble");
    CHECK(j["project"] == true);
    std::remove(path.c_str());

    std::ostringstream os;
    write_drift_csv(os, {{0.0, 0.0}, {1.5, 2e-9}});
    CHECK(os.str() == "t,deviation\n0.00000e+00,0.00000e+00\n1.50000e+00,2.00000e-09\n");
}

TEST_CASE("drift series sampling")
{
    auto c = cfg("pendulum", "zds", 1, 300, 100.0);
    const auto all = drift_series(c, "H", 0);
    CHECK(all.size() == 301);
    CHECK(all.front().first == 0.0);
    CHECK(all.front().second == 0.0);
    CHECK(all.back().first == doctest::Approx(100.0));
    const auto s = drift_series(c, "H", 11);
    REQUIRE(s.size() == 11);
    CHECK(s.back().first == doctest::Approx(100.0));
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].first > s[i - 1].first);
    }
    c.decimation = 10;
    CHECK(drift_series(c, "H", 0).size() == 31);
    CHECK_THROWS_AS(drift_series(c, "A", 10), ConfigError);
}

TEST_CASE("resting pendulum stays at rest")
{
    const auto pr = make_pendulum<double>(1, 1, 1, 0, 0);
    for (auto f : {Formulation::ZD, Formulation::ZDS}) {
        const auto tr = integrate(pr, f, 2, 100, 10.0, default_solver_config<double>());
        for (std::size_t n = 0; n < tr.X.size(); ++n) {
            CHECK(std::abs(pr.hamiltonian(tr.X[n], tr.P[n])) <= 1e-16);
        }
    }
}

TEST_CASE("pendulum energy error is flat after the transient")
{
    const double T = 10000.0;
    const auto s = drift_series(cfg("pendulum", "zds", 1, 30000, T), "H", 0);
    const auto [a, b] = half_maxima(s, T);
    CHECK(a > 0.0);
    CHECK(std::abs(b / a - 1.0) <= 0.1);
}

TEST_CASE("kepler drift with and without projection")
{
    const double T = 1000.0;
    auto c = cfg("kepler", "zds", 1, 20000, T);
    const auto free_A = drift_series(c, "A", 0);
    CHECK(slope(free_A) > 0.0);
    c.project = true;
    const auto proj_A = drift_series(c, "A", 0);
    const auto [a, b] = half_maxima(proj_A, T);
    CHECK(b <= 1.1 * a);
    CHECK(half_maxima(free_A, T).second > 100 * b);
    const auto proj_H = drift_series(c, "H", 0);
    CHECK(slope(proj_H) > 0.0);
}

TEST_CASE("errors are taken at block ends unless interior nodes are asked for")
{
    auto c = cfg("mass_spring", "zd", 3, 10, 1.0);
    CHECK(measured(c, 0));
    CHECK(measured(c, 3));
    CHECK_FALSE(measured(c, 4));
    CHECK(measured(c, 10));
    c.interior = true;
    CHECK(measured(c, 4));
    c = cfg("mass_spring", "sv2", 0, 10, 1.0);
    CHECK(measured(c, 7));

    auto e = cfg("mass_spring", "zd", 2, 960, 100.0);
    const auto ends = run(e);
    e.interior = true;
    const auto all = run(e);
    CHECK(*all.ex >= *ends.ex);
    CHECK(*all.eH > *ends.eH);
    CHECK(all.total_iter == ends.total_iter);
    CHECK(drift_series(e, "H", 0).size() == 961);
    e.interior = false;
    CHECK(drift_series(e, "H", 0).size() == 481);
}
