#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "structural/baselines.hpp"
#include "structural/errors.hpp"
#include "structural/problems.hpp"

#include <cmath>

using namespace structural;

namespace {

using BSd = BodySpace<double>;

double max_diff(const BSd& a, const BSd& b)
{
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        m = std::max(m, std::abs(a[n] - b[n]));
    }
    return m;
}

// H = (p - x)^2 / 2: x and p drift together at the constant rate p - x.
HamiltonianProblem<double> shear()
{
    HamiltonianProblem<double> pr;
    pr.name = "shear";
    pr.X0 = BSd(1, 1, {0.3});
    pr.P0 = BSd(1, 1, {1.0});
    pr.hamiltonian = [](const BSd& X, const BSd& P) { return 0.5 * (P[0] - X[0]) * (P[0] - X[0]); };
    pr.first_rhs = [](const BSd& X, const BSd& P, BSd& Xd, BSd& Pd) {
        Xd[0] = P[0] - X[0];
        Pd[0] = P[0] - X[0];
    };
    return pr;
}

// H = (p - x)^2 / 2 + x^2 / 2: a rotated oscillator that no explicit split reaches.
HamiltonianProblem<double> tilted_oscillator()
{
    HamiltonianProblem<double> pr;
    pr.name = "tilted";
    pr.X0 = BSd(1, 1, {1.0});
    pr.P0 = BSd(1, 1, {0.5});
    pr.hamiltonian = [](const BSd& X, const BSd& P) {
        return 0.5 * (P[0] - X[0]) * (P[0] - X[0]) + 0.5 * X[0] * X[0];
    };
    pr.first_rhs = [](const BSd& X, const BSd& P, BSd& Xd, BSd& Pd) {
        Xd[0] = P[0] - X[0];
        Pd[0] = P[0] - 2.0 * X[0];
    };
    return pr;
}

// H = x p gives x' = x, p' = -p.
HamiltonianProblem<double> growth()
{
    HamiltonianProblem<double> pr;
    pr.name = "growth";
    pr.X0 = BSd(1, 1, {1.0});
    pr.P0 = BSd(1, 1, {1.0});
    pr.hamiltonian = [](const BSd& X, const BSd& P) { return X[0] * P[0]; };
    pr.first_rhs = [](const BSd& X, const BSd& P, BSd& Xd, BSd& Pd) {
        Xd[0] = X[0];
        Pd[0] = -P[0];
    };
    return pr;
}

// Final-time error of an SV run against a closed-form end state.
double end_error(const HamiltonianProblem<double>& pr, int order, long N, double T, const BSd& Xe, const BSd& Pe)
{
    SolverConfig cfg;
    IntegrateOptions opt;
    opt.store_every = 0;
    const auto tr = integrate_sv(pr, order, N, T, cfg, {}, opt);
    return std::max(max_diff(tr.X_end, Xe), max_diff(tr.P_end, Pe));
}

} // namespace

TEST_CASE("composition schedules")
{
    const int stages[4] = {1, 3, 9, 27};
    for (int k = 0; k < 4; ++k) {
        const int order = 2 * (k + 1);
        const auto s = yoshida_schedule<double>(order);
        CHECK(s.order == order);
        CHECK(static_cast<int>(s.gammas.size()) == stages[k]);
        double sum = 0.0;
        for (double g : s.gammas) {
            sum += g;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-15 * (k + 1));
    }
    const auto s4 = yoshida_schedule<double>(4);
    CHECK(s4.gammas[0] == doctest::Approx(1.3512071919596576).epsilon(1e-15));
    CHECK(s4.gammas[1] == doctest::Approx(-1.7024143839193153).epsilon(1e-15));
    CHECK(s4.gammas[2] == s4.gammas[0]);
    double cubes = 0.0;
    for (double g : s4.gammas) {
        cubes += g * g * g;
    }
    CHECK(std::abs(cubes) <= 1e-15);
    CHECK(yoshida_schedule<double>(2).gammas == std::vector<double>{1.0});

    const auto q = yoshida_schedule<DoubleDouble>(4);
    DoubleDouble c(0.0);
    for (const auto& g : q.gammas) {
        c += g * g * g;
    }
    CHECK(num::to_double(abs(c)) <= 1e-30);

    CHECK_THROWS_AS(yoshida_schedule<double>(3), ConfigError);
    CHECK_THROWS_AS(yoshida_schedule<double>(10), ConfigError);
    CHECK(parse_sv_scheme("sv6") == 6);
    CHECK(parse_sv_scheme("zds") == 0);
    CHECK(parse_sv_scheme("sv5") == 0);
}

TEST_CASE("mass-spring kick-drift-kick by hand")
{
    const auto pr = make_mass_spring<double>(1, 1, 1, 0);
    BSd X = pr.X0, P = pr.P0;
    SvStepStats st;
    sv_step_separable(pr, X, P, 0.1, &st);
    CHECK(X[0] == doctest::Approx(0.995).epsilon(1e-15));
    CHECK(P[0] == doctest::Approx(-0.09975).epsilon(1e-15));
    CHECK(st.calls == 3);

    X = pr.X0;
    P = pr.P0;
    sv_step_separable(pr, X, P, 0.0);
    CHECK(X[0] == 1.0);
    CHECK(P[0] == 0.0);
    CHECK_THROWS_AS(sv_step_separable(make_problem<double>("em_scb"), X, P, 0.1), ConfigError);
}

TEST_CASE("linear map is area preserving with unit-modulus spectrum")
{
    const auto pr = make_mass_spring<double>(1, 1, 0, 0);
    for (double dt : {0.01, 0.1, 0.5, 1.0, 1.9}) {
        BSd X1(1, 1, {1.0}), P1(1, 1, {0.0}), X2(1, 1, {0.0}), P2(1, 1, {1.0});
        sv_step_separable(pr, X1, P1, dt);
        sv_step_separable(pr, X2, P2, dt);
        const double a = X1[0], b = X2[0], c = P1[0], d = P2[0];
        const double det = a * d - b * c;
        CHECK(std::abs(det - 1.0) <= 1e-12);
        // det = 1, so both eigenvalues lie on the unit circle iff |trace| <= 2
        CHECK(std::abs(a + d) <= 2.0);
    }
    // and the composed schemes
    for (int order : {4, 6, 8}) {
        const auto s = yoshida_schedule<double>(order);
        BSd X1(1, 1, {1.0}), P1(1, 1, {0.0}), X2(1, 1, {0.0}), P2(1, 1, {1.0});
        sv_step(pr, s, X1, P1, 0.2, SolverConfig{});
        sv_step(pr, s, X2, P2, 0.2, SolverConfig{});
        CHECK(std::abs(X1[0] * P2[0] - X2[0] * P1[0] - 1.0) <= 1e-12);
    }
}

TEST_CASE("one step forward and back is the identity")
{
    for (const char* name : {"pendulum", "kepler", "three_body_eight", "outer_solar"}) {
        CAPTURE(name);
        const auto pr = make_problem<double>(name);
        BSd X = pr.X0, P = pr.P0;
        sv_step_separable(pr, X, P, 0.05);
        sv_step_separable(pr, X, P, -0.05);
        CHECK(max_diff(X, pr.X0) <= 1e-12);
        CHECK(max_diff(P, pr.P0) <= 1e-12);
    }
    SolverConfig cfg;
    for (const char* name : {"em_challenging", "em_scb"}) {
        CAPTURE(name);
        const auto pr = make_problem<double>(name);
        const double dt = std::string(name) == "em_scb" ? 1e-4 : 0.01;
        BSd X = pr.X0, P = pr.P0;
        sv_step_nonseparable(pr, X, P, dt, cfg);
        sv_step_nonseparable(pr, X, P, -dt, cfg);
        // the fixed-point bound is relative to the iterate size
        const double scale = std::max(1.0, std::max(std::abs(pr.P0[1]), 1.0));
        CHECK(max_diff(X, pr.X0) <= 10 * cfg.tol * scale);
        CHECK(max_diff(P, pr.P0) <= 10 * cfg.tol * scale);
    }
    const auto tl = tilted_oscillator();
    BSd X = tl.X0, P = tl.P0;
    sv_step_nonseparable(tl, X, P, 0.1, cfg);
    sv_step_nonseparable(tl, X, P, -0.1, cfg);
    CHECK(max_diff(X, tl.X0) <= 10 * cfg.tol);
    CHECK(max_diff(P, tl.P0) <= 10 * cfg.tol);
}

TEST_CASE("non-separable form reduces to kick-drift-kick")
{
    SolverConfig cfg;
    for (const char* name : {"pendulum", "kepler", "two_spring"}) {
        CAPTURE(name);
        const auto pr = make_problem<double>(name);
        BSd Xa = pr.X0, Pa = pr.P0, Xb = pr.X0, Pb = pr.P0;
        for (int n = 0; n < 10; ++n) {
            sv_step_separable(pr, Xa, Pa, 0.03);
            sv_step_nonseparable(pr, Xb, Pb, 0.03, cfg);
        }
        CHECK(max_diff(Xa, Xb) <= 1e-13);
        CHECK(max_diff(Pa, Pb) <= 1e-13);
    }
}

TEST_CASE("em_scb single step converges quickly")
{
    const auto pr = make_problem<double>("em_scb");
    BSd X = pr.X0, P = pr.P0;
    SolverConfig cfg;
    cfg.tol = 1e-14;
    const SvStepStats st = sv_step_nonseparable(pr, X, P, 1e-3, cfg);
    MESSAGE("em_scb sweeps for one step: " << st.iterations);
    CHECK(st.iterations > 0);
    CHECK(st.iterations <= 10);
    CHECK(std::isfinite(X[0]));
    CHECK(std::isfinite(P[1]));
}

TEST_CASE("composition orders on the mass-spring problem")
{
    const auto pr = make_mass_spring<double>(1, 1, 1, 0);
    const double T = 10.0;
    BSd Xe, Pe;
    (*pr.exact_solution)(T, Xe, Pe);
    struct Case {
        int order;
        long N;
    };
    for (const Case c : {Case{2, 200}, Case{4, 100}, Case{6, 40}, Case{8, 40}}) {
        CAPTURE(c.order);
        const double e1 = end_error(pr, c.order, c.N, T, Xe, Pe);
        const double e2 = end_error(pr, c.order, 2 * c.N, T, Xe, Pe);
        CAPTURE(e1);
        CAPTURE(e2);
        CHECK(std::log2(e1 / e2) == doctest::Approx(c.order).epsilon(0.4 / c.order));
    }
}

TEST_CASE("non-separable orders")
{
    // shear flow: exact end state is a straight line
    const auto sh = shear();
    const double c0 = sh.P0[0] - sh.X0[0];
    const BSd Xs(1, 1, {sh.X0[0] + c0}), Ps(1, 1, {sh.P0[0] + c0});
    const double s1 = end_error(sh, 2, 20, 1.0, Xs, Ps), s2 = end_error(sh, 2, 40, 1.0, Xs, Ps);
    CHECK(std::log2(s1 / s2) == doctest::Approx(2.0).epsilon(0.1));

    // tilted oscillator: linear but genuinely coupled; order 2 under halving
    const auto tl = tilted_oscillator();
    // x'' = -x, so x(t) = x0 cos t + (p0 - x0) sin t and p = x' + x
    auto exact = [&](double t, BSd& X, BSd& P) {
        const double x0 = tl.X0[0], v0 = tl.P0[0] - tl.X0[0];
        X = BSd(1, 1, {x0 * std::cos(t) + v0 * std::sin(t)});
        P = BSd(1, 1, {-x0 * std::sin(t) + v0 * std::cos(t) + X[0]});
    };
    BSd Xe, Pe;
    exact(5.0, Xe, Pe);
    const double a = end_error(tl, 2, 100, 5.0, Xe, Pe), b = end_error(tl, 2, 200, 5.0, Xe, Pe);
    CHECK(std::log2(a / b) == doctest::Approx(2.0).epsilon(0.1));
    const double a4 = end_error(tl, 4, 50, 5.0, Xe, Pe), b4 = end_error(tl, 4, 100, 5.0, Xe, Pe);
    CHECK(std::log2(a4 / b4) == doctest::Approx(4.0).epsilon(0.1));

    // x' = x through the sixth-order composition
    const auto g = growth();
    const BSd Xg(1, 1, {std::exp(1.0)}), Pg(1, 1, {std::exp(-1.0)});
    const double e1 = end_error(g, 6, 8, 1.0, Xg, Pg), e2 = end_error(g, 6, 16, 1.0, Xg, Pg);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(std::log2(e1 / e2) == doctest::Approx(6.0).epsilon(0.4 / 6));
}

TEST_CASE("integrate_sv accounting and errors")
{
    const auto pr = make_mass_spring<double>(1, 1, 1, 0);
    long blocks = 0;
    NodeObserver<double> obs;
    obs.on_block = [&](long, int R, const IterStats&) {
        CHECK(R == 1);
        ++blocks;
    };
    const auto tr = integrate_sv(pr, 4, 50, 5.0, SolverConfig{}, obs);
    CHECK(blocks == 50);
    CHECK(tr.X.size() == 51);
    // kick, drift, kick: three evaluations per sub-step, three sub-steps
    CHECK(tr.stats.pe1_calls == 50 * 3 * 3);
    CHECK_THROWS_AS(integrate_sv(pr, 5, 50, 5.0, SolverConfig{}), ConfigError);
    CHECK_THROWS_AS(integrate_sv(pr, 2, 0, 5.0, SolverConfig{}), ConfigError);
    IntegrateOptions proj;
    proj.project = true;
    CHECK_THROWS_AS(integrate_sv(pr, 2, 10, 5.0, SolverConfig{}, {}, proj), ConfigError);

    SolverConfig tight;
    tight.max_iter = 2;
    try {
        integrate_sv(make_problem<double>("em_challenging"), 2, 10, 1.0, tight);
        FAIL("expected non-convergence");
    } catch (const NonConvergenceError& e) {
        CHECK(std::string(e.what()).find("at step") != std::string::npos);
    }
}

TEST_CASE("mass-spring SV2 max position error near the reference magnitude")
{
    const auto pr = make_mass_spring<double>(1, 1, 1, 0);
    const auto tr = integrate_sv(pr, 2, 960, 100.0, SolverConfig{});
    double ex = 0.0;
    for (std::size_t n = 0; n < tr.X.size(); ++n) {
        BSd X, P;
        (*pr.exact_solution)(tr.t[n], X, P);
        ex = std::max(ex, std::abs(tr.X[n][0] - X[0]));
    }
    MESSAGE("ex = " << ex);
    CHECK(ex >= 2.18e-1 / 5);
    CHECK(ex <= 2.18e-1 * 5);
}

TEST_CASE("pendulum SV2 energy error stays bounded")
{
    const auto pr = make_problem<double>("pendulum");
    const double T = 10000.0;
    const long N = 30000;
    const double H0 = pr.hamiltonian(pr.X0, pr.P0);
    double first = 0.0, second = 0.0;
    NodeObserver<double> obs;
    obs.on_node = [&](long n, const double&, const BSd& X, const BSd& P) {
        const double d = std::abs(pr.hamiltonian(X, P) - H0);
        (n <= N / 2 ? first : second) = std::max(n <= N / 2 ? first : second, d);
    };
    IntegrateOptions opt;
    opt.store_every = 0;
    integrate_sv(pr, 2, N, T, SolverConfig{}, obs, opt);
    CHECK(first > 0.0);
    CHECK(second <= 1.1 * first);
}
