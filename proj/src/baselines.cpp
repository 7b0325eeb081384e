#include "structural/baselines.hpp"

#include "structural/errors.hpp"

#include <cmath>
#include <cstdio>

namespace structural {

namespace {

// 2^(1/n) refined by Newton on y^n = 2 from the double estimate.
template <Real T>
T root_of_two(int n)
{
    T y(std::pow(2.0, 1.0 / n));
    for (int it = 0; it < 3; ++it) {
        T yn1(1.0);
        for (int k = 0; k < n - 1; ++k) {
            yn1 *= y;
        }
        y -= (yn1 * y - T(2.0)) / (T(static_cast<double>(n)) * yn1);
    }
    return y;
}

template <Real T>
T scaled_tol(const SolverConfig& cfg, const BodySpace<T>& v)
{
    return T(cfg.tol) * num::max(T(1.0), v.max_norm());
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

} // namespace

template <Real T>
CompositionSchedule<T> yoshida_schedule(int order)
{
    if (order != 2 && order != 4 && order != 6 && order != 8) {
        throw ConfigError("composition order " + std::to_string(order) + " not in {2, 4, 6, 8}");
    }
    CompositionSchedule<T> s;
    s.order = 2;
    s.gammas = {T(1.0)};
    while (s.order < order) {
        const int k = s.order / 2;
        const T g1 = T(1.0) / (T(2.0) - root_of_two<T>(2 * k + 1));
        const T g2 = T(1.0) - T(2.0) * g1;
        std::vector<T> next;
        next.reserve(3 * s.gammas.size());
        for (const T& g : {g1, g2, g1}) {
            for (const T& h : s.gammas) {
                next.push_back(g * h);
            }
        }
        s.gammas = std::move(next);
        s.order += 2;
    }
    return s;
}

int parse_sv_scheme(const std::string& name)
{
    if (name == "sv2") return 2;
    if (name == "sv4") return 4;
    if (name == "sv6") return 6;
    if (name == "sv8") return 8;
    return 0;
}

template <Real T>
void sv_step_separable(const HamiltonianProblem<T>& pr, BodySpace<T>& X, BodySpace<T>& P, const T& dt,
                       SvStepStats* stats)
{
    if (!pr.separable) {
        throw ConfigError("problem " + pr.name + " is not separable");
    }
    const T half = dt / T(2.0);
    BodySpace<T> Xd = pr.zeros(), Pd = pr.zeros();
    pr.first_rhs(X, P, Xd, Pd);
    P.axpy(half, Pd);
    pr.first_rhs(X, P, Xd, Pd);
    X.axpy(dt, Xd);
    pr.first_rhs(X, P, Xd, Pd);
    P.axpy(half, Pd);
    if (stats) {
        stats->calls += 3;
    }
}

template <Real T>
SvStepStats sv_step_nonseparable(const HamiltonianProblem<T>& pr, BodySpace<T>& X, BodySpace<T>& P, const T& dt,
                                 const SolverConfig& cfg)
{
    SvStepStats st;
    const T half = dt / T(2.0);
    BodySpace<T> Xd = pr.zeros(), Pd = pr.zeros();

    // fixed point x <- g(x); `what` tags errors with the sub-step
    auto iterate = [&](BodySpace<T>& v, auto&& g, const char* what) {
        T prev_diff(0.0);
        for (int it = 1;; ++it) {
            BodySpace<T> next = g(v);
            ++st.iterations;
            const T diff = max_abs_diff(next, v);
            v = std::move(next);
            if (!num::isfinite(diff) || !v.all_finite()) {
                throw DivergenceError(std::string("non-finite iterate in ") + what);
            }
            if (diff <= scaled_tol(cfg, v)) {
                return;
            }
            if (it > 1 && diff > T(1e6) * prev_diff) {
                throw DivergenceError(std::string("fixed-point increment blew up in ") + what);
            }
            if (it >= cfg.max_iter) {
                throw NonConvergenceError(std::string(what) + " did not reach tol in " + std::to_string(cfg.max_iter) +
                                              " sweeps (last increment " + fmt(num::to_double(diff)) + ")",
                                          num::to_double(diff));
            }
            prev_diff = diff;
        }
    };

    // P_half = P + h/2 * Pd(X, P_half)
    BodySpace<T> Ph = P;
    iterate(
        Ph,
        [&](const BodySpace<T>& v) {
            pr.first_rhs(X, v, Xd, Pd);
            ++st.calls;
            BodySpace<T> out = P;
            out.axpy(half, Pd);
            return out;
        },
        "implicit momentum half-step");

    // X' = X + h/2 * (Xd(X, P_half) + Xd(X', P_half))
    pr.first_rhs(X, Ph, Xd, Pd);
    ++st.calls;
    BodySpace<T> base = X;
    base.axpy(half, Xd);
    BodySpace<T> Xn = X;
    iterate(
        Xn,
        [&](const BodySpace<T>& v) {
            pr.first_rhs(v, Ph, Xd, Pd);
            ++st.calls;
            BodySpace<T> out = base;
            out.axpy(half, Xd);
            return out;
        },
        "implicit position step");

    // P' = P_half + h/2 * Pd(X', P_half)
    pr.first_rhs(Xn, Ph, Xd, Pd);
    ++st.calls;
    X = std::move(Xn);
    P = std::move(Ph);
    P.axpy(half, Pd);
    return st;
}

template <Real T>
SvStepStats sv_step(const HamiltonianProblem<T>& pr, const CompositionSchedule<T>& sched, BodySpace<T>& X,
                    BodySpace<T>& P, const T& dt, const SolverConfig& cfg)
{
    SvStepStats total;
    for (const T& g : sched.gammas) {
        if (pr.separable) {
            sv_step_separable(pr, X, P, g * dt, &total);
        } else {
            const SvStepStats s = sv_step_nonseparable(pr, X, P, g * dt, cfg);
            total.iterations += s.iterations;
            total.calls += s.calls;
        }
    }
    return total;
}

template <Real T>
Trajectory<T> integrate_sv(const HamiltonianProblem<T>& pr, int order, long N, const T& T_end, const SolverConfig& cfg,
                           const NodeObserver<T>& obs, const IntegrateOptions& opt)
{
    if (N < 1) {
        throw ConfigError("N must be at least 1");
    }
    if (!(T_end > T(0.0))) {
        throw ConfigError("final time must be positive");
    }
    if (opt.project) {
        throw ConfigError("projection is only available for the structural schemes");
    }
    const CompositionSchedule<T> sched = yoshida_schedule<T>(order);
    const T dt = T_end / T(static_cast<double>(N));

    Trajectory<T> traj;
    auto store = [&](long step, const T& t, const BodySpace<T>& X, const BodySpace<T>& P) {
        if (obs.on_node) {
            obs.on_node(step, t, X, P);
        }
        if (opt.store_every > 0 && (step % opt.store_every == 0 || step == N)) {
            traj.step.push_back(step);
            traj.t.push_back(t);
            traj.X.push_back(X);
            traj.P.push_back(P);
        }
    };

    BodySpace<T> X = pr.X0, P = pr.P0;
    store(0, T(0.0), X, P);
    for (long n = 0; n < N; ++n) {
        SvStepStats s;
        try {
            s = sv_step(pr, sched, X, P, dt, cfg);
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(std::string(e.what()) + " at step " + std::to_string(n), e.last_residual());
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(n));
        } catch (const SingularityError& e) {
            throw SingularityError(std::string(e.what()) + " at step " + std::to_string(n));
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " at step " + std::to_string(n));
        }
        if (!X.all_finite() || !P.all_finite()) {
            throw DivergenceError("non-finite state at step " + std::to_string(n + 1));
        }
        IterStats is;
        is.iterations = s.iterations;
        is.pe1_calls = s.calls;
        traj.stats += is;
        ++traj.blocks;
        if (obs.on_block) {
            obs.on_block(n, 1, is);
        }
        const long k = n + 1;
        store(k, k == N ? T_end : T(static_cast<double>(k)) * dt, X, P);
    }
    traj.X_end = X;
    traj.P_end = P;
    return traj;
}

#define STRUCTURAL_INSTANTIATE(T)                                                                                       \
    template CompositionSchedule<T> yoshida_schedule<T>(int);                                                           \
    template void sv_step_separable<T>(const HamiltonianProblem<T>&, BodySpace<T>&, BodySpace<T>&, const T&,            \
                                       SvStepStats*);                                                                   \
    template SvStepStats sv_step_nonseparable<T>(const HamiltonianProblem<T>&, BodySpace<T>&, BodySpace<T>&,            \
                                                 const T&, const SolverConfig&);                                        \
    template SvStepStats sv_step<T>(const HamiltonianProblem<T>&, const CompositionSchedule<T>&, BodySpace<T>&,         \
                                    BodySpace<T>&, const T&, const SolverConfig&);                                      \
    template Trajectory<T> integrate_sv<T>(const HamiltonianProblem<T>&, int, long, const T&, const SolverConfig&,      \
                                           const NodeObserver<T>&, const IntegrateOptions&);

STRUCTURAL_INSTANTIATE(double)
STRUCTURAL_INSTANTIATE(DoubleDouble)

#undef STRUCTURAL_INSTANTIATE

} // namespace structural
