#include "structural/block_solver.hpp"

#include "structural/errors.hpp"

#include <string>

namespace structural {

template <Real T>
BlockState<T>::BlockState(int R_, bool second_, int I, int K)
    : R(R_), second(second_), Zx0(I, K), Dx0(I, K), Sx0(I, K), Zp0(I, K), Dp0(I, K), Sp0(I, K),
      Zx(R_, BodySpace<T>(I, K)), Dx(R_, BodySpace<T>(I, K)), Sx(R_, BodySpace<T>(I, K)), Zp(R_, BodySpace<T>(I, K)),
      Dp(R_, BodySpace<T>(I, K)), Sp(R_, BodySpace<T>(I, K))
{
}

namespace {

template <Real T>
void eval_node(const HamiltonianProblem<T>& pr, bool second, const BodySpace<T>& X, const BodySpace<T>& P,
               BodySpace<T>& Xd, BodySpace<T>& Pd, BodySpace<T>& Xdd, BodySpace<T>& Pdd, int node)
{
    try {
        pr.first_rhs(X, P, Xd, Pd);
        if (second) {
            pr.second_rhs(X, P, Xd, Pd, Xdd, Pdd);
        }
    } catch (const SingularityError& e) {
        throw SingularityError(std::string(e.what()) + " at block node " + std::to_string(node));
    } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at block node " + std::to_string(node));
    }
}

template <Real T>
void require_finite(const BodySpace<T>& a, const BodySpace<T>& b, int node)
{
    if (!a.all_finite() || !b.all_finite()) {
        throw DivergenceError("non-finite value at block node " + std::to_string(node));
    }
}

} // namespace

template <Real T>
void set_anchor(BlockState<T>& st, const HamiltonianProblem<T>& pr, const BodySpace<T>& X, const BodySpace<T>& P)
{
    st.Zx0 = X;
    st.Zp0 = P;
    eval_node(pr, st.second, st.Zx0, st.Zp0, st.Dx0, st.Dp0, st.Sx0, st.Sp0, 0);
}

template <Real T>
BlockState<T> make_anchor(const HamiltonianProblem<T>& pr, const BodySpace<T>& X, const BodySpace<T>& P, int R,
                          bool second)
{
    BlockState<T> st(R, second, X.I(), X.K());
    set_anchor(st, pr, X, P);
    return st;
}

template <Real T>
int init_block(BlockState<T>& st, const HamiltonianProblem<T>& pr, const CoeffTable<T>& table)
{
    const T h = table.dt;
    const T h2 = h * h / T(2.0);
    for (int r = 0; r < st.R; ++r) {
        const BodySpace<T>& zx = r == 0 ? st.Zx0 : st.Zx[r - 1];
        const BodySpace<T>& zp = r == 0 ? st.Zp0 : st.Zp[r - 1];
        const BodySpace<T>& dx = r == 0 ? st.Dx0 : st.Dx[r - 1];
        const BodySpace<T>& dp = r == 0 ? st.Dp0 : st.Dp[r - 1];
        st.Zx[r] = zx;
        st.Zx[r].axpy(h, dx);
        st.Zp[r] = zp;
        st.Zp[r].axpy(h, dp);
        if (st.second) {
            st.Zx[r].axpy(h2, r == 0 ? st.Sx0 : st.Sx[r - 1]);
            st.Zp[r].axpy(h2, r == 0 ? st.Sp0 : st.Sp[r - 1]);
        }
        require_finite(st.Zx[r], st.Zp[r], r + 1);
        eval_node(pr, st.second, st.Zx[r], st.Zp[r], st.Dx[r], st.Dp[r], st.Sx[r], st.Sp[r], r + 1);
    }
    return st.R;
}

template <Real T>
void se_update(const CoeffTable<T>& table, const BlockState<T>& st, std::vector<BodySpace<T>>& Zx_out,
               std::vector<BodySpace<T>>& Zp_out)
{
    const int R = st.R;
    const bool second = st.second && table.has_second();
    const std::size_t n = st.Zx0.size();
    for (int i = 0; i < R; ++i) {
        BodySpace<T>& zx = Zx_out[i];
        BodySpace<T>& zp = Zp_out[i];
        for (std::size_t e = 0; e < n; ++e) {
            T ax = table.bz[i] * st.Zx0[e] + table.bd[i] * st.Dx0[e];
            T ap = table.bz[i] * st.Zp0[e] + table.bd[i] * st.Dp0[e];
            if (second) {
                ax += table.bs[i] * st.Sx0[e];
                ap += table.bs[i] * st.Sp0[e];
            }
            for (int j = 0; j < R; ++j) {
                ax += table.Bd(i, j) * st.Dx[j][e];
                ap += table.Bd(i, j) * st.Dp[j][e];
                if (second) {
                    ax += table.Bs(i, j) * st.Sx[j][e];
                    ap += table.Bs(i, j) * st.Sp[j][e];
                }
            }
            zx[e] = -ax;
            zp[e] = -ap;
        }
    }
}

template <Real T>
int pe_update(const HamiltonianProblem<T>& pr, BlockState<T>& st)
{
    for (int r = 0; r < st.R; ++r) {
        eval_node(pr, st.second, st.Zx[r], st.Zp[r], st.Dx[r], st.Dp[r], st.Sx[r], st.Sp[r], r + 1);
    }
    return st.R;
}

template <Real T>
IterStats solve_block(BlockState<T>& st, const HamiltonianProblem<T>& pr, const CoeffTable<T>& table,
                      const SolverConfig& cfg)
{
    if (table.R != st.R) {
        throw InternalError("coefficient table size does not match the block");
    }
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1) {
        throw ConfigError("solver needs tol > 0 and max_iter >= 1");
    }
    IterStats stats;
    const int calls = init_block(st, pr, table);
    stats.pe1_calls += calls;
    if (st.second) {
        stats.pe2_calls += calls;
    }

    auto block_norm = [&st]() {
        T m(0.0);
        for (int r = 0; r < st.R; ++r) {
            m = num::max(m, st.Zx[r].max_norm());
            m = num::max(m, st.Zp[r].max_norm());
        }
        return num::to_double(m);
    };

    std::vector<BodySpace<T>> zx = st.Zx;
    std::vector<BodySpace<T>> zp = st.Zp;
    double prev_norm = block_norm();
    double diff = 0.0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        se_update(table, st, zx, zp);
        T d(0.0);
        for (int r = 0; r < st.R; ++r) {
            require_finite(zx[r], zp[r], r + 1);
            d = num::max(d, max_abs_diff(zx[r], st.Zx[r]));
            // x alone can stall for a sweep while p still moves
            d = num::max(d, max_abs_diff(zp[r], st.Zp[r]));
        }
        diff = num::to_double(d);
        std::swap(zx, st.Zx);
        std::swap(zp, st.Zp);
        const double nrm = block_norm();
        if (nrm > 1e6 * prev_norm && prev_norm > 0.0) {
            throw DivergenceError("fixed-point iterate grew by more than 1e6 in one sweep");
        }
        prev_norm = nrm;

        pe_update(pr, st);
        ++stats.iterations;
        stats.pe1_calls += st.R;
        if (st.second) {
            stats.pe2_calls += st.R;
        }
        if (diff <= cfg.tol) {
            return stats;
        }
    }
    throw NonConvergenceError("fixed-point iteration did not reach tol " + num::to_string(cfg.tol, 3) + " in " +
                                  std::to_string(cfg.max_iter) + " sweeps (last increment " +
                                  num::to_string(diff, 3) + ")",
                              diff);
}

template <Real T>
Trajectory<T> integrate(const HamiltonianProblem<T>& pr, Formulation f, int R, long N, const T& T_end,
                        const SolverConfig& cfg, const NodeObserver<T>& obs, const IntegrateOptions& opt)
{
    if (N < 1) {
        throw ConfigError("N must be at least 1");
    }
    if (R < 1 || R > kMaxBlockSize) {
        throw ConfigError("block size R=" + std::to_string(R) + " outside [1, " + std::to_string(kMaxBlockSize) + "]");
    }
    if (N < R) {
        throw ConfigError("N=" + std::to_string(N) + " is smaller than the block size R=" + std::to_string(R));
    }
    if (!(T_end > T(0.0))) {
        throw ConfigError("final time must be positive");
    }
    if (opt.project && !pr.projector) {
        throw ConfigError("problem " + pr.name + " has no projection");
    }
    const bool second = f == Formulation::ZDS;
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

    const CoeffTable<T> table = coeff_table<T>(R, f, dt);
    BlockState<T> st = make_anchor(pr, pr.X0, pr.P0, R, second);
    store(0, T(0.0), pr.X0, pr.P0);

    const long full_blocks = N / R;
    const int tail = static_cast<int>(N % R);
    long step = 0;
    auto run_block = [&](BlockState<T>& bs, const CoeffTable<T>& tab) {
        IterStats s;
        try {
            s = solve_block(bs, pr, tab, cfg);
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(std::string(e.what()) + " in block starting at step " + std::to_string(step),
                                      e.last_residual());
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " in block starting at step " + std::to_string(step));
        } catch (const SingularityError& e) {
            throw SingularityError(std::string(e.what()) + " in block starting at step " + std::to_string(step));
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " in block starting at step " + std::to_string(step));
        }
        traj.stats += s;
        ++traj.blocks;
        if (obs.on_block) {
            obs.on_block(step, bs.R, s);
        }
        BodySpace<T> X, P;
        for (int r = 0; r < bs.R; ++r) {
            const long k = step + r + 1;
            const T t = k == N ? T_end : T(static_cast<double>(k)) * dt;
            if (opt.project) {
                X = bs.Zx[r];
                P = bs.Zp[r];
                pr.projector(X, P);
                store(k, t, X, P);
            } else {
                store(k, t, bs.Zx[r], bs.Zp[r]);
            }
        }
        step += bs.R;
        // next anchor
        if (opt.project) {
            st.Zx0 = X;
            st.Zp0 = P;
            set_anchor(st, pr, X, P);
        } else {
            st.Zx0 = bs.Zx[bs.R - 1];
            st.Zp0 = bs.Zp[bs.R - 1];
            st.Dx0 = bs.Dx[bs.R - 1];
            st.Dp0 = bs.Dp[bs.R - 1];
            if (second) {
                st.Sx0 = bs.Sx[bs.R - 1];
                st.Sp0 = bs.Sp[bs.R - 1];
            }
        }
    };

    for (long b = 0; b < full_blocks; ++b) {
        run_block(st, table);
    }
    if (tail > 0) {
        const CoeffTable<T> tail_table = coeff_table<T>(tail, f, dt);
        BlockState<T> ts(tail, second, pr.I, pr.K);
        ts.Zx0 = st.Zx0;
        ts.Zp0 = st.Zp0;
        ts.Dx0 = st.Dx0;
        ts.Dp0 = st.Dp0;
        ts.Sx0 = st.Sx0;
        ts.Sp0 = st.Sp0;
        run_block(ts, tail_table);
    }
    traj.X_end = st.Zx0;
    traj.P_end = st.Zp0;
    return traj;
}

#define STRUCTURAL_INSTANTIATE(T)                                                                                       \
    template struct BlockState<T>;                                                                                      \
    template BlockState<T> make_anchor<T>(const HamiltonianProblem<T>&, const BodySpace<T>&, const BodySpace<T>&, int,  \
                                          bool);                                                                        \
    template void set_anchor<T>(BlockState<T>&, const HamiltonianProblem<T>&, const BodySpace<T>&,                      \
                                const BodySpace<T>&);                                                                   \
    template int init_block<T>(BlockState<T>&, const HamiltonianProblem<T>&, const CoeffTable<T>&);                     \
    template void se_update<T>(const CoeffTable<T>&, const BlockState<T>&, std::vector<BodySpace<T>>&,                  \
                               std::vector<BodySpace<T>>&);                                                             \
    template int pe_update<T>(const HamiltonianProblem<T>&, BlockState<T>&);                                            \
    template IterStats solve_block<T>(BlockState<T>&, const HamiltonianProblem<T>&, const CoeffTable<T>&,               \
                                      const SolverConfig&);                                                             \
    template Trajectory<T> integrate<T>(const HamiltonianProblem<T>&, Formulation, int, long, const T&,                 \
                                        const SolverConfig&, const NodeObserver<T>&, const IntegrateOptions&);

STRUCTURAL_INSTANTIATE(double)
STRUCTURAL_INSTANTIATE(DoubleDouble)

#undef STRUCTURAL_INSTANTIATE

} // namespace structural
