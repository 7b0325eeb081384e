#pragma once

// Block fixed-point engine: R future nodes are solved together by
// alternating the structural update (new values from derivatives) and the
// physical update (new derivatives from values).

#include "structural/body_space.hpp"
#include "structural/problem.hpp"
#include "structural/secoeff.hpp"

#include <functional>
#include <vector>

namespace structural {

struct SolverConfig {
    // absolute bound on the max-norm change of the Zx and Zp blocks per sweep
    double tol = 1e-14;
    int max_iter = 200;
};

template <Real T>
SolverConfig default_solver_config()
{
    SolverConfig c;
    c.tol = std::same_as<T, DoubleDouble> ? 1e-30 : 1e-14;
    return c;
}

struct IterStats {
    long iterations = 0;
    long pe1_calls = 0;
    long pe2_calls = 0;

    IterStats& operator+=(const IterStats& o)
    {
        iterations += o.iterations;
        pe1_calls += o.pe1_calls;
        pe2_calls += o.pe2_calls;
        return *this;
    }
};

template <Real T>
struct BlockState {
    using BS = BodySpace<T>;
    int R = 0;
    bool second = false; // carries S values (ZDS)

    // values at the anchor node t_n
    BS Zx0, Dx0, Sx0, Zp0, Dp0, Sp0;
    // values at t_{n+1} .. t_{n+R}
    std::vector<BS> Zx, Dx, Sx, Zp, Dp, Sp;

    BlockState() = default;
    BlockState(int R_, bool second_, int I, int K);
};

// Anchor at (X, P): derivatives from the physical equations (S only when
// `second`).
template <Real T>
BlockState<T> make_anchor(const HamiltonianProblem<T>& pr, const BodySpace<T>& X, const BodySpace<T>& P, int R,
                          bool second);

// Re-anchor an existing block at (X, P) in place, reusing its buffers.
template <Real T>
void set_anchor(BlockState<T>& st, const HamiltonianProblem<T>& pr, const BodySpace<T>& X, const BodySpace<T>& P);

// Taylor predictor, sequential over the nodes; returns PE evaluations (R).
template <Real T>
int init_block(BlockState<T>& st, const HamiltonianProblem<T>& pr, const CoeffTable<T>& table);

// New value blocks from the current derivative blocks (no physics).
template <Real T>
void se_update(const CoeffTable<T>& table, const BlockState<T>& st, std::vector<BodySpace<T>>& Zx_out,
               std::vector<BodySpace<T>>& Zp_out);

// Derivatives at every node from the current value blocks; returns R.
template <Real T>
int pe_update(const HamiltonianProblem<T>& pr, BlockState<T>& st);

// Solve one block in place (st must hold a valid anchor).
// Throws NonConvergenceError or DivergenceError.
template <Real T>
IterStats solve_block(BlockState<T>& st, const HamiltonianProblem<T>& pr, const CoeffTable<T>& table,
                      const SolverConfig& cfg);

template <Real T>
struct NodeObserver {
    // step index, time, positions, momenta; called for t_0 and every accepted node
    std::function<void(long, const T&, const BodySpace<T>&, const BodySpace<T>&)> on_node;
    std::function<void(long first_step, int R, const IterStats&)> on_block;
};

template <Real T>
struct Trajectory {
    std::vector<long> step;
    std::vector<T> t;
    std::vector<BodySpace<T>> X;
    std::vector<BodySpace<T>> P;
    BodySpace<T> X_end;
    BodySpace<T> P_end;
    IterStats stats;
    long blocks = 0;
    long projections_skipped = 0;
};

struct IntegrateOptions {
    long store_every = 1; // 0 stores nothing but the end state
    bool project = false; // apply the problem's projector to accepted nodes
};

// N steps of size T/N, in blocks of R (the last block shrinks to N mod R).
template <Real T>
Trajectory<T> integrate(const HamiltonianProblem<T>& pr, Formulation f, int R, long N, const T& T_end,
                        const SolverConfig& cfg, const NodeObserver<T>& obs = {}, const IntegrateOptions& opt = {});

} // namespace structural
