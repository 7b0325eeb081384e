#pragma once

// Classical comparison schemes: Stormer-Verlet, raised to orders 4, 6, 8 by
// triple-jump composition.

#include "structural/block_solver.hpp"
#include "structural/problem.hpp"

#include <string>
#include <vector>

namespace structural {

template <Real T>
struct CompositionSchedule {
    int order = 2;
    std::vector<T> gammas;
};

// Order 2k+2 from order 2k with g1 = g3 = 1/(2 - 2^(1/(2k+1))), g2 = 1 - 2 g1.
template <Real T>
CompositionSchedule<T> yoshida_schedule(int order);

// "sv2".."sv8" -> 2..8; 0 when the name is not a baseline scheme.
int parse_sv_scheme(const std::string& name);

struct SvStepStats {
    long iterations = 0; // fixed-point sweeps over both implicit relations
    long calls = 0;      // first_rhs evaluations
};

// Kick-drift-kick; requires pr.separable.
template <Real T>
void sv_step_separable(const HamiltonianProblem<T>& pr, BodySpace<T>& X, BodySpace<T>& P, const T& dt,
                       SvStepStats* stats = nullptr);

// Implicit P half-step, implicit trapezoidal X step, explicit P half-step.
// Each implicit relation is iterated until the increment is below
// tol * max(1, |iterate|). Throws NonConvergenceError naming the stalled
// sub-step.
template <Real T>
SvStepStats sv_step_nonseparable(const HamiltonianProblem<T>& pr, BodySpace<T>& X, BodySpace<T>& P, const T& dt,
                                 const SolverConfig& cfg);

// One composed step of the given order; picks the separable form when allowed.
template <Real T>
SvStepStats sv_step(const HamiltonianProblem<T>& pr, const CompositionSchedule<T>& sched, BodySpace<T>& X,
                    BodySpace<T>& P, const T& dt, const SolverConfig& cfg);

// Stats in the returned trajectory: iterations = fixed-point sweeps,
// pe1_calls = first_rhs evaluations. on_block fires once per step with R = 1.
template <Real T>
Trajectory<T> integrate_sv(const HamiltonianProblem<T>& pr, int order, long N, const T& T_end, const SolverConfig& cfg,
                           const NodeObserver<T>& obs = {}, const IntegrateOptions& opt = {});

} // namespace structural
