#pragma once

// Benchmark catalog: Hamiltonians with hand-coded first and second
// derivative maps, invariants, exact solutions or reference values.

#include "structural/problem.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace structural {

template <Real T>
HamiltonianProblem<T> make_mass_spring(const T& m, const T& kappa, const T& x0, const T& p0);

// Smaller and larger positive roots of m1 m2 w^4 - (m1 k2 + m2 k1 + m2 k2) w^2 + k1 k2.
template <Real T>
std::pair<T, T> two_spring_frequencies(const T& k1, const T& k2, const T& m1, const T& m2);

template <Real T>
HamiltonianProblem<T> make_two_spring(const T& k1, const T& k2, const T& m1, const T& m2, const T& A, const T& B,
                                      const T& alpha1, const T& alpha2);

template <Real T>
HamiltonianProblem<T> make_pendulum(const T& m, const T& g, const T& l, const T& x0, const T& p0);

// 4 sqrt(l/(m g)) K(w), K by arithmetic-geometric mean. Throws DomainError for w outside [0, 1).
template <Real T>
T pendulum_period(const T& m, const T& g, const T& l, const T& w);

template <Real T>
HamiltonianProblem<T> make_kepler(const std::array<T, 2>& x0, const std::array<T, 2>& p0);

template <Real T>
T kepler_lrl(const BodySpace<T>& X, const BodySpace<T>& P);

// (dR/dx1, dR/dx2, dR/dp1, dR/dp2)
template <Real T>
std::array<T, 4> kepler_lrl_gradient(const BodySpace<T>& X, const BodySpace<T>& P);

// One first-order step towards R = R0. Returns false (state untouched)
// when the gradient norm is below 1e-14.
template <Real T>
bool project_lrl(BodySpace<T>& X, BodySpace<T>& P, const T& R0);

template <Real T>
HamiltonianProblem<T> make_nbody(const std::string& name, const std::vector<T>& masses, const T& G,
                                 const BodySpace<T>& X0, const BodySpace<T>& P0);

template <Real T>
HamiltonianProblem<T> make_figure_eight();

template <Real T>
HamiltonianProblem<T> make_outer_solar();

enum class EmVariant { SCB, Challenging };

// Potentials and their derivatives at x.
template <Real T>
struct EmFields {
    T phi;
    std::array<T, 3> grad_phi;
    std::array<std::array<T, 3>, 3> hess_phi;
    std::array<T, 3> A;
    // J[i][j] = d_j A_i
    std::array<std::array<T, 3>, 3> J;
    // HA[i][j][k] = d_j d_k A_i
    std::array<std::array<std::array<T, 3>, 3>, 3> HA;
};

template <Real T>
EmFields<T> em_fields(EmVariant v, const std::array<T, 3>& x);

template <Real T>
HamiltonianProblem<T> make_em_particle(EmVariant v, const T& m, const T& e, const std::array<T, 3>& x0,
                                       const std::array<T, 3>& p0);

// Catalog entries with the benchmark parameters, addressed by name.
const std::vector<std::string>& problem_names();

template <Real T>
HamiltonianProblem<T> make_problem(const std::string& name);

} // namespace structural
