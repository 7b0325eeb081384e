#pragma once

#include "structural/body_space.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace structural {

// Conserved quantity. Vector-valued ones (3D angular momentum) report
// deviation as the max-norm of the componentwise difference.
template <Real T>
struct InvariantSpec {
    std::string name; // "H", "L" or "A"
    std::function<std::vector<T>(const BodySpace<T>&, const BodySpace<T>&)> eval;
    // deviation divided by |q(0)| (tiny-energy systems such as the outer planets)
    bool relative = false;
};

// A tabulated value of one phase-space component at time t.
template <Real T>
struct ReferenceValue {
    T t;
    char quantity; // 'x' or 'p'
    int i;
    int k;
    T value;
};

enum class PositionErrorMode { None, AllNodes, Endpoint };

template <Real T>
struct HamiltonianProblem {
    using BS = BodySpace<T>;

    std::string name;
    int I = 1;
    int K = 1;
    BS X0;
    BS P0;
    std::vector<std::pair<std::string, T>> params;
    bool separable = false;
    double default_T = 100.0;

    std::function<T(const BS& X, const BS& P)> hamiltonian;
    // (Xd, Pd) = (grad_P H, -grad_X H)
    std::function<void(const BS& X, const BS& P, BS& Xd, BS& Pd)> first_rhs;
    // time derivative of first_rhs along (Xd, Pd)
    std::function<void(const BS& X, const BS& P, const BS& Xd, const BS& Pd, BS& Xdd, BS& Pdd)> second_rhs;

    std::vector<InvariantSpec<T>> invariants;
    std::optional<std::function<void(const T& t, BS& X, BS& P)>> exact_solution;
    std::vector<ReferenceValue<T>> reference_values;
    PositionErrorMode position_mode = PositionErrorMode::None;

    // Optional manifold projection applied to accepted nodes.
    std::function<void(BS& X, BS& P)> projector;

    BS zeros() const { return BS(I, K); }

    T param(const std::string& key) const
    {
        for (const auto& [k, v] : params) {
            if (k == key) {
                return v;
            }
        }
        throw ConfigError("problem " + name + " has no parameter " + key);
    }

    const InvariantSpec<T>* invariant(const std::string& key) const
    {
        for (const auto& inv : invariants) {
            if (inv.name == key) {
                return &inv;
            }
        }
        return nullptr;
    }
};

} // namespace structural
