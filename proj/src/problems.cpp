#include "structural/problems.hpp"

#include "structural/errors.hpp"

#include <cmath>

namespace structural {

namespace {

template <Real T>
T lit(const char* s)
{
    return num::parse<T>(s);
}

template <Real T>
InvariantSpec<T> energy_invariant(std::function<T(const BodySpace<T>&, const BodySpace<T>&)> h)
{
    return {"H", [h](const BodySpace<T>& X, const BodySpace<T>& P) { return std::vector<T>{h(X, P)}; }};
}

template <Real T>
void require_positive(const T& v, const char* what)
{
    if (!(v > T(0.0))) {
        throw ConfigError(std::string(what) + " must be positive");
    }
}

} // namespace

template <Real T>
HamiltonianProblem<T> make_mass_spring(const T& m, const T& kappa, const T& x0, const T& p0)
{
    using BS = BodySpace<T>;
    require_positive(m, "mass");
    require_positive(kappa, "stiffness");
    HamiltonianProblem<T> pr;
    pr.name = "mass_spring";
    pr.I = 1;
    pr.K = 1;
    pr.X0 = BS(1, 1, {x0});
    pr.P0 = BS(1, 1, {p0});
    pr.params = {{"m", m}, {"kappa", kappa}};
    pr.separable = true;
    pr.hamiltonian = [m, kappa](const BS& X, const BS& P) {
        return P[0] * P[0] / (T(2.0) * m) + kappa * X[0] * X[0] / T(2.0);
    };
    pr.first_rhs = [m, kappa](const BS& X, const BS& P, BS& Xd, BS& Pd) {
        Xd[0] = P[0] / m;
        Pd[0] = -(kappa * X[0]);
    };
    pr.second_rhs = [m, kappa](const BS&, const BS&, const BS& Xd, const BS& Pd, BS& Xdd, BS& Pdd) {
        Xdd[0] = Pd[0] / m;
        Pdd[0] = -(kappa * Xd[0]);
    };
    pr.invariants.push_back(energy_invariant<T>(pr.hamiltonian));
    const T w = num::sqrt(kappa / m);
    pr.exact_solution = [=](const T& t, BS& X, BS& P) {
        const T c = num::cos(w * t);
        const T s = num::sin(w * t);
        X = BS(1, 1, {x0 * c + p0 / (m * w) * s});
        P = BS(1, 1, {-(m * w * x0 * s) + p0 * c});
    };
    pr.position_mode = PositionErrorMode::AllNodes;
    return pr;
}

template <Real T>
std::pair<T, T> two_spring_frequencies(const T& k1, const T& k2, const T& m1, const T& m2)
{
    const T b = m1 * k2 + m2 * k1 + m2 * k2;
    const T disc = b * b - T(4.0) * m1 * m2 * k1 * k2;
    if (!(disc > T(0.0))) {
        throw ConfigError("two-spring system is resonant (equal frequencies)");
    }
    const T sd = num::sqrt(disc);
    const T den = T(2.0) * m1 * m2;
    const T w1 = num::sqrt((b - sd) / den);
    const T w2 = num::sqrt((b + sd) / den);
    return {w1, w2};
}

template <Real T>
HamiltonianProblem<T> make_two_spring(const T& k1, const T& k2, const T& m1, const T& m2, const T& A, const T& B,
                                      const T& alpha1, const T& alpha2)
{
    using BS = BodySpace<T>;
    require_positive(k1, "k1");
    require_positive(k2, "k2");
    require_positive(m1, "m1");
    require_positive(m2, "m2");
    const auto [w1, w2] = two_spring_frequencies(k1, k2, m1, m2);
    if (!(num::abs(w1 - w2) > T(0.0))) {
        throw ConfigError("two-spring system is resonant (equal frequencies)");
    }
    const T den2 = k2 - m2 * w2 * w2;
    if (num::abs(den2) == T(0.0)) {
        throw ConfigError("two-spring mode shape undefined: k2 = m2 w2^2");
    }
    const T c1 = (k1 + k2 - m1 * w1 * w1) / k2;
    const T c2 = k2 / den2;

    HamiltonianProblem<T> pr;
    pr.name = "two_spring";
    pr.I = 1;
    pr.K = 2;
    pr.params = {{"k1", k1}, {"k2", k2}, {"m1", m1}, {"m2", m2}, {"A", A}, {"B", B}, {"alpha1", alpha1}, {"alpha2", alpha2},
                 {"omega1", w1}, {"omega2", w2}};
    pr.separable = true;
    pr.hamiltonian = [=](const BS& X, const BS& P) {
        const T d = X[1] - X[0];
        return P[0] * P[0] / (T(2.0) * m1) + P[1] * P[1] / (T(2.0) * m2) + k1 * X[0] * X[0] / T(2.0) +
               k2 * d * d / T(2.0);
    };
    pr.first_rhs = [=](const BS& X, const BS& P, BS& Xd, BS& Pd) {
        Xd[0] = P[0] / m1;
        Xd[1] = P[1] / m2;
        Pd[0] = -(k1 * X[0] + k2 * (X[0] - X[1]));
        Pd[1] = -(k2 * (X[1] - X[0]));
    };
    pr.second_rhs = [=](const BS&, const BS&, const BS& Xd, const BS& Pd, BS& Xdd, BS& Pdd) {
        Xdd[0] = Pd[0] / m1;
        Xdd[1] = Pd[1] / m2;
        Pdd[0] = -(k1 * Xd[0] + k2 * (Xd[0] - Xd[1]));
        Pdd[1] = -(k2 * (Xd[1] - Xd[0]));
    };
    pr.invariants.push_back(energy_invariant<T>(pr.hamiltonian));
    pr.exact_solution = [=](const T& t, BS& X, BS& P) {
        const T ph1 = w1 * t + alpha1;
        const T ph2 = w2 * t + alpha2;
        const T cs1 = num::cos(ph1), sn1 = num::sin(ph1);
        const T cs2 = num::cos(ph2), sn2 = num::sin(ph2);
        X = BS(1, 2, {A * cs1 + B * cs2, A * c1 * cs1 + B * c2 * cs2});
        P = BS(1, 2, {-(m1 * (A * w1 * sn1 + B * w2 * sn2)), -(m2 * (A * w1 * c1 * sn1 + B * w2 * c2 * sn2))});
    };
    (*pr.exact_solution)(T(0.0), pr.X0, pr.P0);
    pr.position_mode = PositionErrorMode::AllNodes;
    return pr;
}

template <Real T>
HamiltonianProblem<T> make_pendulum(const T& m, const T& g, const T& l, const T& x0, const T& p0)
{
    using BS = BodySpace<T>;
    require_positive(m, "mass");
    require_positive(g, "gravity");
    require_positive(l, "length");
    HamiltonianProblem<T> pr;
    pr.name = "pendulum";
    pr.X0 = BS(1, 1, {x0});
    pr.P0 = BS(1, 1, {p0});
    pr.params = {{"m", m}, {"g", g}, {"l", l}};
    pr.separable = true;
    const T ml2 = m * l * l;
    const T mgl = m * g * l;
    pr.hamiltonian = [=](const BS& X, const BS& P) {
        return P[0] * P[0] / (T(2.0) * ml2) + mgl * (T(1.0) - num::cos(X[0]));
    };
    pr.first_rhs = [=](const BS& X, const BS& P, BS& Xd, BS& Pd) {
        Xd[0] = P[0] / ml2;
        Pd[0] = -(mgl * num::sin(X[0]));
    };
    pr.second_rhs = [=](const BS& X, const BS&, const BS& Xd, const BS& Pd, BS& Xdd, BS& Pdd) {
        Xdd[0] = Pd[0] / ml2;
        Pdd[0] = -(mgl * num::cos(X[0]) * Xd[0]);
    };
    pr.invariants.push_back(energy_invariant<T>(pr.hamiltonian));
    return pr;
}

template <Real T>
T pendulum_period(const T& m, const T& g, const T& l, const T& w)
{
    if (!(w >= T(0.0)) || !(w < T(1.0))) {
        throw DomainError("elliptic modulus must lie in [0, 1)");
    }
    T a(1.0);
    T b = num::sqrt(T(1.0) - w * w);
    for (int it = 0; it < 100; ++it) {
        const T an = (a + b) / T(2.0);
        const T bn = num::sqrt(a * b);
        a = an;
        b = bn;
        if (num::to_double(num::abs(a - b)) <= 4.0 * num::epsilon<T>() * num::to_double(a)) {
            break;
        }
    }
    const T K = num::pi<T>() / (T(2.0) * a);
    return T(4.0) * num::sqrt(l / (m * g)) * K;
}

namespace {

template <Real T>
T norm2d(const BodySpace<T>& X)
{
    const T r2 = X[0] * X[0] + X[1] * X[1];
    if (!(r2 > T(0.0))) {
        throw SingularityError("Kepler problem evaluated at the origin");
    }
    return num::sqrt(r2);
}

} // namespace

template <Real T>
T kepler_lrl(const BodySpace<T>& X, const BodySpace<T>& P)
{
    const T r = norm2d(X);
    const T L = P[1] * X[0] - P[0] * X[1];
    return L * (P[1] - P[0]) - (X[0] + X[1]) / r;
}

template <Real T>
std::array<T, 4> kepler_lrl_gradient(const BodySpace<T>& X, const BodySpace<T>& P)
{
    const T r = norm2d(X);
    const T r3 = r * r * r;
    const T x1 = X[0], x2 = X[1], p1 = P[0], p2 = P[1];
    const T L = p2 * x1 - p1 * x2;
    const T dp = p2 - p1;
    return {p2 * dp - (x2 * x2 - x1 * x2) / r3, -(p1 * dp) - (x1 * x1 - x1 * x2) / r3, -(x2 * dp) - L, x1 * dp + L};
}

template <Real T>
bool project_lrl(BodySpace<T>& X, BodySpace<T>& P, const T& R0)
{
    const auto g = kepler_lrl_gradient(X, P);
    const T g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3];
    if (num::to_double(num::sqrt(g2)) < 1e-14) {
        return false;
    }
    const T lambda = (kepler_lrl(X, P) - R0) / g2;
    X[0] -= lambda * g[0];
    X[1] -= lambda * g[1];
    P[0] -= lambda * g[2];
    P[1] -= lambda * g[3];
    return true;
}

template <Real T>
HamiltonianProblem<T> make_kepler(const std::array<T, 2>& x0, const std::array<T, 2>& p0)
{
    using BS = BodySpace<T>;
    HamiltonianProblem<T> pr;
    pr.name = "kepler";
    pr.I = 2;
    pr.K = 1;
    pr.X0 = BS(2, 1, {x0[0], x0[1]});
    pr.P0 = BS(2, 1, {p0[0], p0[1]});
    norm2d(pr.X0);
    pr.separable = true;
    pr.hamiltonian = [](const BS& X, const BS& P) {
        return (P[0] * P[0] + P[1] * P[1]) / T(2.0) - T(1.0) / norm2d(X);
    };
    pr.first_rhs = [](const BS& X, const BS& P, BS& Xd, BS& Pd) {
        const T r = norm2d(X);
        const T r3 = r * r * r;
        Xd[0] = P[0];
        Xd[1] = P[1];
        Pd[0] = -(X[0] / r3);
        Pd[1] = -(X[1] / r3);
    };
    pr.second_rhs = [](const BS& X, const BS&, const BS& Xd, const BS& Pd, BS& Xdd, BS& Pdd) {
        const T r = norm2d(X);
        const T r2 = r * r;
        const T r3 = r2 * r;
        const T r5 = r3 * r2;
        const T xv = X[0] * Xd[0] + X[1] * Xd[1];
        Xdd[0] = Pd[0];
        Xdd[1] = Pd[1];
        Pdd[0] = -(Xd[0] / r3) + T(3.0) * X[0] * xv / r5;
        Pdd[1] = -(Xd[1] / r3) + T(3.0) * X[1] * xv / r5;
    };
    pr.invariants.push_back(energy_invariant<T>(pr.hamiltonian));
    pr.invariants.push_back({"L", [](const BS& X, const BS& P) { return std::vector<T>{P[1] * X[0] - P[0] * X[1]}; }});
    pr.invariants.push_back({"A", [](const BS& X, const BS& P) { return std::vector<T>{kepler_lrl(X, P)}; }});
    const T R0 = kepler_lrl(pr.X0, pr.P0);
    pr.projector = [R0](BS& X, BS& P) { project_lrl(X, P, R0); };
    return pr;
}

template <Real T>
HamiltonianProblem<T> make_nbody(const std::string& name, const std::vector<T>& masses, const T& G,
                                 const BodySpace<T>& X0, const BodySpace<T>& P0)
{
    using BS = BodySpace<T>;
    const int K = X0.K();
    const int I = X0.I();
    if (K < 2 || static_cast<int>(masses.size()) != K || !X0.same_shape(P0)) {
        throw ConfigError("n-body problem needs K >= 2 bodies with one mass each");
    }
    if (I != 2 && I != 3) {
        throw ConfigError("n-body problem supports dimension 2 or 3");
    }
    for (const auto& mk : masses) {
        require_positive(mk, "body mass");
    }
    HamiltonianProblem<T> pr;
    pr.name = name;
    pr.I = I;
    pr.K = K;
    pr.X0 = X0;
    pr.P0 = P0;
    pr.params = {{"G", G}};
    pr.separable = true;

    // squared distance between bodies k and l
    auto dist2 = [I](const BS& X, int k, int l) {
        T s(0.0);
        for (int i = 0; i < I; ++i) {
            const T d = X(i, k) - X(i, l);
            s += d * d;
        }
        if (!(s > T(0.0))) {
            throw SingularityError("collision between bodies " + std::to_string(k) + " and " + std::to_string(l));
        }
        return s;
    };

    pr.hamiltonian = [=](const BS& X, const BS& P) {
        T kin(0.0);
        for (int k = 0; k < K; ++k) {
            T p2(0.0);
            for (int i = 0; i < I; ++i) {
                p2 += P(i, k) * P(i, k);
            }
            kin += p2 / (T(2.0) * masses[k]);
        }
        T pot(0.0);
        for (int k = 0; k < K; ++k) {
            for (int l = k + 1; l < K; ++l) {
                pot += G * masses[k] * masses[l] / num::sqrt(dist2(X, k, l));
            }
        }
        return kin - pot;
    };
    pr.first_rhs = [=](const BS& X, const BS& P, BS& Xd, BS& Pd) {
        for (int k = 0; k < K; ++k) {
            for (int i = 0; i < I; ++i) {
                Xd(i, k) = P(i, k) / masses[k];
                Pd(i, k) = T(0.0);
            }
        }
        for (int k = 0; k < K; ++k) {
            for (int l = k + 1; l < K; ++l) {
                const T r2 = dist2(X, k, l);
                const T r3 = r2 * num::sqrt(r2);
                const T c = G * masses[k] * masses[l] / r3;
                for (int i = 0; i < I; ++i) {
                    const T f = c * (X(i, k) - X(i, l));
                    Pd(i, k) -= f;
                    Pd(i, l) += f;
                }
            }
        }
    };
    pr.second_rhs = [=](const BS& X, const BS&, const BS& Xd, const BS& Pd, BS& Xdd, BS& Pdd) {
        for (int k = 0; k < K; ++k) {
            for (int i = 0; i < I; ++i) {
                Xdd(i, k) = Pd(i, k) / masses[k];
                Pdd(i, k) = T(0.0);
            }
        }
        for (int k = 0; k < K; ++k) {
            for (int l = k + 1; l < K; ++l) {
                const T r2 = dist2(X, k, l);
                const T r = num::sqrt(r2);
                const T r3 = r2 * r;
                const T r5 = r3 * r2;
                T xv(0.0);
                for (int i = 0; i < I; ++i) {
                    xv += (X(i, k) - X(i, l)) * (Xd(i, k) - Xd(i, l));
                }
                const T g = G * masses[k] * masses[l];
                for (int i = 0; i < I; ++i) {
                    const T term =
                        g * ((Xd(i, k) - Xd(i, l)) / r3 - T(3.0) * xv * (X(i, k) - X(i, l)) / r5);
                    Pdd(i, k) -= term;
                    Pdd(i, l) += term;
                }
            }
        }
    };
    pr.invariants.push_back(energy_invariant<T>(pr.hamiltonian));
    pr.invariants.push_back({"L", [=](const BS& X, const BS& P) {
                                 if (I == 2) {
                                     T s(0.0);
                                     for (int k = 0; k < K; ++k) {
                                         s += X(0, k) * P(1, k) - X(1, k) * P(0, k);
                                     }
                                     return std::vector<T>{s};
                                 }
                                 std::vector<T> s(3, T(0.0));
                                 for (int k = 0; k < K; ++k) {
                                     s[0] += X(1, k) * P(2, k) - X(2, k) * P(1, k);
                                     s[1] += X(2, k) * P(0, k) - X(0, k) * P(2, k);
                                     s[2] += X(0, k) * P(1, k) - X(1, k) * P(0, k);
                                 }
                                 return s;
                             }});
    return pr;
}

template <Real T>
HamiltonianProblem<T> make_figure_eight()
{
    using BS = BodySpace<T>;
    const T x1 = lit<T>("0.97000436");
    const T y1 = lit<T>("-0.24308753");
    const T px = lit<T>("0.466203685");
    const T py = lit<T>("0.43236573");
    BS X(2, 3, {x1, y1, -x1, -y1, T(0.0), T(0.0)});
    BS P(2, 3, {px, py, px, py, lit<T>("-0.93240737"), lit<T>("-0.86473146")});
    auto pr = make_nbody<T>("three_body_eight", {T(1.0), T(1.0), T(1.0)}, T(1.0), X, P);
    pr.default_T = 10.0;
    pr.params.push_back({"period", lit<T>("6.32591401228")});
    return pr;
}

template <Real T>
HamiltonianProblem<T> make_outer_solar()
{
    using BS = BodySpace<T>;
    struct Body {
        const char* mass;
        const char* x[3];
        const char* v[3];
    };
    // Sun, Jupiter, Saturn, Uranus, Neptune, Pluto; au, au/day, solar masses
    static const Body bodies[] = {
        {"1.00000597682e+00", {"0", "0", "0"}, {"0", "0", "0"}},
        {"9.547861040430e-04", {"-3.5023653", "-3.8169847", "-1.5507963"}, {"0.00565429", "-0.00412490", "-0.00190589"}},
        {"2.855837331510e-04", {"9.0755314", "-3.0458353", "-1.6483708"}, {"0.00168318", "0.00483525", "0.00192462"}},
        {"4.37273164546e-05", {"8.3101420", "-16.2901086", "-7.2521278"}, {"0.00354178", "0.00137102", "0.00055029"}},
        {"5.17759138449e-05", {"11.4707666", "-25.7294829", "-10.8169456"}, {"0.00288930", "0.00114527", "0.00039677"}},
        {nullptr, {"-15.5387357", "-25.2225594", "-3.1902382"}, {"0.00276725", "-0.00170702", "-0.00136504"}},
    };
    std::vector<T> masses;
    BS X(3, 6), P(3, 6);
    for (int k = 0; k < 6; ++k) {
        const Body& b = bodies[k];
        const T mk = b.mass ? lit<T>(b.mass) : T(10.0) * lit<T>("1e-8") / T(13.0);
        masses.push_back(mk);
        for (int i = 0; i < 3; ++i) {
            X(i, k) = lit<T>(b.x[i]);
            P(i, k) = mk * lit<T>(b.v[i]);
        }
    }
    auto pr = make_nbody<T>("outer_solar", masses, lit<T>("2.95912208286e-4"), X, P);
    pr.default_T = 100000.0;
    // H(0) is about -3.2e-8 in these units, so energy error is reported relative
    for (auto& inv : pr.invariants) {
        if (inv.name == "H") {
            inv.relative = true;
        }
    }
    return pr;
}

template <Real T>
EmFields<T> em_fields(EmVariant v, const std::array<T, 3>& x)
{
    EmFields<T> f;
    const T zero(0.0);
    for (int i = 0; i < 3; ++i) {
        f.grad_phi[i] = zero;
        f.A[i] = zero;
        for (int j = 0; j < 3; ++j) {
            f.hess_phi[i][j] = zero;
            f.J[i][j] = zero;
            for (int k = 0; k < 3; ++k) {
                f.HA[i][j][k] = zero;
            }
        }
    }
    if (v == EmVariant::SCB) {
        const T r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if (!(r2 > zero)) {
            throw SingularityError("electric potential evaluated at the origin");
        }
        const T r = num::sqrt(r2);
        const T c = lit<T>("0.1") + r;
        f.phi = -(T(1.0) / c);
        const T f1 = T(1.0) / (c * c);
        const T f2 = -(T(2.0) / (c * c * c));
        for (int i = 0; i < 3; ++i) {
            f.grad_phi[i] = f1 * x[i] / r;
            for (int j = 0; j < 3; ++j) {
                const T xx = x[i] * x[j] / r2;
                f.hess_phi[i][j] = f2 * xx + f1 / r * ((i == j ? T(1.0) : zero) - xx);
            }
        }
        const T B(1000.0);
        f.A[1] = B * x[0];
        f.J[1][0] = B;
        return f;
    }

    if (num::abs(x[0]) == zero) {
        throw SingularityError("magnetic potential singular at x1 = 0");
    }
    const T s1 = num::sin(x[0]), c1 = num::cos(x[0]);
    const T s1sq = s1 * s1;
    const T sin2x1 = T(2.0) * s1 * c1;
    const T cos2x1 = c1 * c1 - s1sq;
    const T s2 = num::sin(x[1]), c2 = num::cos(x[1]);
    const T s3 = num::sin(x[2]), c3 = num::cos(x[2]);
    const T g = s2 * c2 + s3 * c3;
    const T sin2x2 = T(2.0) * s2 * c2, cos2x2 = c2 * c2 - s2 * s2;
    const T sin2x3 = T(2.0) * s3 * c3, cos2x3 = c3 * c3 - s3 * s3;

    f.phi = T(2.0) * c1 * c1 + s1sq * g;
    f.grad_phi = {sin2x1 * (g - T(2.0)), s1sq * cos2x2, s1sq * cos2x3};
    f.hess_phi[0][0] = T(2.0) * cos2x1 * (g - T(2.0));
    f.hess_phi[0][1] = f.hess_phi[1][0] = sin2x1 * cos2x2;
    f.hess_phi[0][2] = f.hess_phi[2][0] = sin2x1 * cos2x3;
    f.hess_phi[1][1] = -(T(2.0) * s1sq * sin2x2);
    f.hess_phi[2][2] = -(T(2.0) * s1sq * sin2x3);

    const T x1 = x[0], x2 = x[1], x3 = x[2];
    const T r2 = x1 * x1 + x2 * x2 + x3 * x3;
    const T u = x2 * x2 + x3 * x3;
    const T q = T(1.0) + r2;

    f.A = {r2, r2 * x2 / x1, -(T(2.0) * num::log(q))};

    for (int j = 0; j < 3; ++j) {
        f.J[0][j] = T(2.0) * x[j];
        f.J[2][j] = -(T(4.0) * x[j] / q);
        f.HA[0][j][j] = T(2.0);
        for (int k = 0; k < 3; ++k) {
            f.HA[2][j][k] = T(8.0) * x[j] * x[k] / (q * q) - (j == k ? T(4.0) / q : zero);
        }
    }
    const T x1sq = x1 * x1;
    f.J[1][0] = x2 - x2 * u / x1sq;
    f.J[1][1] = x1 + T(3.0) * x2 * x2 / x1 + x3 * x3 / x1;
    f.J[1][2] = T(2.0) * x2 * x3 / x1;
    auto& H2 = f.HA[1];
    H2[0][0] = T(2.0) * x2 * u / (x1sq * x1);
    H2[0][1] = H2[1][0] = T(1.0) - (T(3.0) * x2 * x2 + x3 * x3) / x1sq;
    H2[0][2] = H2[2][0] = -(T(2.0) * x2 * x3 / x1sq);
    H2[1][1] = T(6.0) * x2 / x1;
    H2[1][2] = H2[2][1] = T(2.0) * x3 / x1;
    H2[2][2] = T(2.0) * x2 / x1;
    return f;
}

template <Real T>
HamiltonianProblem<T> make_em_particle(EmVariant v, const T& m, const T& e, const std::array<T, 3>& x0,
                                       const std::array<T, 3>& p0)
{
    using BS = BodySpace<T>;
    require_positive(m, "mass");
    HamiltonianProblem<T> pr;
    pr.name = v == EmVariant::SCB ? "em_scb" : "em_challenging";
    pr.I = 3;
    pr.K = 1;
    pr.X0 = BS(3, 1, {x0[0], x0[1], x0[2]});
    pr.P0 = BS(3, 1, {p0[0], p0[1], p0[2]});
    pr.params = {{"m", m}, {"e", e}};
    pr.separable = false;
    pr.default_T = v == EmVariant::SCB ? 100.0 : 2000.0;

    auto pos = [](const BS& X) { return std::array<T, 3>{X[0], X[1], X[2]}; };

    pr.hamiltonian = [=](const BS& X, const BS& P) {
        const auto f = em_fields<T>(v, pos(X));
        T s(0.0);
        for (int i = 0; i < 3; ++i) {
            const T d = P[i] - e * f.A[i];
            s += d * d;
        }
        return s / (T(2.0) * m) + e * f.phi;
    };
    pr.first_rhs = [=](const BS& X, const BS& P, BS& Xd, BS& Pd) {
        const auto f = em_fields<T>(v, pos(X));
        for (int i = 0; i < 3; ++i) {
            Xd[i] = (P[i] - e * f.A[i]) / m;
        }
        for (int l = 0; l < 3; ++l) {
            T s(0.0);
            for (int i = 0; i < 3; ++i) {
                s += f.J[i][l] * Xd[i];
            }
            Pd[l] = e * (s - f.grad_phi[l]);
        }
    };
    pr.second_rhs = [=](const BS& X, const BS&, const BS& Xd, const BS&, BS& Xdd, BS& Pdd) {
        const auto f = em_fields<T>(v, pos(X));
        // A does not depend on time here, so its partial time derivative drops out.
        for (int l = 0; l < 3; ++l) {
            T s(0.0);
            for (int i = 0; i < 3; ++i) {
                s += (f.J[i][l] - f.J[l][i]) * Xd[i];
            }
            Xdd[l] = e / m * (s - f.grad_phi[l]);
        }
        for (int l = 0; l < 3; ++l) {
            T jt(0.0), w(0.0), hv(0.0);
            for (int i = 0; i < 3; ++i) {
                jt += f.J[i][l] * Xdd[i];
                hv += f.hess_phi[l][i] * Xd[i];
                for (int j = 0; j < 3; ++j) {
                    w += f.HA[j][l][i] * Xd[i] * Xd[j];
                }
            }
            Pdd[l] = e * (jt + w - hv);
        }
    };
    pr.invariants.push_back(energy_invariant<T>(pr.hamiltonian));
    return pr;
}

const std::vector<std::string>& problem_names()
{
    static const std::vector<std::string> names = {"mass_spring", "two_spring", "pendulum",   "kepler",
                                                   "three_body_eight", "outer_solar", "em_scb", "em_challenging"};
    return names;
}

template <Real T>
HamiltonianProblem<T> make_problem(const std::string& name)
{
    const T one(1.0);
    if (name == "mass_spring") {
        return make_mass_spring<T>(one, one, one, T(0.0));
    }
    if (name == "two_spring") {
        const T pi = num::pi<T>();
        return make_two_spring<T>(one, T(5.0), T(2.0), one, one, T(2.0), pi / T(2.0), -(pi / T(4.0)));
    }
    if (name == "pendulum") {
        auto pr = make_pendulum<T>(one, one, one, num::pi<T>() / T(4.0), T(0.0));
        pr.reference_values = {{T(100.0), 'x', 0, 0, lit<T>("-0.2633498226088722")},
                               {T(100.0), 'p', 0, 0, lit<T>("-0.7189111241830892")}};
        pr.position_mode = PositionErrorMode::Endpoint;
        return pr;
    }
    if (name == "kepler") {
        return make_kepler<T>({lit<T>("0.4"), T(0.0)}, {T(0.0), T(2.0)});
    }
    if (name == "three_body_eight") {
        return make_figure_eight<T>();
    }
    if (name == "outer_solar") {
        return make_outer_solar<T>();
    }
    if (name == "em_scb") {
        return make_em_particle<T>(EmVariant::SCB, one, one, {one, T(0.0), T(0.0)}, {T(0.0), T(101.0), T(0.0)});
    }
    if (name == "em_challenging") {
        return make_em_particle<T>(EmVariant::Challenging, one, one, {lit<T>("0.5"), lit<T>("-0.25"), lit<T>("-0.25")},
                                   {T(0.0), T(0.0), -one});
    }
    throw ConfigError("unknown problem '" + name + "'");
}

#define STRUCTURAL_INSTANTIATE(T)                                                                                       \
    template HamiltonianProblem<T> make_mass_spring<T>(const T&, const T&, const T&, const T&);                         \
    template std::pair<T, T> two_spring_frequencies<T>(const T&, const T&, const T&, const T&);                         \
    template HamiltonianProblem<T> make_two_spring<T>(const T&, const T&, const T&, const T&, const T&, const T&,       \
                                                      const T&, const T&);                                              \
    template HamiltonianProblem<T> make_pendulum<T>(const T&, const T&, const T&, const T&, const T&);                  \
    template T pendulum_period<T>(const T&, const T&, const T&, const T&);                                              \
    template HamiltonianProblem<T> make_kepler<T>(const std::array<T, 2>&, const std::array<T, 2>&);                    \
    template T kepler_lrl<T>(const BodySpace<T>&, const BodySpace<T>&);                                                 \
    template std::array<T, 4> kepler_lrl_gradient<T>(const BodySpace<T>&, const BodySpace<T>&);                         \
    template bool project_lrl<T>(BodySpace<T>&, BodySpace<T>&, const T&);                                               \
    template HamiltonianProblem<T> make_nbody<T>(const std::string&, const std::vector<T>&, const T&,                   \
                                                 const BodySpace<T>&, const BodySpace<T>&);                             \
    template HamiltonianProblem<T> make_figure_eight<T>();                                                              \
    template HamiltonianProblem<T> make_outer_solar<T>();                                                               \
    template EmFields<T> em_fields<T>(EmVariant, const std::array<T, 3>&);                                              \
    template HamiltonianProblem<T> make_em_particle<T>(EmVariant, const T&, const T&, const std::array<T, 3>&,          \
                                                       const std::array<T, 3>&);                                        \
    template HamiltonianProblem<T> make_problem<T>(const std::string&);

STRUCTURAL_INSTANTIATE(double)
STRUCTURAL_INSTANTIATE(DoubleDouble)

#undef STRUCTURAL_INSTANTIATE

} // namespace structural
