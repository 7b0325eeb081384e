#include "structural/secoeff.hpp"

#include "structural/errors.hpp"

#include <map>
#include <mutex>
#include <ostream>
#include <utility>

namespace structural {

int derivative_levels(Formulation f)
{
    return f == Formulation::ZD ? 2 : 3;
}

int enforced_degree(Formulation f, int R)
{
    const int S = derivative_levels(f);
    return S * (R + 1) - R - 1;
}

std::string to_string(Formulation f)
{
    return f == Formulation::ZD ? "zd" : "zds";
}

Formulation parse_formulation(const std::string& name)
{
    if (name == "zd" || name == "ZD") {
        return Formulation::ZD;
    }
    if (name == "zds" || name == "ZDS") {
        return Formulation::ZDS;
    }
    throw ConfigError("unknown formulation '" + name + "'");
}

namespace {

void check_block_size(int R)
{
    if (R < 1 || R > kMaxBlockSize) {
        throw ConfigError("block size R=" + std::to_string(R) + " outside [1, " + std::to_string(kMaxBlockSize) + "]");
    }
}

// d^s/dt^s t^k at t = r, exact in integers (fits in a double-double for
// the sizes allowed here).
template <Real T>
T monomial_derivative(int k, int s, int r)
{
    if (s > k) {
        return T(0.0);
    }
    T coef(1.0);
    for (int i = 0; i < s; ++i) {
        coef *= T(static_cast<double>(k - i));
    }
    T p(1.0);
    for (int i = 0; i < k - s; ++i) {
        p *= T(static_cast<double>(r));
    }
    return coef * p;
}

} // namespace

template <Real T>
Matrix<T> build_exactness_matrix(int R, Formulation f)
{
    check_block_size(R);
    const int S = derivative_levels(f);
    const int n = S * (R + 1);
    Matrix<T> m(n, n);
    for (int l = 0; l < n; ++l) {
        for (int s = 0; s < S; ++s) {
            for (int r = 0; r <= R; ++r) {
                m(l, s * (R + 1) + r) = monomial_derivative<T>(l, s, r);
            }
        }
    }
    return m;
}

RawBasis compute_kernel_basis(int R, Formulation f)
{
    using DD = DoubleDouble;
    const Matrix<DD> full = build_exactness_matrix<DD>(R, f);
    const std::size_t n = full.cols();
    const std::size_t keep = n - static_cast<std::size_t>(R);

    // Row-scaled reduced matrix, transposed: its range is the row space.
    Matrix<DD> at(n, keep);
    for (std::size_t l = 0; l < keep; ++l) {
        DD mx(0.0);
        for (std::size_t c = 0; c < n; ++c) {
            mx = num::max(mx, num::abs(full(l, c)));
        }
        for (std::size_t c = 0; c < n; ++c) {
            at(c, l) = full(l, c) / mx;
        }
    }
    auto [q, r] = householder_qr(at);

    // Rank check on the triangular factor.
    double rmax = 0.0;
    for (std::size_t k = 0; k < keep; ++k) {
        rmax = std::max(rmax, std::abs(num::to_double(r(k, k))));
    }
    for (std::size_t k = 0; k < keep; ++k) {
        if (std::abs(num::to_double(r(k, k))) <= 1e-26 * rmax) {
            throw InternalError("kernel dimension exceeds R=" + std::to_string(R) + " for " + to_string(f));
        }
    }

    RawBasis basis;
    basis.formulation = f;
    basis.R = R;
    for (std::size_t j = keep; j < n; ++j) {
        std::vector<DD> v(n);
        double big = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = q(i, j);
            big = std::max(big, std::abs(v[i].hi()));
        }
        // First entry of (near-)largest magnitude becomes positive.
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(v[i].hi()) >= (1.0 - 1e-12) * big) {
                if (v[i].hi() < 0.0) {
                    for (auto& e : v) {
                        e = -e;
                    }
                }
                break;
            }
        }
        basis.vectors.push_back(std::move(v));
    }
    return basis;
}

const RawBasis& kernel_basis(int R, Formulation f)
{
    check_block_size(R);
    static std::mutex mu;
    static std::map<std::pair<int, Formulation>, RawBasis> cache;
    std::lock_guard lock(mu);
    auto it = cache.find({R, f});
    if (it == cache.end()) {
        it = cache.emplace(std::make_pair(R, f), compute_kernel_basis(R, f)).first;
    }
    return it->second;
}

namespace {

template <Real T>
T to_backend(const DoubleDouble& x)
{
    if constexpr (std::same_as<T, double>) {
        return num::to_double(x);
    } else {
        return x;
    }
}

DoubleDouble to_dd(const double& x) { return DoubleDouble(x); }
DoubleDouble to_dd(const DoubleDouble& x) { return x; }

// Unit-grid tables kept in double-double.
CoeffTable<DoubleDouble> unit_tables(const RawBasis& basis)
{
    using DD = DoubleDouble;
    const int R = basis.R;
    const bool zds = basis.formulation == Formulation::ZDS;
    if (static_cast<int>(basis.vectors.size()) != R) {
        throw InternalError("basis has " + std::to_string(basis.vectors.size()) + " vectors, expected R=" + std::to_string(R));
    }

    Matrix<DD> Az(R, R), Ad(R, R), As(R, R);
    for (int m = 0; m < R; ++m) {
        for (int r = 1; r <= R; ++r) {
            Az(m, r - 1) = basis.a(m, r, 0);
            Ad(m, r - 1) = basis.a(m, r, 1);
            if (zds) {
                As(m, r - 1) = basis.a(m, r, 2);
            }
        }
    }
    const double cond = condition1(Az);
    if (!(cond <= 1e12)) {
        throw ConfigError("structural basis for R=" + std::to_string(R) + ", " + to_string(basis.formulation) +
                          " has an ill-conditioned A_z (condition " + std::to_string(cond) + ")");
    }
    LU<DD> lu(Az);

    CoeffTable<DD> t;
    t.formulation = basis.formulation;
    t.R = R;
    t.dt = DD(1.0);
    t.condition_Az = cond;
    t.Bd = lu.solve(Ad);
    std::vector<DD> az(R), ad(R), as(R);
    for (int m = 0; m < R; ++m) {
        az[m] = basis.a(m, 0, 0);
        ad[m] = basis.a(m, 0, 1);
        if (zds) {
            as[m] = basis.a(m, 0, 2);
        }
    }
    t.bz = lu.solve(az);
    t.bd = lu.solve(ad);
    if (zds) {
        t.Bs = lu.solve(As);
        t.bs = lu.solve(as);
    }
    return t;
}

template <Real T>
CoeffTable<T> rescale(const CoeffTable<DoubleDouble>& u, const T& dt)
{
    using DD = DoubleDouble;
    if (!(dt > T(0.0))) {
        throw ConfigError("time step must be positive");
    }
    const DD h = to_dd(dt);
    const DD h2 = h * h;
    const int R = u.R;
    CoeffTable<T> t;
    t.formulation = u.formulation;
    t.R = R;
    t.dt = dt;
    t.condition_Az = u.condition_Az;
    t.Bd = Matrix<T>(R, R);
    t.bz.resize(R);
    t.bd.resize(R);
    const bool zds = u.has_second();
    if (zds) {
        t.Bs = Matrix<T>(R, R);
        t.bs.resize(R);
    }
    for (int i = 0; i < R; ++i) {
        t.bz[i] = to_backend<T>(u.bz[i]);
        t.bd[i] = to_backend<T>(u.bd[i] * h);
        if (zds) {
            t.bs[i] = to_backend<T>(u.bs[i] * h2);
        }
        for (int j = 0; j < R; ++j) {
            t.Bd(i, j) = to_backend<T>(u.Bd(i, j) * h);
            if (zds) {
                t.Bs(i, j) = to_backend<T>(u.Bs(i, j) * h2);
            }
        }
    }
    return t;
}

} // namespace

template <Real T>
CoeffTable<T> assemble_tables(const RawBasis& basis, const T& dt)
{
    return rescale(unit_tables(basis), dt);
}

template <Real T>
CoeffTable<T> coeff_table(int R, Formulation f, const T& dt)
{
    check_block_size(R);
    static std::mutex mu;
    static std::map<std::pair<int, Formulation>, CoeffTable<DoubleDouble>> cache;
    const RawBasis& basis = kernel_basis(R, f);
    std::unique_lock lock(mu);
    auto it = cache.find({R, f});
    if (it == cache.end()) {
        it = cache.emplace(std::make_pair(R, f), unit_tables(basis)).first;
    }
    const CoeffTable<DoubleDouble>& unit = it->second;
    lock.unlock();
    return rescale(unit, dt);
}

template <Real T>
double exactness_residual(const CoeffTable<T>& table, int degree)
{
    const int R = table.R;
    const bool zds = table.has_second();
    const T h = table.dt;
    std::vector<T> z(R + 1), d(R + 1), s(R + 1);
    T phimax(0.0);
    for (int r = 0; r <= R; ++r) {
        const T t = T(static_cast<double>(r)) * h;
        T p(1.0);
        T p1(1.0);
        T p2(1.0);
        for (int i = 0; i < degree; ++i) {
            p *= t;
        }
        for (int i = 0; i < degree - 1; ++i) {
            p1 *= t;
        }
        for (int i = 0; i < degree - 2; ++i) {
            p2 *= t;
        }
        z[r] = p;
        d[r] = degree >= 1 ? T(static_cast<double>(degree)) * p1 : T(0.0);
        s[r] = degree >= 2 ? T(static_cast<double>(degree * (degree - 1))) * p2 : T(0.0);
        phimax = num::max(phimax, num::abs(p));
    }
    double worst = 0.0;
    for (int i = 0; i < R; ++i) {
        T res = z[i + 1] + table.bz[i] * z[0] + table.bd[i] * d[0];
        T norm = T(1.0) + num::abs(table.bz[i]) + num::abs(table.bd[i]);
        for (int j = 0; j < R; ++j) {
            res += table.Bd(i, j) * d[j + 1];
            norm += num::abs(table.Bd(i, j));
        }
        if (zds) {
            res += table.bs[i] * s[0];
            norm += num::abs(table.bs[i]);
            for (int j = 0; j < R; ++j) {
                res += table.Bs(i, j) * s[j + 1];
                norm += num::abs(table.Bs(i, j));
            }
        }
        worst = std::max(worst, num::to_double(num::abs(res) / (norm * phimax)));
    }
    return worst;
}

void write_basis_csv(std::ostream& os, const RawBasis& basis, bool header)
{
    if (header) {
        os << "formulation,R,m,r,s,value\n";
    }
    const int S = basis.levels();
    for (int m = 0; m < basis.R; ++m) {
        for (int s = 0; s < S; ++s) {
            for (int r = 0; r <= basis.R; ++r) {
                os << to_string(basis.formulation) << ',' << basis.R << ',' << (m + 1) << ',' << r << ',' << s << ','
                   << to_string(basis.a(m, r, s), 32) << '\n';
            }
        }
    }
}

template Matrix<double> build_exactness_matrix<double>(int, Formulation);
template Matrix<DoubleDouble> build_exactness_matrix<DoubleDouble>(int, Formulation);
template CoeffTable<double> assemble_tables<double>(const RawBasis&, const double&);
template CoeffTable<DoubleDouble> assemble_tables<DoubleDouble>(const RawBasis&, const DoubleDouble&);
template CoeffTable<double> coeff_table<double>(int, Formulation, const double&);
template CoeffTable<DoubleDouble> coeff_table<DoubleDouble>(int, Formulation, const DoubleDouble&);
template double exactness_residual<double>(const CoeffTable<double>&, int);
template double exactness_residual<DoubleDouble>(const CoeffTable<DoubleDouble>&, int);

} // namespace structural
