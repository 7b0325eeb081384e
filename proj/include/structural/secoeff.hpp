#pragma once

// Structural equations: linear relations between values Z, first
// derivatives D and (optionally) second derivatives S on R+1 equally spaced
// nodes, exact on low-degree polynomials. They are obtained as a kernel
// basis of a monomial exactness matrix on the unit grid and turned into
// the explicit update tables used by the block solver.

#include "structural/dense.hpp"
#include "structural/double_double.hpp"
#include "structural/scalar.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace structural {

enum class Formulation { ZD, ZDS };

inline constexpr int kMaxBlockSize = 12;

// Number of derivative levels carried per node: 2 for ZD, 3 for ZDS.
int derivative_levels(Formulation f);

// Highest polynomial degree the retained exactness rows force to be
// reproduced: S(R+1)-R-1, i.e. R+1 for ZD and 2R+2 for ZDS.
int enforced_degree(Formulation f, int R);

std::string to_string(Formulation f);
Formulation parse_formulation(const std::string& name);

// Orthonormal kernel vectors on the unit grid. Entry layout of each vector
// is s-major: index s*(R+1) + r for node r and derivative order s.
struct RawBasis {
    Formulation formulation = Formulation::ZD;
    int R = 0;
    std::vector<std::vector<DoubleDouble>> vectors;

    int levels() const { return derivative_levels(formulation); }
    // m is 0-based here.
    const DoubleDouble& a(int m, int r, int s) const { return vectors[m][s * (R + 1) + r]; }
};

template <Real T>
struct CoeffTable {
    Formulation formulation = Formulation::ZD;
    int R = 0;
    T dt = T(1.0);
    Matrix<T> Bd;
    Matrix<T> Bs; // empty for ZD
    std::vector<T> bz;
    std::vector<T> bd;
    std::vector<T> bs; // empty for ZD
    double condition_Az = 0.0;

    bool has_second() const { return formulation == Formulation::ZDS; }
};

// Full S(R+1) x S(R+1) matrix: row l holds the s-th derivative of t^l at
// node r in column s*(R+1)+r.
template <Real T>
Matrix<T> build_exactness_matrix(int R, Formulation f);

// Kernel of the first S(R+1)-R rows, computed in double-double and cached.
// Throws ConfigError for R outside [1, 12], InternalError on rank loss.
const RawBasis& kernel_basis(int R, Formulation f);

// Same computation, bypassing the cache.
RawBasis compute_kernel_basis(int R, Formulation f);

// Solve the basis for the Z block and rescale to step dt.
// Throws ConfigError if A_z is singular or its condition exceeds 1e12.
template <Real T>
CoeffTable<T> assemble_tables(const RawBasis& basis, const T& dt);

// Cached unit-grid tables for (R, f), rescaled to dt.
template <Real T>
CoeffTable<T> coeff_table(int R, Formulation f, const T& dt);

// Worst normalised residual of the table's equations applied to t^degree
// sampled on the grid 0, dt, ..., R dt.
template <Real T>
double exactness_residual(const CoeffTable<T>& table, int degree);

// CSV rows "formulation,R,m,r,s,value" for the raw basis (m 1-based).
void write_basis_csv(std::ostream& os, const RawBasis& basis, bool header = true);

} // namespace structural
