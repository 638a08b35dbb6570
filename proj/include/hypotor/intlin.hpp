#pragma once

#include "hypotor/exact.hpp"

#include <optional>
#include <vector>

namespace hypotor {

using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;  // row-major
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

/// Integer solutions of A x = c: one particular solution plus a lattice basis
/// of the homogeneous solutions (columns). Empty optional when unsolvable.
struct DiophantineSolution {
    IntVec particular;
    std::vector<IntVec> lattice;  // basis vectors of the solution lattice
    bool infinite() const { return !lattice.empty(); }
};
std::optional<DiophantineSolution> solve_linear_diophantine(const IntMat& A, const IntVec& c);

/// Nullspace basis of a rational matrix (fraction-free elimination after
/// clearing denominators). Vectors are scaled to integer entries.
std::vector<RatVec> rational_kernel(const RatMat& M);

/// Exact-real linear system: integer unknowns z with
///   sum_j values[j] * z_j = target   (identity in the exact algebra).
/// One rational equation per basis coordinate, cleared to an integer system.
std::optional<DiophantineSolution> solve_exact_combination(
    const std::vector<ExactReal>& values, const ExactReal& target);

/// Same with complex values: both components constrain the same unknowns.
std::optional<DiophantineSolution> solve_exact_combination_complex(
    const std::vector<ExactComplex>& values, const ExactComplex& target);

/// Basis of {r in Q^C : every entry of M*r has all irrational coordinates
/// zero}. M is R x C of exact reals over one basis.
std::vector<RatVec> rational_solution_space(const std::vector<std::vector<ExactReal>>& M);

/// Canonical solution of p*x + q*y = m with minimal |x|, ties x >= 0.
/// Requires gcd(p,q) | m.
std::optional<std::pair<Int, Int>> canonical_bezout(const Int& p, const Int& q, const Int& m);

}  // namespace hypotor
