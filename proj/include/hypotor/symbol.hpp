#pragma once

#include "hypotor/exact.hpp"
#include "hypotor/intlin.hpp"

#include <optional>
#include <vector>

namespace hypotor {

/// Constant-coefficient operator on the (N+1)-torus: D_t + sum alpha_j D_xj - lambda.
struct OperatorSpec {
    int N = 1;
    std::vector<ExactComplex> alphas;
    ExactComplex lambda;

    void validate() const;
    const BasisPtr& basis() const { return lambda.re.basis(); }
    static OperatorSpec make(std::vector<ExactComplex> alphas, ExactComplex lambda);
};

struct LatticePoint {
    Int tau;
    std::vector<Int> xi;

    Int norm1() const;
    bool operator==(const LatticePoint& o) const { return tau == o.tau && xi == o.xi; }
};
int cmp_lex(const LatticePoint& a, const LatticePoint& b);

/// Symbol value tau + sum alpha_j xi_j - lambda, exact.
ExactComplex symbol_eval(const OperatorSpec& spec, const LatticePoint& pt);

/// Exact zero set for all-rational specs: base point plus homogeneous lattice.
struct ZeroSet {
    bool empty = true;
    LatticePoint base;
    std::vector<LatticePoint> lattice;  // generators of the homogeneous solutions
    bool infinite = false;
};
ZeroSet zero_set_rational(const OperatorSpec& spec);

struct ShellRecord {
    long r = 0;
    RatInterval min_sq;    // |rho|^2 at the argmin (point interval when exact)
    bool exact = false;    // min_sq is exact
    LatticePoint argmin;   // lexicographically least minimizer
    bool is_exact_zero = false;
};

/// Per-shell minima of |rho|^2 for r = 2..r_max over the l1 spheres.
std::vector<ShellRecord> scan_shells(const OperatorSpec& spec, long r_max);

struct WitnessBudget {
    long r_max = 1000;       // exhaustive stage radius
    int cf_depth = 24;       // convergent probes per direction
    int truncation_depth = 8;  // liouville truncation probes per direction
};

struct WitnessCertificate {
    int j = 1;
    LatticePoint point;
    Rat lhs_sq;  // certified upper bound on |rho(point)|^2
    Rat rhs_sq;  // exact (|point|_1)^{-2j}
};

/// Hybrid witness search: liouville truncation probes, convergent probes,
/// then the exhaustive sweep up to budget.r_max. Absence is a valid outcome.
std::optional<WitnessCertificate> find_witness(const OperatorSpec& spec, int j,
                                               const WitnessBudget& budget);

/// Re-derives the certificate inequality from the operator alone.
bool verify_witness(const OperatorSpec& spec, const WitnessCertificate& cert);

struct ExponentFit {
    double C_hat = 0;
    double M_hat = 0;
    long R_used = 0;
    double residual = 0;
    int points_used = 0;
};

/// Log-log least squares over running record minima (exact zeros excluded);
/// throws PreconditionViolation with fewer than 5 record points.
ExponentFit fit_exponent(const std::vector<ShellRecord>& records);

}  // namespace hypotor
