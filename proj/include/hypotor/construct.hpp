#pragma once

#include "hypotor/symbol.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace hypotor {

/// Finite Fourier series sum_{|k|<=K} c_k e^{ikt} with exact coefficients.
struct TrigPoly {
    std::vector<std::pair<long, ExactComplex>> modes;  // sorted by mode index

    static TrigPoly constant(ExactComplex c0);
    void add_mode(long k, ExactComplex c);
    ExactComplex mode0(const BasisPtr& basis) const;
    const BasisPtr& basis() const;
    bool empty() const { return modes.empty(); }
};

/// D_t + sum c_j(t) D_xj - lambda(t) with t-periodic trig-polynomial data.
struct TubeOperatorSpec {
    int N = 1;
    std::vector<TrigPoly> c;
    TrigPoly lambda;

    void validate() const;
    BasisPtr basis() const;
};

struct Averages {
    std::vector<ExactComplex> c0;
    ExactComplex lambda0;
};
/// Mode-0 Fourier coefficients (exact).
Averages averages(const TubeOperatorSpec& tube);

struct ResonantEntry {
    long n = 0;
    std::vector<Int> eta;
    bool exact = false;   // F_n0 - lambda_0 is exactly an integer
    Int carrier;          // that integer (negated tau), exact entries only
    Rat bound_sq;         // certified upper bound on |1 - e^{-2pi i theta}|^2
    Rat threshold;        // |eta|_1^{-n}
    double bound_log2 = 0;  // log2 of the bound estimate (midpoint), for plots
};

struct ResonantSequence {
    std::vector<ResonantEntry> entries;
    bool complete = false;  // reached n_max
    std::string note;
    bool all_exact() const;
    bool all_nonresonant() const;
};

struct EtaBudget {
    int truncation_depth = 9;
    int cf_depth = 20;
    long ring_max = 64;  // combination search radius for exact-resonance families
};

/// Resonant mode sequence for the averaged operator: either an exact-resonance
/// lattice family (bounds identically zero) or small-divisor entries with
/// |1 - e^{-2pi i [F_n0 - lambda_0]}| < |eta(n)|^{-n} certified. Partial
/// results are returned with complete=false rather than erroring.
ResonantSequence find_eta_sequence(const TubeOperatorSpec& tube, int n_max,
                                   const EtaBudget& budget = {});

struct BumpSpec {
    double center = 0;      // J = [center - half_width, center + half_width]
    double half_width = 0;  // pi/4 by default
};
/// Canonical bump interval of length pi/2 placed as far as possible from the
/// accumulation point of the phase minimizers.
BumpSpec default_bump(double t_accumulation);
double bump_value(const BumpSpec& bump, double t);
/// Bump placement from the sequence itself: estimates the accumulation point
/// of the phase minimizers from the last entry, then applies default_bump.
BumpSpec choose_bump(const TubeOperatorSpec& tube, const ResonantSequence& seq, int grid);

/// One Fourier mode of a constructed solution. The full coefficient function
/// is phase(t) * slow(t) with phase(t) = exp(-i(A(t) - A(t_n))) and
/// A' = F_n - lambda; `full` holds plain samples when the mode is resolvable
/// on the grid, otherwise only the slow factor is meaningful numerically.
struct FourierMode {
    std::vector<Int> eta;
    std::vector<std::pair<long, std::complex<double>>> op_coeffs;  // F_n - lambda modes
    double t_n = 0;
    bool resolvable = false;
    std::vector<std::complex<double>> full;
    std::vector<std::complex<double>> slow;
    std::complex<double> En{0, 0};
    double sup_log2 = 0;   // certified log2 upper bound on sup_t |coefficient|
    double sup_grid = 0;   // grid supremum of |coefficient| (scale-aware)
    double value_at_tn = 0;
};

struct FourierSolution {
    int grid = 256;
    std::string kind;  // "mu" | "f" | "u"
    std::vector<FourierMode> modes;
};

/// Exact-resonance singular solution: P mu = 0 mode-wise with sup |mu-hat| = 1
/// attained at the recorded t_n.
FourierSolution build_homogeneous_singular(const TubeOperatorSpec& tube,
                                           const ResonantSequence& seq, int grid);

struct PairSolutions {
    FourierSolution f, u;
    BumpSpec bump;
    double phi_integral = 0;
    std::vector<double> t_ns;
};
/// Smooth right-hand side f with slowly-growing solution u of P u = f, one
/// mode per resonant entry. Requires every entry non-resonant (E_n != 0).
PairSolutions build_pair(const TubeOperatorSpec& tube, const ResonantSequence& seq,
                         const BumpSpec& bump, int grid);

struct ResidualReport {
    struct PerMode {
        std::vector<Int> eta;
        double residual = 0;       // sup-norm residual after normalization
        double normalization = 0;  // solution scale * (1 + operator scale)
        bool factored = false;     // checked on the slow factor
    };
    std::vector<PerMode> modes;
    double max_residual = 0;
};
/// Mode-wise spectral residual of P sol - target (target omitted: 0).
ResidualReport apply_operator(const TubeOperatorSpec& tube, const FourierSolution& sol,
                              const FourierSolution* target = nullptr);

enum class DecayClass { RapidDecay, SlowGrowth, Indeterminate };
std::string to_string(DecayClass c);
struct SmoothnessDiagnostic {
    DecayClass label = DecayClass::Indeterminate;
    double fitted_rate = 0;  // least-squares slope of log sup vs log |eta|
};
/// Decay/growth classification of sup_t |coefficient| against |eta|_1.
SmoothnessDiagnostic smoothness_diagnostic(const FourierSolution& sol);

/// Exact frame data for the Kronecker search: basis {(1,0), (Re a_k, Im a_k)}
/// and the two linear maps T1, T2 (exactly representable presets only).
struct KroneckerFrame {
    int k = 0;  // 0-based
    std::vector<ExactReal> t1, t2;
    static KroneckerFrame build(const std::vector<ExactComplex>& alphas, int k);
};

struct ApproxTuple {
    Int ell;
    std::vector<Int> m;  // length N-1, skipping index k
    Int n;
    int k = 0;
    Rat dist_sq_hi;  // certified upper bound, < eps^2
};
/// Element of Z + alpha_1 Z + ... + alpha_N Z within eps of z, searched over
/// |m|_1 <= bound with ell, n rounded per frame coordinates; none-within-bound
/// is a valid outcome.
std::optional<ApproxTuple> kronecker_approximate(const std::vector<ExactComplex>& alphas,
                                                 const ExactComplex& z, const Rat& eps,
                                                 long bound);

}  // namespace hypotor
