#pragma once

#include "hypotor/symbol.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypotor {

struct CoefficientProfile {
    struct Entry {
        bool is_real = false;
        bool re_rational = false;
        bool im_rational = false;
        DioTag re_tag = DioTag::Unknown;
        DioTag im_tag = DioTag::Unknown;
    };
    std::vector<Entry> entries;
    std::vector<int> nonreal_indices;
    /// Im alpha_{k1} / Im alpha_{k2} for the first two nonreal indices, when
    /// the imaginary parts are rationally dependent (irreducible, q > 0).
    std::optional<Rat> im_ratio;

    bool all_real() const { return nonreal_indices.empty(); }
};

CoefficientProfile profile_coefficients(const OperatorSpec& spec);

enum class MnKind {
    EmptySet,
    DiscreteLattice,
    DenseGdeltaReal,
    DenseGdeltaComplex,
    LinesWithDenseTrace,
    LinesWithDiscreteTrace,
    Undetermined,
};
std::string to_string(MnKind k);

enum class GhStatus { GH, NotGH, Undetermined };
std::string to_string(GhStatus s);

struct LineFamily {
    enum class Kind { HorizontalT, HorizontalEll };
    Kind kind = Kind::HorizontalT;
    ExactReal spacing;  // > 0 certified
    std::string description;
};

struct GcdCertificate {
    Int Q;
    std::vector<Int> scaled_numerators;  // p_j * Q_j
    Int divisor;                         // gcd(Q, p_1 Q_1, ..., p_N Q_N)
};

struct DensityCertificate {
    int k = 0;  // 1-based index with Im alpha_k != 0
    std::vector<std::vector<ExactReal>> A;  // 2 x (N-1)
    bool dense = false;
    std::vector<Rat> nondensity_r;  // nonzero rational certificate when !dense
};

struct MnStructure {
    MnKind kind = MnKind::Undetermined;
    std::optional<Rat> step;               // DiscreteLattice / LinesWithDiscreteTrace
    std::optional<LineFamily> lines;       // Lines* kinds
    std::string reason;                    // Undetermined: the missing fact
};

struct ClassificationReport {
    MnStructure mn;  // structure of M_N in C
    MnStructure nn;  // structure of N_N in R
    GhStatus base_gh = GhStatus::Undetermined;
    std::string base_gh_reason;
    std::optional<GcdCertificate> gcd_certificate;
    std::optional<DensityCertificate> density_certificate;
    std::vector<WitnessCertificate> witnesses;
};

/// Step of the rational-coefficient lattice: gcd(Q, p_1 Q_1, ..., p_N Q_N)/Q
/// with Q = q_1...q_N, Q_j = Q/q_j. Precondition: all alphas real rational.
Rat lattice_step_rational(const OperatorSpec& spec, GcdCertificate* cert = nullptr);

/// Kronecker density test with distinguished index k (0-based, Im != 0).
DensityCertificate kronecker_density_test(const OperatorSpec& spec, int k);

/// lambda = m + sum n_j alpha_j with |m|, |n_j| <= bound, if such integers
/// exist in the searched combination window.
std::optional<std::vector<Int>> lambda_lattice_membership(const OperatorSpec& spec, long bound);

/// Full case dispatch for the structures of M_N and N_N.
ClassificationReport classify_MN(const OperatorSpec& spec);

/// GH status of the unperturbed operator (lambda = 0 is substituted).
GhStatus base_gh_status(const OperatorSpec& spec, std::string* reason = nullptr);

/// theta_m(x+iy) = (Re alpha_2 / Im alpha_2) m - x on the line Im z = m Im alpha_2
/// (general: the unique nonreal coefficient). z must lie on the line.
ExactReal theta_map(const OperatorSpec& spec, long m, const ExactComplex& z);

/// psi_m on the ell-family for the two-nonreal case; records its canonical
/// base solution of p xi + q eta = m when out params are given.
ExactReal psi_map(const OperatorSpec& spec, long m, const ExactComplex& z,
                  Int* xi_m = nullptr, Int* eta_m = nullptr);

}  // namespace hypotor
