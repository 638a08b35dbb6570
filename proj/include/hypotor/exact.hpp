#pragma once

#include "hypotor/basis.hpp"

#include <optional>
#include <vector>

namespace hypotor {

/// Real number as rational coordinates over {1} + basis atoms. Equality is
/// decided by coordinates alone (under the basis independence assertion);
/// enclosures are only used for ordering and numeric output.
class ExactReal {
  public:
    ExactReal() = default;
    ExactReal(BasisPtr basis, std::vector<Rat> coords);
    static ExactReal from_rat(BasisPtr basis, Rat value);
    static ExactReal atom(BasisPtr basis, size_t atom_index, Rat coeff = Rat(1));
    /// Fresh liouville-tagged symbol sum_{k>=1} b^{-k!} appended to a new basis.
    static ExactReal liouville(long b, int depth, std::string name = "");

    const BasisPtr& basis() const { return basis_; }
    const std::vector<Rat>& coords() const { return coords_; }
    const Rat& constant() const { return coords_[0]; }

    bool same_basis(const ExactReal& o) const { return basis_ == o.basis_; }

    ExactReal operator+(const ExactReal& o) const;
    ExactReal operator-(const ExactReal& o) const;
    ExactReal operator-() const;
    ExactReal scale(const Rat& c) const;
    ExactReal add_rat(const Rat& c) const;

    bool operator==(const ExactReal& o) const;
    bool operator!=(const ExactReal& o) const { return !(*this == o); }

    bool is_zero() const;
    bool is_rational() const;
    std::optional<Rat> as_rational() const;

    /// Exact product when it stays inside the algebra (either factor rational,
    /// or all irrational coordinates on multiplication-closed sqrt atoms).
    std::optional<ExactReal> try_mul(const ExactReal& o) const;
    std::optional<ExactReal> try_square() const { return try_mul(*this); }
    /// Exact reciprocal for the representable shapes: rational, q*atom,
    /// a + b*sqrt(d). Returns nothing otherwise (no general field arithmetic).
    std::optional<ExactReal> try_invert() const;

    /// Certified enclosure of width <= precision (adaptive atom refinement).
    RatInterval enclosure(const Rat& precision) const;
    /// Best certified enclosure reachable without throwing; starts from the
    /// declared atom enclosures.
    RatInterval coarse_enclosure() const;

    /// Exact sign: 0 iff all coordinates are zero; otherwise refines until
    /// the enclosure separates from zero (throws RefinementExhausted only if
    /// the basis genuinely cannot be refined that far).
    int sign() const;

    double approx() const;

    /// Diophantine quality derivable from the coordinate support.
    DioTag tag() const;

  private:
    BasisPtr basis_;
    std::vector<Rat> coords_;
};

struct ExactComplex {
    ExactReal re, im;

    ExactComplex() = default;
    ExactComplex(ExactReal r, ExactReal i);
    static ExactComplex from_rats(BasisPtr basis, Rat re, Rat im);

    ExactComplex operator+(const ExactComplex& o) const { return {re + o.re, im + o.im}; }
    ExactComplex operator-(const ExactComplex& o) const { return {re - o.re, im - o.im}; }
    ExactComplex operator-() const { return {-re, -im}; }
    ExactComplex scale(const Rat& c) const { return {re.scale(c), im.scale(c)}; }
    bool operator==(const ExactComplex& o) const { return re == o.re && im == o.im; }
    bool operator!=(const ExactComplex& o) const { return !(*this == o); }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }
    std::optional<ExactReal> abs_sq_exact() const;
    RatInterval abs_sq_interval(const Rat& precision) const;
};

/// |z|^2 compared against an exact rational threshold: -1 below, 0 equal,
/// +1 above. Exact when the square stays in the algebra; otherwise refines.
int cmp_abs_sq_vs_rat(const ExactComplex& z, const Rat& threshold);

/// Certified nearest integer (halves round down); refines until the rounding
/// is unambiguous.
Int certified_round_nearest(const ExactReal& x);

/// Ordering of |z1|^2 vs |z2|^2 with certified refinement. Equal magnitudes
/// are recognized exactly when components match up to sign; otherwise ties
/// exhaust refinement honestly.
int cmp_abs_sq(const ExactComplex& z1, const ExactComplex& z2);

}  // namespace hypotor
