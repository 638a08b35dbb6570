#pragma once

#include "hypotor/interval.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hypotor {

enum class DioTag {
    BadlyApproximable,
    AlgebraicNonLiouville,
    LiouvilleConstructed,
    Unknown,
};

std::string to_string(DioTag t);
DioTag dio_tag_from_string(const std::string& s);

enum class AtomKind { Sqrt, Liouville, Opaque };

/// One irrational generator. {1} together with all atoms of a basis is
/// asserted (not proved) to be Q-linearly independent.
struct Atom {
    std::string name;
    AtomKind kind = AtomKind::Opaque;
    // Sqrt: value sqrt(sqrt_arg), sqrt_arg squarefree >= 2.
    long sqrt_arg = 0;
    // Liouville: value sum_{k>=1} base^{-k!}; declared truncation depth.
    long liou_base = 0;
    int liou_depth = 0;
    RatInterval declared;  // certified initial enclosure
    DioTag tag = DioTag::Unknown;
};

/// Immutable, shared. Sqrt generators are closed under multiplication by
/// appending derived sqrt atoms (e.g. {sqrt2, sqrt3} gains sqrt6), which is
/// what keeps |symbol|^2 exactly representable for the shipped presets.
class Basis {
  public:
    static std::shared_ptr<const Basis> make(std::vector<Atom> generators);
    /// Shorthand for sqrt presets: make_sqrt({2,3}) -> {sqrt2, sqrt3, sqrt6}.
    static std::shared_ptr<const Basis> make_sqrt(const std::vector<long>& args);
    static std::shared_ptr<const Basis> rational_only();

    size_t size() const { return atoms_.size(); }
    size_t generator_count() const { return generator_count_; }
    const Atom& atom(size_t i) const { return atoms_[i]; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::optional<size_t> find(const std::string& name) const;

    /// Certified enclosure of atom i with width <= target. Pure: recomputes
    /// rather than mutating shared state. Throws RefinementExhausted when the
    /// atom kind cannot reach the target (opaque always, liouville past the
    /// deepening cap).
    RatInterval enclosure(size_t i, const Rat& target_width) const;

    /// Product of atoms i and j as (rational factor, optional atom index);
    /// nullopt result means the product is rational = factor. Returns nothing
    /// when the product leaves the algebra (liouville/opaque operands).
    struct AtomProduct {
        Rat factor;
        std::optional<size_t> atom;
    };
    std::optional<AtomProduct> product(size_t i, size_t j) const;

    /// Liouville partial sum S_K = sum_{k=1..K} base^{-k!} (exact).
    static Rat liouville_partial_sum(long base, int depth);
    /// Certified tail bound: remainder after S_K is < 2*base^{-(K+1)!}.
    static Rat liouville_tail_bound(long base, int depth);
    /// Deepest admissible truncation (memory cap on (K+1)! * log2(base)).
    static int liouville_depth_cap(long base);

  private:
    Basis() = default;
    std::vector<Atom> atoms_;
    size_t generator_count_ = 0;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Max refinement rounds before RefinementExhausted (spec'd budget).
inline constexpr int kRefineBudget = 64;

}  // namespace hypotor
