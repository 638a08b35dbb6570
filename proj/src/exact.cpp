#include "hypotor/exact.hpp"

#include <algorithm>

namespace hypotor {

ExactReal::ExactReal(BasisPtr basis, std::vector<Rat> coords)
    : basis_(std::move(basis)), coords_(std::move(coords)) {
    if (coords_.size() != basis_->size() + 1)
        throw PreconditionViolation("exact real: coordinate length mismatch");
}

ExactReal ExactReal::from_rat(BasisPtr basis, Rat value) {
    std::vector<Rat> c(basis->size() + 1, Rat(0));
    c[0] = std::move(value);
    return ExactReal(std::move(basis), std::move(c));
}

ExactReal ExactReal::atom(BasisPtr basis, size_t atom_index, Rat coeff) {
    std::vector<Rat> c(basis->size() + 1, Rat(0));
    c.at(atom_index + 1) = std::move(coeff);
    return ExactReal(std::move(basis), std::move(c));
}

ExactReal ExactReal::liouville(long b, int depth, std::string name) {
    Atom a;
    a.name = name.empty() ? ("liouville" + std::to_string(b)) : std::move(name);
    a.kind = AtomKind::Liouville;
    a.liou_base = b;
    a.liou_depth = depth;
    auto basis = Basis::make({a});
    return atom(basis, 0);
}

static void check_same_basis(const ExactReal& a, const ExactReal& b) {
    if (a.basis() != b.basis())
        throw PreconditionViolation("exact reals over different bases");
}

ExactReal ExactReal::operator+(const ExactReal& o) const {
    check_same_basis(*this, o);
    std::vector<Rat> c(coords_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = coords_[i] + o.coords_[i];
    return ExactReal(basis_, std::move(c));
}

ExactReal ExactReal::operator-(const ExactReal& o) const {
    check_same_basis(*this, o);
    std::vector<Rat> c(coords_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = coords_[i] - o.coords_[i];
    return ExactReal(basis_, std::move(c));
}

ExactReal ExactReal::operator-() const {
    std::vector<Rat> c(coords_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = -coords_[i];
    return ExactReal(basis_, std::move(c));
}

ExactReal ExactReal::scale(const Rat& k) const {
    std::vector<Rat> c(coords_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = coords_[i] * k;
    return ExactReal(basis_, std::move(c));
}

ExactReal ExactReal::add_rat(const Rat& k) const {
    std::vector<Rat> c = coords_;
    c[0] += k;
    return ExactReal(basis_, std::move(c));
}

bool ExactReal::operator==(const ExactReal& o) const {
    check_same_basis(*this, o);
    return coords_ == o.coords_;
}

bool ExactReal::is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rat& r) { return r.is_zero(); });
}

bool ExactReal::is_rational() const {
    for (size_t i = 1; i < coords_.size(); ++i)
        if (!coords_[i].is_zero()) return false;
    return true;
}

std::optional<Rat> ExactReal::as_rational() const {
    if (!is_rational()) return std::nullopt;
    return coords_[0];
}

std::optional<ExactReal> ExactReal::try_mul(const ExactReal& o) const {
    check_same_basis(*this, o);
    if (auto r = o.as_rational()) return scale(*r);
    if (auto r = as_rational()) return o.scale(*r);
    std::vector<Rat> out(coords_.size(), Rat(0));
    out[0] = coords_[0] * o.coords_[0];
    for (size_t i = 1; i < coords_.size(); ++i) {
        if (coords_[i].is_zero()) continue;
        out[i] += coords_[i] * o.coords_[0];
    }
    for (size_t j = 1; j < coords_.size(); ++j) {
        if (o.coords_[j].is_zero()) continue;
        out[j] += coords_[0] * o.coords_[j];
    }
    for (size_t i = 1; i < coords_.size(); ++i) {
        if (coords_[i].is_zero()) continue;
        for (size_t j = 1; j < coords_.size(); ++j) {
            if (o.coords_[j].is_zero()) continue;
            auto prod = basis_->product(i - 1, j - 1);
            if (!prod) return std::nullopt;
            Rat scaled = coords_[i] * o.coords_[j] * prod->factor;
            if (prod->atom)
                out[*prod->atom + 1] += scaled;
            else
                out[0] += scaled;
        }
    }
    return ExactReal(basis_, std::move(out));
}

std::optional<ExactReal> ExactReal::try_invert() const {
    if (auto r = as_rational()) {
        if (r->is_zero()) return std::nullopt;
        return from_rat(basis_, Rat(1) / *r);
    }
    // count irrational support
    std::vector<size_t> support;
    for (size_t i = 1; i < coords_.size(); ++i)
        if (!coords_[i].is_zero()) support.push_back(i - 1);
    if (support.size() != 1) return std::nullopt;
    size_t ai = support[0];
    const Atom& a = basis_->atom(ai);
    const Rat& b = coords_[ai + 1];
    const Rat& c = coords_[0];
    if (a.kind != AtomKind::Sqrt) return std::nullopt;
    Rat d(a.sqrt_arg);
    if (c.is_zero()) {
        // 1/(b*sqrt(d)) = sqrt(d)/(b*d)
        return atom(basis_, ai, Rat(1) / (b * d));
    }
    // 1/(c + b*sqrt(d)) = (c - b*sqrt(d)) / (c^2 - b^2 d); denominator nonzero
    // because sqrt(d) is irrational.
    Rat denom = c * c - b * b * d;
    std::vector<Rat> out(coords_.size(), Rat(0));
    out[0] = c / denom;
    out[ai + 1] = -b / denom;
    return ExactReal(basis_, std::move(out));
}

RatInterval ExactReal::enclosure(const Rat& precision) const {
    if (precision.sign() <= 0) throw PreconditionViolation("enclosure precision must be positive");
    size_t nonzero = 0;
    for (size_t i = 1; i < coords_.size(); ++i)
        if (!coords_[i].is_zero()) ++nonzero;
    RatInterval acc(coords_[0]);
    if (nonzero == 0) return acc;
    Rat share = precision / Rat(static_cast<long>(nonzero) + 1);
    for (size_t i = 1; i < coords_.size(); ++i) {
        if (coords_[i].is_zero()) continue;
        Rat target = share / abs(coords_[i]);
        RatInterval ai = basis_->enclosure(i - 1, target);
        acc = acc + ai.scale(coords_[i]);
    }
    return acc;
}

RatInterval ExactReal::coarse_enclosure() const {
    RatInterval acc(coords_[0]);
    for (size_t i = 1; i < coords_.size(); ++i) {
        if (coords_[i].is_zero()) continue;
        acc = acc + basis_->atom(i - 1).declared.scale(coords_[i]);
    }
    return acc;
}

// Width schedule: squaring doubles the working precision each round, so the
// budget of 64 rounds reaches factorially small scales (liouville tails)
// instead of stalling at a fixed geometric rate.
static Rat next_width(const Rat& width) {
    Rat w = width < Rat(1, 16) ? width : Rat(1, 16);
    return w * w;
}

int ExactReal::sign() const {
    if (is_zero()) return 0;
    if (auto r = as_rational()) return r->sign();
    RatInterval iv = coarse_enclosure();
    Rat width(1, 16);
    for (int round = 0; round <= kRefineBudget; ++round) {
        if (!iv.contains_zero()) return iv.lo.sign() > 0 ? 1 : -1;
        iv = enclosure(width);
        width = next_width(width);
    }
    throw RefinementExhausted("sign certification exhausted refinement budget");
}

double ExactReal::approx() const {
    if (auto r = as_rational()) return to_double(*r);
    RatInterval iv = enclosure(Rat(1, 1000000000));
    return to_double(iv.mid());
}

DioTag ExactReal::tag() const {
    if (is_rational()) return DioTag::BadlyApproximable;  // rationals never reach tag logic
    DioTag worst = DioTag::BadlyApproximable;
    size_t irr = 0;
    bool liou = false, unknown = false, sqrt_only = true;
    for (size_t i = 1; i < coords_.size(); ++i) {
        if (coords_[i].is_zero()) continue;
        ++irr;
        const Atom& a = basis_->atom(i - 1);
        if (a.kind != AtomKind::Sqrt) sqrt_only = false;
        if (a.tag == DioTag::LiouvilleConstructed) liou = true;
        if (a.tag == DioTag::Unknown) unknown = true;
        if (a.tag == DioTag::AlgebraicNonLiouville && worst == DioTag::BadlyApproximable)
            worst = DioTag::AlgebraicNonLiouville;
    }
    if (sqrt_only) return irr == 1 ? worst : DioTag::AlgebraicNonLiouville;
    if (irr == 1) {
        // single non-sqrt atom with rational coefficient: inherits the tag
        // (rational affine images preserve both Liouville and non-Liouville).
        for (size_t i = 1; i < coords_.size(); ++i)
            if (!coords_[i].is_zero()) return basis_->atom(i - 1).tag;
    }
    if (unknown || (liou && irr > 1)) return DioTag::Unknown;
    return liou ? DioTag::LiouvilleConstructed : DioTag::Unknown;
}

ExactComplex::ExactComplex(ExactReal r, ExactReal i) : re(std::move(r)), im(std::move(i)) {
    if (re.basis() != im.basis())
        throw PreconditionViolation("complex parts over different bases");
}

ExactComplex ExactComplex::from_rats(BasisPtr basis, Rat r, Rat i) {
    return {ExactReal::from_rat(basis, std::move(r)), ExactReal::from_rat(basis, std::move(i))};
}

std::optional<ExactReal> ExactComplex::abs_sq_exact() const {
    auto r2 = re.try_square();
    if (!r2) return std::nullopt;
    auto i2 = im.try_square();
    if (!i2) return std::nullopt;
    return *r2 + *i2;
}

RatInterval ExactComplex::abs_sq_interval(const Rat& precision) const {
    RatInterval r = re.enclosure(precision);
    RatInterval i = im.enclosure(precision);
    return r.square() + i.square();
}

int cmp_abs_sq_vs_rat(const ExactComplex& z, const Rat& threshold) {
    if (auto exact = z.abs_sq_exact()) {
        return (*exact - ExactReal::from_rat(z.re.basis(), threshold)).sign();
    }
    if (z.re.is_zero() && z.im.is_zero()) return threshold.sign() > 0 ? -1 : 0;
    Rat width(1, 16);
    for (int round = 0; round <= kRefineBudget; ++round) {
        RatInterval iv = z.abs_sq_interval(width);
        if (iv.certainly_lt(threshold)) return -1;
        if (iv.certainly_gt(threshold)) return 1;
        width = next_width(width);
    }
    throw RefinementExhausted("comparison against threshold straddles after refinement");
}

Int certified_round_nearest(const ExactReal& x) {
    if (auto r = x.as_rational()) return round_nearest(*r);
    Rat width(1, 16);
    for (int round = 0; round <= kRefineBudget; ++round) {
        RatInterval iv = x.enclosure(width);
        Int a = round_nearest(iv.lo), b = round_nearest(iv.hi);
        if (a == b) return a;
        width = next_width(width);
    }
    throw RefinementExhausted("nearest integer not certifiable");
}

int cmp_abs_sq(const ExactComplex& z1, const ExactComplex& z2) {
    auto e1 = z1.abs_sq_exact();
    auto e2 = z2.abs_sq_exact();
    if (e1 && e2) return (*e1 - *e2).sign();
    // structural tie: components equal up to sign
    auto same_abs = [](const ExactReal& a, const ExactReal& b) {
        return a == b || a == -b;
    };
    if (same_abs(z1.re, z2.re) && same_abs(z1.im, z2.im)) return 0;
    Rat width(1, 16);
    for (int round = 0; round <= kRefineBudget; ++round) {
        RatInterval a = z1.abs_sq_interval(width);
        RatInterval b = z2.abs_sq_interval(width);
        if (a.certainly_lt(b)) return -1;
        if (b.certainly_lt(a)) return 1;
        width = next_width(width);
    }
    throw RefinementExhausted("magnitude comparison straddles after refinement");
}

}  // namespace hypotor
