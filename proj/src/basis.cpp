#include "hypotor/basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <cstdlib>
#include <numeric>

namespace hypotor {

std::string to_string(DioTag t) {
    switch (t) {
        case DioTag::BadlyApproximable: return "badly-approximable";
        case DioTag::AlgebraicNonLiouville: return "algebraic-non-liouville";
        case DioTag::LiouvilleConstructed: return "liouville-constructed";
        case DioTag::Unknown: return "unknown";
    }
    return "unknown";
}

DioTag dio_tag_from_string(const std::string& s) {
    if (s == "badly-approximable") return DioTag::BadlyApproximable;
    if (s == "algebraic-non-liouville") return DioTag::AlgebraicNonLiouville;
    if (s == "liouville-constructed") return DioTag::LiouvilleConstructed;
    if (s == "unknown") return DioTag::Unknown;
    throw ParseError("unknown diophantine tag: " + s);
}

namespace {

long squarefree_check(long d) {
    if (d < 2) throw PreconditionViolation("sqrt atom argument must be >= 2");
    for (long p = 2; p * p <= d; ++p) {
        if (d % (p * p) == 0) throw PreconditionViolation("sqrt atom argument must be squarefree");
    }
    return d;
}

// Initial sqrt enclosure via integer bracketing then a few Newton steps.
RatInterval sqrt_seed(long d) {
    long r = static_cast<long>(std::sqrt(static_cast<double>(d)));
    while (r * r > d) --r;
    while ((r + 1) * (r + 1) <= d) ++r;
    Rat lo(r), hi(r + 1);
    return {lo, hi};
}

// One Newton contraction for sqrt(d): upper' = (u + d/u)/2 >= sqrt(d),
// lower' = d/upper'. Valid whenever u >= sqrt(d) > 0.
RatInterval sqrt_newton_step(long d, const RatInterval& iv) {
    Rat u = iv.hi;
    Rat up = (u + Rat(d) / u) * Rat(1, 2);
    Rat dn = Rat(d) / up;
    return {dn, up};
}

Rat factorial_pow(long base, int k) {
    // base^{k!}
    unsigned long f = 1;
    for (int i = 2; i <= k; ++i) f *= static_cast<unsigned long>(i);
    return Rat(pow_int(Int(base), f));
}

}  // namespace

namespace {

// working-precision cap in bits; HYPOTOR_PRECISION_BITS overrides
double precision_bit_cap() {
    static const double cap = [] {
        if (const char* env = std::getenv("HYPOTOR_PRECISION_BITS")) {
            double v = std::atof(env);
            if (v >= 64) return v;
        }
        return 16777216.0;  // 2^24
    }();
    return cap;
}

}  // namespace

Rat Basis::liouville_partial_sum(long base, int depth) {
    Rat s(0);
    for (int k = 1; k <= depth; ++k) s += Rat(1) / factorial_pow(base, k);
    return s;
}

Rat Basis::liouville_tail_bound(long base, int depth) {
    return Rat(2) / factorial_pow(base, depth + 1);
}

int Basis::liouville_depth_cap(long base) {
    // Cap (K+1)! * log2(base) at the working-precision bit budget so partial
    // sums stay around a couple of megabytes.
    double budget = precision_bit_cap() / std::log2(static_cast<double>(base));
    double fact = 1.0;
    int k = 1;
    while (fact * (k + 1) <= budget) {
        fact *= (k + 1);
        ++k;
    }
    return k - 1;
}

std::shared_ptr<const Basis> Basis::make(std::vector<Atom> generators) {
    auto b = std::shared_ptr<Basis>(new Basis());
    for (auto& a : generators) {
        if (a.kind == AtomKind::Sqrt) {
            squarefree_check(a.sqrt_arg);
            a.declared = sqrt_seed(a.sqrt_arg);
            if (a.tag == DioTag::Unknown) a.tag = DioTag::BadlyApproximable;
        } else if (a.kind == AtomKind::Liouville) {
            if (a.liou_base < 2) throw PreconditionViolation("liouville base must be >= 2");
            if (a.liou_depth < 1) throw PreconditionViolation("liouville depth must be >= 1");
            Rat s = liouville_partial_sum(a.liou_base, a.liou_depth);
            a.declared = RatInterval(s, s + liouville_tail_bound(a.liou_base, a.liou_depth));
            a.tag = DioTag::LiouvilleConstructed;
        } else {
            if (a.declared.width().sign() <= 0 && !a.declared.is_point())
                throw PreconditionViolation("opaque atom needs an enclosure");
        }
        if (a.name.empty()) throw PreconditionViolation("atom needs a name");
        b->atoms_.push_back(a);
    }
    b->generator_count_ = b->atoms_.size();
    // close sqrt atoms under multiplication
    std::map<long, size_t> by_arg;
    for (size_t i = 0; i < b->atoms_.size(); ++i)
        if (b->atoms_[i].kind == AtomKind::Sqrt) by_arg[b->atoms_[i].sqrt_arg] = i;
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<long> args;
        for (auto& [arg, idx] : by_arg) args.push_back(arg);
        for (long d1 : args)
            for (long d2 : args) {
                if (d1 >= d2) continue;
                long g = std::gcd(d1, d2);
                long prod = (d1 / g) * (d2 / g);
                if (prod > 1 && !by_arg.count(prod)) {
                    Atom derived;
                    derived.name = "sqrt" + std::to_string(prod);
                    derived.kind = AtomKind::Sqrt;
                    derived.sqrt_arg = prod;
                    derived.declared = sqrt_seed(prod);
                    derived.tag = DioTag::BadlyApproximable;
                    by_arg[prod] = b->atoms_.size();
                    b->atoms_.push_back(derived);
                    grew = true;
                }
            }
    }
    return b;
}

std::shared_ptr<const Basis> Basis::make_sqrt(const std::vector<long>& args) {
    std::vector<Atom> gens;
    for (long d : args) {
        Atom a;
        a.name = "sqrt" + std::to_string(d);
        a.kind = AtomKind::Sqrt;
        a.sqrt_arg = d;
        a.declared = sqrt_seed(d);
        a.tag = DioTag::BadlyApproximable;
        gens.push_back(a);
    }
    return make(std::move(gens));
}

std::shared_ptr<const Basis> Basis::rational_only() { return make({}); }

std::optional<size_t> Basis::find(const std::string& name) const {
    for (size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i].name == name) return i;
    return std::nullopt;
}

RatInterval Basis::enclosure(size_t i, const Rat& target_width) const {
    if (target_width.sign() <= 0) throw PreconditionViolation("enclosure width must be positive");
    const Atom& a = atoms_[i];
    switch (a.kind) {
        case AtomKind::Sqrt: {
            // working-precision memory cap per endpoint
            if (log2_rat(target_width) < -precision_bit_cap())
                throw RefinementExhausted("sqrt target width below working-precision cap");
            RatInterval iv = a.declared;
            int rounds = 0;
            while (iv.width() > target_width) {
                if (++rounds > kRefineBudget)
                    throw RefinementExhausted("sqrt refinement budget exhausted for " + a.name);
                iv = sqrt_newton_step(a.sqrt_arg, iv);
                // keep endpoints dyadic; the outward slop is far below both
                // the current width and the requested target
                double cur = -log2_rat(iv.width() > Rat(0) ? iv.width() : target_width);
                double tgt = -log2_rat(target_width);
                int bits = static_cast<int>(std::max({8.0, cur + 16, tgt + 16}));
                iv = iv.round_out(static_cast<unsigned>(bits));
            }
            return iv;
        }
        case AtomKind::Liouville: {
            int depth = a.liou_depth;
            int cap = liouville_depth_cap(a.liou_base);
            while (true) {
                Rat tail = liouville_tail_bound(a.liou_base, depth);
                if (tail <= target_width) {
                    Rat s = liouville_partial_sum(a.liou_base, depth);
                    return {s, s + tail};
                }
                if (depth >= cap)
                    throw RefinementExhausted("liouville deepening cap reached for " + a.name);
                ++depth;
            }
        }
        case AtomKind::Opaque: {
            if (a.declared.width() <= target_width) return a.declared;
            throw RefinementExhausted("opaque atom " + a.name + " cannot be refined");
        }
    }
    throw PreconditionViolation("unreachable atom kind");
}

std::optional<Basis::AtomProduct> Basis::product(size_t i, size_t j) const {
    const Atom& a = atoms_[i];
    const Atom& b = atoms_[j];
    if (a.kind != AtomKind::Sqrt || b.kind != AtomKind::Sqrt) return std::nullopt;
    long g = std::gcd(a.sqrt_arg, b.sqrt_arg);
    long rest = (a.sqrt_arg / g) * (b.sqrt_arg / g);
    if (rest == 1) return AtomProduct{Rat(g), std::nullopt};
    for (size_t k = 0; k < atoms_.size(); ++k)
        if (atoms_[k].kind == AtomKind::Sqrt && atoms_[k].sqrt_arg == rest)
            return AtomProduct{Rat(g), k};
    return std::nullopt;  // closure incomplete (shouldn't happen for make())
}

}  // namespace hypotor
