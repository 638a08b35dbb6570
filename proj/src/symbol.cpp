#include "hypotor/symbol.hpp"

#include "hypotor/cf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hypotor {

void OperatorSpec::validate() const {
    if (N < 1) throw PreconditionViolation("operator: N must be >= 1");
    if (static_cast<int>(alphas.size()) != N)
        throw PreconditionViolation("operator: coefficient count != N");
    const BasisPtr& b = lambda.re.basis();
    for (const auto& a : alphas)
        if (a.re.basis() != b || a.im.basis() != b)
            throw PreconditionViolation("operator: mixed bases");
}

OperatorSpec OperatorSpec::make(std::vector<ExactComplex> alphas, ExactComplex lambda) {
    OperatorSpec s;
    s.N = static_cast<int>(alphas.size());
    s.alphas = std::move(alphas);
    s.lambda = std::move(lambda);
    s.validate();
    return s;
}

Int LatticePoint::norm1() const {
    Int s;
    mpz_abs(s.get_mpz_t(), tau.get_mpz_t());
    for (const auto& x : xi) {
        Int a;
        mpz_abs(a.get_mpz_t(), x.get_mpz_t());
        s += a;
    }
    return s;
}

int cmp_lex(const LatticePoint& a, const LatticePoint& b) {
    if (a.tau != b.tau) return a.tau < b.tau ? -1 : 1;
    for (size_t i = 0; i < a.xi.size(); ++i)
        if (a.xi[i] != b.xi[i]) return a.xi[i] < b.xi[i] ? -1 : 1;
    return 0;
}

ExactComplex symbol_eval(const OperatorSpec& spec, const LatticePoint& pt) {
    if (static_cast<int>(pt.xi.size()) != spec.N)
        throw PreconditionViolation("lattice point dimension mismatch");
    ExactReal re = ExactReal::from_rat(spec.basis(), Rat(pt.tau));
    ExactReal im = ExactReal::from_rat(spec.basis(), Rat(0));
    for (int k = 0; k < spec.N; ++k) {
        re = re + spec.alphas[k].re.scale(Rat(pt.xi[k]));
        im = im + spec.alphas[k].im.scale(Rat(pt.xi[k]));
    }
    re = re - spec.lambda.re;
    im = im - spec.lambda.im;
    return {std::move(re), std::move(im)};
}

ZeroSet zero_set_rational(const OperatorSpec& spec) {
    spec.validate();
    std::vector<Rat> re_coef, im_coef;
    for (const auto& a : spec.alphas) {
        auto r = a.re.as_rational();
        auto i = a.im.as_rational();
        if (!r || !i) throw PreconditionViolation("zero_set_rational: irrational coefficient");
        re_coef.push_back(*r);
        im_coef.push_back(*i);
    }
    auto lr = spec.lambda.re.as_rational();
    auto li = spec.lambda.im.as_rational();
    if (!lr || !li) throw PreconditionViolation("zero_set_rational: irrational perturbation");

    // unknowns (tau, xi_1..xi_N); equations Re rho = 0 and Im rho = 0
    size_t n = static_cast<size_t>(spec.N) + 1;
    RatMat rows;
    RatVec rhs;
    {
        RatVec row(n, Rat(0));
        row[0] = Rat(1);
        for (int k = 0; k < spec.N; ++k) row[static_cast<size_t>(k) + 1] = re_coef[static_cast<size_t>(k)];
        rows.push_back(row);
        rhs.push_back(*lr);
    }
    {
        RatVec row(n, Rat(0));
        for (int k = 0; k < spec.N; ++k) row[static_cast<size_t>(k) + 1] = im_coef[static_cast<size_t>(k)];
        rows.push_back(row);
        rhs.push_back(*li);
    }
    IntMat A;
    IntVec c;
    for (size_t i = 0; i < rows.size(); ++i) {
        Int l(1);
        for (const auto& x : rows[i]) {
            Int g = gcd_int(l, x.den());
            l = l / g * x.den();
        }
        {
            Int g = gcd_int(l, rhs[i].den());
            l = l / g * rhs[i].den();
        }
        IntVec irow(n);
        for (size_t j = 0; j < n; ++j) irow[j] = (rows[i][j] * Rat(l)).num();
        A.push_back(std::move(irow));
        c.push_back((rhs[i] * Rat(l)).num());
    }
    ZeroSet out;
    auto sol = solve_linear_diophantine(A, c);
    if (!sol) return out;
    out.empty = false;
    out.base.tau = sol->particular[0];
    out.base.xi.assign(sol->particular.begin() + 1, sol->particular.end());
    for (const auto& v : sol->lattice) {
        LatticePoint g;
        g.tau = v[0];
        g.xi.assign(v.begin() + 1, v.end());
        out.lattice.push_back(std::move(g));
    }
    out.infinite = !out.lattice.empty();
    return out;
}

namespace {

// Double-interval views of the coefficients for fast screening.
struct CoeffCache {
    std::vector<DInterval> re, im;
    DInterval lre, lim;

    static DInterval safe_view(const ExactReal& x) {
        try {
            return DInterval::from_interval(x.enclosure(Rat(Int(1), Int(1) << 60)));
        } catch (const RefinementExhausted&) {
            return DInterval::from_interval(x.coarse_enclosure());
        }
    }
    explicit CoeffCache(const OperatorSpec& spec) {
        for (const auto& a : spec.alphas) {
            re.push_back(safe_view(a.re));
            im.push_back(safe_view(a.im));
        }
        lre = safe_view(spec.lambda.re);
        lim = safe_view(spec.lambda.im);
    }

    DInterval abs_sq(const LatticePoint& pt) const {
        DInterval r = DInterval::point(mpz_get_d(pt.tau.get_mpz_t()));
        DInterval i = DInterval::point(0.0);
        for (size_t k = 0; k < re.size(); ++k) {
            if (mpz_fits_slong_p(pt.xi[k].get_mpz_t())) {
                long x = mpz_get_si(pt.xi[k].get_mpz_t());
                r = r.add_scaled(re[k], x);
                i = i.add_scaled(im[k], x);
            } else {
                // far out of long range: widen generously, still certified
                double xd = mpz_get_d(pt.xi[k].get_mpz_t());
                DInterval xv = DInterval::widen(std::min(xd * (1 - 1e-9), xd * (1 + 1e-9)) - 1,
                                                std::max(xd * (1 - 1e-9), xd * (1 + 1e-9)) + 1);
                r = r + re[k] * xv;
                i = i + im[k] * xv;
            }
        }
        r = r - lre;
        i = i - lim;
        return r.square() + i.square();
    }
};

// Certified selection of the minimizing candidate (lexicographically least
// among true minimizers). Candidates need not be deduped or sorted.
struct SelectedMin {
    LatticePoint point;
    ExactComplex value;
};
SelectedMin certified_min(const OperatorSpec& spec, std::vector<LatticePoint> candidates,
                          const CoeffCache& cache) {
    if (candidates.empty()) throw PreconditionViolation("empty candidate set");
    std::sort(candidates.begin(), candidates.end(),
              [](const LatticePoint& a, const LatticePoint& b) { return cmp_lex(a, b) < 0; });
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    double best_hi = INFINITY;
    std::vector<DInterval> views;
    views.reserve(candidates.size());
    for (const auto& c : candidates) {
        DInterval v = cache.abs_sq(c);
        views.push_back(v);
        best_hi = std::min(best_hi, v.hi);
    }
    std::optional<SelectedMin> best;
    for (size_t k = 0; k < candidates.size(); ++k) {
        if (views[k].lo > best_hi) continue;
        ExactComplex val = symbol_eval(spec, candidates[k]);
        if (!best) {
            best = SelectedMin{candidates[k], std::move(val)};
            continue;
        }
        if (cmp_abs_sq(val, best->value) < 0) best = SelectedMin{candidates[k], std::move(val)};
    }
    return *best;
}

void append_clamped_window(std::vector<long>& out, double lo, double hi, long r) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return;
    if (hi - lo > 1024) return;  // degenerate vertex; endpoints still cover
    long a = static_cast<long>(std::floor(lo)) - 1;
    long b = static_cast<long>(std::ceil(hi)) + 1;
    for (long z = std::max(0L, a); z <= std::min(r, b); ++z) out.push_back(z);
}

// Shell-minimum candidates for N = 1: per branch (sign of tau, sign of xi)
// |rho|^2 is a convex quadratic in |xi|, so the integer minimizer sits next
// to the real vertex or at a clamp boundary. Exactly degenerate branches
// (both slopes zero) are constant, where the boundary points carry the
// lexicographic minimum; an uncertified near-degenerate vertex falls back to
// full enumeration of the branch.
std::vector<LatticePoint> shell_candidates_1d(const OperatorSpec& spec, const CoeffCache& cache,
                                              long r) {
    std::vector<LatticePoint> cands;
    const DInterval& a = cache.re[0];
    const DInterval& b = cache.im[0];
    for (int se = -1; se <= 1; se += 2)
        for (int sx = -1; sx <= 1; sx += 2) {
            // zeta in [0, r]; tau = se*(r - zeta); xi = sx*zeta
            // Re rho = (sx*a - se)*zeta + (se*r - Re lambda)
            // Im rho = sx*b*zeta - Im lambda
            DInterval A = DInterval::point(sx) * a - DInterval::point(se);
            DInterval B = DInterval::point(static_cast<double>(se) * static_cast<double>(r)) -
                          cache.lre;
            DInterval C = DInterval::point(sx) * b;
            DInterval D = DInterval::point(0.0) - cache.lim;
            DInterval qa = A.square() + C.square();
            DInterval qb = (A * B + C * D) * DInterval::point(2.0);
            std::vector<long> zs = {0, r};
            if (qa.lo > 0) {
                DInterval vertex = (DInterval::point(0.0) - qb) *
                                   DInterval::widen(0.5 / qa.hi, 0.5 / qa.lo);
                append_clamped_window(zs, vertex.lo, vertex.hi, r);
            } else {
                ExactReal a_exact =
                    spec.alphas[0].re.scale(Rat(sx)).add_rat(Rat(-se));
                ExactReal c_exact = spec.alphas[0].im.scale(Rat(sx));
                if (!(a_exact.is_zero() && c_exact.is_zero())) {
                    // leading coefficient positive but below double noise:
                    // enumerate the whole branch rather than miss the dip
                    if (r > 200000)
                        throw RefinementExhausted(
                            "near-degenerate shell branch too large to enumerate");
                    for (long z = 1; z < r; ++z) zs.push_back(z);
                }
            }
            for (long z : zs) {
                LatticePoint pt;
                pt.tau = Int(se * (r - z));
                pt.xi = {Int(sx * z)};
                cands.push_back(std::move(pt));
            }
        }
    return cands;
}

void enumerate_shell(int N, long r, const std::function<void(const LatticePoint&)>& emit) {
    // all xi with |xi|_1 <= r, tau = +-(r - |xi|_1)
    std::vector<long> xi(static_cast<size_t>(N), 0);
    std::function<void(size_t, long)> rec = [&](size_t pos, long budget) {
        if (pos == xi.size()) {
            long used = 0;
            for (long x : xi) used += std::abs(x);
            long s = r - used;
            LatticePoint pt;
            pt.xi.reserve(xi.size());
            for (long x : xi) pt.xi.push_back(Int(x));
            pt.tau = Int(s);
            emit(pt);
            if (s != 0) {
                pt.tau = Int(-s);
                emit(pt);
            }
            return;
        }
        for (long v = -budget; v <= budget; ++v) {
            xi[pos] = v;
            rec(pos + 1, budget - std::abs(v));
        }
    };
    rec(0, r);
}

RatInterval tight_abs_sq(const ExactComplex& z, bool& exact) {
    if (auto e = z.abs_sq_exact()) {
        if (auto r = e->as_rational()) {
            exact = true;
            return RatInterval(*r);
        }
        exact = false;
        return e->enclosure(Rat(Int(1), Int(1) << 80));
    }
    exact = false;
    return z.abs_sq_interval(Rat(Int(1), Int(1) << 80));
}

}  // namespace

std::vector<ShellRecord> scan_shells(const OperatorSpec& spec, long r_max) {
    spec.validate();
    if (r_max < 2) throw PreconditionViolation("scan_shells: r_max must be >= 2");
    CoeffCache cache(spec);
    std::vector<ShellRecord> out;
    out.reserve(static_cast<size_t>(r_max) - 1);
    for (long r = 2; r <= r_max; ++r) {
        std::vector<LatticePoint> cands;
        if (spec.N == 1) {
            cands = shell_candidates_1d(spec, cache, r);
        } else {
            double best_hi = INFINITY;
            enumerate_shell(spec.N, r, [&](const LatticePoint& pt) {
                best_hi = std::min(best_hi, cache.abs_sq(pt).hi);
            });
            enumerate_shell(spec.N, r, [&](const LatticePoint& pt) {
                if (cache.abs_sq(pt).lo <= best_hi) cands.push_back(pt);
            });
        }
        SelectedMin sel = certified_min(spec, std::move(cands), cache);
        ShellRecord rec;
        rec.r = r;
        rec.argmin = sel.point;
        rec.is_exact_zero = sel.value.is_zero();
        if (rec.is_exact_zero) {
            rec.min_sq = RatInterval(Rat(0));
            rec.exact = true;
        } else {
            rec.min_sq = tight_abs_sq(sel.value, rec.exact);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

// Certified upper bound on |z|^2 strictly below rhs, if the comparison can be
// certified at all.
std::optional<Rat> certified_upper_below(const ExactComplex& z, const Rat& rhs) {
    if (auto e = z.abs_sq_exact()) {
        if (auto r = e->as_rational()) return *r < rhs ? std::optional<Rat>(*r) : std::nullopt;
    }
    Rat width(1, 16);
    for (int round = 0; round <= kRefineBudget; ++round) {
        RatInterval iv;
        try {
            iv = z.abs_sq_interval(width);
        } catch (const RefinementExhausted&) {
            return std::nullopt;
        }
        if (iv.hi < rhs) return iv.hi;
        if (iv.lo >= rhs) return std::nullopt;
        Rat w = width < Rat(1, 16) ? width : Rat(1, 16);
        width = w * w;
    }
    return std::nullopt;
}

std::optional<WitnessCertificate> try_certify(const OperatorSpec& spec, int j,
                                              const LatticePoint& pt) {
    Int norm = pt.norm1();
    if (norm <= 1) return std::nullopt;
    Rat rhs = pow_rat(Rat(norm), -2L * j);
    ExactComplex val = symbol_eval(spec, pt);
    auto hi = certified_upper_below(val, rhs);
    if (!hi) return std::nullopt;
    WitnessCertificate cert;
    cert.j = j;
    cert.point = pt;
    cert.lhs_sq = *hi;
    cert.rhs_sq = rhs;
    return cert;
}

struct LiouvilleShape {
    Rat constant;  // u in x = u + c*L
    Rat coeff;     // c
    long base = 0;
};

std::optional<LiouvilleShape> liouville_shape(const ExactReal& x) {
    std::optional<LiouvilleShape> out;
    const auto& coords = x.coords();
    for (size_t i = 1; i < coords.size(); ++i) {
        if (coords[i].is_zero()) continue;
        if (out) return std::nullopt;  // more than one irrational atom
        const Atom& a = x.basis()->atom(i - 1);
        if (a.kind != AtomKind::Liouville) return std::nullopt;
        out = LiouvilleShape{coords[0], coords[i], a.liou_base};
    }
    return out;
}

}  // namespace

std::optional<WitnessCertificate> find_witness(const OperatorSpec& spec, int j,
                                               const WitnessBudget& budget) {
    spec.validate();
    if (j < 1) throw PreconditionViolation("find_witness: j must be >= 1");

    std::vector<std::pair<int, ExactReal>> real_dirs;
    for (int k = 0; k < spec.N; ++k)
        if (spec.alphas[static_cast<size_t>(k)].im.is_zero())
            real_dirs.push_back({k, spec.alphas[static_cast<size_t>(k)].re});

    auto probe_at = [&](int dir, const Int& q) -> std::optional<WitnessCertificate> {
        if (q < 1) return std::nullopt;
        LatticePoint pt;
        pt.xi.assign(static_cast<size_t>(spec.N), Int(0));
        pt.xi[static_cast<size_t>(dir)] = q;
        ExactReal target =
            spec.lambda.re - spec.alphas[static_cast<size_t>(dir)].re.scale(Rat(q));
        try {
            pt.tau = certified_round_nearest(target);
        } catch (const RefinementExhausted&) {
            return std::nullopt;
        }
        return try_certify(spec, j, pt);
    };

    // stage A: liouville truncation points q = lcm(den(u), den(c)*b^{K!})
    for (int depth = 1; depth <= budget.truncation_depth; ++depth) {
        for (auto& [dir, x] : real_dirs) {
            auto shape = liouville_shape(x);
            if (!shape || shape->coeff.is_zero()) continue;
            if (depth > Basis::liouville_depth_cap(shape->base)) continue;
            unsigned long fact = 1;
            for (int i = 2; i <= depth; ++i) fact *= static_cast<unsigned long>(i);
            Int pw = pow_int(Int(shape->base), fact);
            Int dc = shape->coeff.den() * pw;
            Int q = dc / gcd_int(dc, shape->constant.den()) * shape->constant.den();
            if (auto cert = probe_at(dir, q)) return cert;
        }
    }

    // stage B: continued-fraction convergents of each real direction
    for (auto& [dir, x] : real_dirs) {
        ConvergentRun run = convergents(x, budget.cf_depth);
        for (const auto& cv : run.items)
            if (auto cert = probe_at(dir, cv.q)) return cert;
    }

    // stage C: exhaustive sweep over the l1 ball with nearest-tau elimination;
    // any witness has tau within 1 of the real-part minimizer, so the sweep is
    // complete for the ball despite never enumerating tau freely
    CoeffCache cache(spec);
    std::optional<WitnessCertificate> best;
    auto consider = [&](const LatticePoint& pt) {
        Int norm = pt.norm1();
        if (norm <= 1 || norm > budget.r_max) return;
        double rhs_d = std::pow(mpz_get_d(norm.get_mpz_t()), -2.0 * j);
        DInterval v = cache.abs_sq(pt);
        if (v.lo > std::nextafter(rhs_d, INFINITY)) return;
        auto cert = try_certify(spec, j, pt);
        if (!cert) return;
        if (!best) {
            best = cert;
            return;
        }
        Int bn = best->point.norm1();
        if (norm < bn || (norm == bn && cmp_lex(cert->point, best->point) < 0)) best = cert;
    };
    std::vector<long> xi(static_cast<size_t>(spec.N), 0);
    std::function<void(size_t, long)> rec = [&](size_t pos, long remain) {
        if (pos == xi.size()) {
            ExactReal target = spec.lambda.re;
            for (int k = 0; k < spec.N; ++k)
                target =
                    target - spec.alphas[static_cast<size_t>(k)].re.scale(Rat(xi[static_cast<size_t>(k)]));
            RatInterval iv;
            try {
                iv = target.enclosure(Rat(1, 1024));
            } catch (const RefinementExhausted&) {
                iv = target.coarse_enclosure();
            }
            Int lo = floor_int(iv.lo), hi = ceil_int(iv.hi);
            for (Int t = lo; t <= hi; ++t) {
                LatticePoint pt;
                pt.tau = t;
                pt.xi.reserve(xi.size());
                for (long x : xi) pt.xi.push_back(Int(x));
                consider(pt);
            }
            return;
        }
        for (long v = -remain; v <= remain; ++v) {
            xi[pos] = v;
            rec(pos + 1, remain - std::abs(v));
        }
    };
    rec(0, budget.r_max);
    return best;
}

bool verify_witness(const OperatorSpec& spec, const WitnessCertificate& cert) {
    Int norm = cert.point.norm1();
    if (norm <= 1) return false;
    if (cert.rhs_sq != pow_rat(Rat(norm), -2L * cert.j)) return false;
    if (!(cert.lhs_sq < cert.rhs_sq)) return false;
    ExactComplex val = symbol_eval(spec, cert.point);
    return certified_upper_below(val, cert.rhs_sq).has_value();
}

ExponentFit fit_exponent(const std::vector<ShellRecord>& records) {
    // running record minima in the log domain; non-strict so constant minima
    // keep contributing (they legitimately fit a zero exponent)
    std::vector<std::pair<double, double>> pts;  // (ln r, ln min_modulus)
    long first_r = 0;
    double running = INFINITY;
    for (const auto& rec : records) {
        if (rec.is_exact_zero) continue;
        Rat mid = rec.min_sq.mid();
        if (mid.sign() <= 0) continue;
        double ln_min = 0.5 * std::log(2.0) * log2_rat(mid);
        if (ln_min <= running + 1e-12) {
            running = std::min(running, ln_min);
            pts.push_back({std::log(static_cast<double>(rec.r)), ln_min});
            if (first_r == 0) first_r = rec.r;
        }
    }
    if (pts.size() < 5) throw PreconditionViolation("fit_exponent: fewer than 5 record minima");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    double denom = n * sxx - sx * sx;
    double slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
    double intercept = (sy - slope * sx) / n;
    double ss = 0;
    for (auto& [x, y] : pts) {
        double e = y - (slope * x + intercept);
        ss += e * e;
    }
    ExponentFit fit;
    fit.M_hat = -slope;
    fit.C_hat = std::exp(intercept);
    fit.R_used = first_r;
    fit.residual = std::sqrt(ss / n);
    fit.points_used = static_cast<int>(pts.size());
    return fit;
}

}  // namespace hypotor
