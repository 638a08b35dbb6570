#include "hypotor/classify.hpp"

#include <algorithm>

namespace hypotor {

std::string to_string(MnKind k) {
    switch (k) {
        case MnKind::EmptySet: return "empty";
        case MnKind::DiscreteLattice: return "discrete-lattice";
        case MnKind::DenseGdeltaReal: return "dense-gdelta-real";
        case MnKind::DenseGdeltaComplex: return "dense-gdelta-complex";
        case MnKind::LinesWithDenseTrace: return "lines-dense-trace";
        case MnKind::LinesWithDiscreteTrace: return "lines-discrete-trace";
        case MnKind::Undetermined: return "undetermined";
    }
    return "undetermined";
}

std::string to_string(GhStatus s) {
    switch (s) {
        case GhStatus::GH: return "GH";
        case GhStatus::NotGH: return "not-GH";
        case GhStatus::Undetermined: return "undetermined";
    }
    return "undetermined";
}

CoefficientProfile profile_coefficients(const OperatorSpec& spec) {
    spec.validate();
    CoefficientProfile prof;
    for (int k = 0; k < spec.N; ++k) {
        const auto& a = spec.alphas[static_cast<size_t>(k)];
        CoefficientProfile::Entry e;
        e.is_real = a.im.is_zero();
        e.re_rational = a.re.is_rational();
        e.im_rational = a.im.is_rational();
        if (!e.re_rational) e.re_tag = a.re.tag();
        if (!e.im_rational) e.im_tag = a.im.tag();
        prof.entries.push_back(e);
        if (!e.is_real) prof.nonreal_indices.push_back(k);
    }
    if (prof.nonreal_indices.size() >= 2) {
        const ExactReal& num = spec.alphas[static_cast<size_t>(prof.nonreal_indices[0])].im;
        const ExactReal& den = spec.alphas[static_cast<size_t>(prof.nonreal_indices[1])].im;
        // rationally dependent iff the coordinate vectors are parallel
        std::optional<Rat> t;
        for (size_t i = 0; i < den.coords().size() && !t; ++i)
            if (!den.coords()[i].is_zero()) t = num.coords()[i] / den.coords()[i];
        if (t && num == den.scale(*t)) prof.im_ratio = *t;
    }
    return prof;
}

Rat lattice_step_rational(const OperatorSpec& spec, GcdCertificate* cert) {
    spec.validate();
    std::vector<Rat> vals;
    for (const auto& a : spec.alphas) {
        if (!a.im.is_zero()) throw PreconditionViolation("lattice step: nonreal coefficient");
        auto r = a.re.as_rational();
        if (!r) throw PreconditionViolation("lattice step: irrational coefficient");
        vals.push_back(*r);
    }
    Int Q(1);
    for (const auto& v : vals) Q *= v.den();
    Int d = Q;
    std::vector<Int> scaled;
    for (const auto& v : vals) {
        Int Qj = Q / v.den();
        Int pQ = v.num() * Qj;
        scaled.push_back(pQ);
        d = gcd_int(d, pQ);
    }
    if (cert) {
        cert->Q = Q;
        cert->scaled_numerators = scaled;
        cert->divisor = d;
    }
    return Rat(d, Q);
}

namespace {

ExactReal exact_mul_or_throw(const ExactReal& a, const ExactReal& b) {
    auto p = a.try_mul(b);
    if (!p) throw AlgebraUnrepresentable("product leaves the exact algebra");
    return *p;
}

ExactReal abs_exact(const ExactReal& x) { return x.sign() < 0 ? -x : x; }

std::optional<DioTag> ratio_tag(const ExactReal& num, const ExactReal& den) {
    auto inv = den.try_invert();
    if (!inv) return std::nullopt;
    auto prod = num.try_mul(*inv);
    if (!prod) return std::nullopt;
    if (prod->is_rational()) return std::nullopt;  // callers handle rational separately
    return prod->tag();
}

OperatorSpec sub_spec(const OperatorSpec& spec, const std::vector<ExactComplex>& alphas) {
    return OperatorSpec::make(alphas, ExactComplex::from_rats(spec.basis(), Rat(0), Rat(0)));
}

}  // namespace

DensityCertificate kronecker_density_test(const OperatorSpec& spec, int k) {
    spec.validate();
    if (spec.N < 2) throw PreconditionViolation("kronecker test needs N >= 2");
    if (k < 0 || k >= spec.N) throw PreconditionViolation("kronecker test: bad index");
    const ExactComplex& ak = spec.alphas[static_cast<size_t>(k)];
    if (ak.im.is_zero()) throw PreconditionViolation("kronecker test: Im alpha_k = 0");

    DensityCertificate cert;
    cert.k = k + 1;
    // A is 2 x (N-1): a_1j = Re a_j Im a_k - Re a_k Im a_j, a_2j = Im a_j
    std::vector<ExactReal> row1, row2;
    for (int j = 0; j < spec.N; ++j) {
        if (j == k) continue;
        const ExactComplex& aj = spec.alphas[static_cast<size_t>(j)];
        ExactReal a1 = exact_mul_or_throw(aj.re, ak.im) - exact_mul_or_throw(ak.re, aj.im);
        row1.push_back(a1);
        row2.push_back(aj.im);
    }
    cert.A = {row1, row2};

    // {r in Q^2 : Im a_k^{-1} A^T r in Q^{N-1}} == {0}?  Division-free form:
    // A^T r = s * Im a_k for some rational s, solved coordinate-wise with the
    // s_j as extra unknowns, then projected back onto (r1, r2).
    size_t nm1 = row1.size();
    size_t cols = 2 + nm1;
    size_t coord_dim = ak.im.coords().size();
    RatMat eqs;
    for (size_t j = 0; j < nm1; ++j) {
        for (size_t beta = 0; beta < coord_dim; ++beta) {
            RatVec eq(cols, Rat(0));
            eq[0] = row1[j].coords()[beta];
            eq[1] = row2[j].coords()[beta];
            eq[2 + j] = -ak.im.coords()[beta];
            bool nonzero = !eq[0].is_zero() || !eq[1].is_zero() || !eq[2 + j].is_zero();
            if (nonzero) eqs.push_back(std::move(eq));
        }
    }
    cert.dense = true;
    if (!eqs.empty()) {
        auto kernel = rational_kernel(eqs);
        for (const auto& v : kernel) {
            if (v[0].is_zero() && v[1].is_zero()) continue;
            cert.dense = false;
            Int g = gcd_int(v[0].num(), v[1].num());
            if (g == 0) g = 1;
            cert.nondensity_r = {v[0] / Rat(g), v[1] / Rat(g)};
            break;
        }
    } else {
        // no constraints at all: every r qualifies, certainly not just {0}
        cert.dense = false;
        cert.nondensity_r = {Rat(1), Rat(0)};
    }
    return cert;
}

std::optional<std::vector<Int>> lambda_lattice_membership(const OperatorSpec& spec, long bound) {
    spec.validate();
    std::vector<ExactComplex> values;
    values.push_back(ExactComplex::from_rats(spec.basis(), Rat(1), Rat(0)));
    for (const auto& a : spec.alphas) values.push_back(a);
    auto sol = solve_exact_combination_complex(values, spec.lambda);
    if (!sol) return std::nullopt;
    size_t n = sol->particular.size();
    // size-reduce the particular solution against the homogeneous lattice so
    // the returned combination is the small canonical representative
    bool changed = true;
    for (int pass = 0; pass < 16 && changed; ++pass) {
        changed = false;
        for (const auto& v : sol->lattice) {
            Int dot(0), nrm(0);
            for (size_t i = 0; i < n; ++i) {
                dot += sol->particular[i] * v[i];
                nrm += v[i] * v[i];
            }
            if (nrm == 0) continue;
            Int t = round_nearest(Rat(dot, nrm));
            if (t == 0) continue;
            for (size_t i = 0; i < n; ++i) sol->particular[i] -= t * v[i];
            changed = true;
        }
    }
    auto within = [&](const IntVec& v) {
        for (const auto& x : v) {
            Int a;
            mpz_abs(a.get_mpz_t(), x.get_mpz_t());
            if (a > bound) return false;
        }
        return true;
    };
    if (sol->lattice.empty()) {
        if (within(sol->particular)) return sol->particular;
        return std::nullopt;
    }
    // search combination coefficients by increasing magnitude so the small
    // canonical representative is found first
    size_t dim = sol->lattice.size();
    if (dim > 2) dim = 2;  // cap the search dimensions; beyond is none-within-bound
    std::vector<long> order = {0};
    for (long v = 1; v <= bound; ++v) {
        order.push_back(-v);
        order.push_back(v);
    }
    std::vector<long> c(dim, 0);
    std::optional<IntVec> found;
    std::function<void(size_t)> rec = [&](size_t pos) {
        if (found) return;
        if (pos == dim) {
            IntVec cand = sol->particular;
            for (size_t d = 0; d < dim; ++d)
                for (size_t i = 0; i < n; ++i) cand[i] += Int(c[d]) * sol->lattice[d][i];
            if (within(cand)) found = cand;
            return;
        }
        for (long v : order) {
            c[pos] = v;
            rec(pos + 1);
            if (found) return;
        }
    };
    rec(0);
    return found;
}

GhStatus base_gh_status(const OperatorSpec& spec, std::string* reason) {
    OperatorSpec spec0 = spec;
    spec0.lambda = ExactComplex::from_rats(spec.basis(), Rat(0), Rat(0));
    spec0.validate();
    auto say = [&](const std::string& s) {
        if (reason) *reason = s;
    };
    CoefficientProfile prof = profile_coefficients(spec0);

    for (int k = 0; k < spec0.N; ++k) {
        const auto& e = prof.entries[static_cast<size_t>(k)];
        if (e.is_real && e.re_rational) {
            say("alpha_" + std::to_string(k + 1) + " is real rational");
            return GhStatus::NotGH;
        }
    }
    if (spec0.N == 1) {
        if (!prof.nonreal_indices.empty()) {
            say("alpha is nonreal (elliptic)");
            return GhStatus::GH;
        }
        DioTag t = spec0.alphas[0].re.tag();
        if (t == DioTag::BadlyApproximable || t == DioTag::AlgebraicNonLiouville) {
            say("alpha real irrational with non-liouville tag");
            return GhStatus::GH;
        }
        if (t == DioTag::LiouvilleConstructed) {
            say("alpha is a constructed liouville number");
            return GhStatus::NotGH;
        }
        say("diophantine type of alpha unknown");
        return GhStatus::Undetermined;
    }
    if (prof.nonreal_indices.size() == 1) {
        // points with xi_k = 0 decide; recurse on the real reduction
        std::vector<ExactComplex> rest;
        for (int j = 0; j < spec0.N; ++j)
            if (j != prof.nonreal_indices[0]) rest.push_back(spec0.alphas[static_cast<size_t>(j)]);
        return base_gh_status(sub_spec(spec0, rest), reason);
    }
    if (prof.all_real()) {
        say("simultaneous diophantine type of several real irrationals is not derivable from tags");
        return GhStatus::Undetermined;
    }
    if (prof.nonreal_indices.size() == 2) {
        int k1 = prof.nonreal_indices[0], k2 = prof.nonreal_indices[1];
        const ExactReal& im1 = spec0.alphas[static_cast<size_t>(k1)].im;
        const ExactReal& im2 = spec0.alphas[static_cast<size_t>(k2)].im;
        std::vector<ExactComplex> rest;
        for (int j = 0; j < spec0.N; ++j)
            if (j != k1 && j != k2) rest.push_back(spec0.alphas[static_cast<size_t>(j)]);
        if (prof.im_ratio) {
            // reduce along the resonant direction (q, -p)
            Rat p = Rat(prof.im_ratio->num());
            Rat q = Rat(prof.im_ratio->den());
            ExactReal v = spec0.alphas[static_cast<size_t>(k1)].re.scale(q) -
                          spec0.alphas[static_cast<size_t>(k2)].re.scale(p);
            std::vector<ExactComplex> reduced;
            reduced.push_back(
                {v, ExactReal::from_rat(spec0.basis(), Rat(0))});
            for (auto& a : rest) reduced.push_back(a);
            return base_gh_status(sub_spec(spec0, reduced), reason);
        }
        auto rt = ratio_tag(im1, im2);
        if (rt && (*rt == DioTag::BadlyApproximable || *rt == DioTag::AlgebraicNonLiouville)) {
            // imaginary pair gives a polynomial bound off its zero set
            if (rest.empty()) {
                say("Im ratio irrational non-liouville");
                return GhStatus::GH;
            }
            std::string sub;
            GhStatus s = base_gh_status(sub_spec(spec0, rest), &sub);
            say("Im ratio non-liouville; reduced to real part: " + sub);
            return s;
        }
        if (rt && *rt == DioTag::LiouvilleConstructed) {
            // witness family decides; simultaneous (liouville-vector) facts are
            // not derivable from the ratio tag alone
            WitnessBudget budget;
            budget.r_max = 2000;
            bool all = true;
            for (int j = 1; j <= 3 && all; ++j)
                all = find_witness(spec0, j, budget).has_value();
            if (all) {
                say("liouville Im ratio with certified witness family (j = 1..3)");
                return GhStatus::NotGH;
            }
            say("liouville Im ratio; no witness family within budget "
                "(liouville-vector status unknown)");
            return GhStatus::Undetermined;
        }
        say("diophantine type of Im alpha ratio unknown");
        return GhStatus::Undetermined;
    }
    say("no GH criterion for three or more nonreal coefficients");
    return GhStatus::Undetermined;
}

ClassificationReport classify_MN(const OperatorSpec& spec) {
    spec.validate();
    ClassificationReport rep;
    rep.base_gh = base_gh_status(spec, &rep.base_gh_reason);
    CoefficientProfile prof = profile_coefficients(spec);
    const BasisPtr& basis = spec.basis();

    auto discrete = [&](const Rat& step) {
        MnStructure s;
        s.kind = MnKind::DiscreteLattice;
        s.step = step;
        return s;
    };
    auto undet = [&](const std::string& why) {
        MnStructure s;
        s.kind = MnKind::Undetermined;
        s.reason = why;
        return s;
    };

    if (spec.N == 1) {
        if (!prof.nonreal_indices.empty()) {
            rep.mn.kind = MnKind::EmptySet;
            rep.nn.kind = MnKind::EmptySet;
            return rep;
        }
        if (prof.entries[0].re_rational) {
            GcdCertificate cert;
            Rat step = lattice_step_rational(spec, &cert);
            rep.gcd_certificate = cert;
            rep.mn = discrete(step);
            rep.nn = discrete(step);
            return rep;
        }
        rep.mn.kind = MnKind::DenseGdeltaReal;
        rep.nn.kind = MnKind::DenseGdeltaReal;
        return rep;
    }

    if (prof.all_real()) {
        bool all_rational = true;
        for (auto& e : prof.entries) all_rational = all_rational && e.re_rational;
        if (all_rational) {
            GcdCertificate cert;
            Rat step = lattice_step_rational(spec, &cert);
            rep.gcd_certificate = cert;
            rep.mn = discrete(step);
            rep.nn = discrete(step);
        } else {
            rep.mn.kind = MnKind::DenseGdeltaReal;
            rep.nn.kind = MnKind::DenseGdeltaReal;
        }
        return rep;
    }

    if (prof.nonreal_indices.size() == 1) {
        int k = prof.nonreal_indices[0];
        LineFamily fam;
        fam.kind = LineFamily::Kind::HorizontalT;
        fam.spacing = abs_exact(spec.alphas[static_cast<size_t>(k)].im);
        fam.description = "Im z in (Im alpha_" + std::to_string(k + 1) + ") * Z";
        std::vector<ExactComplex> rest;
        bool rest_rational = true;
        for (int j = 0; j < spec.N; ++j) {
            if (j == k) continue;
            rest.push_back(spec.alphas[static_cast<size_t>(j)]);
            rest_rational = rest_rational && prof.entries[static_cast<size_t>(j)].re_rational;
        }
        if (rest_rational) {
            GcdCertificate cert;
            Rat step = lattice_step_rational(sub_spec(spec, rest), &cert);
            rep.gcd_certificate = cert;
            rep.mn.kind = MnKind::LinesWithDiscreteTrace;
            rep.mn.step = step;
            rep.mn.lines = fam;
            rep.nn = discrete(step);
        } else {
            rep.mn.kind = MnKind::LinesWithDenseTrace;
            rep.mn.lines = fam;
            rep.nn.kind = MnKind::DenseGdeltaReal;
        }
        return rep;
    }

    bool exactly_two = prof.nonreal_indices.size() == 2;
    if (exactly_two && prof.im_ratio) {
        int k1 = prof.nonreal_indices[0], k2 = prof.nonreal_indices[1];
        Rat p = Rat(prof.im_ratio->num());
        Rat q = Rat(prof.im_ratio->den());
        ExactReal v = spec.alphas[static_cast<size_t>(k1)].re.scale(q) -
                      spec.alphas[static_cast<size_t>(k2)].re.scale(p);
        LineFamily fam;
        fam.kind = LineFamily::Kind::HorizontalEll;
        fam.spacing = abs_exact(spec.alphas[static_cast<size_t>(k2)].im).scale(Rat(1) / q);
        fam.description = "Im z in (Im alpha_" + std::to_string(k2 + 1) + "/" + q.str() + ") * Z";
        std::vector<ExactComplex> reduced;
        reduced.push_back({v, ExactReal::from_rat(basis, Rat(0))});
        bool reduced_rational = v.is_rational();
        for (int j = 0; j < spec.N; ++j) {
            if (j == k1 || j == k2) continue;
            reduced.push_back(spec.alphas[static_cast<size_t>(j)]);
            reduced_rational = reduced_rational && prof.entries[static_cast<size_t>(j)].re_rational;
        }
        if (reduced_rational) {
            GcdCertificate cert;
            Rat step = lattice_step_rational(sub_spec(spec, reduced), &cert);
            rep.gcd_certificate = cert;
            rep.mn.kind = MnKind::LinesWithDiscreteTrace;
            rep.mn.step = step;
            rep.mn.lines = fam;
            rep.nn = discrete(step);
        } else {
            rep.mn.kind = MnKind::LinesWithDenseTrace;
            rep.mn.lines = fam;
            rep.nn.kind = MnKind::DenseGdeltaReal;
        }
        return rep;
    }

    // >= 2 nonreal with irrational ratio, or >= 3 nonreal: Kronecker test
    int k = prof.nonreal_indices[0];
    try {
        DensityCertificate cert = kronecker_density_test(spec, k);
        rep.density_certificate = cert;
        if (cert.dense) {
            rep.mn.kind = MnKind::DenseGdeltaComplex;
        } else {
            rep.mn = undet(
                "integer combinations are not dense: the set is contained in parallel lines "
                "that accumulate; no exact characterization is available");
        }
    } catch (const AlgebraUnrepresentable& e) {
        rep.mn = undet(std::string("kronecker matrix not exactly representable: ") + e.what());
    }

    if (exactly_two) {
        int k1 = prof.nonreal_indices[0], k2 = prof.nonreal_indices[1];
        auto rt = ratio_tag(spec.alphas[static_cast<size_t>(k1)].im,
                            spec.alphas[static_cast<size_t>(k2)].im);
        std::vector<ExactComplex> rest;
        for (int j = 0; j < spec.N; ++j)
            if (j != k1 && j != k2) rest.push_back(spec.alphas[static_cast<size_t>(j)]);
        if (rt && (*rt == DioTag::BadlyApproximable || *rt == DioTag::AlgebraicNonLiouville)) {
            if (rest.empty()) {
                rep.nn.kind = MnKind::EmptySet;
            } else {
                ClassificationReport sub = classify_MN(sub_spec(spec, rest));
                rep.nn = sub.nn;
            }
        } else if (rt && *rt == DioTag::LiouvilleConstructed) {
            rep.nn = undet(
                "Im ratio is liouville-tagged; membership of real perturbations depends on a "
                "simultaneous (liouville-vector) fact that is not decided");
        } else {
            rep.nn = undet("diophantine type of the Im ratio is unknown");
        }
    } else {
        rep.nn = undet("no trace characterization for three or more nonreal coefficients");
    }
    return rep;
}

ExactReal theta_map(const OperatorSpec& spec, long m, const ExactComplex& z) {
    CoefficientProfile prof = profile_coefficients(spec);
    if (prof.nonreal_indices.size() != 1)
        throw PreconditionViolation("theta_map needs exactly one nonreal coefficient");
    int k = prof.nonreal_indices[0];
    const ExactComplex& ak = spec.alphas[static_cast<size_t>(k)];
    if (z.im != ak.im.scale(Rat(m)))
        throw PreconditionViolation("theta_map: z is not on the indexed line");
    if (m == 0) return -z.re;
    auto inv = ak.im.try_invert();
    if (!inv) throw AlgebraUnrepresentable("theta_map: Im alpha_k not invertible in the algebra");
    auto ratio = ak.re.try_mul(*inv);
    if (!ratio) throw AlgebraUnrepresentable("theta_map: Re/Im product leaves the algebra");
    return ratio->scale(Rat(m)) - z.re;
}

ExactReal psi_map(const OperatorSpec& spec, long m, const ExactComplex& z, Int* xi_m, Int* eta_m) {
    CoefficientProfile prof = profile_coefficients(spec);
    if (prof.nonreal_indices.size() != 2 || !prof.im_ratio)
        throw PreconditionViolation("psi_map needs two nonreal coefficients with rational Im ratio");
    int k1 = prof.nonreal_indices[0], k2 = prof.nonreal_indices[1];
    Int p = prof.im_ratio->num();
    Int q = prof.im_ratio->den();
    const ExactComplex& a1 = spec.alphas[static_cast<size_t>(k1)];
    const ExactComplex& a2 = spec.alphas[static_cast<size_t>(k2)];
    if (z.im != a2.im.scale(Rat(Int(m), q)))
        throw PreconditionViolation("psi_map: z is not on the indexed line");
    auto base = canonical_bezout(p, q, Int(m));
    if (!base) throw PreconditionViolation("psi_map: no base solution (non-coprime ratio?)");
    if (xi_m) *xi_m = base->first;
    if (eta_m) *eta_m = base->second;
    return z.re - a1.re.scale(Rat(base->first)) - a2.re.scale(Rat(base->second));
}

}  // namespace hypotor
