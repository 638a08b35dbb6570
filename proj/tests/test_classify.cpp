#include "doctest.h"

#include "hypotor/classify.hpp"

#include <random>

using namespace hypotor;

namespace {

ExactComplex cplx(const BasisPtr& b, Rat re, Rat im) {
    return ExactComplex::from_rats(b, std::move(re), std::move(im));
}

OperatorSpec rational_spec(std::vector<std::pair<Rat, Rat>> alphas, Rat lre = Rat(0),
                           Rat lim = Rat(0)) {
    auto b = Basis::rational_only();
    std::vector<ExactComplex> as;
    for (auto& [re, im] : alphas) as.push_back(cplx(b, re, im));
    return OperatorSpec::make(as, cplx(b, lre, lim));
}

// D_t + (sqrt2 + i sqrt3) Dx + (1+i) Dy, the running example
OperatorSpec example_spec() {
    auto b = Basis::make_sqrt({2, 3});
    ExactComplex a1{ExactReal::atom(b, 0), ExactReal::atom(b, 1)};
    ExactComplex a2 = cplx(b, Rat(1), Rat(1));
    return OperatorSpec::make({a1, a2}, cplx(b, Rat(0), Rat(0)));
}

}  // namespace

TEST_CASE("profile spec examples") {
    auto p1 = profile_coefficients(rational_spec({{Rat(1, 2), Rat(0)}, {Rat(1, 3), Rat(0)}}));
    CHECK(p1.all_real());
    CHECK(p1.entries[0].re_rational);
    CHECK(p1.entries[1].re_rational);

    auto p2 = profile_coefficients(example_spec());
    CHECK(p2.nonreal_indices.size() == 2);
    CHECK(!p2.im_ratio.has_value());  // sqrt3 / 1 not rational

    auto prof3 = profile_coefficients(rational_spec({{Rat(1), Rat(2)}, {Rat(3), Rat(4)}}));
    REQUIRE(prof3.im_ratio.has_value());
    CHECK(*prof3.im_ratio == Rat(1, 2));
}

TEST_CASE("lattice_step_rational worked examples") {
    CHECK(lattice_step_rational(rational_spec({{Rat(1, 2), Rat(0)}, {Rat(1, 3), Rat(0)}})) ==
          Rat(1, 6));
    // alpha = 0 with convention p=0, q=1: step 1
    CHECK(lattice_step_rational(rational_spec({{Rat(0), Rat(0)}})) == Rat(1));
    // (2/3, 2/3): gcd(9, 6, 6)/9 = 1/3
    CHECK(lattice_step_rational(rational_spec({{Rat(2, 3), Rat(0)}, {Rat(2, 3), Rat(0)}})) ==
          Rat(1, 3));
    GcdCertificate cert;
    lattice_step_rational(rational_spec({{Rat(2, 3), Rat(0)}, {Rat(2, 3), Rat(0)}}), &cert);
    CHECK(cert.Q == 9);
    CHECK(cert.divisor == 3);
    CHECK_THROWS_AS(lattice_step_rational(example_spec()), PreconditionViolation);
}

TEST_CASE("lattice step agrees with zero-set solvability") {
    // independent oracle: for each candidate lambda = a/Q the zero set is
    // infinite iff lambda lands on the step lattice
    std::mt19937 rng(5);
    std::uniform_int_distribution<long> num(-9, 9), den(1, 6);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<Rat, Rat>> alphas = {{Rat(num(rng), den(rng)), Rat(0)},
                                                   {Rat(num(rng), den(rng)), Rat(0)}};
        auto spec = rational_spec(alphas);
        Rat step = lattice_step_rational(spec);
        Int Q(1);
        for (auto& [re, im] : alphas) Q *= re.den();
        for (long a = 0; a <= 12; ++a) {
            OperatorSpec with_lambda = spec;
            with_lambda.lambda = cplx(spec.basis(), Rat(Int(a), Q), Rat(0));
            ZeroSet z = zero_set_rational(with_lambda);
            bool in_lattice = (Rat(Int(a), Q) / step).is_integer();
            CHECK(in_lattice == (!z.empty && z.infinite));
        }
    }
}

TEST_CASE("kronecker density test on the running example") {
    auto spec = example_spec();
    auto cert2 = kronecker_density_test(spec, 1);  // k = 2 (0-based 1)
    CHECK(cert2.dense);
    auto cert1 = kronecker_density_test(spec, 0);  // k = 1 also admissible
    CHECK(cert1.dense);
}

TEST_CASE("kronecker density test spec counterexamples") {
    // alpha = (i, i): A = [[0],[1]], never dense
    auto s = rational_spec({{Rat(0), Rat(1)}, {Rat(0), Rat(1)}});
    auto cert = kronecker_density_test(s, 0);
    CHECK(!cert.dense);
    REQUIRE(cert.nondensity_r.size() == 2);
    CHECK(!(cert.nondensity_r[0].is_zero() && cert.nondensity_r[1].is_zero()));

    // alpha = (2+i, 3): second row of A vanishes identically
    auto s2 = rational_spec({{Rat(2), Rat(1)}, {Rat(3), Rat(0)}});
    auto cert2 = kronecker_density_test(s2, 0);
    CHECK(!cert2.dense);

    CHECK_THROWS_AS(kronecker_density_test(s2, 1), PreconditionViolation);
}

TEST_CASE("k-independence of the density verdict") {
    std::mt19937 rng(41);
    std::uniform_int_distribution<long> num(-3, 3), den(1, 3);
    auto b = Basis::make_sqrt({2, 3});
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 20; ++trial) {
        auto mk = [&](bool irr_re, bool irr_im) {
            ExactReal re = ExactReal::from_rat(b, Rat(num(rng), den(rng)));
            if (irr_re) re = re + ExactReal::atom(b, 0, Rat(num(rng), den(rng)));
            ExactReal im = ExactReal::from_rat(b, Rat(num(rng), den(rng)));
            if (irr_im) im = im + ExactReal::atom(b, 1, Rat(num(rng), den(rng)));
            return ExactComplex{re, im};
        };
        std::vector<ExactComplex> alphas = {mk(trial % 2, true), mk(trial % 3 == 0, trial % 2),
                                            mk(false, true)};
        auto spec = OperatorSpec::make(alphas, cplx(b, Rat(0), Rat(0)));
        std::vector<int> ks;
        for (int k = 0; k < spec.N; ++k)
            if (!spec.alphas[static_cast<size_t>(k)].im.is_zero()) ks.push_back(k);
        if (ks.size() < 2) continue;
        ++checked;
        std::optional<bool> verdict;
        for (int k : ks) {
            auto cert = kronecker_density_test(spec, k);
            if (!verdict) verdict = cert.dense;
            CHECK(*verdict == cert.dense);
        }
    }
    CHECK(checked >= 10);
}

TEST_CASE("lambda lattice membership examples") {
    auto b = Basis::make_sqrt({2});
    auto spec = OperatorSpec::make(
        {{ExactReal::atom(b, 0), ExactReal::from_rat(b, Rat(0))}},
        ExactComplex{ExactReal::atom(b, 0, Rat(2)).add_rat(Rat(3)), ExactReal::from_rat(b, Rat(0))});
    auto sol = lambda_lattice_membership(spec, 10);
    REQUIRE(sol.has_value());
    CHECK((*sol)[0] == 3);
    CHECK((*sol)[1] == 2);

    auto s2 = rational_spec({{Rat(1, 2), Rat(0)}}, Rat(1, 3), Rat(0));
    CHECK(!lambda_lattice_membership(s2, 50).has_value());

    auto s3 = rational_spec({{Rat(0), Rat(1)}, {Rat(1), Rat(1)}}, Rat(1), Rat(0));
    auto sol3 = lambda_lattice_membership(s3, 10);
    REQUIRE(sol3.has_value());
    CHECK((*sol3)[0] == 1);
    CHECK((*sol3)[1] == 0);
    CHECK((*sol3)[2] == 0);
}

TEST_CASE("classify single-coefficient cases") {
    auto r1 = classify_MN(rational_spec({{Rat(1), Rat(1)}}));
    CHECK(r1.mn.kind == MnKind::EmptySet);
    CHECK(r1.nn.kind == MnKind::EmptySet);
    CHECK(r1.base_gh == GhStatus::GH);

    auto b = Basis::make_sqrt({2});
    auto r2 = classify_MN(OperatorSpec::make(
        {{ExactReal::atom(b, 0), ExactReal::from_rat(b, Rat(0))}}, cplx(b, Rat(0), Rat(0))));
    CHECK(r2.mn.kind == MnKind::DenseGdeltaReal);
    CHECK(r2.base_gh == GhStatus::GH);

    auto r3 = classify_MN(rational_spec({{Rat(3, 7), Rat(0)}}));
    CHECK(r3.mn.kind == MnKind::DiscreteLattice);
    CHECK(*r3.mn.step == Rat(1, 7));
    CHECK(r3.base_gh == GhStatus::NotGH);
}

TEST_CASE("classify rational lattice case with certificates") {
    auto rep = classify_MN(rational_spec({{Rat(1, 2), Rat(0)}, {Rat(1, 3), Rat(0)}}));
    CHECK(rep.mn.kind == MnKind::DiscreteLattice);
    CHECK(*rep.mn.step == Rat(1, 6));
    CHECK(rep.nn.kind == MnKind::DiscreteLattice);
    REQUIRE(rep.gcd_certificate.has_value());
    CHECK(rep.gcd_certificate->Q == 6);
    CHECK(rep.base_gh == GhStatus::NotGH);
}

TEST_CASE("classify all-real mixed case") {
    auto b = Basis::make_sqrt({2});
    auto rep = classify_MN(OperatorSpec::make(
        {{ExactReal::atom(b, 0), ExactReal::from_rat(b, Rat(0))},
         {ExactReal::from_rat(b, Rat(1, 3)), ExactReal::from_rat(b, Rat(0))}},
        cplx(b, Rat(0), Rat(0))));
    CHECK(rep.mn.kind == MnKind::DenseGdeltaReal);
    CHECK(rep.nn.kind == MnKind::DenseGdeltaReal);
    CHECK(rep.base_gh == GhStatus::NotGH);  // a rational coefficient is present
}

TEST_CASE("classify one nonreal coefficient") {
    auto rep = classify_MN(rational_spec({{Rat(2), Rat(1)}, {Rat(1, 3), Rat(0)}}));
    CHECK(rep.mn.kind == MnKind::LinesWithDiscreteTrace);
    REQUIRE(rep.mn.lines.has_value());
    CHECK(rep.mn.lines->spacing.as_rational() == Rat(1));
    CHECK(*rep.mn.step == Rat(1, 3));
    CHECK(rep.nn.kind == MnKind::DiscreteLattice);
    CHECK(*rep.nn.step == Rat(1, 3));

    auto b = Basis::make_sqrt({2});
    auto rep2 = classify_MN(OperatorSpec::make(
        {cplx(b, Rat(2), Rat(1)), {ExactReal::atom(b, 0), ExactReal::from_rat(b, Rat(0))}},
        cplx(b, Rat(0), Rat(0))));
    CHECK(rep2.mn.kind == MnKind::LinesWithDenseTrace);
    CHECK(rep2.nn.kind == MnKind::DenseGdeltaReal);
}

TEST_CASE("classify two nonreal with rational ratio (i, i)") {
    auto rep = classify_MN(rational_spec({{Rat(0), Rat(1)}, {Rat(0), Rat(1)}}));
    CHECK(rep.mn.kind == MnKind::LinesWithDiscreteTrace);
    REQUIRE(rep.mn.lines.has_value());
    CHECK(rep.mn.lines->spacing.as_rational() == Rat(1));
    CHECK(*rep.mn.step == Rat(1));
    CHECK(rep.nn.kind == MnKind::DiscreteLattice);
    CHECK(*rep.nn.step == Rat(1));

    // cross-check M_2 = Z + iZ against the exact zero set
    for (long a = -2; a <= 2; ++a)
        for (long bb = -2; bb <= 2; ++bb) {
            auto s = rational_spec({{Rat(0), Rat(1)}, {Rat(0), Rat(1)}}, Rat(a), Rat(bb));
            CHECK(zero_set_rational(s).infinite);
        }
    auto off = rational_spec({{Rat(0), Rat(1)}, {Rat(0), Rat(1)}}, Rat(1, 2), Rat(0));
    CHECK(zero_set_rational(off).empty);
}

TEST_CASE("classify two nonreal with irrational ratio: kronecker dispatch") {
    auto rep = classify_MN(example_spec());
    CHECK(rep.mn.kind == MnKind::DenseGdeltaComplex);
    REQUIRE(rep.density_certificate.has_value());
    CHECK(rep.density_certificate->dense);
    CHECK(rep.nn.kind == MnKind::EmptySet);
    CHECK(rep.base_gh == GhStatus::GH);
}

TEST_CASE("classify undetermined on non-dense kronecker failure") {
    // alphas (i, i sqrt2): irrational ratio but combinations accumulate on
    // parallel lines; density must be rejected with a certificate
    auto b = Basis::make_sqrt({2});
    auto spec = OperatorSpec::make(
        {{ExactReal::from_rat(b, Rat(0)), ExactReal::from_rat(b, Rat(1))},
         {ExactReal::from_rat(b, Rat(0)), ExactReal::atom(b, 0)}},
        cplx(b, Rat(0), Rat(0)));
    auto rep = classify_MN(spec);
    CHECK(rep.mn.kind == MnKind::Undetermined);
    REQUIRE(rep.density_certificate.has_value());
    CHECK(!rep.density_certificate->dense);
}

TEST_CASE("base GH spec fixtures") {
    CHECK(base_gh_status(rational_spec({{Rat(3, 7), Rat(0)}})) == GhStatus::NotGH);

    auto b = Basis::make_sqrt({2});
    CHECK(base_gh_status(OperatorSpec::make(
              {{ExactReal::atom(b, 0), ExactReal::from_rat(b, Rat(0))}},
              cplx(b, Rat(0), Rat(0)))) == GhStatus::GH);

    CHECK(base_gh_status(example_spec()) == GhStatus::GH);

    ExactReal L = ExactReal::liouville(10, 4);
    auto lb = L.basis();
    CHECK(base_gh_status(OperatorSpec::make(
              {{L, ExactReal::from_rat(lb, Rat(0))}},
              ExactComplex::from_rats(lb, Rat(0), Rat(0)))) == GhStatus::NotGH);

    std::vector<Atom> gens(1);
    gens[0].name = "w";
    gens[0].kind = AtomKind::Opaque;
    gens[0].declared = RatInterval(Rat(1, 3), Rat(2, 5));
    auto ob = Basis::make(gens);
    CHECK(base_gh_status(OperatorSpec::make(
              {{ExactReal::atom(ob, 0), ExactReal::from_rat(ob, Rat(0))}},
              ExactComplex::from_rats(ob, Rat(0), Rat(0)))) == GhStatus::Undetermined);
}

TEST_CASE("base GH reduction for two nonreal with rational ratio") {
    // alpha = (sqrt2 + i, i): ratio 1, reduced coefficient sqrt2 -> GH
    auto b = Basis::make_sqrt({2});
    auto spec = OperatorSpec::make(
        {{ExactReal::atom(b, 0), ExactReal::from_rat(b, Rat(1))},
         {ExactReal::from_rat(b, Rat(0)), ExactReal::from_rat(b, Rat(1))}},
        cplx(b, Rat(0), Rat(0)));
    CHECK(base_gh_status(spec) == GhStatus::GH);

    // alpha = (1/2 + i, i): reduced coefficient 1/2 rational -> NotGH
    auto spec2 = rational_spec({{Rat(1, 2), Rat(1)}, {Rat(0), Rat(1)}});
    CHECK(base_gh_status(spec2) == GhStatus::NotGH);
}

TEST_CASE("theta map") {
    auto spec = rational_spec({{Rat(1, 3), Rat(0)}, {Rat(5), Rat(2)}});
    auto z = cplx(spec.basis(), Rat(1, 2), Rat(0));
    CHECK(theta_map(spec, 0, z).as_rational() == Rat(-1, 2));

    auto z1 = cplx(spec.basis(), Rat(3), Rat(2));
    CHECK(theta_map(spec, 1, z1).as_rational() == Rat(5, 2) - Rat(3));

    CHECK_THROWS_AS(theta_map(spec, 1, cplx(spec.basis(), Rat(0), Rat(1))),
                    PreconditionViolation);
}

TEST_CASE("psi map spec example and isometry") {
    auto spec = rational_spec({{Rat(0), Rat(1)}, {Rat(0), Rat(1)}});
    Int xi_m, eta_m;
    auto z = cplx(spec.basis(), Rat(1, 3), Rat(1));
    ExactReal v = psi_map(spec, 1, z, &xi_m, &eta_m);
    CHECK(xi_m + eta_m == 1);
    CHECK(v.as_rational() == Rat(1, 3));  // Re alpha parts vanish

    std::mt19937 rng(9);
    std::uniform_int_distribution<long> num(-50, 50), den(1, 9);
    for (long m = -2; m <= 2; ++m) {
        for (int i = 0; i < 100; ++i) {
            Rat x1(num(rng), den(rng)), x2(num(rng), den(rng));
            auto z1 = cplx(spec.basis(), x1, Rat(m));
            auto z2 = cplx(spec.basis(), x2, Rat(m));
            ExactReal diff = psi_map(spec, m, z1) - psi_map(spec, m, z2);
            auto d2 = diff.try_square();
            REQUIRE(d2.has_value());
            CHECK(d2->as_rational() == (x1 - x2) * (x1 - x2));
        }
    }

    CHECK_THROWS_AS(psi_map(spec, 1, cplx(spec.basis(), Rat(0), Rat(1, 3))),
                    PreconditionViolation);
}

TEST_CASE("psi map with nontrivial ratio") {
    // alpha = (1/5 + 2i, 1/7 + 3i): ratio 2/3, lines Im = m * 3/3 = m
    auto spec = rational_spec({{Rat(1, 5), Rat(2)}, {Rat(1, 7), Rat(3)}});
    auto prof = profile_coefficients(spec);
    REQUIRE(prof.im_ratio.has_value());
    CHECK(*prof.im_ratio == Rat(2, 3));
    Int xi_m, eta_m;
    auto z = cplx(spec.basis(), Rat(0), Rat(1));
    ExactReal v = psi_map(spec, 1, z, &xi_m, &eta_m);
    CHECK(Int(2) * xi_m + Int(3) * eta_m == 1);
    CHECK(v.as_rational() == Rat(0) - Rat(1, 5) * Rat(xi_m) - Rat(1, 7) * Rat(eta_m));
}

TEST_CASE("classifier and scanner agree on lattice membership") {
    // lambda on the lattice -> infinite zero set; off the lattice -> shell
    // minima floored by dist(Q lambda, d Z)/Q
    auto spec = rational_spec({{Rat(1, 2), Rat(0)}, {Rat(1, 3), Rat(0)}});
    GcdCertificate cert;
    Rat step = lattice_step_rational(spec, &cert);
    REQUIRE(step == Rat(1, 6));

    OperatorSpec on = spec;
    on.lambda = cplx(spec.basis(), step * Rat(5), Rat(0));
    CHECK(zero_set_rational(on).infinite);

    OperatorSpec off = spec;
    Rat lam = step * Rat(1, 2);  // strictly between lattice points
    off.lambda = cplx(spec.basis(), lam, Rat(0));
    CHECK(zero_set_rational(off).empty);
    Rat Q(cert.Q);
    Rat scaled = lam * Q;  // distance of Q*lambda to divisor*Z, scaled back
    Rat d(cert.divisor);
    Rat rem = scaled - Rat(floor_int(scaled / d)) * d;
    Rat dist = std::min(rem, d - rem) / Q;
    REQUIRE(dist.sign() > 0);
    auto recs = scan_shells(off, 12);
    for (const auto& rec : recs) {
        CHECK(!rec.is_exact_zero);
        CHECK(rec.min_sq.lo >= dist * dist - Rat(1, 1000000));
    }
}

TEST_CASE("line family soundness for one nonreal coefficient") {
    // lambda strictly between t_0 and t_1: shell minima keep a positive floor
    auto spec = rational_spec({{Rat(0), Rat(1)}, {Rat(1, 2), Rat(0)}}, Rat(1, 3), Rat(1, 2));
    auto recs = scan_shells(spec, 8);
    for (const auto& rec : recs) CHECK(rec.min_sq.lo >= Rat(1, 4));
}
