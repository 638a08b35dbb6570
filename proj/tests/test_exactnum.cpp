#include "doctest.h"

#include "hypotor/cf.hpp"
#include "hypotor/exact.hpp"
#include "hypotor/intlin.hpp"

#include <random>

using namespace hypotor;

TEST_CASE("rational normalization") {
    CHECK(rational_normalize(Int(3), Int(6)) == Rat(1, 2));
    CHECK(rational_normalize(Int(0), Int(7)) == Rat(0));
    CHECK(rational_normalize(Int(0), Int(7)).den() == 1);
    CHECK(rational_normalize(Int(-4), Int(-6)) == Rat(2, 3));
    CHECK(rational_normalize(Int(-4), Int(-6)).den() == 3);
    CHECK_THROWS_AS(rational_normalize(Int(1), Int(0)), PreconditionViolation);
}

TEST_CASE("rational parsing and printing") {
    CHECK(parse_rat("3/6") == Rat(1, 2));
    CHECK(parse_rat("-7") == Rat(-7));
    CHECK(parse_rat("0.25") == Rat(1, 4));
    CHECK(parse_rat("-1.5") == Rat(-3, 2));
    CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rat("abc"), ParseError);
    CHECK(Rat(1, 2).str() == "1/2");
    CHECK(decimal_or_fraction(Rat(1, 4)) == "0.25");
    CHECK(decimal_or_fraction(Rat(1, 3)) == "1/3");
    CHECK(decimal_or_fraction(Rat(-110001, 1000000)) == "-0.110001");
}

TEST_CASE("floor/ceil/round") {
    CHECK(floor_int(Rat(7, 2)) == 3);
    CHECK(floor_int(Rat(-7, 2)) == -4);
    CHECK(ceil_int(Rat(7, 2)) == 4);
    CHECK(round_nearest(Rat(7, 3)) == 2);
    CHECK(round_nearest(Rat(8, 3)) == 3);
    CHECK(round_nearest(Rat(1, 2)) == 0);  // halves down
    CHECK(round_nearest(Rat(-1, 2)) == -1);
}

TEST_CASE("interval arithmetic is outward and exact") {
    RatInterval a(Rat(1, 3), Rat(1, 2));
    RatInterval b(Rat(-2), Rat(3));
    RatInterval p = a * b;
    CHECK(p.lo == Rat(-1));
    CHECK(p.hi == Rat(3, 2));
    RatInterval s = a.square();
    CHECK(s.lo == Rat(1, 9));
    CHECK(s.hi == Rat(1, 4));
    RatInterval neg(Rat(-3), Rat(2));
    CHECK(neg.square().lo == Rat(0));
    CHECK(neg.square().hi == Rat(9));
}

TEST_CASE("sqrt basis enclosures are certified") {
    auto basis = Basis::make_sqrt({2});
    ExactReal r2 = ExactReal::atom(basis, 0);
    Rat prec(1, 1000000);
    RatInterval iv = r2.enclosure(prec);
    CHECK(iv.width() <= prec);
    CHECK(iv.lo * iv.lo <= Rat(2));
    CHECK(iv.hi * iv.hi >= Rat(2));

    // exact rational stays a point
    ExactReal half = ExactReal::from_rat(basis, Rat(1, 2));
    RatInterval hv = half.enclosure(Rat(1, 1000000000));
    CHECK(hv.is_point());
    CHECK(hv.lo == Rat(1, 2));

    // 1 + 2*sqrt(2) ~ 3.8284271...
    ExactReal x = r2.scale(Rat(2)).add_rat(Rat(1));
    RatInterval xv = x.enclosure(Rat(1, 1000000));
    CHECK(xv.width() <= Rat(1, 1000000));
    CHECK(xv.contains(parse_rat("3.82842712474619")));
}

TEST_CASE("liouville construction partial sums") {
    // sum b^{-k!}: depth-3 partial sum for b=10 is 0.110001
    ExactReal L = ExactReal::liouville(10, 3);
    const Atom& a = L.basis()->atom(0);
    CHECK(a.tag == DioTag::LiouvilleConstructed);
    CHECK(a.declared.lo == Rat(110001, 1000000));
    CHECK(a.declared.width() == Rat(2) / pow_rat(Rat(10), 24));

    ExactReal L2 = ExactReal::liouville(2, 2);
    CHECK(L2.basis()->atom(0).declared.lo == Rat(3, 4));
    CHECK(L2.basis()->atom(0).declared.width() == Rat(2, 64));

    ExactReal L1 = ExactReal::liouville(10, 1);
    CHECK(L1.basis()->atom(0).declared.lo == Rat(1, 10));
    CHECK(L1.basis()->atom(0).declared.width() == Rat(2, 100));

    // deepening on demand
    RatInterval fine = L.enclosure(Rat(1) / pow_rat(Rat(10), 50));
    CHECK(fine.width() <= Rat(1) / pow_rat(Rat(10), 50));
    CHECK(fine.lo >= Rat(110001, 1000000));
}

TEST_CASE("as_rational dispatch") {
    auto basis = Basis::make_sqrt({2, 3});
    ExactReal x = ExactReal::from_rat(basis, Rat(1, 2));
    CHECK(x.as_rational() == Rat(1, 2));
    ExactReal y = ExactReal::atom(basis, 0);
    CHECK(!y.as_rational().has_value());
    ExactReal z = ExactReal::from_rat(basis, Rat(3));
    CHECK(z.as_rational() == Rat(3));
}

TEST_CASE("product algebra closes over sqrt atoms") {
    auto basis = Basis::make_sqrt({2, 3});
    REQUIRE(basis->size() == 3);  // sqrt2, sqrt3, sqrt6
    ExactReal r2 = ExactReal::atom(basis, 0);
    ExactReal r3 = ExactReal::atom(basis, 1);
    auto p = r2.try_mul(r3);
    REQUIRE(p.has_value());
    auto r6_idx = basis->find("sqrt6");
    REQUIRE(r6_idx.has_value());
    CHECK(*p == ExactReal::atom(basis, *r6_idx));

    auto sq = r2.try_square();
    REQUIRE(sq.has_value());
    CHECK(sq->as_rational() == Rat(2));

    // (1 + sqrt2)(1 - sqrt2) = -1
    ExactReal a = r2.add_rat(Rat(1));
    ExactReal b = (-r2).add_rat(Rat(1));
    auto prod = a.try_mul(b);
    REQUIRE(prod.has_value());
    CHECK(prod->as_rational() == Rat(-1));

    // liouville products are not representable
    ExactReal L = ExactReal::liouville(10, 4);
    CHECK(!L.try_square().has_value());
}

TEST_CASE("exact arithmetic matches hand-computed coordinates") {
    auto basis = Basis::make_sqrt({2});
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> num(-20, 20), den(1, 10);
    for (int trial = 0; trial < 200; ++trial) {
        Rat a(num(rng), den(rng)), b(num(rng), den(rng)), c(num(rng), den(rng));
        ExactReal x = ExactReal::atom(basis, 0, b).add_rat(a);  // a + b*sqrt2
        ExactReal y = x.scale(c);
        CHECK(y.coords()[0] == a * c);
        CHECK(y.coords()[1] == b * c);
        // (a + b s)^2 = a^2 + 2b^2 + 2ab s
        auto sq = x.try_square();
        REQUIRE(sq.has_value());
        CHECK(sq->coords()[0] == a * a + Rat(2) * b * b);
        CHECK(sq->coords()[1] == Rat(2) * a * b);
    }
}

TEST_CASE("sign certification") {
    auto basis = Basis::make_sqrt({2});
    ExactReal r2 = ExactReal::atom(basis, 0);
    // sqrt2 - 1.41421356 > 0, sqrt2 - 1.41421357 < 0
    CHECK(r2.add_rat(-parse_rat("1.41421356")).sign() == 1);
    CHECK(r2.add_rat(-parse_rat("1.41421357")).sign() == -1);
    CHECK(r2.scale(Rat(0)).sign() == 0);
    CHECK((r2 - r2).sign() == 0);
}

TEST_CASE("try_invert for representable shapes") {
    auto basis = Basis::make_sqrt({3});
    ExactReal r3 = ExactReal::atom(basis, 0);
    auto inv = r3.try_invert();
    REQUIRE(inv.has_value());
    auto check = r3.try_mul(*inv);
    REQUIRE(check.has_value());
    CHECK(check->as_rational() == Rat(1));

    ExactReal a = r3.scale(Rat(2)).add_rat(Rat(5));  // 5 + 2 sqrt3
    auto inv2 = a.try_invert();
    REQUIRE(inv2.has_value());
    auto check2 = a.try_mul(*inv2);
    CHECK(check2->as_rational() == Rat(1));

    CHECK(!ExactReal::from_rat(basis, Rat(0)).try_invert().has_value());
}

TEST_CASE("convergents of the golden ratio") {
    auto basis = Basis::make_sqrt({5});
    // (1 + sqrt5)/2
    ExactReal phi = ExactReal::atom(basis, 0, Rat(1, 2)).add_rat(Rat(1, 2));
    auto run = convergents(phi, 5);
    REQUIRE(run.items.size() == 5);
    long expect_p[] = {1, 2, 3, 5, 8};
    long expect_q[] = {1, 1, 2, 3, 5};
    for (int i = 0; i < 5; ++i) {
        CHECK(run.items[i].p == expect_p[i]);
        CHECK(run.items[i].q == expect_q[i]);
    }
    CHECK(!run.truncated);
}

TEST_CASE("convergents of a rational terminate") {
    auto basis = Basis::rational_only();
    ExactReal half = ExactReal::from_rat(basis, Rat(1, 2));
    auto run = convergents(half, 10);
    REQUIRE(run.items.size() == 2);
    CHECK(run.items[0].p == 0);
    CHECK(run.items[0].q == 1);
    CHECK(run.items[1].p == 1);
    CHECK(run.items[1].q == 2);
    CHECK(run.exact_terminated);
}

TEST_CASE("convergents of a liouville number") {
    ExactReal L = ExactReal::liouville(10, 3);
    auto run = convergents(L, 3);
    REQUIRE(run.items.size() >= 2);
    CHECK(run.items[0].p == 0);
    CHECK(run.items[0].q == 1);
    CHECK(run.items[1].p == 1);
    CHECK(run.items[1].q == 9);
}

TEST_CASE("best approximation property on certified prefixes") {
    // for each convergent (p,q) of phi, no q' < q beats |q x - p| (checked
    // against exhaustive scan with interval arithmetic)
    auto basis = Basis::make_sqrt({5});
    ExactReal phi = ExactReal::atom(basis, 0, Rat(1, 2)).add_rat(Rat(1, 2));
    auto run = convergents(phi, 9);
    RatInterval x = phi.enclosure(Rat(1) / pow_rat(Rat(10), 40));
    auto err = [&](const Int& q, const Int& p) {
        RatInterval e = x.scale(Rat(q)) - RatInterval(Rat(p));
        Rat lo = e.lo.sign() <= 0 && e.hi.sign() >= 0 ? Rat(0) : std::min(abs(e.lo), abs(e.hi));
        Rat hi = std::max(abs(e.lo), abs(e.hi));
        (void)lo;
        return std::make_pair(
            e.contains_zero() ? Rat(0) : std::min(abs(e.lo), abs(e.hi)), hi);
    };
    for (size_t k = 1; k < run.items.size(); ++k) {
        auto [cur_lo, cur_hi] = err(run.items[k].q, run.items[k].p);
        for (Int q(1); q < run.items[k].q; ++q) {
            Int p = round_nearest(Rat(x.mid() * Rat(q)));
            auto [lo, hi] = err(q, p);
            CHECK(lo > cur_hi);  // strictly worse than the convergent
        }
    }
}

TEST_CASE("successive convergents strictly improve |q x - p|") {
    ExactReal L = ExactReal::liouville(10, 4);
    auto run = convergents(L, 4);
    RatInterval x = L.enclosure(Rat(1) / pow_rat(Rat(10), 100));
    Rat prev_hi(-1);
    bool first = true;
    for (auto& cv : run.items) {
        RatInterval e = x.scale(Rat(cv.q)) - RatInterval(Rat(cv.p));
        Rat lo = e.contains_zero() ? Rat(0) : std::min(abs(e.lo), abs(e.hi));
        Rat hi = std::max(abs(e.lo), abs(e.hi));
        if (!first) CHECK(hi < prev_hi);
        prev_hi = hi;
        (void)lo;
        first = false;
    }
}

TEST_CASE("rational_solution_space spec examples") {
    auto basis = Basis::make_sqrt({2, 3});
    ExactReal r2 = ExactReal::atom(basis, 0);
    ExactReal r3 = ExactReal::atom(basis, 1);
    ExactReal one = ExactReal::from_rat(basis, Rat(1));
    ExactReal zero = ExactReal::from_rat(basis, Rat(0));

    // M = [[sqrt2],[sqrt3]] -> only r = 0
    CHECK(rational_solution_space({{r2}, {r3}}).empty());
    // M = [[1],[sqrt2]] -> row 2 forces r = 0
    CHECK(rational_solution_space({{one}, {r2}}).empty());
    // all-rational matrix imposes no constraint
    auto full = rational_solution_space({{zero}, {one}});
    REQUIRE(full.size() == 1);
    CHECK(!full[0][0].is_zero());
}

TEST_CASE("rational_solution_space vs bounded brute force") {
    auto basis = Basis::make_sqrt({2, 3});
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> coef(-2, 2);
    auto random_entry = [&]() {
        ExactReal e = ExactReal::from_rat(basis, Rat(coef(rng)));
        e = e + ExactReal::atom(basis, 0, Rat(coef(rng)));
        e = e + ExactReal::atom(basis, 1, Rat(coef(rng)));
        return e;
    };
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::vector<ExactReal>> M = {{random_entry(), random_entry()},
                                                 {random_entry(), random_entry()}};
        auto basis_vecs = rational_solution_space(M);
        // brute force scan r = (a/b, c/d), |a|,|c| <= 20 denominators <= 4
        auto in_space = [&](const Rat& r1, const Rat& r2) {
            for (auto& row : M) {
                ExactReal v = row[0].scale(r1) + row[1].scale(r2);
                if (!v.is_rational()) return false;
            }
            return true;
        };
        // membership test via the returned basis: solve small linear system
        auto spanned = [&](const Rat& r1, const Rat& r2) {
            if (basis_vecs.empty()) return r1.is_zero() && r2.is_zero();
            if (basis_vecs.size() >= 2) return true;  // full plane
            const Rat& b1 = basis_vecs[0][0];
            const Rat& b2 = basis_vecs[0][1];
            if (b1.is_zero() && b2.is_zero()) return r1.is_zero() && r2.is_zero();
            if (!b1.is_zero()) return r2 == r1 / b1 * b2;
            return r1.is_zero();
        };
        for (long a = -8; a <= 8; ++a)
            for (long c = -8; c <= 8; ++c)
                for (long b : {1L, 2L, 3L})
                    for (long d : {1L, 2L, 3L}) {
                        Rat r1(a, b), r2(c, d);
                        CHECK(in_space(r1, r2) == spanned(r1, r2));
                    }
    }
}

TEST_CASE("enclosure precision failure is reported") {
    std::vector<Atom> gens(1);
    gens[0].name = "w";
    gens[0].kind = AtomKind::Opaque;
    gens[0].declared = RatInterval(parse_rat("0.5"), parse_rat("0.6"));
    auto basis = Basis::make(gens);
    ExactReal w = ExactReal::atom(basis, 0);
    CHECK_THROWS_AS(w.enclosure(Rat(1, 1000)), RefinementExhausted);
    CHECK(w.enclosure(Rat(1, 5)).contains(parse_rat("0.55")));
}

TEST_CASE("diophantine tags") {
    auto basis = Basis::make_sqrt({2, 3});
    CHECK(ExactReal::atom(basis, 0).tag() == DioTag::BadlyApproximable);
    ExactReal mix = ExactReal::atom(basis, 0) + ExactReal::atom(basis, 1);
    CHECK(mix.tag() == DioTag::AlgebraicNonLiouville);
    ExactReal L = ExactReal::liouville(10, 4);
    CHECK(L.tag() == DioTag::LiouvilleConstructed);
    CHECK(L.scale(Rat(3, 2)).add_rat(Rat(7)).tag() == DioTag::LiouvilleConstructed);
}
