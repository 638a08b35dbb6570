#include "hypotor/cf.hpp"

namespace hypotor {

namespace {

ConvergentRun rational_run(Rat x, int count) {
    ConvergentRun run;
    Int pm1(1), qm1(0), pm2(0), qm2(1);
    while (static_cast<int>(run.items.size()) < count) {
        Int a = floor_int(x);
        Int p = a * pm1 + pm2;
        Int q = a * qm1 + qm2;
        run.items.push_back({p, q});
        Rat frac = x - Rat(a);
        if (frac.is_zero()) {
            run.exact_terminated = true;
            break;
        }
        x = Rat(1) / frac;
        pm2 = pm1;
        qm2 = qm1;
        pm1 = p;
        qm1 = q;
    }
    return run;
}

}  // namespace

ConvergentRun convergents(const ExactReal& x, int count) {
    if (count < 1) throw PreconditionViolation("convergents: count must be >= 1");
    if (auto r = x.as_rational()) return rational_run(*r, count);

    ConvergentRun run;
    // x_k = (a*x + b) / (c*x + d) with integer coefficients; exact state for
    // the irrational tail, floors certified from enclosures of x.
    Int A(1), B(0), C(0), D(1);
    Int pm1(1), qm1(0), pm2(0), qm2(1);
    Rat width(1, 1024);
    while (static_cast<int>(run.items.size()) < count) {
        std::optional<Int> quotient;
        for (int round = 0; round <= kRefineBudget; ++round) {
            RatInterval xa;
            try {
                xa = x.enclosure(width);
            } catch (const RefinementExhausted&) {
                run.truncated = true;
                run.note = "enclosure refinement exhausted; certified prefix returned";
                return run;
            }
            // evaluate the Moebius transform over the interval
            RatInterval num = xa.scale(Rat(A));
            num = num + RatInterval(Rat(B));
            RatInterval den = xa.scale(Rat(C));
            den = den + RatInterval(Rat(D));
            if (!den.contains_zero()) {
                // den is sign-definite, so the hull of endpoint quotients
                // contains the transform image
                Rat c1 = num.lo / den.lo, c2 = num.lo / den.hi, c3 = num.hi / den.lo,
                    c4 = num.hi / den.hi;
                Rat lo = std::min(std::min(c1, c2), std::min(c3, c4));
                Rat hi = std::max(std::max(c1, c2), std::max(c3, c4));
                Int fl = floor_int(lo), fh = floor_int(hi);
                if (fl == fh) {
                    quotient = fl;
                    break;
                }
            }
            width = width * width;
        }
        if (!quotient) {
            run.truncated = true;
            run.note = "partial quotient not certifiable within refinement budget";
            return run;
        }
        Int a = *quotient;
        Int p = a * pm1 + pm2;
        Int q = a * qm1 + qm2;
        run.items.push_back({p, q});
        pm2 = pm1;
        qm2 = qm1;
        pm1 = p;
        qm1 = q;
        // x_{k+1} = 1 / (x_k - a)  =>  state update
        Int nA = C, nB = D, nC = A - a * C, nD = B - a * D;
        A = nA;
        B = nB;
        C = nC;
        D = nD;
    }
    return run;
}

}  // namespace hypotor
