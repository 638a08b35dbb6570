#include "hypotor/construct.hpp"

#include "hypotor/cf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace hypotor {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// rational upper bracket of pi for certified resonance bounds
const Rat& pi_hi() {
    static const Rat v(Int("31415926535897932385"), pow_int(Int(10), 19));
    return v;
}

bool is_pow2(int g) { return g >= 64 && (g & (g - 1)) == 0; }

// in-place radix-2 FFT; inverse via conjugated twiddles plus 1/n
void fft(std::vector<cd>& a, bool inverse) {
    size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1 : -1);
        cd wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cd w(1);
            for (size_t j = 0; j < len / 2; ++j) {
                cd u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

long freq_of(size_t j, size_t n) {
    return j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

// D_t = -i d/dt: multiply Fourier coefficient k by k
std::vector<cd> spectral_Dt(const std::vector<cd>& samples) {
    std::vector<cd> a = samples;
    fft(a, false);
    size_t n = a.size();
    for (size_t j = 0; j < n; ++j) a[j] *= static_cast<double>(freq_of(j, n));
    fft(a, true);
    return a;
}

}  // namespace

TrigPoly TrigPoly::constant(ExactComplex c0) {
    TrigPoly p;
    p.modes.push_back({0, std::move(c0)});
    return p;
}

void TrigPoly::add_mode(long k, ExactComplex c) {
    auto it = std::lower_bound(modes.begin(), modes.end(), k,
                               [](const auto& m, long key) { return m.first < key; });
    if (it != modes.end() && it->first == k) {
        it->second = it->second + c;
    } else {
        modes.insert(it, {k, std::move(c)});
    }
}

const BasisPtr& TrigPoly::basis() const {
    if (modes.empty()) throw PreconditionViolation("empty trig polynomial has no basis");
    return modes.front().second.re.basis();
}

ExactComplex TrigPoly::mode0(const BasisPtr& b) const {
    for (const auto& [k, c] : modes)
        if (k == 0) return c;
    return ExactComplex::from_rats(b, Rat(0), Rat(0));
}

void TubeOperatorSpec::validate() const {
    if (N < 1) throw PreconditionViolation("tube: N must be >= 1");
    if (static_cast<int>(c.size()) != N)
        throw PreconditionViolation("tube: coefficient count != N");
    BasisPtr b = basis();
    for (const auto& poly : c)
        for (const auto& [k, coef] : poly.modes)
            if (coef.re.basis() != b) throw PreconditionViolation("tube: mixed bases");
    for (const auto& [k, coef] : lambda.modes)
        if (coef.re.basis() != b) throw PreconditionViolation("tube: mixed bases");
}

BasisPtr TubeOperatorSpec::basis() const {
    for (const auto& poly : c)
        if (!poly.empty()) return poly.basis();
    if (!lambda.empty()) return lambda.basis();
    throw PreconditionViolation("tube: no coefficient data");
}

Averages averages(const TubeOperatorSpec& tube) {
    tube.validate();
    Averages a;
    BasisPtr b = tube.basis();
    for (const auto& poly : tube.c) a.c0.push_back(poly.mode0(b));
    a.lambda0 = tube.lambda.mode0(b);
    return a;
}

bool ResonantSequence::all_exact() const {
    if (entries.empty()) return false;
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.exact; });
}

bool ResonantSequence::all_nonresonant() const {
    if (entries.empty()) return false;
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return !e.exact; });
}

namespace {

Int vec_norm1(const std::vector<Int>& v) {
    Int s(0);
    for (const auto& x : v) {
        Int a;
        mpz_abs(a.get_mpz_t(), x.get_mpz_t());
        s += a;
    }
    return s;
}

// theta = sum c0_j eta_j - lambda0, exact
ExactComplex averaged_symbol(const Averages& avg, const std::vector<Int>& eta) {
    ExactComplex t = -avg.lambda0;
    for (size_t j = 0; j < avg.c0.size(); ++j) t = t + avg.c0[j].scale(Rat(eta[j]));
    return t;
}

// Certified upper bound on |1 - e^{-2pi i frac}|^2 strictly below threshold_sq;
// nullopt when the inequality fails or cannot be certified.
std::optional<Rat> resonance_bound_sq(const ExactComplex& frac, const Rat& threshold_sq) {
    bool has_imag = !frac.im.is_zero();
    Rat width(1, 16);
    Rat pi_sq = pi_hi() * pi_hi();
    for (int round = 0; round <= kRefineBudget; ++round) {
        RatInterval re, im;
        try {
            re = frac.re.enclosure(width);
            im = has_imag ? frac.im.enclosure(width) : RatInterval(Rat(0));
        } catch (const RefinementExhausted&) {
            return std::nullopt;
        }
        Rat u_re = std::max(abs(re.lo), abs(re.hi));
        Rat u_im = std::max(abs(im.lo), abs(im.hi));
        Rat mod_sq_hi = u_re * u_re + u_im * u_im;
        // |1 - e^{-2pi i z}| <= 2pi|z| for real z; factor 3 covers e^{|2pi z|}
        // for complex z with 2pi|z| <= 1
        Rat slack = has_imag ? Rat(9) : Rat(1);
        bool small_enough = !has_imag || (Rat(4) * pi_sq * mod_sq_hi <= Rat(1));
        Rat bound_sq = Rat(4) * pi_sq * mod_sq_hi * slack;
        if (small_enough && bound_sq < threshold_sq) return bound_sq;
        // certified failure: |1 - e^{-2pi i z}| = 2|sin(pi z)| >= 4|z| for
        // real |z| <= 1/2
        if (!has_imag && !re.contains_zero()) {
            Rat l = std::min(abs(re.lo), abs(re.hi));
            if (l <= Rat(1, 2) && Rat(16) * l * l >= threshold_sq) return std::nullopt;
        }
        Rat w = width < Rat(1, 16) ? width : Rat(1, 16);
        width = w * w;
    }
    return std::nullopt;
}

// deterministic candidate stream of single-direction mode sizes; liouville
// truncation points are probed before generic convergent denominators
std::vector<std::pair<Int, size_t>> collect_q_candidates(const Averages& avg,
                                                         const EtaBudget& budget) {
    auto by_q = [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    };
    std::vector<std::pair<Int, size_t>> truncations, cf;
    for (size_t j = 0; j < avg.c0.size(); ++j) {
        if (!avg.c0[j].im.is_zero()) continue;
        const ExactReal& x = avg.c0[j].re;
        const auto& coords = x.coords();
        for (size_t i = 1; i < coords.size(); ++i) {
            if (coords[i].is_zero()) continue;
            const Atom& a = x.basis()->atom(i - 1);
            if (a.kind != AtomKind::Liouville) continue;
            int cap = std::min(budget.truncation_depth, Basis::liouville_depth_cap(a.liou_base));
            unsigned long fact = 1;
            for (int depth = 1; depth <= cap; ++depth) {
                fact *= static_cast<unsigned long>(depth);
                Int pw = pow_int(Int(a.liou_base), fact);
                Int dc = coords[i].den() * pw;
                Int q = dc / gcd_int(dc, coords[0].den()) * coords[0].den();
                truncations.push_back({q, j});
            }
        }
        try {
            ConvergentRun run = convergents(x, budget.cf_depth);
            for (const auto& cv : run.items)
                if (cv.q > 1) cf.push_back({cv.q, j});
        } catch (const RefinementExhausted&) {
        }
    }
    std::sort(truncations.begin(), truncations.end(), by_q);
    std::sort(cf.begin(), cf.end(), by_q);
    std::vector<std::pair<Int, size_t>> items = std::move(truncations);
    items.insert(items.end(), cf.begin(), cf.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return items;
}

}  // namespace

ResonantSequence find_eta_sequence(const TubeOperatorSpec& tube, int n_max,
                                   const EtaBudget& budget) {
    tube.validate();
    if (n_max < 1) throw PreconditionViolation("find_eta_sequence: n_max must be >= 1");
    Averages avg = averages(tube);
    BasisPtr basis = tube.basis();
    size_t N = avg.c0.size();
    ResonantSequence out;

    // exact-resonance lattice family: sum c0_j eta_j - kappa = lambda0
    {
        std::vector<ExactComplex> values = avg.c0;
        values.push_back(ExactComplex::from_rats(basis, Rat(-1), Rat(0)));
        auto sol = solve_exact_combination_complex(values, avg.lambda0);
        bool family = false;
        if (sol)
            for (const auto& v : sol->lattice)
                for (size_t j = 0; j < N; ++j)
                    if (v[j] != 0) family = true;
        if (sol && family) {
            Int prev(0);
            for (long n = 1; static_cast<int>(n) <= n_max; ++n) {
                std::optional<std::vector<Int>> best;
                Int best_norm(0);
                size_t dim = sol->lattice.size();
                std::vector<long> cvec(dim, 0);
                std::function<void(size_t)> rec = [&](size_t pos) {
                    if (pos == dim) {
                        std::vector<Int> eta(N, Int(0));
                        for (size_t j = 0; j < N; ++j) {
                            eta[j] = sol->particular[j];
                            for (size_t d = 0; d < dim; ++d)
                                eta[j] += Int(cvec[d]) * sol->lattice[d][j];
                        }
                        Int norm = vec_norm1(eta);
                        if (norm <= prev || norm <= n) return;
                        // ties prefer the sign-positive representative
                        if (!best || norm < best_norm || (norm == best_norm && eta > *best)) {
                            best = eta;
                            best_norm = norm;
                        }
                    } else {
                        for (long v = -budget.ring_max; v <= budget.ring_max; ++v) {
                            cvec[pos] = v;
                            rec(pos + 1);
                        }
                    }
                };
                rec(0);
                if (!best) {
                    out.note = "exact-resonance family exhausted the combination ring";
                    return out;
                }
                ResonantEntry e;
                e.n = n;
                e.eta = *best;
                e.exact = true;
                ExactComplex theta = averaged_symbol(avg, e.eta);
                auto ir = theta.re.as_rational();
                if (!ir || !ir->is_integer() || !theta.im.is_zero())
                    throw PreconditionViolation("resonance family produced a non-integer offset");
                e.carrier = ir->num();
                e.bound_sq = Rat(0);
                e.threshold = pow_rat(Rat(best_norm), -n);
                e.bound_log2 = -INFINITY;
                out.entries.push_back(std::move(e));
                prev = best_norm;
            }
            out.complete = true;
            return out;
        }
    }

    // small-divisor entries from truncation and convergent candidates
    auto candidates = collect_q_candidates(avg, budget);
    Int prev(0);
    for (long n = 1; static_cast<int>(n) <= n_max; ++n) {
        bool placed = false;
        for (const auto& [q, dir] : candidates) {
            if (q <= prev || q <= n) continue;
            std::vector<Int> eta(N, Int(0));
            eta[dir] = q;
            ExactComplex theta = averaged_symbol(avg, eta);
            Int kappa;
            try {
                kappa = certified_round_nearest(theta.re);
            } catch (const RefinementExhausted&) {
                continue;
            }
            ExactComplex frac{theta.re.add_rat(Rat(Int(-kappa))), theta.im};
            if (frac.re.is_zero() && frac.im.is_zero()) continue;  // stray exact resonance
            Rat threshold = pow_rat(Rat(q), -n);
            auto bound = resonance_bound_sq(frac, threshold * threshold);
            if (!bound) continue;
            ResonantEntry e;
            e.n = n;
            e.eta = eta;
            e.exact = false;
            e.bound_sq = *bound;
            e.threshold = threshold;
            e.bound_log2 = 0.5 * log2_rat(*bound);
            out.entries.push_back(std::move(e));
            prev = q;
            placed = true;
            break;
        }
        if (!placed) {
            out.note = "no further resonant modes within the probe budget";
            return out;
        }
    }
    out.complete = true;
    return out;
}

BumpSpec default_bump(double t0) {
    BumpSpec b;
    b.half_width = kTwoPi / 8.0;  // interval length pi/2
    double margin = 0.15;
    double c = std::fmod(t0 + kTwoPi / 2.0, kTwoPi);
    if (c < 0) c += kTwoPi;
    double lo = margin + b.half_width, hi = kTwoPi - margin - b.half_width;
    b.center = std::min(std::max(c, lo), hi);
    return b;
}

double bump_value(const BumpSpec& bump, double t) {
    double s = (t - bump.center) / bump.half_width;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

// one mode's numeric profile shared by the builders
struct ModeNumerics {
    std::vector<std::pair<long, cd>> dmodes;  // F_n - lambda coefficients
    cd d0{0, 0};
    bool real_valued = false;  // F_n - lambda is a real-valued function of t
    bool resolvable = false;
    double osc = 0;
};

ModeNumerics mode_numerics(const TubeOperatorSpec& tube, const std::vector<Int>& eta, int grid) {
    std::map<long, ExactComplex> acc;
    auto add = [&](long k, const ExactComplex& v) {
        auto it = acc.find(k);
        if (it == acc.end())
            acc.emplace(k, v);
        else
            it->second = it->second + v;
    };
    for (size_t j = 0; j < tube.c.size(); ++j)
        for (const auto& [k, coef] : tube.c[j].modes) add(k, coef.scale(Rat(eta[j])));
    for (const auto& [k, coef] : tube.lambda.modes) add(k, -coef);

    ModeNumerics out;
    out.real_valued = true;
    // log-domain magnitude guard keeps astronomically large eta away from
    // double conversion; the precise bandwidth test runs in doubles after
    bool coarse_ok = true;
    for (const auto& [k, v] : acc) {
        bool conj_ok;
        if (k == 0) {
            conj_ok = v.im.is_zero();
        } else {
            auto itm = acc.find(-k);
            conj_ok = itm != acc.end() && itm->second.re == v.re && itm->second.im == -v.im;
        }
        if (!conj_ok) out.real_valued = false;
        RatInterval re = v.re.coarse_enclosure(), im = v.im.coarse_enclosure();
        Rat mag = std::max(std::max(abs(re.lo), abs(re.hi)), std::max(abs(im.lo), abs(im.hi)));
        if (!mag.is_zero() && log2_rat(mag) > std::log2(static_cast<double>(grid)) + 1)
            coarse_ok = false;
    }
    out.resolvable = coarse_ok;
    if (out.resolvable) {
        double amp = 0;
        for (const auto& [k, v] : acc) {
            cd dv(v.re.approx(), v.im.approx());
            out.dmodes.push_back({k, dv});
            if (k == 0)
                out.d0 = dv;
            else
                amp += std::abs(dv);
        }
        out.osc = amp;
        out.resolvable = std::abs(out.d0) + 2.5 * amp + 32 < static_cast<double>(grid) / 2.0;
        if (!out.resolvable) out.dmodes.clear();
    }
    return out;
}

// antiderivative A(t) = int_0^t (F_n - lambda), resolvable modes only
struct Antiderivative {
    cd d0;
    std::vector<std::pair<long, cd>> osc;

    cd at(double t) const {
        cd acc = d0 * t;
        for (const auto& [k, dk] : osc) {
            cd ik(0, static_cast<double>(k));
            acc += dk * (std::exp(ik * t) - 1.0) / ik;
        }
        return acc;
    }
    double im_at(double t) const { return at(t).imag(); }
};

Antiderivative antiderivative_of(const ModeNumerics& m) {
    Antiderivative a;
    a.d0 = m.d0;
    for (const auto& [k, dv] : m.dmodes)
        if (k != 0) a.osc.push_back({k, dv});
    return a;
}

// argmax of Im A over the grid, golden-section refined; least t wins ties
double argmax_imA(const Antiderivative& A, int grid) {
    double best_t = 0, best_v = -INFINITY;
    for (int g = 0; g < grid; ++g) {
        double t = kTwoPi * g / grid;
        double v = A.im_at(t);
        if (v > best_v + 1e-15) {
            best_v = v;
            best_t = t;
        }
    }
    const double gr = 0.6180339887498949;
    double a = best_t - kTwoPi / grid, b = best_t + kTwoPi / grid;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = A.im_at(c1), f2 = A.im_at(c2);
    for (int it = 0; it < 80; ++it) {
        if (f1 >= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - gr * (b - a);
            f1 = A.im_at(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + gr * (b - a);
            f2 = A.im_at(c2);
        }
    }
    double t_ref = 0.5 * (a + b);
    if (A.im_at(t_ref) > best_v + 1e-15) {
        if (t_ref < 0) t_ref += kTwoPi;
        return t_ref;
    }
    return best_t;
}

// spectral antiderivative of the bump: cum(t) = int_0^t phi
struct BumpQuadrature {
    double total = 0;
    std::vector<cd> phi_hat;

    double cum(double t) const {
        double mean = phi_hat[0].real();
        cd acc(mean * t, 0);
        size_t n = phi_hat.size();
        for (size_t j = 1; j < n; ++j) {
            long k = freq_of(j, n);
            if (k == 0) continue;
            cd ik(0, static_cast<double>(k));
            acc += phi_hat[j] * (std::exp(ik * t) - 1.0) / ik;
        }
        return acc.real();
    }
    double psi(double t) const { return total - cum(t); }
};

BumpQuadrature bump_quadrature(const BumpSpec& bump, int grid) {
    // internal resolution beyond the sample grid: the bump's spectral tail at
    // 128 modes sits near 1e-7, too coarse for the integral identities
    int fine = std::max(grid, 8192);
    BumpQuadrature q;
    std::vector<cd> samples(static_cast<size_t>(fine));
    for (int g = 0; g < fine; ++g)
        samples[static_cast<size_t>(g)] = bump_value(bump, kTwoPi * g / fine);
    fft(samples, false);
    for (auto& x : samples) x /= static_cast<double>(fine);
    q.phi_hat = std::move(samples);
    q.total = q.phi_hat[0].real() * kTwoPi;
    return q;
}

}  // namespace

BumpSpec choose_bump(const TubeOperatorSpec& tube, const ResonantSequence& seq, int grid) {
    double t0 = 0;
    if (!seq.entries.empty()) {
        ModeNumerics mn = mode_numerics(tube, seq.entries.back().eta, grid);
        if (mn.resolvable) {
            Antiderivative A = antiderivative_of(mn);
            t0 = argmax_imA(A, grid);
        }
        // unresolvable real-valued data has Im A identically 0: t_n = 0
    }
    return default_bump(t0);
}

FourierSolution build_homogeneous_singular(const TubeOperatorSpec& tube,
                                           const ResonantSequence& seq, int grid) {
    tube.validate();
    if (!is_pow2(grid)) throw PreconditionViolation("grid must be a power of two >= 64");
    if (!seq.all_exact())
        throw PreconditionViolation(
            "non-resonant entries present: exact resonances required here "
            "(use build_pair for small-divisor sequences)");
    FourierSolution sol;
    sol.grid = grid;
    sol.kind = "mu";
    for (const auto& entry : seq.entries) {
        ModeNumerics mn = mode_numerics(tube, entry.eta, grid);
        FourierMode mode;
        mode.eta = entry.eta;
        mode.resolvable = mn.resolvable;
        mode.En = cd(0, 0);
        if (mn.resolvable) {
            Antiderivative A = antiderivative_of(mn);
            mode.t_n = argmax_imA(A, grid);
            double M = A.im_at(mode.t_n);
            mode.op_coeffs = mn.dmodes;
            mode.full.resize(static_cast<size_t>(grid));
            double supv = 0;
            for (int g = 0; g < grid; ++g) {
                double t = kTwoPi * g / grid;
                // mu-hat(t) = e^{-M} e^{-i A(t)}
                cd val = std::exp(cd(-M, 0) + cd(0, -1) * A.at(t));
                mode.full[static_cast<size_t>(g)] = val;
                supv = std::max(supv, std::abs(val));
            }
            cd at_tn = std::exp(cd(-M, 0) + cd(0, -1) * A.at(mode.t_n));
            mode.slow.assign(static_cast<size_t>(grid), at_tn);
            mode.sup_grid = std::max(supv, std::abs(at_tn));
            mode.value_at_tn = std::abs(at_tn);
        } else {
            if (!mn.real_valued)
                throw PreconditionViolation(
                    "mode is unresolvable and non-real-valued; sup data would be uncertified");
            // real-valued data keeps Im A identically 0: pure phase, unit sup
            mode.t_n = 0;
            mode.slow.assign(static_cast<size_t>(grid), cd(1, 0));
            mode.sup_grid = 1.0;
            mode.value_at_tn = 1.0;
        }
        mode.sup_log2 = 0.0;  // sup |mu-hat| = 1 by normalization
        sol.modes.push_back(std::move(mode));
    }
    return sol;
}

PairSolutions build_pair(const TubeOperatorSpec& tube, const ResonantSequence& seq,
                         const BumpSpec& bump, int grid) {
    tube.validate();
    if (!is_pow2(grid)) throw PreconditionViolation("grid must be a power of two >= 64");
    if (!seq.all_nonresonant())
        throw PreconditionViolation(
            "exact-resonance entries present: E_n = 0 on this branch "
            "(use build_homogeneous_singular)");
    Averages avg = averages(tube);
    BumpQuadrature quad = bump_quadrature(bump, grid);
    if (quad.total <= 0) throw PreconditionViolation("bump has empty support");

    PairSolutions out;
    out.bump = bump;
    out.phi_integral = quad.total;
    out.f.grid = out.u.grid = grid;
    out.f.kind = "f";
    out.u.kind = "u";

    for (const auto& entry : seq.entries) {
        ModeNumerics mn = mode_numerics(tube, entry.eta, grid);
        if (!mn.resolvable && !mn.real_valued)
            throw PreconditionViolation(
                "mode is unresolvable and non-real-valued; sup data would be uncertified");
        // E_n from the exact fractional offset (tiny values underflow to 0)
        ExactComplex theta = averaged_symbol(avg, entry.eta);
        Int kappa = certified_round_nearest(theta.re);
        ExactComplex frac{theta.re.add_rat(Rat(Int(-kappa))), theta.im};
        auto tiny_mid = [](const ExactReal& x) {
            try {
                return to_double(x.enclosure(Rat(Int(1), Int(1) << 80)).mid());
            } catch (const RefinementExhausted&) {
                return to_double(x.coarse_enclosure().mid());
            }
        };
        double fr = tiny_mid(frac.re);
        double fi = frac.im.is_zero() ? 0.0 : tiny_mid(frac.im);
        cd En = 1.0 - std::exp(cd(0, -kTwoPi) * cd(fr, fi));

        FourierMode fmode, umode;
        fmode.eta = umode.eta = entry.eta;
        fmode.En = umode.En = En;
        fmode.resolvable = umode.resolvable = mn.resolvable;

        double t_n = 0;
        std::optional<Antiderivative> A;
        if (mn.resolvable) {
            A = antiderivative_of(mn);
            t_n = argmax_imA(*A, grid);
            fmode.op_coeffs = umode.op_coeffs = mn.dmodes;
        }
        fmode.t_n = umode.t_n = t_n;
        out.t_ns.push_back(t_n);

        fmode.slow.resize(static_cast<size_t>(grid));
        umode.slow.resize(static_cast<size_t>(grid));
        double sup_wu = 0;
        for (int g = 0; g < grid; ++g) {
            double t = kTwoPi * g / grid;
            cd wf = En * bump_value(bump, t);
            cd wu = cd(0, 1) * (quad.total - En * quad.psi(t));
            fmode.slow[static_cast<size_t>(g)] = wf;
            umode.slow[static_cast<size_t>(g)] = wu;
            sup_wu = std::max(sup_wu, std::abs(wu));
        }
        umode.value_at_tn = std::abs(quad.total - En * quad.psi(t_n));
        fmode.value_at_tn = std::abs(En) * bump_value(bump, t_n);

        if (mn.resolvable) {
            fmode.full.resize(static_cast<size_t>(grid));
            umode.full.resize(static_cast<size_t>(grid));
            cd Atn = A->at(t_n);
            double sup_f = 0, sup_u = 0;
            for (int g = 0; g < grid; ++g) {
                double t = kTwoPi * g / grid;
                cd phase = std::exp(cd(0, -1) * (A->at(t) - Atn));
                fmode.full[static_cast<size_t>(g)] = fmode.slow[static_cast<size_t>(g)] * phase;
                umode.full[static_cast<size_t>(g)] = umode.slow[static_cast<size_t>(g)] * phase;
                sup_f = std::max(sup_f, std::abs(fmode.full[static_cast<size_t>(g)]));
                sup_u = std::max(sup_u, std::abs(umode.full[static_cast<size_t>(g)]));
            }
            fmode.sup_grid = sup_f;
            umode.sup_grid = sup_u;
        } else {
            fmode.sup_grid = std::abs(En);  // |phase| = 1 for real-valued data
            umode.sup_grid = sup_wu;
        }
        // certified: |f-hat| <= |E_n| < threshold, |phase| <= 1 by the t_n pick
        fmode.sup_log2 = 0.5 * log2_rat(entry.bound_sq);
        umode.sup_log2 = std::log2(std::max(sup_wu, 1e-300));
        out.f.modes.push_back(std::move(fmode));
        out.u.modes.push_back(std::move(umode));
    }
    return out;
}

ResidualReport apply_operator(const TubeOperatorSpec& tube, const FourierSolution& sol,
                              const FourierSolution* target) {
    tube.validate();
    if (!is_pow2(sol.grid)) throw PreconditionViolation("grid must be a power of two >= 64");
    if (target && target->grid != sol.grid)
        throw PreconditionViolation("apply_operator: grid mismatch");
    if (target && target->modes.size() != sol.modes.size())
        throw PreconditionViolation("apply_operator: mode count mismatch");
    ResidualReport rep;
    size_t G = static_cast<size_t>(sol.grid);
    for (size_t mi = 0; mi < sol.modes.size(); ++mi) {
        const FourierMode& mode = sol.modes[mi];
        const FourierMode* tgt = target ? &target->modes[mi] : nullptr;
        if (tgt && !(tgt->eta == mode.eta))
            throw PreconditionViolation("apply_operator: target mode mismatch");
        ResidualReport::PerMode pm;
        pm.eta = mode.eta;
        if ((!mode.slow.empty() && mode.slow.size() != G) ||
            (!mode.full.empty() && mode.full.size() != G))
            throw PreconditionViolation("apply_operator: grid mismatch");
        if (mode.resolvable && !mode.full.empty()) {
            // direct check: D_t v + (F_n - lambda) v - rhs on the grid
            std::vector<cd> dv = spectral_Dt(mode.full);
            double opmax = 0, res = 0, scale = 0;
            for (size_t g = 0; g < G; ++g) {
                double t = kTwoPi * static_cast<double>(g) / static_cast<double>(G);
                cd coeff(0, 0);
                for (const auto& [k, dk] : mode.op_coeffs)
                    coeff += dk * std::exp(cd(0, static_cast<double>(k)) * t);
                opmax = std::max(opmax, std::abs(coeff));
                cd r = dv[g] + coeff * mode.full[g];
                if (tgt) r -= tgt->full.empty() ? tgt->slow[g] : tgt->full[g];
                res = std::max(res, std::abs(r));
                scale = std::max(scale, std::abs(mode.full[g]));
            }
            if (tgt)
                for (size_t g = 0; g < G; ++g)
                    scale = std::max(scale,
                                     std::abs(tgt->full.empty() ? tgt->slow[g] : tgt->full[g]));
            pm.normalization = scale * (1.0 + opmax);
            pm.residual = res / std::max(pm.normalization, 1e-300);
            pm.factored = false;
        } else {
            // factored check: P(phase * w) = phase * D_t w, so D_t w must match
            // the target's slow factor
            std::vector<cd> dv = spectral_Dt(mode.slow);
            double res = 0, scale = 0;
            for (size_t g = 0; g < G; ++g) {
                cd r = dv[g];
                if (tgt) r -= tgt->slow[g];
                res = std::max(res, std::abs(r));
                scale = std::max(scale, std::abs(mode.slow[g]));
            }
            if (tgt)
                for (size_t g = 0; g < G; ++g) scale = std::max(scale, std::abs(tgt->slow[g]));
            pm.normalization = scale;
            pm.residual = res / std::max(scale, 1e-300);
            pm.factored = true;
        }
        rep.max_residual = std::max(rep.max_residual, pm.residual);
        rep.modes.push_back(std::move(pm));
    }
    return rep;
}

std::string to_string(DecayClass c) {
    switch (c) {
        case DecayClass::RapidDecay: return "rapid-decay";
        case DecayClass::SlowGrowth: return "slow-growth";
        case DecayClass::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

SmoothnessDiagnostic smoothness_diagnostic(const FourierSolution& sol) {
    if (sol.modes.size() < 4)
        throw PreconditionViolation("smoothness_diagnostic: fewer than 4 modes");
    std::vector<double> x, y;
    for (const auto& m : sol.modes) {
        x.push_back(log2_int(vec_norm1(m.eta)));
        y.push_back(m.sup_log2);
    }
    SmoothnessDiagnostic diag;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    diag.fitted_rate = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;

    // rapid decay: every polynomial rate 1..8 eventually beaten on the data
    // (a nonempty suffix of modes sits below |eta|^{-s})
    bool rapid = true;
    for (int s = 1; s <= 8 && rapid; ++s) {
        size_t tail = 0;
        for (size_t i = x.size(); i-- > 0;) {
            if (y[i] <= -static_cast<double>(s) * x[i] + 1e-9)
                ++tail;
            else
                break;
        }
        if (tail < 1) rapid = false;
    }
    if (rapid) {
        diag.label = DecayClass::RapidDecay;
        return diag;
    }
    bool slow = true;
    for (size_t i = 0; i < x.size(); ++i)
        if (y[i] > 8.0 * x[i] + 64.0) slow = false;
    diag.label = slow ? DecayClass::SlowGrowth : DecayClass::Indeterminate;
    return diag;
}

KroneckerFrame KroneckerFrame::build(const std::vector<ExactComplex>& alphas, int k) {
    if (k < 0 || k >= static_cast<int>(alphas.size()))
        throw PreconditionViolation("frame: bad index");
    const ExactComplex& ak = alphas[static_cast<size_t>(k)];
    if (ak.im.is_zero()) throw PreconditionViolation("frame: Im alpha_k = 0");
    auto inv = ak.im.try_invert();
    if (!inv) throw AlgebraUnrepresentable("frame: Im alpha_k not invertible in the algebra");
    KroneckerFrame fr;
    fr.k = k;
    for (size_t j = 0; j < alphas.size(); ++j) {
        if (static_cast<int>(j) == k) continue;
        auto t2 = alphas[j].im.try_mul(*inv);
        if (!t2) throw AlgebraUnrepresentable("frame: Im ratio leaves the algebra");
        auto cross = ak.re.try_mul(*t2);
        if (!cross) throw AlgebraUnrepresentable("frame: Re/Im product leaves the algebra");
        fr.t1.push_back(alphas[j].re - *cross);
        fr.t2.push_back(*t2);
    }
    return fr;
}

std::optional<ApproxTuple> kronecker_approximate(const std::vector<ExactComplex>& alphas,
                                                 const ExactComplex& z, const Rat& eps,
                                                 long bound) {
    if (alphas.empty()) throw PreconditionViolation("kronecker_approximate: no coefficients");
    if (eps.sign() <= 0) throw PreconditionViolation("kronecker_approximate: eps must be > 0");
    const BasisPtr& basis = z.re.basis();
    int k = -1;
    for (size_t j = 0; j < alphas.size(); ++j)
        if (!alphas[j].im.is_zero()) k = static_cast<int>(j);
    if (k < 0) throw PreconditionViolation("kronecker_approximate: all coefficients real");

    // double frame guides the rounding and screens candidates; every hit is
    // certified exactly before being returned
    double ak_re = alphas[static_cast<size_t>(k)].re.approx();
    double ak_im = alphas[static_cast<size_t>(k)].im.approx();
    std::vector<double> re_d, im_d, t1, t2;
    for (size_t j = 0; j < alphas.size(); ++j) {
        re_d.push_back(alphas[j].re.approx());
        im_d.push_back(alphas[j].im.approx());
        if (static_cast<int>(j) == k) continue;
        double tj2 = im_d[j] / ak_im;
        t2.push_back(tj2);
        t1.push_back(re_d[j] - ak_re * tj2);
    }
    double zx = z.re.approx(), zy = z.im.approx();
    double bx = zx - zy * ak_re / ak_im;
    double by = zy / ak_im;

    Rat eps_sq = eps * eps;
    double eps_d = to_double(eps);
    double screen = eps_d * eps_d * (1.0 + 1e-6) + 1e-9;
    size_t nm1 = t1.size();

    auto try_m = [&](const std::vector<long>& m) -> std::optional<ApproxTuple> {
        double T1 = 0, T2 = 0;
        for (size_t j = 0; j < nm1; ++j) {
            T1 += t1[j] * static_cast<double>(m[j]);
            T2 += t2[j] * static_cast<double>(m[j]);
        }
        long ell0 = std::lround(bx - T1);
        long n0 = std::lround(by - T2);
        for (long dl : {0L, -1L, 1L})
            for (long dn : {0L, -1L, 1L}) {
                long ell = ell0 + dl, n = n0 + dn;
                // pure-double distance screen before any exact work
                double dre = static_cast<double>(ell) + static_cast<double>(n) * ak_re - zx;
                double dim = static_cast<double>(n) * ak_im - zy;
                size_t mj = 0;
                for (size_t j = 0; j < alphas.size(); ++j) {
                    if (static_cast<int>(j) == k) continue;
                    dre += re_d[j] * static_cast<double>(m[mj]);
                    dim += im_d[j] * static_cast<double>(m[mj]);
                    ++mj;
                }
                if (dre * dre + dim * dim > screen) continue;
                ExactComplex w = ExactComplex::from_rats(basis, Rat(ell), Rat(0));
                size_t mi = 0;
                for (size_t j = 0; j < alphas.size(); ++j) {
                    if (static_cast<int>(j) == k) continue;
                    w = w + alphas[j].scale(Rat(m[mi]));
                    ++mi;
                }
                w = w + alphas[static_cast<size_t>(k)].scale(Rat(n));
                ExactComplex diff = w - z;
                int cmp;
                try {
                    cmp = cmp_abs_sq_vs_rat(diff, eps_sq);
                } catch (const RefinementExhausted&) {
                    continue;
                }
                if (cmp < 0) {
                    ApproxTuple tup;
                    tup.ell = Int(ell);
                    tup.n = Int(n);
                    tup.k = k;
                    for (long mm : m) tup.m.push_back(Int(mm));
                    auto exact = diff.abs_sq_exact();
                    if (exact && exact->as_rational()) {
                        tup.dist_sq_hi = *exact->as_rational();
                    } else {
                        RatInterval iv = diff.abs_sq_interval(eps_sq);
                        tup.dist_sq_hi = iv.hi < eps_sq ? iv.hi : eps_sq;
                    }
                    return tup;
                }
            }
        return std::nullopt;
    };

    // rings |m|_1 = s, lexicographic within each ring
    std::vector<long> m(nm1, 0);
    if (nm1 == 0) return try_m(m);
    for (long s = 0; s <= bound; ++s) {
        std::optional<ApproxTuple> hit;
        std::function<void(size_t, long)> rec = [&](size_t pos, long remain) {
            if (hit) return;
            if (pos + 1 == nm1) {
                for (long v : {-remain, remain}) {
                    m[pos] = v;
                    hit = try_m(m);
                    if (hit || remain == 0) break;
                }
                return;
            }
            for (long v = -remain; v <= remain && !hit; ++v) {
                m[pos] = v;
                rec(pos + 1, remain - std::labs(v));
            }
        };
        rec(0, s);
        if (hit) return hit;
    }
    return std::nullopt;
}

}  // namespace hypotor
