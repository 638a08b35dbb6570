#include "hypotor/rational.hpp"

#include <cmath>
#include <cstring>

namespace hypotor {

std::string Rat::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rat rational_normalize(const Int& num, const Int& den) { return Rat(num, den); }

Rat abs(const Rat& x) { return x.sign() < 0 ? -x : x; }

Int floor_int(const Rat& x) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
    return q;
}

Int ceil_int(const Rat& x) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
    return q;
}

Int round_nearest(const Rat& x) {
    // floor(x + 1/2); exact halves land on the lower integer's successor,
    // i.e. 0.5 -> 1 would need cdiv; we take floor(2x+1)/2 semantics: halves down.
    Rat shifted = x + Rat(1, 2);
    Int f = floor_int(shifted);
    if (Rat(f) == shifted) return f - 1;  // x was exactly k + 1/2
    return f;
}

Rat pow_rat(const Rat& x, long e) {
    if (e == 0) return Rat(1);
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    Int n, d;
    mpz_pow_ui(n.get_mpz_t(), x.num().get_mpz_t(), k);
    mpz_pow_ui(d.get_mpz_t(), x.den().get_mpz_t(), k);
    return inv ? Rat(d, n) : Rat(n, d);
}

Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational literal");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) throw ParseError("bad rational literal: " + s);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac_len = s.size() - dot - 1;
        if (frac_len == 0 || digits.empty()) throw ParseError("bad decimal literal: " + s);
        mpz_class num;
        if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0)
            throw ParseError("bad decimal literal: " + s);
        return Rat(Int(num), pow_int(Int(10), frac_len));
    }
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
        throw ParseError("bad rational literal: " + s);
    if (q.get_den() == 0) throw ParseError("zero denominator: " + s);
    q.canonicalize();
    return Rat(q);
}

std::string decimal_or_fraction(const Rat& x, int max_digits) {
    Int den = x.den();
    if (den == 1) return x.num().get_str();
    int twos = 0, fives = 0;
    Int d = den;
    while (mpz_even_p(d.get_mpz_t())) {
        d /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) {
        d /= 5;
        ++fives;
    }
    int digits = std::max(twos, fives);
    if (d != 1 || digits > max_digits) return x.str();
    // scale to integer / 10^digits
    Int scaled = x.num() * pow_int(Int(2), digits - twos) * pow_int(Int(5), digits - fives);
    bool neg = scaled < 0;
    std::string body = hypotor::Int(::abs(scaled)).get_str();
    if (static_cast<int>(body.size()) <= digits) body.insert(0, digits + 1 - body.size(), '0');
    body.insert(body.size() - digits, ".");
    return (neg ? "-" : "") + body;
}

double to_double(const Rat& x) { return mpq_get_d(x.raw().get_mpq_t()); }

double log2_int(const Int& x) {
    if (x <= 0) throw PreconditionViolation("log2_int: nonpositive");
    long exp = 0;
    double d = mpz_get_d_2exp(&exp, x.get_mpz_t());
    return std::log2(d) + static_cast<double>(exp);
}

double log2_rat(const Rat& x) {
    if (x.sign() <= 0) throw PreconditionViolation("log2_rat: nonpositive");
    return log2_int(x.num()) - log2_int(x.den());
}

Int gcd_int(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

XGcd xgcd(const Int& a, const Int& b) {
    XGcd r;
    mpz_gcdext(r.g.get_mpz_t(), r.x.get_mpz_t(), r.y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

}  // namespace hypotor
