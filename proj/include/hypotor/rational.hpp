#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace hypotor {

using Int = mpz_class;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RefinementExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// A requested exact result leaves the representable algebra (e.g. products
/// of liouville symbols, inverses of multi-atom combinations).
struct AlgebraUnrepresentable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Arbitrary-precision rational, always stored reduced with positive denominator.
class Rat {
  public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}
    Rat(const Int& n) : v_(n) {}
    Rat(const Int& num, const Int& den) {
        if (den == 0) throw PreconditionViolation("rational: zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    Rat(long num, long den) : Rat(Int(num), Int(den)) {}
    explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    const Int num() const { return v_.get_num(); }
    const Int den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
    Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
    Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
    Rat operator/(const Rat& o) const {
        if (o.is_zero()) throw PreconditionViolation("rational: division by zero");
        return Rat(mpq_class(v_ / o.v_));
    }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }

    bool operator==(const Rat& o) const { return v_ == o.v_; }
    bool operator!=(const Rat& o) const { return v_ != o.v_; }
    bool operator<(const Rat& o) const { return v_ < o.v_; }
    bool operator<=(const Rat& o) const { return v_ <= o.v_; }
    bool operator>(const Rat& o) const { return v_ > o.v_; }
    bool operator>=(const Rat& o) const { return v_ >= o.v_; }

    std::string str() const;

  private:
    mpq_class v_;
};

Rat rational_normalize(const Int& num, const Int& den);
Rat abs(const Rat& x);
Int floor_int(const Rat& x);
Int ceil_int(const Rat& x);
/// Nearest integer; exact halves round down (deterministic).
Int round_nearest(const Rat& x);
Rat pow_rat(const Rat& x, long e);
Int pow_int(const Int& b, unsigned long e);

/// Parses "p", "p/q" or an exact decimal "d.ddd" (all base 10).
Rat parse_rat(const std::string& s);

/// Exact decimal string when den divides a power of ten (within digit cap), else "p/q".
std::string decimal_or_fraction(const Rat& x, int max_digits = 40);

double to_double(const Rat& x);
/// log2 of a positive rational; safe for values far outside double range.
double log2_rat(const Rat& x);
double log2_int(const Int& x);

Int gcd_int(const Int& a, const Int& b);
/// Extended gcd: g = gcd(a,b) >= 0 with g = a*x + b*y.
struct XGcd {
    Int g, x, y;
};
XGcd xgcd(const Int& a, const Int& b);

}  // namespace hypotor
