#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gasketlab {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

inline int sign(const Rat& r) { return sgn(r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }

/// Largest integer n with n^2 <= num/den (num, den >= 0).
Int floor_sqrt(const Rat& x);

/// Encloses sqrt(x) in a rational interval of width <= 2^-bits.
struct RatInterval {
    Rat lo;
    Rat hi;

    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
};

RatInterval sqrt_interval(const Rat& x, unsigned bits = 64);

/// Exact comparison sqrt(x) <=> q for x >= 0. Returns -1, 0, +1.
int compare_sqrt(const Rat& x, const Rat& q);

/// Dyadic rational num / 2^exp, canonical form has odd numerator or is zero.
class Dyadic {
  public:
    Dyadic() : num_(0), exp_(0) {}
    Dyadic(long n) : num_(n), exp_(0) { normalize(); }
    Dyadic(Int n, unsigned e) : num_(std::move(n)), exp_(e) { normalize(); }

    static Dyadic from_parts(Int n, unsigned e) { return Dyadic(std::move(n), e); }

    const Int& num() const { return num_; }
    unsigned exp() const { return exp_; }

    Rat to_rat() const {
        Rat r(num_);
        Int den(1);
        den <<= exp_;
        return r / Rat(den);
    }
    double to_d() const { return to_double(to_rat()); }

    /// Fails if r is not dyadic.
    static Dyadic from_rat(const Rat& r);
    static bool is_dyadic(const Rat& r);

    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const;
    Dyadic operator*(const Dyadic& o) const;
    Dyadic operator-() const { return Dyadic(-num_, exp_); }
    Dyadic half() const { return Dyadic(num_, exp_ + 1); }

    bool operator==(const Dyadic& o) const { return num_ == o.num_ && exp_ == o.exp_; }
    bool operator!=(const Dyadic& o) const { return !(*this == o); }
    bool operator<(const Dyadic& o) const { return to_rat() < o.to_rat(); }

    std::string str() const;

  private:
    void normalize();

    Int num_;
    unsigned exp_;
};

}  // namespace gasketlab
