#include "gasketlab/rational.hpp"

namespace gasketlab {

Int floor_sqrt(const Rat& x) {
    if (sgn(x) < 0) throw std::domain_error("floor_sqrt: negative input");
    // floor(sqrt(n/d)) = floor(sqrt(n*d)/d) since n/d = n*d/d^2.
    Int nd = x.get_num() * x.get_den();
    Int root;
    mpz_sqrt(root.get_mpz_t(), nd.get_mpz_t());
    return root / x.get_den();
}

RatInterval sqrt_interval(const Rat& x, unsigned bits) {
    if (sgn(x) < 0) throw std::domain_error("sqrt_interval: negative input");
    if (sgn(x) == 0) return {Rat(0), Rat(0)};
    // Scale so that the integer sqrt carries `bits` fractional bits:
    // sqrt(x) = sqrt(x * 4^bits) / 2^bits.
    Rat scaled = x;
    Int two_pow(1);
    two_pow <<= bits;
    scaled *= Rat(two_pow * two_pow);
    Int nd = scaled.get_num() * scaled.get_den();
    Int root;
    mpz_sqrt(root.get_mpz_t(), nd.get_mpz_t());
    // root <= sqrt(nd) < root+1, so root/den <= sqrt(scaled) < (root+1)/den.
    Rat lo = Rat(root) / Rat(scaled.get_den());
    Rat hi = Rat(root + 1) / Rat(scaled.get_den());
    lo /= Rat(two_pow);
    hi /= Rat(two_pow);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
}

int compare_sqrt(const Rat& x, const Rat& q) {
    if (sgn(q) < 0) return +1;  // sqrt(x) >= 0 > q
    Rat q2 = q * q;
    if (x < q2) return -1;
    if (x > q2) return +1;
    return 0;
}

void Dyadic::normalize() {
    if (sgn(num_) == 0) {
        exp_ = 0;
        return;
    }
    while (exp_ > 0 && mpz_even_p(num_.get_mpz_t())) {
        num_ >>= 1;
        --exp_;
    }
}

Dyadic Dyadic::from_rat(const Rat& r) {
    Int den = r.get_den();
    unsigned long e = mpz_scan1(den.get_mpz_t(), 0);
    Int odd_part = den >> e;
    if (odd_part != 1) throw std::domain_error("Dyadic::from_rat: denominator not a power of two");
    return Dyadic(r.get_num(), static_cast<unsigned>(e));
}

bool Dyadic::is_dyadic(const Rat& r) {
    Int den = r.get_den();
    unsigned long e = mpz_scan1(den.get_mpz_t(), 0);
    return (den >> e) == 1;
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    unsigned e = std::max(exp_, o.exp_);
    Int a = num_ << (e - exp_);
    Int b = o.num_ << (e - o.exp_);
    return Dyadic(a + b, e);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + (-o); }

Dyadic Dyadic::operator*(const Dyadic& o) const { return Dyadic(num_ * o.num_, exp_ + o.exp_); }

std::string Dyadic::str() const {
    if (exp_ == 0) return num_.get_str();
    return num_.get_str() + "/2^" + std::to_string(exp_);
}

}  // namespace gasketlab
