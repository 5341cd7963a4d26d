#include "chiro/scalar.hpp"

namespace chiro {

Scalar parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            Integer n(s);
            return Scalar(n);
        }
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw error("rational with zero denominator: " + s);
        Scalar q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw error("malformed rational: " + s);
    }
}

std::string to_string(const Scalar& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

int sign(const Scalar& q) { return sgn(q); }

Scalar abs(const Scalar& q) { return q < 0 ? Scalar(-q) : q; }

Integer round_nearest_away(const Scalar& q) {
    Integer lo, hi;
    mpz_fdiv_q(lo.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    hi = lo + 1;
    Scalar dl = q - Scalar(lo);
    Scalar dh = Scalar(hi) - q;
    if (dl < dh) return lo;
    if (dh < dl) return hi;
    // tie: away from zero
    return q >= 0 ? hi : lo;
}

long floor_log2(const Scalar& q) {
    if (q <= 0) throw error("floor_log2 needs a positive argument");
    // bit lengths of num/den give the answer up to one unit
    long bn = static_cast<long>(mpz_sizeinbase(q.get_num().get_mpz_t(), 2));
    long bd = static_cast<long>(mpz_sizeinbase(q.get_den().get_mpz_t(), 2));
    long e = bn - bd;  // 2^(e-1) <= q < 2^(e+1) roughly; fix up exactly
    while (true) {
        Scalar p;
        if (e >= 0)
            p = Scalar(Integer(1) << e);
        else
            p = Scalar(1, 1) / Scalar(Integer(1) << (-e));
        if (p > q) {
            --e;
            continue;
        }
        Scalar p2 = p * 2;
        if (p2 <= q) {
            ++e;
            continue;
        }
        return e;
    }
}

Scalar pow2_below(const Scalar& q) {
    long e = floor_log2(q);
    if (e >= 0) return Scalar(Integer(1) << e);
    return Scalar(1) / Scalar(Integer(1) << (-e));
}

static Scalar sqrt_approx(const Scalar& q, unsigned bits, bool lower) {
    if (q < 0) throw error("sqrt of negative");
    if (q == 0) return Scalar(0);
    // scale to an integer: q = n/d; sqrt(q) = sqrt(n*d)/d
    Integer nd = q.get_num() * q.get_den();
    // integer sqrt of nd * 4^bits
    Integer scaled = nd << (2 * bits);
    Integer r;
    mpz_sqrt(r.get_mpz_t(), scaled.get_mpz_t());  // floor sqrt
    Scalar lo(r, q.get_den() * (Integer(1) << bits));
    lo.canonicalize();
    if (lower || r * r == scaled) return lo;
    Scalar hi(r + 1, q.get_den() * (Integer(1) << bits));
    hi.canonicalize();
    return hi;
}

Scalar sqrt_lower(const Scalar& q, unsigned bits) { return sqrt_approx(q, bits, true); }
Scalar sqrt_upper(const Scalar& q, unsigned bits) { return sqrt_approx(q, bits, false); }

Scalar RatRng::unit(unsigned bits) {
    if (bits > 62) bits = 62;
    std::uint64_t mask = (bits >= 64) ? ~0ull : ((1ull << (bits + 1)) - 1);
    std::uint64_t v = eng_() & mask;
    // v in [0, 2^(bits+1)); map to [-1,1)
    Scalar q(Integer(static_cast<unsigned long>(v)), Integer(1) << bits);
    q.canonicalize();
    return q - 1;
}

Scalar RatRng::in_range(const Scalar& lo, const Scalar& hi, unsigned bits) {
    Scalar t = (unit(bits) + 1) / 2;  // [0,1)
    return lo + t * (hi - lo);
}

std::uint64_t RatRng::below(std::uint64_t n) {
    if (n == 0) throw error("RatRng::below(0)");
    return eng_() % n;
}

}  // namespace chiro
