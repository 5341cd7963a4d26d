#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace chiro {

// Exact rational scalar. mpq_class keeps values in lowest terms with a
// positive denominator after canonicalization, which the helpers below
// always maintain.
using Scalar = mpq_class;
using Integer = mpz_class;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input could not be parsed.
struct parse_error : error {
    using error::error;
};

// A documented precondition was violated.
struct precondition_error : error {
    using error::error;
};

// A certificate replay failed (broken collinearity, forced-point mismatch).
struct certificate_error : error {
    using error::error;
};

inline Scalar rat(long num, long den = 1) {
    if (den == 0) throw error("rational with zero denominator");
    Scalar q(num, den);
    q.canonicalize();
    return q;
}

// Parses "a/b" or "a" (optionally signed). Throws on zero denominator.
Scalar parse_rational(const std::string& s);

// Renders as "a" or "a/b" in lowest terms.
std::string to_string(const Scalar& q);

int sign(const Scalar& q);
Scalar abs(const Scalar& q);

// Nearest-integer rounding; ties rounded away from zero.
Integer round_nearest_away(const Scalar& q);

// floor(log2(q)) for q > 0.
long floor_log2(const Scalar& q);

// Rational r with r*r <= q (resp. >= q), within 2^-bits of sqrt(q). q >= 0.
Scalar sqrt_lower(const Scalar& q, unsigned bits = 32);
Scalar sqrt_upper(const Scalar& q, unsigned bits = 32);

// Largest power of two <= q, for q > 0.
Scalar pow2_below(const Scalar& q);

// Deterministic rational sampling. Values are dyadic with `bits` of
// entropy, uniform in [-1,1).
class RatRng {
  public:
    explicit RatRng(std::uint64_t seed) : eng_(seed) {}

    Scalar unit(unsigned bits = 48);                // in [-1,1)
    Scalar in_range(const Scalar& lo, const Scalar& hi, unsigned bits = 48);
    std::uint64_t bits64() { return eng_(); }
    std::uint64_t below(std::uint64_t n);

  private:
    std::mt19937_64 eng_;
};

}  // namespace chiro
