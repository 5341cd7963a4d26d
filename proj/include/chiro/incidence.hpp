#pragma once

#include <cstdint>

#include "chiro/configuration.hpp"

namespace chiro {

// Modular screening for degeneracy detection. An exactly-zero determinant
// reduces to zero mod p, so screening never misses a true degeneracy; the
// rare false hits must be confirmed exactly by the caller.
class ModFilter {
  public:
    static constexpr std::uint64_t default_prime = 4611686018427387847ull;  // < 2^62

    explicit ModFilter(std::uint64_t prime = default_prime) : p_(prime) {}

    std::uint64_t prime() const { return p_; }
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t inv(std::uint64_t a) const;  // a != 0 mod p

    // num * den^-1 mod p; nullopt when the denominator vanishes mod p.
    std::optional<std::uint64_t> reduce(const Scalar& q) const;
    std::optional<std::vector<std::uint64_t>> reduce_point(const Vec& v) const;

  private:
    std::uint64_t p_;
};

bool collinear_exact(const Vec& a, const Vec& b, const Vec& c);

// Generic-extension property: no added point lies on a hyperplane spanned
// by d affinely independent points of the remaining configuration.
struct ExtensionGenericityReport {
    bool generic = true;
    // each violation: the added index followed by d spanning indices
    std::vector<std::vector<std::size_t>> violations;
};

ExtensionGenericityReport check_generic_extension(const std::vector<Vec>& pts,
                                                  const std::vector<bool>& added, std::size_t d,
                                                  std::size_t max_violations = 16);

bool is_generic_extension(const ExtensionRecord& er);

// Hyperplanes spanned by the configuration that carry more than d points,
// with the inclusion-maximal member sets. Exact, for desk-scale inputs.
struct SpannedHyperplane {
    Vec normal;
    Scalar offset;  // hyperplane {x : normal.x = offset}
    std::vector<std::size_t> members;
};

std::vector<SpannedHyperplane> degenerate_hyperplanes(const std::vector<Vec>& pts, std::size_t d);

}  // namespace chiro
