#pragma once

#include <set>

#include "chiro/configuration.hpp"

namespace chiro {

// Sign map on sorted (d+1)-tuples of labels, produced from a configuration.
class Chirotope {
  public:
    Chirotope() = default;
    Chirotope(std::size_t dim, std::vector<Label> labels,
              std::map<std::vector<Label>, Sign> values);

    std::size_t dim() const { return dim_; }
    const std::vector<Label>& labels() const { return labels_; }
    const std::map<std::vector<Label>, Sign>& values() const { return values_; }

    // Sign on an arbitrary tuple: permutation parity applied to the sorted
    // entry; repeated labels give 0.
    Sign value(std::vector<Label> tuple) const;

    Chirotope negated() const;
    bool operator==(const Chirotope& o) const;
    bool operator!=(const Chirotope& o) const { return !(*this == o); }

  private:
    std::size_t dim_ = 0;
    std::vector<Label> labels_;              // label order of the source configuration
    std::map<std::vector<Label>, Sign> values_;  // keys sorted by label order index
};

Chirotope compute_chirotope(const Configuration& p);

// corank = |X| - 1 - dim(aff P)
std::size_t corank(const Configuration& p);

// No d+1 points on a common hyperplane.
bool is_generic(const Configuration& p);

// Inclusion-minimal affinely dependent subsets of size <= d+1.
std::vector<std::vector<Label>> collinearity_list(const Configuration& p);

bool same_chirotope(const Configuration& p, const Configuration& q);

// The direct affine map sending p to q pointwise, if one exists.
std::optional<AffineMap> direct_affine_equivalent(const Configuration& p, const Configuration& q);

// True iff aff(P|Y) intersects conv(P|Z), decided exactly.
bool flat_meets_hull(const Configuration& p, const std::vector<Label>& y,
                     const std::vector<Label>& z);

}  // namespace chiro
