#pragma once

#include <set>

#include "chiro/chirotope.hpp"

namespace chiro {

// Proper flat spanned by configuration points, with everything lying on it.
struct SpannedFlat {
    std::vector<Label> span;  // affinely independent spanning labels
    std::set<Label> closure;  // all labels whose points lie on the flat
    std::size_t flat_dim = 0;
};

// Inclusion-minimal flats spanned by P minus s that contain p_s.
std::vector<SpannedFlat> minimal_flats(const Configuration& p, const Label& s);

// Replacement of one degenerate point by a generic cloud nearby that still
// pins the point down in any realization of the resulting chirotope.
struct Scattering {
    Configuration base;
    Label removed;
    Configuration result;
    std::vector<Label> added;  // new labels in construction order
    bool two_flats = false;
    // single-flat recovery: the removed point sits on the flat spanned by
    // z0 (empty when the point was generic to begin with)
    std::vector<Label> z0;
    // two-flats recovery: flats spanned by z1 and z2 meet in the removed
    // point; s1 and s2 are the intermediate simplex vertex labels, whose
    // own single-flat scatterings are kept for nested recovery
    std::vector<Label> z1, z2, s1, s2;
    std::vector<Scattering> inner;
};

// The removed point lies on at most one minimal flat of the others.
Scattering scatter_single_flat(const Configuration& p, const Label& s, std::uint64_t seed);

// The removed point lies on exactly two minimal flats meeting only in it.
Scattering scatter_two_flats(const Configuration& p, const Label& s, std::uint64_t seed);

// A point r_s such that extending a realization of the scattering's
// chirotope by r_s restricts to a realization of the base chirotope.
ProjectivePoint recover_point(const Scattering& sc, const Configuration& r);

struct ScatterSequence {
    Configuration result;
    std::vector<Scattering> steps;  // in application order
};

// Scatters every non-protected point that lies on a spanned flat of the
// others, processing labels in decreasing construction order.
ScatterSequence scatter_all(const Configuration& phat, const std::vector<Label>& protected_labels,
                            std::uint64_t seed);

Configuration scatter_all_undesirable(const Configuration& phat,
                                      const std::vector<Label>& protected_labels,
                                      std::uint64_t seed);

}  // namespace chiro
