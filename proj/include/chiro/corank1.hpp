#pragma once

#include <array>

#include "chiro/chirotope.hpp"

namespace chiro {

// A 2-subset I whose complement spans a hyperplane, whose own span is a
// line, and where line and hyperplane meet in a single point p_I.
struct GoodPair {
    std::array<Label, 2> I;
    ProjectivePoint p_I;
    std::vector<Label> hyperplane;  // the complement X \ I
};

// All good 2-subsets of a full-dimensional configuration.
std::vector<GoodPair> find_good_pairs(const Configuration& p);

// The intersection point for a single candidate pair, if it is good.
std::optional<ProjectivePoint> good_pair_point(const Configuration& p, const Label& a,
                                               const Label& b);

// The reduction P with I removed and p_I added, re-expressed inside the
// hyperplane by a deterministic affine chart: drop the coordinate with the
// largest hyperplane-normal entry, then negate the first remaining
// coordinate if needed so the reference simplex of X \ I keeps positive
// orientation.
struct ReductionResult {
    Configuration reduced;  // dimension d-1, over (X \ I) + {new_label}
    Label new_label;
    std::size_t dropped_coordinate;
    bool flipped;
};

ReductionResult reduce(const Configuration& p, const GoodPair& gp);

// A (d+2)-subset Y with P|Y of corank 1 and not directly affinely
// equivalent to Q|Y; nullopt if P and Q are directly affinely equivalent.
std::optional<std::vector<Label>> select_discriminating_subset(const Configuration& p,
                                                               const Configuration& q);

// Distinguished labeling of a corank-1 configuration: basis[0..d] is a
// direct affine basis, apex is the remaining point, and apex lies in the
// affine hull of basis[0..k] and of no smaller subset of it.
struct ApexFrame {
    std::vector<Label> basis;
    Label apex;
    std::size_t k;
};

ApexFrame apex_frame(const Configuration& p);

// For i = 1..d, the intersection of the line through basis[i] and the apex
// with the hyperplane spanned by the other basis points; nullopt when the
// two are parallel. Requires k = d (apex spans with the whole basis).
std::vector<std::optional<ProjectivePoint>> hat_points(const Configuration& p,
                                                       const ApexFrame& f);

// Recovers the apex from the basis and the hat points, by intersecting two
// of the lines, one line with a parallel hyperplane, or all d parallel
// hyperplanes, depending on how many hat points are at infinity.
ProjectivePoint reconstruct_apex(const Configuration& p, const ApexFrame& f,
                                 const std::vector<std::optional<ProjectivePoint>>& hats);

// Outcome of the discriminating-pair search: a 2-subset that is good for
// exactly one configuration, or good for both with distinct intersection
// points. Points are reported in the frame where Q's basis is mapped onto
// P's basis.
struct CaseResult {
    std::array<Label, 2> I;
    int good_for = -1;  // 0 = first argument, 1 = second, -1 = both
    std::optional<ProjectivePoint> p_I, q_I;
};

CaseResult find_discriminating_pair(const Configuration& p, const Configuration& q);

}  // namespace chiro
