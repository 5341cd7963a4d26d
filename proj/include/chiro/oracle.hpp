#pragma once

#include "chiro/chirotope.hpp"

namespace chiro {

// One cell of the arrangement of spanned hyperplanes, with a rational
// representative point and the chirotope of the one-point extension it
// induces.
struct ArrangementCell {
    Vec representative;
    std::vector<Sign> signs;  // one entry per spanned hyperplane
    std::size_t cell_dim = 0;
    Chirotope extension;
};

struct ArrangementCensus {
    Configuration base;
    Label added;  // label given to the representative point
    std::vector<ArrangementCell> cells;
    std::map<std::size_t, std::size_t> counts_by_dim;
};

// Every cell (all dimensions) of the arrangement of hyperplanes spanned by
// the configuration, clipped to the box |x_i| <= box, by exhaustive
// sign-vector search with exact LP feasibility pruning. Distinct cells give
// distinct extension chirotopes. Desk-scale only: n <= 10, d <= 3.
ArrangementCensus enumerate_one_point_extensions(const Configuration& p, const Scalar& box);

struct RealizationSearch {
    bool found = false;
    Configuration realization;  // meaningful only when found
    std::size_t samples_used = 0;
};

// Randomized search for a realization of chi whose restriction to the base
// labels is the base itself: the points of chi's extra labels are sampled
// inside the flats forced by chi's zero tuples, then repaired by
// coordinate descent on the number of violated tuples. A negative answer
// means "exhausted", never "non-realizable".
RealizationSearch search_realization_on_top(const Chirotope& chi, const Configuration& base,
                                            std::size_t budget, std::uint64_t seed);

// A configuration Q != P with the same chirotope: shrinking random moves,
// each point constrained to the spanned hyperplanes through it so
// degeneracies are preserved.
Configuration perturb_same_chirotope(const Configuration& p, std::uint64_t seed);

// Exact minimum number of derivation steps from (0, 1) to g, by
// breadth-first search over value sets; nullopt when above max_len
// (max_len <= 6: the search is combinatorial).
std::optional<std::size_t> minimal_arithmetic_complexity(const Scalar& g, std::size_t max_len);

}  // namespace chiro
