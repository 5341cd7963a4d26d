#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "chiro/incidence.hpp"

using namespace chiro;

namespace {

// Random configurations with planted degeneracies, used to cross-check the
// screened path against the brute-force path.
std::vector<Vec> random_points(RatRng& rng, std::size_t n, std::size_t d) {
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < n; ++i) {
        Vec v;
        for (std::size_t k = 0; k < d; ++k) v.push_back(rng.unit(20));
        pts.push_back(std::move(v));
    }
    return pts;
}

}  // namespace

TEST_CASE("modular reduction and arithmetic") {
    ModFilter f;
    auto r = f.reduce(rat(3, 4));
    REQUIRE(r);
    CHECK(f.mul(*r, 4) == 3);
    auto neg = f.reduce(rat(-5));
    REQUIRE(neg);
    CHECK(f.add(*neg, 5) == 0);
    CHECK(f.mul(f.inv(7), 7) == 1);
    CHECK_THROWS_AS(f.inv(0), error);
    // exact collinearity survives reduction: cross product vanishes mod p
    Vec a{rat(1, 3), rat(2, 7)}, b{rat(2, 3), rat(3, 7)}, c{rat(1), rat(4, 7)};
    REQUIRE(collinear_exact(a, b, c));
    auto ra = *f.reduce_point(a), rb = *f.reduce_point(b), rc = *f.reduce_point(c);
    std::uint64_t cross = f.sub(f.mul(f.sub(rb[0], ra[0]), f.sub(rc[1], ra[1])),
                                f.mul(f.sub(rb[1], ra[1]), f.sub(rc[0], ra[0])));
    CHECK(cross == 0);
}

TEST_CASE("generic extension check, planar") {
    // base triangle, one added point in general position
    std::vector<Vec> pts{{rat(0), rat(0)}, {rat(4), rat(0)}, {rat(0), rat(4)}, {rat(1), rat(2)}};
    std::vector<bool> added{false, false, false, true};
    CHECK(check_generic_extension(pts, added, 2).generic);

    // added point on a spanned line
    pts[3] = Vec{rat(2), rat(0)};
    auto rep = check_generic_extension(pts, added, 2);
    CHECK(!rep.generic);
    REQUIRE(!rep.violations.empty());
    CHECK(rep.violations[0][0] == 3);

    // base degeneracy alone does not matter
    std::vector<Vec> pts2{{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(2), rat(0)},
                          {rat(0), rat(1)}, {rat(5), rat(7)}};
    std::vector<bool> added2{false, false, false, false, true};
    CHECK(check_generic_extension(pts2, added2, 2).generic);

    // coincidence with a base point is a violation
    pts2[4] = pts2[3];
    CHECK(!check_generic_extension(pts2, added2, 2).generic);
}

TEST_CASE("screened planar path agrees with brute force") {
    RatRng rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        auto pts = random_points(rng, 30, 2);  // size over the brute-force cutoff
        std::vector<bool> added(30, false);
        for (std::size_t i = 15; i < 30; ++i) added[i] = true;
        bool plant = trial % 2 == 1;
        if (plant) {
            // put an added point on the line of two base points
            Vec mid = rat(1, 2) * (pts[0] + pts[1]);
            pts[20] = mid;
        }
        auto rep = check_generic_extension(pts, added, 2);
        ExtensionGenericityReport ref;
        // brute force on the same input for ground truth
        std::vector<Vec> copy = pts;
        bool bf = true;
        for (std::size_t i = 0; i < 30 && bf; ++i)
            for (std::size_t j = i + 1; j < 30 && bf; ++j)
                for (std::size_t k = j + 1; k < 30 && bf; ++k) {
                    if (!(added[i] || added[j] || added[k])) continue;
                    if (collinear_exact(copy[i], copy[j], copy[k]) && copy[i] != copy[j] &&
                        copy[j] != copy[k] && copy[i] != copy[k])
                        bf = false;
                }
        CHECK(rep.generic == bf);
        if (plant) CHECK(!rep.generic);
    }
}

TEST_CASE("generic extension check, spatial") {
    std::vector<Vec> pts{{rat(0), rat(0), rat(0)},
                         {rat(6), rat(0), rat(0)},
                         {rat(0), rat(6), rat(0)},
                         {rat(0), rat(0), rat(6)},
                         {rat(1), rat(1), rat(1)}};
    std::vector<bool> added{false, false, false, false, true};
    CHECK(check_generic_extension(pts, added, 3).generic);

    // added point moved onto the plane of three base points
    pts[4] = Vec{rat(2), rat(2), rat(2)};  // x+y+z=6 plane through points 1,2,3
    auto rep = check_generic_extension(pts, added, 3);
    CHECK(!rep.generic);
    REQUIRE(!rep.violations.empty());
    CHECK(rep.violations[0][0] == 4);

    // added point on a spanned line in space
    pts[4] = Vec{rat(3), rat(0), rat(0)};
    CHECK(!check_generic_extension(pts, added, 3).generic);
}

TEST_CASE("screened spatial path agrees with brute force") {
    RatRng rng(11);
    for (int trial = 0; trial < 4; ++trial) {
        auto pts = random_points(rng, 28, 3);
        std::vector<bool> added(28, false);
        for (std::size_t i = 14; i < 28; ++i) added[i] = true;
        bool plant = trial % 2 == 1;
        if (plant) {
            // added point in the plane of three base points
            pts[20] = rat(1, 3) * (pts[0] + pts[1] + pts[2]);
        }
        auto rep = check_generic_extension(pts, added, 3);
        bool bf = true;
        for (std::size_t i = 0; i < 28 && bf; ++i)
            for (std::size_t j = i + 1; j < 28 && bf; ++j)
                for (std::size_t k = j + 1; k < 28 && bf; ++k)
                    for (std::size_t l = k + 1; l < 28 && bf; ++l) {
                        if (!(added[i] || added[j] || added[k] || added[l])) continue;
                        std::vector<Vec> t{pts[i], pts[j], pts[k], pts[l]};
                        if (affine_rank(t) <= 3) bf = false;
                    }
        CHECK(rep.generic == bf);
        if (plant) CHECK(!rep.generic);
    }
}

TEST_CASE("degenerate hyperplane enumeration") {
    std::vector<Vec> pts{{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(2), rat(0)}, {rat(3), rat(0)},
                         {rat(0), rat(1)}, {rat(1), rat(1)}, {rat(0), rat(2)}};
    auto hps = degenerate_hyperplanes(pts, 2);
    // lines with >= 3 points: y=0 {0,1,2,3}, x=0 {0,4,6}, x+y=2 {2,5,6}
    REQUIRE(hps.size() == 3);
    std::set<std::vector<std::size_t>> member_sets;
    for (const auto& h : hps) {
        member_sets.insert(h.members);
        for (auto i : h.members) CHECK(dot(h.normal, pts[i]) == h.offset);
    }
    CHECK(member_sets.count({0, 1, 2, 3}));
    CHECK(member_sets.count({0, 4, 6}));
    CHECK(member_sets.count({2, 5, 6}));

    // generic points: none
    RatRng rng(3);
    auto rnd = random_points(rng, 8, 2);
    CHECK(degenerate_hyperplanes(rnd, 2).empty());
}
