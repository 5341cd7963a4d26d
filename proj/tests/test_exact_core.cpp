#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chiro/geometry.hpp"

using namespace chiro;

TEST_CASE("rational parsing and printing") {
    CHECK(parse_rational("3/4") == rat(3, 4));
    CHECK(parse_rational("-6/8") == rat(-3, 4));
    CHECK(parse_rational("5") == rat(5));
    CHECK(parse_rational("-0") == rat(0));
    CHECK(to_string(rat(-3, 4)) == "-3/4");
    CHECK(to_string(rat(7)) == "7");
    CHECK_THROWS_AS(parse_rational("1/0"), error);
    CHECK_THROWS_AS(parse_rational("abc"), error);
}

TEST_CASE("nearest rounding with ties away from zero") {
    CHECK(round_nearest_away(rat(7, 2)) == 4);
    CHECK(round_nearest_away(rat(-7, 2)) == -4);
    CHECK(round_nearest_away(rat(10, 3)) == 3);
    CHECK(round_nearest_away(rat(-10, 3)) == -3);
    CHECK(round_nearest_away(rat(0)) == 0);
    CHECK(round_nearest_away(rat(5)) == 5);
}

TEST_CASE("floor_log2 and pow2_below") {
    CHECK(floor_log2(rat(1)) == 0);
    CHECK(floor_log2(rat(1, 2)) == -1);
    CHECK(floor_log2(rat(3)) == 1);
    CHECK(floor_log2(rat(1023, 4)) == 7);
    CHECK(floor_log2(rat(1, 1000)) == -10);
    CHECK(pow2_below(rat(3)) == rat(2));
    CHECK(pow2_below(rat(5, 16)) == rat(1, 4));
}

TEST_CASE("rational square root bounds") {
    Scalar q = rat(2);
    Scalar lo = sqrt_lower(q), hi = sqrt_upper(q);
    CHECK(lo * lo <= q);
    CHECK(hi * hi >= q);
    CHECK(hi - lo <= rat(1, 1 << 30));
    CHECK(sqrt_lower(rat(9, 4)) == rat(3, 2));
    CHECK(sqrt_upper(rat(0)) == 0);
}

TEST_CASE("seeded rng is deterministic and in range") {
    RatRng a(42), b(42), c(43);
    Scalar x = a.unit();
    CHECK(x == b.unit());
    CHECK(x != c.unit());
    for (int i = 0; i < 50; ++i) {
        Scalar u = a.unit();
        CHECK(u >= -1);
        CHECK(u < 1);
        Scalar r = a.in_range(rat(2), rat(5));
        CHECK(r >= 2);
        CHECK(r < 5);
    }
}

TEST_CASE("determinant, rank and inverse") {
    Mat m(3, 3);
    int vals[3][3] = {{2, 1, 0}, {1, 3, 1}, {0, 1, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = vals[i][j];
    CHECK(det(m) == 8);
    CHECK(rank(m) == 3);
    auto inv = inverse(m);
    REQUIRE(inv);
    Mat prod = m * (*inv);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(prod(i, j) == (i == j ? 1 : 0));

    Mat s(2, 2);
    s(0, 0) = 1;
    s(0, 1) = 2;
    s(1, 0) = 2;
    s(1, 1) = 4;
    CHECK(det(s) == 0);
    CHECK(rank(s) == 1);
    CHECK(!inverse(s));
}

TEST_CASE("linear solve and nullspace") {
    Mat a(2, 3);
    a(0, 0) = 1;
    a(0, 1) = 1;
    a(0, 2) = 1;
    a(1, 0) = 0;
    a(1, 1) = 1;
    a(1, 2) = 2;
    auto x = solve(a, Vec{rat(6), rat(5)});
    REQUIRE(x);
    CHECK(a.apply(*x) == Vec{rat(6), rat(5)});
    auto ns = nullspace(a);
    REQUIRE(ns.size() == 1);
    CHECK(a.apply(ns[0]) == Vec{rat(0), rat(0)});
    CHECK(norm2(ns[0]) > 0);

    Mat b(2, 1);
    b(0, 0) = 1;
    b(1, 0) = 1;
    CHECK(!solve(b, Vec{rat(1), rat(2)}));
}

TEST_CASE("projective point canonical form") {
    ProjectivePoint p(Vec{rat(1, 2), rat(3, 4), rat(1)});
    CHECK(p.h() == Vec{rat(2), rat(3), rat(4)});
    ProjectivePoint q(Vec{rat(-2), rat(-3), rat(-4)});
    CHECK(p == q);
    CHECK(p.is_affine());
    CHECK(p.affine() == Vec{rat(1, 2), rat(3, 4)});
    ProjectivePoint inf = ProjectivePoint::at_infinity(Vec{rat(1), rat(-1)});
    CHECK(!inf.is_affine());
    CHECK_THROWS_AS(inf.affine(), error);
    CHECK(inf == ProjectivePoint(Vec{rat(-3), rat(3), rat(0)}));
    CHECK_THROWS_AS(ProjectivePoint(Vec{rat(0), rat(0), rat(0)}), error);
}

TEST_CASE("orientation of planar triples") {
    Vec o{rat(0), rat(0)}, e1{rat(1), rat(0)}, e2{rat(0), rat(1)};
    CHECK(orientation({o, e1, e2}) == 1);
    CHECK(orientation({o, e2, e1}) == -1);
    CHECK(orientation({o, e1, Vec{rat(2), rat(0)}}) == 0);
    // 3d: the (p;1)-columns lift gives the standard simplex sign times -1
    Vec z{rat(0), rat(0), rat(0)}, a{rat(1), rat(0), rat(0)}, b{rat(0), rat(1), rat(0)},
        c{rat(0), rat(0), rat(1)};
    CHECK(orientation({z, a, b, c}) == -1);
    CHECK(orientation({z, b, a, c}) == 1);
}

TEST_CASE("cross-ratio matches the signed-distance formula") {
    auto P = [](long x) { return ProjectivePoint::from_affine(Vec{rat(x), rat(0)}); };
    // ((p-r)(q-s)) / ((q-r)(p-s)) on a horizontal line
    auto cr = cross_ratio(P(0), P(1), P(2), P(3));
    REQUIRE(cr);
    CHECK(*cr == rat((0 - 2) * (1 - 3), (1 - 2) * (0 - 3)));  // 4/3
    // harmonic quadruple
    auto h = cross_ratio(P(-1), P(1), P(0), ProjectivePoint::at_infinity(Vec{rat(1), rat(0)}));
    REQUIRE(h);
    CHECK(*h == -1);
    // infinite value when s coincides with p
    CHECK(!cross_ratio(P(0), P(1), P(2), P(0)));
    CHECK_THROWS_AS(cross_ratio(P(0), P(0), P(0), P(1)), error);
}

TEST_CASE("cross-ratio is a projective invariant") {
    auto P = [](long x, long y) { return ProjectivePoint::from_affine(Vec{rat(x), rat(y)}); };
    Mat m(3, 3);
    int vals[3][3] = {{2, 1, 3}, {0, 1, -1}, {1, 0, 3}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = vals[i][j];
    ProjectiveMap f(m);
    std::vector<ProjectivePoint> pts{P(0, 0), P(1, 1), P(2, 2), P(5, 5)};
    auto before = cross_ratio(pts[0], pts[1], pts[2], pts[3]);
    auto after = cross_ratio(f(pts[0]), f(pts[1]), f(pts[2]), f(pts[3]));
    REQUIRE(before);
    REQUIRE(after);
    CHECK(*before == *after);
}

TEST_CASE("line basis parameterization") {
    LineBasis lb(ProjectivePoint::from_affine(Vec{rat(1), rat(1)}),
                 ProjectivePoint::from_affine(Vec{rat(3), rat(2)}),
                 ProjectivePoint::from_affine(Vec{rat(7), rat(4)}));
    CHECK(lb.param_point(rat(0)) == lb.b0);
    CHECK(lb.param_point(rat(1)) == lb.b1);
    CHECK(lb.param_point(std::nullopt) == lb.b_inf);
    for (long n = -5; n <= 5; ++n) {
        Scalar t = rat(n, 3);
        ProjectivePoint p = lb.param_point(t);
        CHECK(lb.contains(p));
        auto back = lb.param_of(p);
        REQUIRE(back);
        CHECK(*back == t);
        auto cr = cross_ratio(lb.b0, lb.b_inf, p, lb.b1);
        if (t == 0)
            CHECK(p == lb.b0);
        else {
            REQUIRE(cr);
            CHECK(*cr == t);
        }
    }
    CHECK(!lb.param_of(lb.b_inf));
    CHECK_THROWS_AS(lb.param_of(ProjectivePoint::from_affine(Vec{rat(0), rat(5)})), error);
}

TEST_CASE("affine maps and recovery from point pairs") {
    std::vector<Vec> src{{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(0), rat(1)}};
    std::vector<Vec> dst{{rat(2), rat(1)}, {rat(3), rat(3)}, {rat(1), rat(2)}};
    auto f = find_affine_map(src, dst);
    REQUIRE(f);
    for (int i = 0; i < 3; ++i) CHECK((*f)(src[i]) == dst[i]);
    CHECK(f->linear_det() == rat(1 * 1 - 2 * (-1)));
    CHECK(f->direct());
    auto g = f->inverse();
    for (int i = 0; i < 3; ++i) CHECK(g(dst[i]) == src[i]);

    // orientation-reversing target
    std::vector<Vec> refl{{rat(0), rat(0)}, {rat(0), rat(1)}, {rat(1), rat(0)}};
    auto r = find_affine_map(src, refl);
    REQUIRE(r);
    CHECK(!r->direct());

    // degenerate source
    std::vector<Vec> degen{{rat(0), rat(0)}, {rat(1), rat(1)}, {rat(2), rat(2)}};
    CHECK(!find_affine_map(degen, dst));
}

TEST_CASE("line intersections in the projective plane") {
    auto P = [](long x, long y) { return ProjectivePoint::from_affine(Vec{rat(x), rat(y)}); };
    auto x = line_intersect_2d(P(0, 0), P(2, 2), P(0, 2), P(2, 0));
    REQUIRE(x);
    CHECK(*x == P(1, 1));
    // parallel lines meet at infinity
    auto inf = line_intersect_2d(P(0, 0), P(1, 0), P(0, 1), P(1, 1));
    REQUIRE(inf);
    CHECK(*inf == ProjectivePoint::at_infinity(Vec{rat(1), rat(0)}));
    // identical lines
    CHECK(!line_intersect_2d(P(0, 0), P(1, 1), P(2, 2), P(3, 3)));
}

TEST_CASE("line and hyperplane intersection in R^d") {
    auto a = ProjectivePoint::from_affine(Vec{rat(0), rat(0), rat(0)});
    auto b = ProjectivePoint::from_affine(Vec{rat(1), rat(1), rat(1)});
    auto x = line_hyperplane_intersect(a, b, Vec{rat(1), rat(1), rat(1)}, rat(1));
    REQUIRE(x);
    CHECK(x->affine() == Vec{rat(1, 3), rat(1, 3), rat(1, 3)});
    // parallel
    auto c = ProjectivePoint::from_affine(Vec{rat(1), rat(-1), rat(0)});
    auto y = line_hyperplane_intersect(a, c, Vec{rat(1), rat(1), rat(0)}, rat(5));
    REQUIRE(y);
    CHECK(!y->is_affine());
    // contained
    CHECK(!line_hyperplane_intersect(a, c, Vec{rat(1), rat(1), rat(0)}, rat(0)));
}

TEST_CASE("affine rank and spanned hyperplanes") {
    std::vector<Vec> tri{{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(0), rat(1)}};
    CHECK(affine_rank(tri) == 3);
    CHECK(affinely_independent(tri));
    std::vector<Vec> seg{{rat(0), rat(0)}, {rat(1), rat(1)}, {rat(2), rat(2)}};
    CHECK(affine_rank(seg) == 2);
    CHECK(!affinely_independent(seg));

    auto hp = hyperplane_through({Vec{rat(1), rat(0)}, Vec{rat(0), rat(1)}});
    REQUIRE(hp);
    // x + y = 1 up to scale
    CHECK(hp->first[0] * 1 + hp->first[1] * 0 == hp->second);
    CHECK(hp->first[0] * 0 + hp->first[1] * 1 == hp->second);
    CHECK(hp->first[0] == hp->first[1]);

    CHECK(dist2_to_hyperplane(Vec{rat(0), rat(0)}, Vec{rat(1), rat(1)}, rat(1)) == rat(1, 2));
    CHECK(dist2_to_hyperplane(Vec{rat(3), rat(4)}, Vec{rat(0), rat(1)}, rat(1)) == rat(9));
}
