#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chiro/chirotope.hpp"
#include "chiro/lp.hpp"

using namespace chiro;

namespace {

Configuration planar(std::vector<std::pair<Label, std::pair<long, long>>> pts) {
    std::vector<std::pair<Label, Vec>> lp;
    for (auto& [l, xy] : pts) lp.emplace_back(l, Vec{rat(xy.first), rat(xy.second)});
    return Configuration(2, std::move(lp));
}

}  // namespace

TEST_CASE("exact simplex on small programs") {
    // max x+y st x+2y <= 4, 3x+y <= 6, x,y >= 0 -> optimum 14/5 at (8/5,6/5)
    LinearProgram lp(2);
    lp.add(Vec{rat(1), rat(2)}, LinearProgram::LE, rat(4));
    lp.add(Vec{rat(3), rat(1)}, LinearProgram::LE, rat(6));
    lp.add(Vec{rat(1), rat(0)}, LinearProgram::GE, rat(0));
    lp.add(Vec{rat(0), rat(1)}, LinearProgram::GE, rat(0));
    lp.objective = Vec{rat(1), rat(1)};
    auto s = solve_lp(lp);
    REQUIRE(s.status == LpSolution::Optimal);
    CHECK(s.value == rat(14, 5));
    CHECK(s.x == Vec{rat(8, 5), rat(6, 5)});

    // infeasible: x <= -1, x >= 1
    LinearProgram bad(1);
    bad.add(Vec{rat(1)}, LinearProgram::LE, rat(-1));
    bad.add(Vec{rat(1)}, LinearProgram::GE, rat(1));
    CHECK(solve_lp(bad).status == LpSolution::Infeasible);
    CHECK(!lp_feasible(bad));

    // unbounded: max x st x >= 0
    LinearProgram ub(1);
    ub.add(Vec{rat(1)}, LinearProgram::GE, rat(0));
    ub.objective = Vec{rat(1)};
    CHECK(solve_lp(ub).status == LpSolution::Unbounded);

    // equality with free variable: x + y = 3, y >= 1, max -y -> y=1, x=2
    LinearProgram eq(2);
    eq.add(Vec{rat(1), rat(1)}, LinearProgram::EQ, rat(3));
    eq.add(Vec{rat(0), rat(1)}, LinearProgram::GE, rat(1));
    eq.objective = Vec{rat(0), rat(-1)};
    auto e = solve_lp(eq);
    REQUIRE(e.status == LpSolution::Optimal);
    CHECK(e.x == Vec{rat(2), rat(1)});
}

TEST_CASE("chirotope of a triangle") {
    auto p = planar({{"1", {0, 0}}, {"2", {1, 0}}, {"3", {0, 1}}});
    auto chi = compute_chirotope(p);
    REQUIRE(chi.values().size() == 1);
    CHECK(chi.value({"1", "2", "3"}) == 1);
    CHECK(chi.value({"2", "1", "3"}) == -1);
    CHECK(chi.value({"3", "1", "2"}) == 1);
    CHECK(chi.value({"1", "1", "2"}) == 0);
    CHECK_THROWS_AS(chi.value({"1", "2"}), error);
    CHECK_THROWS_AS(chi.value({"1", "2", "9"}), error);
}

TEST_CASE("one constructed degeneracy gives exactly one zero") {
    auto p = planar({{"a", {0, 0}}, {"b", {1, 0}}, {"c", {2, 0}}, {"d", {0, 1}}});
    auto chi = compute_chirotope(p);
    REQUIRE(chi.values().size() == 4);
    int zeros = 0;
    for (const auto& [k, s] : chi.values()) zeros += s == 0;
    CHECK(zeros == 1);
    CHECK(chi.value({"a", "b", "c"}) == 0);
}

TEST_CASE("chirotope invariance under direct affine maps") {
    auto p = planar({{"1", {0, 0}}, {"2", {3, 1}}, {"3", {1, 4}}, {"4", {2, 2}}, {"5", {5, 0}}});
    Mat lin(2, 2);
    lin(0, 0) = rat(2);
    lin(0, 1) = rat(1);
    lin(1, 0) = rat(-1);
    lin(1, 1) = rat(1);  // det 3 > 0
    AffineMap phi(lin, Vec{rat(7), rat(-2)});
    REQUIRE(phi.direct());
    std::vector<std::pair<Label, Vec>> moved;
    for (const auto& l : p.labels()) moved.emplace_back(l, phi(p.point(l)));
    Configuration q(2, moved);
    CHECK(compute_chirotope(q) == compute_chirotope(p));

    Mat ref(2, 2);
    ref(0, 0) = rat(0);
    ref(0, 1) = rat(1);
    ref(1, 0) = rat(1);
    ref(1, 1) = rat(0);  // det -1
    AffineMap psi(ref, Vec{rat(0), rat(0)});
    std::vector<std::pair<Label, Vec>> refl;
    for (const auto& l : p.labels()) refl.emplace_back(l, psi(p.point(l)));
    Configuration r(2, refl);
    CHECK(compute_chirotope(r) == compute_chirotope(p).negated());
    CHECK(!same_chirotope(p, r));
}

TEST_CASE("corank") {
    auto p = planar({{"1", {0, 0}}, {"2", {1, 0}}, {"3", {0, 1}}, {"4", {2, 3}}});
    CHECK(corank(p) == 1);
    auto tri = planar({{"1", {0, 0}}, {"2", {1, 0}}, {"3", {0, 1}}});
    CHECK(corank(tri) == 0);
    auto seg = planar({{"1", {0, 0}}, {"2", {1, 1}}, {"3", {2, 2}}});
    CHECK(corank(seg) == 1);  // 3 - rank 2
    CHECK_THROWS_AS(corank(Configuration(2, {})), error);
}

TEST_CASE("genericity and minimal dependent subsets") {
    auto square = planar(
        {{"1", {0, 0}}, {"2", {1, 0}}, {"3", {1, 1}}, {"4", {0, 1}}, {"c", {0, 0}}});
    // center at (1/2,1/2)
    Configuration sq = square;
    sq.set_point("c", Vec{rat(1, 2), rat(1, 2)});
    CHECK(!is_generic(sq));
    auto deps = collinearity_list(sq);
    REQUIRE(deps.size() == 2);  // the two diagonals through the center
    CHECK(deps[0] == std::vector<Label>{"1", "3", "c"});
    CHECK(deps[1] == std::vector<Label>{"2", "4", "c"});

    auto gen = planar({{"1", {0, 0}}, {"2", {1, 0}}, {"3", {0, 1}}, {"4", {2, 3}}});
    CHECK(is_generic(gen));
    CHECK(collinearity_list(gen).empty());

    // a coincident pair is a minimal dependent 2-subset that hides its triples
    auto coin = planar({{"1", {0, 0}}, {"2", {0, 0}}, {"3", {1, 0}}, {"4", {0, 1}}});
    auto cd = collinearity_list(coin);
    REQUIRE(cd.size() == 1);
    CHECK(cd[0] == std::vector<Label>{"1", "2"});
}

TEST_CASE("direct affine equivalence decision") {
    auto p = planar({{"1", {0, 0}}, {"2", {3, 1}}, {"3", {1, 4}}, {"4", {2, 2}}});
    Mat lin(2, 2);
    lin(0, 0) = rat(1);
    lin(0, 1) = rat(2);
    lin(1, 0) = rat(0);
    lin(1, 1) = rat(1);
    AffineMap phi(lin, Vec{rat(-1), rat(5)});
    std::vector<std::pair<Label, Vec>> moved;
    for (const auto& l : p.labels()) moved.emplace_back(l, phi(p.point(l)));
    Configuration q(2, moved);
    auto f = direct_affine_equivalent(p, q);
    REQUIRE(f);
    for (const auto& l : p.labels()) CHECK((*f)(p.point(l)) == q.point(l));
    CHECK(same_chirotope(p, q));

    // moving one point off its orbit breaks equivalence
    Configuration q2 = q;
    q2.set_point("4", q.point("4") + Vec{rat(0), rat(1, 7)});
    CHECK(!direct_affine_equivalent(p, q2));
}

TEST_CASE("same chirotope without affine equivalence: convex hexagons") {
    auto a = planar({{"1", {0, 0}},
                     {"2", {2, 0}},
                     {"3", {3, 1}},
                     {"4", {2, 2}},
                     {"5", {0, 2}},
                     {"6", {-1, 1}}});
    auto b = planar({{"1", {0, 0}},
                     {"2", {4, 0}},
                     {"3", {5, 3}},
                     {"4", {3, 5}},
                     {"5", {0, 4}},
                     {"6", {-1, 2}}});
    CHECK(is_generic(a));
    CHECK(is_generic(b));
    CHECK(same_chirotope(a, b));
    CHECK(!direct_affine_equivalent(a, b));
}

TEST_CASE("flat meets hull") {
    auto p = planar({{"1", {0, 0}},
                     {"2", {3, 0}},
                     {"3", {0, 3}},
                     {"g", {1, 1}},
                     {"o", {5, 5}},
                     {"q", {9, 9}}});
    // line through the centroid (1,1) and an outside point crosses the hull
    CHECK(flat_meets_hull(p, {"g", "o"}, {"1", "2", "3"}));
    // single inside point
    CHECK(flat_meets_hull(p, {"g"}, {"1", "2", "3"}));
    // single outside point
    CHECK(!flat_meets_hull(p, {"o"}, {"1", "2", "3"}));
    // the line through o and q is x=y: it touches the hull at the vertex (0,0)
    CHECK(flat_meets_hull(p, {"o", "q"}, {"1", "2", "3"}));
    CHECK(!flat_meets_hull(p, {"o", "q"}, {"2"}));
    CHECK_THROWS_AS(flat_meets_hull(p, {}, {"1"}), error);
    CHECK_THROWS_AS(flat_meets_hull(p, {"1"}, {"1", "2"}), error);
}

TEST_CASE("restriction and extension records") {
    auto p = planar({{"1", {0, 0}}, {"2", {1, 0}}, {"3", {0, 1}}, {"4", {2, 3}}});
    auto r = p.restrict({"3", "1"});
    CHECK(r.labels() == std::vector<Label>{"1", "3"});  // keeps p's order
    CHECK(r.point("3") == p.point("3"));

    ExtensionRecord er;
    er.base = r;
    er.extended = p;
    CHECK_NOTHROW(er.validate());
    CHECK(er.added_labels() == std::vector<Label>{"2", "4"});
    er.extended.set_point("1", Vec{rat(9), rat(9)});
    CHECK_THROWS_AS(er.validate(), error);
}
