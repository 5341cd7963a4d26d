#include "chiro/corank1.hpp"

#include <algorithm>

namespace chiro {

namespace {

// Greedily picks count labels whose points are affinely independent.
std::vector<Label> greedy_independent(const Configuration& p, const std::vector<Label>& pool,
                                      std::size_t count) {
    std::vector<Label> picked;
    std::vector<Vec> pts;
    for (const auto& l : pool) {
        pts.push_back(p.point(l));
        if (affine_rank(pts) == pts.size()) {
            picked.push_back(l);
            if (picked.size() == count) return picked;
        } else {
            pts.pop_back();
        }
    }
    return {};
}

// Normal and offset of the affine hull of the given labels, provided that
// hull is a hyperplane; nullopt otherwise.
std::optional<std::pair<Vec, Scalar>> hull_hyperplane(const Configuration& p,
                                                      const std::vector<Label>& rest) {
    std::size_t d = p.dim();
    if (affine_rank(p.point_list(rest)) != d) return std::nullopt;
    auto frame = greedy_independent(p, rest, d);
    return hyperplane_through(p.point_list(frame));
}

Label fresh_label(const Configuration& c, std::string base) {
    while (c.contains(base)) base += "_";
    return base;
}

}  // namespace

std::optional<ProjectivePoint> good_pair_point(const Configuration& p, const Label& a,
                                               const Label& b) {
    if (p.point(a) == p.point(b)) return std::nullopt;  // no spanned line
    std::vector<Label> rest;
    for (const auto& l : p.labels())
        if (l != a && l != b) rest.push_back(l);
    auto h = hull_hyperplane(p, rest);
    if (!h) return std::nullopt;
    auto x = line_hyperplane_intersect(ProjectivePoint::from_affine(p.point(a)),
                                       ProjectivePoint::from_affine(p.point(b)), h->first,
                                       h->second);
    if (!x || !x->is_affine()) return std::nullopt;  // parallel line
    return x;
}

std::vector<GoodPair> find_good_pairs(const Configuration& p) {
    if (!p.full_dimensional()) throw precondition_error("configuration is not full dimensional");
    std::vector<GoodPair> out;
    const auto& ls = p.labels();
    for (std::size_t i = 0; i < ls.size(); ++i)
        for (std::size_t j = i + 1; j < ls.size(); ++j) {
            auto pt = good_pair_point(p, ls[i], ls[j]);
            if (!pt) continue;
            GoodPair gp;
            gp.I = {ls[i], ls[j]};
            gp.p_I = *pt;
            for (const auto& l : ls)
                if (l != ls[i] && l != ls[j]) gp.hyperplane.push_back(l);
            out.push_back(std::move(gp));
        }
    return out;
}

ReductionResult reduce(const Configuration& p, const GoodPair& gp) {
    auto pt = good_pair_point(p, gp.I[0], gp.I[1]);
    if (!pt || *pt != gp.p_I) throw precondition_error("pair is not good for the configuration");
    std::size_t d = p.dim();
    std::vector<Label> rest;
    for (const auto& l : p.labels())
        if (l != gp.I[0] && l != gp.I[1]) rest.push_back(l);

    auto h = hull_hyperplane(p, rest);
    if (!h) throw precondition_error("complement does not span a hyperplane");
    const Vec& n = h->first;

    // chart: drop the coordinate with the largest normal entry
    std::size_t drop = 0;
    for (std::size_t j = 1; j < d; ++j)
        if (abs(n[j]) > abs(n[drop])) drop = j;
    auto chart = [&](const Vec& x) {
        Vec y;
        for (std::size_t j = 0; j < d; ++j)
            if (j != drop) y.push_back(x[j]);
        return y;
    };

    std::vector<std::pair<Label, Vec>> pts;
    for (const auto& l : rest) pts.emplace_back(l, chart(p.point(l)));
    Label nl = fresh_label(p, "I_" + gp.I[0] + "_" + gp.I[1]);
    pts.emplace_back(nl, chart(gp.p_I.affine()));

    // orient the chart so the reference simplex of the complement is positive
    Configuration charted(d - 1, pts);
    auto simplex = greedy_independent(charted, rest, d);
    if (simplex.size() != d) throw error("complement lost rank in the chart");
    bool flip = orientation(charted.point_list(simplex)) < 0;
    if (flip)
        for (auto& [l, v] : pts) v[0] = -v[0];

    ReductionResult r;
    r.reduced = Configuration(d - 1, std::move(pts));
    r.new_label = nl;
    r.dropped_coordinate = drop;
    r.flipped = flip;
    return r;
}

std::optional<std::vector<Label>> select_discriminating_subset(const Configuration& p,
                                                               const Configuration& q) {
    if (!p.full_dimensional()) throw precondition_error("first configuration is not full dimensional");
    if (p.dim() != q.dim()) throw precondition_error("dimension mismatch");
    std::vector<Label> sp = p.labels(), sq = q.labels();
    std::sort(sp.begin(), sp.end());
    std::sort(sq.begin(), sq.end());
    if (sp != sq) throw precondition_error("label sets differ");
    std::size_t d = p.dim();
    if (p.size() < d + 2) throw precondition_error("need at least d+2 points");

    auto basis = greedy_independent(p, p.labels(), d + 1);
    std::set<Label> in_basis(basis.begin(), basis.end());
    Sign so = orientation(p.point_list(basis));
    if (orientation(q.point_list(basis)) != so) {
        // basis orientation mismatch: any extra point completes a witness
        for (const auto& l : p.labels())
            if (!in_basis.count(l)) {
                auto y = basis;
                y.push_back(l);
                return y;
            }
    }
    auto phi = find_affine_map(p.point_list(basis), q.point_list(basis));
    if (!phi) throw error("basis mapping failed");
    for (const auto& l : p.labels()) {
        if (in_basis.count(l)) continue;
        if ((*phi)(p.point(l)) != q.point(l)) {
            auto y = basis;
            y.push_back(l);
            return y;
        }
    }
    return std::nullopt;  // directly affinely equivalent via phi
}

ApexFrame apex_frame(const Configuration& p) {
    if (corank(p) != 1) throw precondition_error("configuration must have corank 1");
    if (!p.full_dimensional()) throw precondition_error("configuration is not full dimensional");
    std::size_t d = p.dim(), n = p.size();

    // the unique affine dependency of d+2 full-dimensional points
    Mat m(d + 1, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vec& x = p.point(p.labels()[j]);
        for (std::size_t i = 0; i < d; ++i) m(i, j) = x[i];
        m(d, j) = 1;
    }
    auto ns = nullspace(m);
    if (ns.size() != 1) throw error("unexpected dependency space dimension");
    const Vec& lam = ns[0];

    std::vector<Label> support, free;
    for (std::size_t j = 0; j < n; ++j)
        (lam[j] != 0 ? support : free).push_back(p.labels()[j]);

    ApexFrame f;
    f.apex = support.back();
    support.pop_back();
    f.k = support.size() - 1;
    f.basis = support;
    f.basis.insert(f.basis.end(), free.begin(), free.end());

    if (orientation(p.point_list(f.basis)) < 0) {
        if (f.k >= 1)
            std::swap(f.basis[0], f.basis[1]);  // both inside the spanning prefix
        else
            std::swap(f.basis[d - 1], f.basis[d]);
    }
    return f;
}

std::vector<std::optional<ProjectivePoint>> hat_points(const Configuration& p,
                                                       const ApexFrame& f) {
    std::size_t d = p.dim();
    if (f.k != d) throw precondition_error("apex must span with the full basis");
    Vec apex = p.point(f.apex);
    std::vector<std::optional<ProjectivePoint>> hats;
    for (std::size_t i = 1; i <= d; ++i) {
        std::vector<Vec> others;
        for (std::size_t j = 0; j <= d; ++j)
            if (j != i) others.push_back(p.point(f.basis[j]));
        auto h = hyperplane_through(others);
        if (!h) throw error("basis subset degenerate");
        auto x = line_hyperplane_intersect(ProjectivePoint::from_affine(p.point(f.basis[i])),
                                           ProjectivePoint::from_affine(apex), h->first, h->second);
        if (x && !x->is_affine()) x = std::nullopt;  // parallel line
        hats.push_back(x);
    }
    return hats;
}

ProjectivePoint reconstruct_apex(const Configuration& p, const ApexFrame& f,
                                 const std::vector<std::optional<ProjectivePoint>>& hats) {
    std::size_t d = p.dim();
    if (hats.size() != d) throw precondition_error("need one hat point per basis index");

    auto normal_of = [&](std::size_t i) {
        std::vector<Vec> others;
        for (std::size_t j = 0; j <= d; ++j)
            if (j != i) others.push_back(p.point(f.basis[j]));
        auto h = hyperplane_through(others);
        if (!h) throw error("basis subset degenerate");
        return h->first;
    };

    std::vector<std::size_t> finite;
    for (std::size_t i = 1; i <= d; ++i)
        if (hats[i - 1]) finite.push_back(i);

    if (finite.size() >= 2) {
        // intersect two of the recovery lines
        std::size_t i = finite[0], j = finite[1];
        Vec pi = p.point(f.basis[i]), pj = p.point(f.basis[j]);
        Vec ui = hats[i - 1]->affine() - pi, uj = hats[j - 1]->affine() - pj;
        Mat a(d, 2);
        for (std::size_t r = 0; r < d; ++r) {
            a(r, 0) = ui[r];
            a(r, 1) = -uj[r];
        }
        auto st = solve(a, pj - pi);
        if (!st) throw error("recovery lines do not intersect");
        return ProjectivePoint::from_affine(pi + (*st)[0] * ui);
    }
    if (finite.size() == 1) {
        // intersect the one recovery line with a parallel hyperplane
        std::size_t i = finite[0];
        std::size_t j = (i == 1) ? 2 : 1;
        Vec pi = p.point(f.basis[i]);
        Vec ui = hats[i - 1]->affine() - pi;
        Vec nj = normal_of(j);
        Scalar den = dot(nj, ui);
        if (den == 0) throw error("recovery line parallel to the recovery hyperplane");
        Scalar t = (dot(nj, p.point(f.basis[j])) - dot(nj, pi)) / den;
        return ProjectivePoint::from_affine(pi + t * ui);
    }
    // all hats at infinity: meet the d parallel hyperplanes
    Mat m(d, d);
    Vec rhs(d);
    for (std::size_t i = 1; i <= d; ++i) {
        Vec ni = normal_of(i);
        for (std::size_t c = 0; c < d; ++c) m(i - 1, c) = ni[c];
        rhs[i - 1] = dot(ni, p.point(f.basis[i]));
    }
    auto x = solve(m, rhs);
    if (!x) throw error("parallel recovery hyperplanes do not meet");
    return ProjectivePoint::from_affine(*x);
}

CaseResult find_discriminating_pair(const Configuration& p, const Configuration& q) {
    if (corank(p) != 1 || corank(q) != 1)
        throw precondition_error("both configurations must have corank 1");
    if (!p.full_dimensional() || !q.full_dimensional())
        throw precondition_error("configurations must be full dimensional");
    if (!same_chirotope(p, q)) throw precondition_error("configurations must share a chirotope");
    std::size_t d = p.dim();

    auto f = apex_frame(p);
    auto psi = find_affine_map(q.point_list(f.basis), p.point_list(f.basis));
    if (!psi) throw error("basis of the second configuration degenerate");
    Configuration qn = q;
    for (const auto& l : q.labels()) qn.set_point(l, (*psi)(q.point(l)));

    Vec pa = p.point(f.apex), qa = qn.point(f.apex);
    if (pa == qa) throw error("configurations are directly affinely equivalent");

    CaseResult res;
    if (f.k <= d - 1) {
        // the apex already lies in the hyperplane missing basis[d]
        res.I = {f.basis[d], f.apex};
        auto pi = good_pair_point(p, res.I[0], res.I[1]);
        auto qi = good_pair_point(qn, res.I[0], res.I[1]);
        if (!pi || !qi) throw error("expected pair is not good");
        res.good_for = -1;
        res.p_I = *pi;
        res.q_I = *qi;
        if (*res.p_I == *res.q_I) throw error("intersection points coincide unexpectedly");
        return res;
    }

    auto hp = hat_points(p, f);
    auto hq = hat_points(qn, f);
    if (reconstruct_apex(p, f, hp) != ProjectivePoint::from_affine(pa))
        throw error("apex recovery failed for the first configuration");
    if (reconstruct_apex(qn, f, hq) != ProjectivePoint::from_affine(qa))
        throw error("apex recovery failed for the second configuration");

    for (std::size_t i = 1; i <= d; ++i) {
        const auto& a = hp[i - 1];
        const auto& b = hq[i - 1];
        if (!a && !b) continue;
        if (a && b && *a == *b) continue;
        res.I = {f.basis[i], f.apex};
        if (a && b) {
            res.good_for = -1;
            res.p_I = *a;
            res.q_I = *b;
        } else {
            res.good_for = a ? 0 : 1;
            res.p_I = a;
            res.q_I = b;
        }
        return res;
    }
    throw error("identical recovery data for distinct configurations");
}

}  // namespace chiro
