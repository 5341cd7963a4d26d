#include "chiro/oracle.hpp"

#include <algorithm>

#include "chiro/lp.hpp"

namespace chiro {

namespace {

template <typename F>
void combinations(std::size_t n, std::size_t k, F f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        f(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

struct Hyperplane {
    Vec n;
    Scalar c;
};

std::vector<Hyperplane> spanned_hyperplanes(const std::vector<Vec>& pts, std::size_t d) {
    std::set<Vec> seen;
    std::vector<Hyperplane> out;
    combinations(pts.size(), d, [&](const std::vector<std::size_t>& idx) {
        std::vector<Vec> sub;
        for (auto i : idx) sub.push_back(pts[i]);
        auto h = hyperplane_through(sub);
        if (!h) return;
        Vec key = h->first;
        key.push_back(h->second);
        key = ProjectivePoint(key).h();  // canonical up to scaling
        if (seen.insert(key).second) out.push_back({h->first, h->second});
    });
    return out;
}

Label fresh_label(const Configuration& c, std::string base) {
    while (c.contains(base)) base += "_";
    return base;
}

// Strict feasibility of a partial sign assignment within the box: maximize
// a common slack t bounded by 1; the assignment has a cell iff t > 0.
LpSolution cell_lp(const std::vector<Hyperplane>& hys, const std::vector<Sign>& signs,
                   std::size_t d, const Scalar& box) {
    LinearProgram lp(d + 1);  // x_0..x_{d-1}, t
    for (std::size_t i = 0; i < signs.size(); ++i) {
        Vec row(d + 1, Scalar(0));
        for (std::size_t j = 0; j < d; ++j) row[j] = hys[i].n[j];
        if (signs[i] == 0) {
            lp.add(std::move(row), LinearProgram::EQ, hys[i].c);
        } else if (signs[i] > 0) {
            row[d] = -1;
            lp.add(std::move(row), LinearProgram::GE, hys[i].c);
        } else {
            row[d] = 1;
            lp.add(std::move(row), LinearProgram::LE, hys[i].c);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        Vec row(d + 1, Scalar(0));
        row[j] = 1;
        lp.add(row, LinearProgram::LE, box);
        lp.add(std::move(row), LinearProgram::GE, -box);
    }
    Vec trow(d + 1, Scalar(0));
    trow[d] = 1;
    lp.add(std::move(trow), LinearProgram::LE, 1);
    lp.objective[d] = 1;
    return solve_lp(lp);
}

}  // namespace

ArrangementCensus enumerate_one_point_extensions(const Configuration& p, const Scalar& box) {
    if (p.size() > 10 || p.dim() > 3) throw precondition_error("census limited to n <= 10, d <= 3");
    if (!p.full_dimensional()) throw precondition_error("configuration is not full dimensional");
    if (box <= 0) throw precondition_error("box must be positive");
    std::size_t d = p.dim();
    auto hys = spanned_hyperplanes(p.point_list(), d);

    ArrangementCensus census;
    census.base = p;
    census.added = fresh_label(p, "q");

    std::vector<Sign> signs;
    auto record = [&](const Vec& rep) {
        ArrangementCell cell;
        cell.representative = rep;
        cell.signs = signs;
        std::vector<Vec> normals;
        for (std::size_t i = 0; i < hys.size(); ++i)
            if (signs[i] == 0) normals.push_back(hys[i].n);
        Mat nm(std::max<std::size_t>(normals.size(), 1), d);
        for (std::size_t i = 0; i < normals.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) nm(i, j) = normals[i][j];
        cell.cell_dim = d - rank(nm);
        Configuration ext = p;
        ext.add_point(census.added, rep);
        cell.extension = compute_chirotope(ext);
        census.counts_by_dim[cell.cell_dim] += 1;
        census.cells.push_back(std::move(cell));
    };
    // depth-first sign-vector search; a strictly infeasible prefix has no
    // feasible completion, so the whole subtree is pruned
    auto dfs = [&](auto&& self) -> void {
        auto sol = cell_lp(hys, signs, d, box);
        if (sol.status != LpSolution::Optimal || sol.value <= 0) return;
        if (signs.size() == hys.size()) {
            record(Vec(sol.x.begin(), sol.x.begin() + d));
            return;
        }
        for (Sign s : {+1, -1, 0}) {
            signs.push_back(s);
            self(self);
            signs.pop_back();
        }
    };
    dfs(dfs);
    return census;
}

RealizationSearch search_realization_on_top(const Chirotope& chi, const Configuration& base,
                                            std::size_t budget, std::uint64_t seed) {
    std::size_t d = base.dim();
    if (chi.dim() != d) throw precondition_error("dimension mismatch");
    std::set<Label> in_chi(chi.labels().begin(), chi.labels().end());
    for (const auto& l : base.labels())
        if (!in_chi.count(l)) throw precondition_error("chirotope misses base label " + l);
    auto chib = compute_chirotope(base);
    for (const auto& [tuple, s] : chib.values())
        if (chi.value(tuple) != s)
            throw precondition_error("chirotope disagrees with the base restriction");

    std::set<Label> in_base(base.labels().begin(), base.labels().end());
    std::vector<Label> ys;
    for (const auto& l : chi.labels())
        if (!in_base.count(l)) ys.push_back(l);

    Configuration cur = base;
    for (const auto& y : ys) cur.add_point(y, Vec(d, Scalar(0)));

    // tuples touching at least one searched point, with their target signs
    std::vector<std::pair<std::vector<Label>, Sign>> tuples;
    std::map<Label, std::vector<std::vector<Label>>> zero_tuples;
    const auto& ls = chi.labels();
    combinations(ls.size(), d + 1, [&](const std::vector<std::size_t>& idx) {
        std::vector<Label> t;
        bool touches = false;
        for (auto i : idx) {
            t.push_back(ls[i]);
            touches = touches || !in_base.count(ls[i]);
        }
        if (!touches) return;
        Sign s = chi.value(t);
        if (s == 0)
            for (const auto& l : t)
                if (!in_base.count(l)) zero_tuples[l].push_back(t);
        tuples.emplace_back(std::move(t), s);
    });

    auto violations = [&]() {
        std::size_t v = 0;
        for (const auto& [t, s] : tuples) {
            std::vector<Vec> pts;
            for (const auto& l : t) pts.push_back(cur.point(l));
            if (orientation(pts) != s) ++v;
        }
        return v;
    };

    Scalar maxc(1);
    for (const auto& x : base.point_list())
        for (const auto& c : x) maxc = std::max(maxc, abs(c));
    RatRng rng(seed);
    // resample one point inside the flat its zero tuples force, at one of
    // four nested box scales so both tight and far cells stay reachable
    auto place = [&](const Label& y, unsigned scale) {
        std::vector<Vec> rows;
        Vec rhs;
        for (const auto& t : zero_tuples[y]) {
            std::vector<Vec> others;
            for (const auto& l : t)
                if (l != y) others.push_back(cur.point(l));
            if (!affinely_independent(others)) continue;
            auto h = hyperplane_through(others);
            if (!h) continue;
            rows.push_back(h->first);
            rhs.push_back(h->second);
        }
        Vec xp(d, Scalar(0));
        std::vector<Vec> dirs;
        if (rows.empty()) {
            for (std::size_t j = 0; j < d; ++j) {
                Vec e(d, Scalar(0));
                e[j] = 1;
                dirs.push_back(e);
            }
        } else {
            Mat a(rows.size(), d);
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < d; ++j) a(i, j) = rows[i][j];
            auto sol = solve(a, rhs);
            if (sol) {
                xp = *sol;
                dirs = nullspace(a);
            } else {
                // forced flats are inconsistent at the current placement;
                // sample freely and let the violation count reject
                for (std::size_t j = 0; j < d; ++j) {
                    Vec e(d, Scalar(0));
                    e[j] = 1;
                    dirs.push_back(e);
                }
            }
        }
        Scalar b = (maxc + 1) * Scalar(Integer(1) << (scale & 3));
        Vec x = xp;
        for (const auto& dir : dirs) x = x + (b * rng.unit(24)) * dir;
        cur.set_point(y, x);
    };

    RealizationSearch rs;
    if (ys.empty()) {
        rs.found = true;
        rs.realization = cur;
        return rs;
    }
    for (const auto& y : ys) place(y, 0);
    std::size_t best = violations();
    rs.samples_used = ys.size();
    while (best > 0 && rs.samples_used < budget) {
        if (rs.samples_used % 257 == 0) {
            // periodic restart out of local minima
            for (const auto& y : ys) place(y, static_cast<unsigned>(rng.below(4)));
            best = violations();
        }
        const Label& y = ys[rng.below(ys.size())];
        Vec old = cur.point(y);
        place(y, static_cast<unsigned>(rng.below(4)));
        ++rs.samples_used;
        std::size_t v = violations();
        if (v <= best)
            best = v;
        else
            cur.set_point(y, old);
    }
    if (best == 0) {
        rs.found = true;
        rs.realization = cur;
    }
    return rs;
}

Configuration perturb_same_chirotope(const Configuration& p, std::uint64_t seed) {
    std::size_t d = p.dim();
    RatRng rng(seed);
    for (int round = 0; round < 40; ++round) {
        Configuration q = p;
        for (const auto& l : p.labels()) {
            // moving directions that keep every spanned hyperplane through
            // this point, so degeneracies are preserved exactly
            const Vec& v = q.point(l);
            std::vector<Label> others;
            for (const auto& m : q.labels())
                if (m != l) others.push_back(m);
            std::vector<Vec> normals;
            combinations(others.size(), d, [&](const std::vector<std::size_t>& idx) {
                std::vector<Vec> sub;
                for (auto i : idx) sub.push_back(q.point(others[i]));
                auto h = hyperplane_through(sub);
                if (h && dot(h->first, v) == h->second) normals.push_back(h->first);
            });
            std::vector<Vec> dirs;
            if (normals.empty()) {
                for (std::size_t j = 0; j < d; ++j) {
                    Vec e(d, Scalar(0));
                    e[j] = 1;
                    dirs.push_back(e);
                }
            } else {
                Mat a(normals.size(), d);
                for (std::size_t i = 0; i < normals.size(); ++i)
                    for (std::size_t j = 0; j < d; ++j) a(i, j) = normals[i][j];
                dirs = nullspace(a);
            }
            if (dirs.empty()) continue;  // pinned (e.g. on two crossing lines)
            Vec w = v;
            for (const auto& dir : dirs)
                w = w + (rng.unit(16) / (Integer(1) << (8 + round))) * dir;
            q.set_point(l, w);
            if (!same_chirotope(q, p)) q.set_point(l, v);
        }
        if (!(q == p) && same_chirotope(q, p)) return q;
    }
    throw error("no admissible perturbation found");
}

std::optional<std::size_t> minimal_arithmetic_complexity(const Scalar& g, std::size_t max_len) {
    if (max_len > 6) throw precondition_error("max_len above the search guard");
    if (g == 1) return 0;  // the sequence (0, 1)
    std::vector<Scalar> start{Scalar(0), Scalar(1)};
    std::set<std::vector<Scalar>> seen{start};
    std::vector<std::vector<Scalar>> level{start};
    for (std::size_t depth = 1; depth <= max_len; ++depth) {
        std::vector<std::vector<Scalar>> next;
        for (const auto& st : level) {
            std::set<Scalar> cand;
            for (const auto& a : st)
                for (const auto& b : st) {
                    if (b == 0) continue;  // second operand must be nonzero
                    cand.insert(a + b);
                    cand.insert(a - b);
                    cand.insert(a * b);
                    cand.insert(a / b);
                }
            for (const auto& v : cand) {
                if (v == g) return depth;
                if (std::binary_search(st.begin(), st.end(), v)) continue;
                auto ns = st;
                ns.insert(std::upper_bound(ns.begin(), ns.end(), v), v);
                if (seen.insert(ns).second) next.push_back(std::move(ns));
            }
        }
        level = std::move(next);
    }
    return std::nullopt;
}

}  // namespace chiro
