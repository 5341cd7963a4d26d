#include "chiro/lp.hpp"

namespace chiro {

void LinearProgram::add(Vec coeffs, Rel rel, Scalar b) {
    if (coeffs.size() != nvars) throw error("LP row size mismatch");
    rows.push_back(std::move(coeffs));
    rels.push_back(rel);
    rhs.push_back(std::move(b));
}

namespace {

// Standard-form tableau: minimize c.y subject to M y = b, y >= 0, b >= 0.
struct Tableau {
    std::size_t m, n;
    std::vector<Vec> a;            // m rows of length n
    Vec b;                         // length m, kept nonnegative
    Vec c;                         // length n
    std::vector<std::size_t> basis;  // m basic column indices

    // Reduced cost of column j given basic costs are priced out.
    void price_out() {
        for (std::size_t i = 0; i < m; ++i) {
            const Scalar& cb = c[basis[i]];
            if (cb == 0) continue;
            Scalar f = cb;
            for (std::size_t j = 0; j < n; ++j) c[j] -= f * a[i][j];
            obj -= f * b[i];
        }
    }

    Scalar obj = 0;  // negative of current objective value offset

    void pivot(std::size_t r, std::size_t col) {
        Scalar p = a[r][col];
        for (std::size_t j = 0; j < n; ++j) a[r][j] /= p;
        b[r] /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || a[i][col] == 0) continue;
            Scalar f = a[i][col];
            for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        if (c[col] != 0) {
            Scalar f = c[col];
            for (std::size_t j = 0; j < n; ++j) c[j] -= f * a[r][j];
            obj -= f * b[r];
        }
        basis[r] = col;
    }

    // Bland's rule: entering = smallest index with negative reduced cost;
    // leaving = smallest basic index among minimizing ratios.
    // Returns false when optimal, throws on unboundedness.
    bool step() {
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (c[j] < 0) {
                col = j;
                break;
            }
        if (col == n) return false;
        std::size_t row = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (a[i][col] <= 0) continue;
            if (row == m) {
                row = i;
                continue;
            }
            Scalar cur = b[i] / a[i][col], best = b[row] / a[row][col];
            if (cur < best || (cur == best && basis[i] < basis[row])) row = i;
        }
        if (row == m) throw error("unbounded");
        pivot(row, col);
        return true;
    }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    std::size_t m = lp.rows.size();
    // free variables split into positive and negative parts, one slack or
    // surplus per inequality, then one artificial per row
    std::size_t nsplit = 2 * lp.nvars;
    std::size_t nslack = 0;
    for (auto r : lp.rels)
        if (r != LinearProgram::EQ) ++nslack;
    std::size_t n = nsplit + nslack + m;

    Tableau t;
    t.m = m;
    t.n = n;
    t.a.assign(m, Vec(n, Scalar(0)));
    t.b.assign(m, Scalar(0));
    t.c.assign(n, Scalar(0));
    t.basis.resize(m);

    std::size_t slack_at = nsplit;
    for (std::size_t i = 0; i < m; ++i) {
        int flip = lp.rhs[i] < 0 ? -1 : 1;
        for (std::size_t j = 0; j < lp.nvars; ++j) {
            t.a[i][2 * j] = flip * lp.rows[i][j];
            t.a[i][2 * j + 1] = -flip * lp.rows[i][j];
        }
        if (lp.rels[i] != LinearProgram::EQ) {
            int s = lp.rels[i] == LinearProgram::LE ? 1 : -1;
            t.a[i][slack_at++] = flip * s;
        }
        t.b[i] = flip * lp.rhs[i];
        t.a[i][nsplit + nslack + i] = 1;
        t.basis[i] = nsplit + nslack + i;
    }

    // phase 1: minimize the sum of artificials
    for (std::size_t j = nsplit + nslack; j < n; ++j) t.c[j] = 1;
    t.price_out();
    while (t.step()) {}
    if (-t.obj != 0) return {LpSolution::Infeasible, {}, Scalar(0)};
    // drive lingering artificial basics out where possible
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis[i] < nsplit + nslack) continue;
        std::size_t col = n;
        for (std::size_t j = 0; j < nsplit + nslack; ++j)
            if (t.a[i][j] != 0) {
                col = j;
                break;
            }
        if (col != n) t.pivot(i, col);
        // else: redundant row, harmless to leave (b[i] is zero)
    }

    // phase 2: minimize -objective over original columns; forbid artificials
    // by removing their columns
    t.n = nsplit + nslack;
    for (auto& row : t.a) row.resize(t.n);
    t.c.assign(t.n, Scalar(0));
    t.obj = 0;
    for (std::size_t j = 0; j < lp.nvars; ++j) {
        t.c[2 * j] = -lp.objective[j];
        t.c[2 * j + 1] = lp.objective[j];
    }
    bool artificial_basic = false;
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] >= t.n) artificial_basic = true;
    if (artificial_basic) {
        // redundant rows with artificial basics: their b is 0 and every
        // original coefficient is 0, so they never constrain a pivot; give
        // the artificial columns back but price them prohibitively is not
        // exact-friendly, instead drop such rows
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < m; ++i)
            if (t.basis[i] < t.n) keep.push_back(i);
        std::vector<Vec> a2;
        Vec b2;
        std::vector<std::size_t> basis2;
        for (auto i : keep) {
            a2.push_back(std::move(t.a[i]));
            b2.push_back(std::move(t.b[i]));
            basis2.push_back(t.basis[i]);
        }
        t.a = std::move(a2);
        t.b = std::move(b2);
        t.basis = std::move(basis2);
        t.m = t.a.size();
    }
    t.price_out();
    try {
        while (t.step()) {}
    } catch (const error&) {
        return {LpSolution::Unbounded, {}, Scalar(0)};
    }

    Vec y(t.n, Scalar(0));
    for (std::size_t i = 0; i < t.m; ++i) y[t.basis[i]] = t.b[i];
    Vec x(lp.nvars, Scalar(0));
    for (std::size_t j = 0; j < lp.nvars; ++j) x[j] = y[2 * j] - y[2 * j + 1];
    Scalar val = dot(lp.objective, x);
    return {LpSolution::Optimal, std::move(x), std::move(val)};
}

bool lp_feasible(const LinearProgram& lp) {
    LinearProgram f = lp;
    f.objective.assign(f.nvars, Scalar(0));
    return solve_lp(f).status == LpSolution::Optimal;
}

}  // namespace chiro
