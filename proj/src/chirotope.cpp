#include "chiro/chirotope.hpp"

#include <algorithm>
#include <map>

#include "chiro/lp.hpp"

namespace chiro {

namespace {

// Visits all strictly increasing index k-tuples of {0..n-1}.
template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(idx);
        std::size_t i = k;
        while (i-- > 0) {
            if (idx[i] + (k - i) < n) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
    }
}

std::map<Label, std::size_t> label_index(const std::vector<Label>& labels) {
    std::map<Label, std::size_t> m;
    for (std::size_t i = 0; i < labels.size(); ++i) m[labels[i]] = i;
    return m;
}

}  // namespace

Chirotope::Chirotope(std::size_t dim, std::vector<Label> labels,
                     std::map<std::vector<Label>, Sign> values)
    : dim_(dim), labels_(std::move(labels)), values_(std::move(values)) {}

Sign Chirotope::value(std::vector<Label> tuple) const {
    if (tuple.size() != dim_ + 1) throw error("chirotope tuple arity mismatch");
    auto idx = label_index(labels_);
    std::vector<std::size_t> pos(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        auto it = idx.find(tuple[i]);
        if (it == idx.end()) throw error("unknown label " + tuple[i]);
        pos[i] = it->second;
    }
    // parity by counting inversions; repeated labels give zero
    int parity = 1;
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j) {
            if (pos[i] == pos[j]) return 0;
            if (pos[i] > pos[j]) parity = -parity;
        }
    std::vector<std::pair<std::size_t, Label>> order;
    for (std::size_t i = 0; i < tuple.size(); ++i) order.emplace_back(pos[i], tuple[i]);
    std::sort(order.begin(), order.end());
    std::vector<Label> key;
    for (auto& [p, l] : order) key.push_back(l);
    auto it = values_.find(key);
    if (it == values_.end()) throw error("tuple not in chirotope domain");
    return parity * it->second;
}

Chirotope Chirotope::negated() const {
    auto v = values_;
    for (auto& [k, s] : v) s = -s;
    return Chirotope(dim_, labels_, std::move(v));
}

bool Chirotope::operator==(const Chirotope& o) const {
    return dim_ == o.dim_ && labels_ == o.labels_ && values_ == o.values_;
}

Chirotope compute_chirotope(const Configuration& p) {
    std::size_t d = p.dim(), n = p.size();
    if (n < d + 1) throw error("too few points for a chirotope");
    const auto& labels = p.labels();
    auto pts = p.point_list();
    std::map<std::vector<Label>, Sign> values;
    for_each_subset(n, d + 1, [&](const std::vector<std::size_t>& idx) {
        std::vector<Vec> tup;
        std::vector<Label> key;
        for (auto i : idx) {
            tup.push_back(pts[i]);
            key.push_back(labels[i]);
        }
        values[std::move(key)] = orientation(tup);
    });
    return Chirotope(d, labels, std::move(values));
}

std::size_t corank(const Configuration& p) {
    if (p.size() == 0) throw error("corank of empty configuration");
    return p.size() - affine_rank(p.point_list());
}

bool is_generic(const Configuration& p) {
    std::size_t d = p.dim(), n = p.size();
    bool ok = true;
    for_each_subset(n, std::min(n, d + 1), [&](const std::vector<std::size_t>& idx) {
        if (!ok) return;
        std::vector<Vec> tup;
        for (auto i : idx) tup.push_back(p.point(p.labels()[i]));
        if (!affinely_independent(tup)) ok = false;
    });
    return ok;
}

std::vector<std::vector<Label>> collinearity_list(const Configuration& p) {
    if (p.size() == 0) throw error("collinearity_list of empty configuration");
    std::size_t d = p.dim(), n = p.size();
    std::vector<std::vector<std::size_t>> found;
    std::vector<std::vector<Label>> out;
    for (std::size_t k = 2; k <= std::min(n, d + 1); ++k) {
        for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
            for (const auto& f : found) {
                if (std::includes(idx.begin(), idx.end(), f.begin(), f.end())) return;
            }
            std::vector<Vec> tup;
            for (auto i : idx) tup.push_back(p.point(p.labels()[i]));
            if (!affinely_independent(tup)) {
                found.push_back(idx);
                std::vector<Label> key;
                for (auto i : idx) key.push_back(p.labels()[i]);
                out.push_back(std::move(key));
            }
        });
    }
    return out;
}

bool same_chirotope(const Configuration& p, const Configuration& q) {
    if (p.dim() != q.dim()) throw error("dimension mismatch");
    if (p.labels() != q.labels()) throw error("label mismatch");
    return compute_chirotope(p) == compute_chirotope(q);
}

std::optional<AffineMap> direct_affine_equivalent(const Configuration& p, const Configuration& q) {
    if (p.dim() != q.dim()) throw error("dimension mismatch");
    if (p.labels() != q.labels()) throw error("label mismatch");
    std::size_t d = p.dim();
    // an affine basis among the points of p
    std::vector<Label> basis;
    std::vector<Vec> src;
    for (const auto& l : p.labels()) {
        std::vector<Vec> cand = src;
        cand.push_back(p.point(l));
        if (affinely_independent(cand)) {
            src = std::move(cand);
            basis.push_back(l);
            if (src.size() == d + 1) break;
        }
    }
    if (src.size() != d + 1) throw error("configuration is not full-dimensional");
    auto f = find_affine_map(src, q.point_list(basis));
    if (!f || !f->direct()) return std::nullopt;
    for (const auto& l : p.labels())
        if ((*f)(p.point(l)) != q.point(l)) return std::nullopt;
    return f;
}

bool flat_meets_hull(const Configuration& p, const std::vector<Label>& y,
                     const std::vector<Label>& z) {
    if (y.empty() || z.empty()) throw error("flat_meets_hull needs nonempty label sets");
    for (const auto& l : y)
        for (const auto& m : z)
            if (l == m) throw error("flat_meets_hull label sets must be disjoint");
    std::size_t d = p.dim();
    auto ys = p.point_list(y);
    auto zs = p.point_list(z);
    // lambda free, mu >= 0, sum lambda = 1, sum mu = 1,
    // sum lambda_i y_i - sum mu_j z_j = 0
    std::size_t ny = ys.size(), nz = zs.size();
    LinearProgram lp(ny + nz);
    for (std::size_t k = 0; k < d; ++k) {
        Vec row(ny + nz, Scalar(0));
        for (std::size_t i = 0; i < ny; ++i) row[i] = ys[i][k];
        for (std::size_t j = 0; j < nz; ++j) row[ny + j] = -zs[j][k];
        lp.add(std::move(row), LinearProgram::EQ, Scalar(0));
    }
    Vec sy(ny + nz, Scalar(0)), sz(ny + nz, Scalar(0));
    for (std::size_t i = 0; i < ny; ++i) sy[i] = 1;
    for (std::size_t j = 0; j < nz; ++j) sz[ny + j] = 1;
    lp.add(std::move(sy), LinearProgram::EQ, Scalar(1));
    lp.add(std::move(sz), LinearProgram::EQ, Scalar(1));
    for (std::size_t j = 0; j < nz; ++j) {
        Vec row(ny + nz, Scalar(0));
        row[ny + j] = 1;
        lp.add(std::move(row), LinearProgram::GE, Scalar(0));
    }
    return lp_feasible(lp);
}

}  // namespace chiro
