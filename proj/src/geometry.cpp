#include "chiro/geometry.hpp"

namespace chiro {

ProjectivePoint::ProjectivePoint(Vec homogeneous) : h_(std::move(homogeneous)) {
    if (h_.empty()) throw error("empty homogeneous vector");
    // clear denominators, divide by gcd of numerators, fix sign
    Integer lcm(1);
    for (const auto& x : h_) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den().get_mpz_t());
    Integer g(0);
    std::vector<Integer> num(h_.size());
    for (std::size_t i = 0; i < h_.size(); ++i) {
        num[i] = h_[i].get_num() * (lcm / h_[i].get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num[i].get_mpz_t());
    }
    if (g == 0) throw error("zero homogeneous vector");
    int lead = 0;
    for (std::size_t i = h_.size(); i-- > 0;)
        if (num[i] != 0) lead = sgn(num[i]);
    if (lead < 0) g = -g;
    for (std::size_t i = 0; i < h_.size(); ++i) h_[i] = Scalar(num[i] / g);
}

ProjectivePoint ProjectivePoint::from_affine(const Vec& coords) {
    Vec h = coords;
    h.push_back(Scalar(1));
    return ProjectivePoint(std::move(h));
}

ProjectivePoint ProjectivePoint::at_infinity(const Vec& direction) {
    Vec h = direction;
    h.push_back(Scalar(0));
    return ProjectivePoint(std::move(h));
}

Vec ProjectivePoint::affine() const {
    if (!is_affine()) throw error("affine coordinates of a point at infinity");
    Vec r(h_.begin(), h_.end() - 1);
    for (auto& x : r) x /= h_.back();
    return r;
}

bool ProjectivePoint::operator==(const ProjectivePoint& o) const {
    // canonical form makes proportionality an exact comparison
    return h_ == o.h_;
}

Sign orientation(const std::vector<Vec>& points) {
    if (points.empty()) throw error("orientation of empty tuple");
    std::size_t d = points[0].size();
    if (points.size() != d + 1) throw error("orientation needs d+1 points in dimension d");
    // columns (p_j; 1); in odd dimensions this differs from the
    // det[p_1-p_0, ..., p_d-p_0] simplex convention by a global sign
    Mat m(d + 1, d + 1);
    for (std::size_t j = 0; j < d + 1; ++j) {
        if (points[j].size() != d) throw error("orientation dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) m(i, j) = points[j][i];
        m(d, j) = 1;
    }
    return sign(det(m));
}

Sign orientation(const std::vector<ProjectivePoint>& points) {
    std::vector<Vec> aff;
    aff.reserve(points.size());
    for (const auto& p : points) aff.push_back(p.affine());
    return orientation(aff);
}

bool collinear(const std::vector<ProjectivePoint>& pts) {
    if (pts.size() <= 2) return true;
    Mat m(pts.size(), pts[0].h().size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts[i].h().size(); ++j) m(i, j) = pts[i].h()[j];
    return rank(std::move(m)) <= 2;
}

bool collinear(const ProjectivePoint& a, const ProjectivePoint& b, const ProjectivePoint& c) {
    return collinear(std::vector<ProjectivePoint>{a, b, c});
}

// Coordinates of each point in a rank-2 basis chosen among the inputs.
static std::vector<std::pair<Scalar, Scalar>> line_coords(const std::vector<ProjectivePoint>& pts) {
    if (!collinear(pts)) throw error("points are not collinear");
    std::size_t n = pts[0].h().size();
    // pick two independent spanning points
    std::size_t iu = 0, iv = pts.size();
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i] != pts[iu]) {
            iv = i;
            break;
        }
    if (iv == pts.size()) throw error("all points coincide");
    const Vec& u = pts[iu].h();
    const Vec& v = pts[iv].h();
    // two coordinate rows where [u v] is invertible
    std::size_t r1 = n, r2 = n;
    for (std::size_t i = 0; i < n && r2 == n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (u[i] * v[j] - u[j] * v[i] != 0) {
                r1 = i;
                r2 = j;
                break;
            }
    if (r2 == n) throw error("degenerate line basis");
    Scalar den = u[r1] * v[r2] - u[r2] * v[r1];
    std::vector<std::pair<Scalar, Scalar>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        const Vec& x = p.h();
        Scalar a = (x[r1] * v[r2] - x[r2] * v[r1]) / den;
        Scalar b = (u[r1] * x[r2] - u[r2] * x[r1]) / den;
        out.emplace_back(a, b);
    }
    return out;
}

std::optional<Scalar> cross_ratio(const ProjectivePoint& p, const ProjectivePoint& q,
                                  const ProjectivePoint& r, const ProjectivePoint& s) {
    auto c = line_coords({p, q, r, s});
    // explicit Scalar return: gmpxx expression templates must not escape
    auto d2 = [](const std::pair<Scalar, Scalar>& x, const std::pair<Scalar, Scalar>& y) -> Scalar {
        return x.first * y.second - x.second * y.first;
    };
    Scalar num = d2(c[0], c[2]) * d2(c[1], c[3]);
    Scalar den = d2(c[1], c[2]) * d2(c[0], c[3]);
    if (den == 0) {
        if (num == 0) throw error("cross-ratio undefined: fewer than three distinct points");
        return std::nullopt;
    }
    return num / den;
}

LineBasis::LineBasis(ProjectivePoint p0, ProjectivePoint p1, ProjectivePoint pinf)
    : b0(std::move(p0)), b1(std::move(p1)), b_inf(std::move(pinf)) {
    if (b0 == b1 || b0 == b_inf || b1 == b_inf) throw error("line basis points must be distinct");
    auto c = line_coords({b0, b_inf, b1});
    // write b1 = alpha*b0 + beta*b_inf, then rescale so b1 = u + v
    Scalar den = c[0].first * c[1].second - c[0].second * c[1].first;
    Scalar alpha = (c[2].first * c[1].second - c[2].second * c[1].first) / den;
    Scalar beta = (c[0].first * c[2].second - c[0].second * c[2].first) / den;
    if (alpha == 0 || beta == 0) throw error("degenerate line basis");
    u_.resize(b0.h().size());
    v_.resize(b0.h().size());
    for (std::size_t i = 0; i < u_.size(); ++i) {
        u_[i] = alpha * b0.h()[i];
        v_[i] = beta * b_inf.h()[i];
    }
}

ProjectivePoint LineBasis::param_point(const Scalar& t) const {
    Vec x(u_.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = u_[i] + t * v_[i];
    return ProjectivePoint(std::move(x));
}

ProjectivePoint LineBasis::param_point(const std::optional<Scalar>& t) const {
    if (!t) return b_inf;
    return param_point(*t);
}

std::optional<Scalar> LineBasis::param_of(const ProjectivePoint& x) const {
    if (!contains(x)) throw error("point is not on the line");
    // solve x ~ u + t v: pick coordinate rows where [u v] invertible
    std::size_t n = u_.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Scalar den = u_[i] * v_[j] - u_[j] * v_[i];
            if (den == 0) continue;
            const Vec& h = x.h();
            Scalar a = (h[i] * v_[j] - h[j] * v_[i]) / den;
            Scalar b = (u_[i] * h[j] - u_[j] * h[i]) / den;
            if (a == 0) return std::nullopt;  // x = b_inf
            return b / a;
        }
    throw error("degenerate line basis");
}

bool LineBasis::contains(const ProjectivePoint& x) const {
    return collinear(b0, b_inf, x);
}

ProjectiveMap::ProjectiveMap(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw error("projective map matrix must be square");
    if (det(m_) == 0) throw error("projective map matrix is singular");
}

ProjectivePoint ProjectiveMap::operator()(const ProjectivePoint& p) const {
    return ProjectivePoint(m_.apply(p.h()));
}

ProjectiveMap ProjectiveMap::inverse() const {
    auto inv = chiro::inverse(m_);
    if (!inv) throw error("projective map matrix is singular");
    return ProjectiveMap(std::move(*inv));
}

AffineMap::AffineMap(Mat linear, Vec translation) : lin_(std::move(linear)), t_(std::move(translation)) {
    if (lin_.rows() != lin_.cols() || lin_.rows() != t_.size())
        throw error("affine map shape mismatch");
    if (det(lin_) == 0) throw error("affine map is singular");
}

Vec AffineMap::operator()(const Vec& p) const { return lin_.apply(p) + t_; }

ProjectivePoint AffineMap::operator()(const ProjectivePoint& p) const {
    return projective()(p);
}

Scalar AffineMap::linear_det() const { return det(lin_); }

AffineMap AffineMap::inverse() const {
    auto inv = chiro::inverse(lin_);
    if (!inv) throw error("affine map is singular");
    Vec t = inv->apply(t_);
    for (auto& x : t) x = -x;
    return AffineMap(std::move(*inv), std::move(t));
}

ProjectiveMap AffineMap::projective() const {
    std::size_t d = dim();
    Mat m(d + 1, d + 1);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) m(i, j) = lin_(i, j);
        m(i, d) = t_[i];
    }
    m(d, d) = 1;
    return ProjectiveMap(std::move(m));
}

std::optional<AffineMap> find_affine_map(const std::vector<Vec>& src, const std::vector<Vec>& dst) {
    if (src.empty() || src.size() != dst.size()) throw error("affine map needs matching tuples");
    std::size_t d = src[0].size();
    if (src.size() != d + 1) throw error("affine map needs d+1 point pairs");
    Mat s(d, d), t(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) {
            s(i, j) = src[j + 1][i] - src[0][i];
            t(i, j) = dst[j + 1][i] - dst[0][i];
        }
    auto sinv = inverse(std::move(s));
    if (!sinv) return std::nullopt;
    Mat lin = t * (*sinv);
    if (det(lin) == 0) return std::nullopt;
    Vec tr = dst[0] - lin.apply(src[0]);
    return AffineMap(std::move(lin), std::move(tr));
}

std::optional<ProjectivePoint> line_intersect_2d(const ProjectivePoint& a, const ProjectivePoint& b,
                                                 const ProjectivePoint& c, const ProjectivePoint& d) {
    if (a.h().size() != 3) throw error("line_intersect_2d needs planar points");
    auto cross = [](const Vec& u, const Vec& v) {
        return Vec{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    };
    Vec l1 = cross(a.h(), b.h());
    Vec l2 = cross(c.h(), d.h());
    Vec x = cross(l1, l2);
    if (x[0] == 0 && x[1] == 0 && x[2] == 0) return std::nullopt;
    return ProjectivePoint(std::move(x));
}

std::optional<ProjectivePoint> line_hyperplane_intersect(const ProjectivePoint& a,
                                                         const ProjectivePoint& b, const Vec& n,
                                                         const Scalar& c) {
    // homogeneous hyperplane: n.x - c*w = 0
    std::size_t d = n.size();
    if (a.h().size() != d + 1 || b.h().size() != d + 1) throw error("hyperplane dimension mismatch");
    auto eval = [&](const Vec& h) -> Scalar {
        Scalar s(0);
        for (std::size_t i = 0; i < d; ++i) s += n[i] * h[i];
        return s - c * h[d];
    };
    Scalar fa = eval(a.h()), fb = eval(b.h());
    if (fa == 0 && fb == 0) return std::nullopt;  // line contained
    // fb*a - fa*b lies on the hyperplane
    Vec x(d + 1);
    for (std::size_t i = 0; i <= d; ++i) x[i] = fb * a.h()[i] - fa * b.h()[i];
    bool all_zero = true;
    for (const auto& xi : x) all_zero = all_zero && xi == 0;
    if (all_zero) return std::nullopt;  // parallel (a, b swapped scale cancels)
    return ProjectivePoint(std::move(x));
}

std::size_t affine_rank(const std::vector<Vec>& pts) {
    if (pts.empty()) return 0;
    std::size_t d = pts[0].size();
    Mat m(pts.size(), d + 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) m(i, j) = pts[i][j];
        m(i, d) = 1;
    }
    return rank(std::move(m));
}

bool affinely_independent(const std::vector<Vec>& pts) {
    return affine_rank(pts) == pts.size();
}

std::optional<std::pair<Vec, Scalar>> hyperplane_through(const std::vector<Vec>& pts) {
    if (pts.empty()) return std::nullopt;
    std::size_t d = pts[0].size();
    if (pts.size() != d) throw error("hyperplane needs d points in dimension d");
    // nullspace of the lifted point matrix gives (n, -c)
    Mat m(d, d + 1);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) m(i, j) = pts[i][j];
        m(i, d) = 1;
    }
    auto ns = nullspace(std::move(m));
    if (ns.size() != 1) return std::nullopt;
    Vec n(ns[0].begin(), ns[0].end() - 1);
    bool zero = true;
    for (const auto& x : n) zero = zero && x == 0;
    if (zero) return std::nullopt;
    return std::make_pair(std::move(n), Scalar(-ns[0][d]));
}

Scalar dist2_to_hyperplane(const Vec& p, const Vec& n, const Scalar& c) {
    Scalar v = dot(n, p) - c;
    return v * v / norm2(n);
}

}  // namespace chiro
