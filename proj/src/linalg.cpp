#include "chiro/linalg.hpp"

namespace chiro {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw error("matrix product shape mismatch");
    Mat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Scalar& v = (*this)(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
        }
    return r;
}

Vec Mat::apply(const Vec& v) const {
    if (cols_ != v.size()) throw error("matrix apply shape mismatch");
    Vec r(rows_, Scalar(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != 0) r[i] += (*this)(i, j) * v[j];
    return r;
}

// Gaussian elimination with partial pivoting by first nonzero.
// Returns pivot columns; reduces m in place to row echelon form and
// applies the same operations to rhs (if given).
static std::vector<std::size_t> echelon(Mat& m, Vec* rhs, Scalar* det_out) {
    std::size_t r = 0;
    Scalar d(1);
    std::vector<std::size_t> pivots;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != r) {
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
            if (rhs) std::swap((*rhs)[p], (*rhs)[r]);
            d = -d;
        }
        d *= m(r, c);
        for (std::size_t i = r + 1; i < m.rows(); ++i) {
            if (m(i, c) == 0) continue;
            Scalar f = m(i, c) / m(r, c);
            m(i, c) = 0;
            for (std::size_t j = c + 1; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
            if (rhs) (*rhs)[i] -= f * (*rhs)[r];
        }
        pivots.push_back(c);
        ++r;
    }
    if (det_out) *det_out = (pivots.size() == m.rows() && m.rows() == m.cols()) ? d : Scalar(0);
    return pivots;
}

Scalar det(Mat m) {
    if (m.rows() != m.cols()) throw error("det of non-square matrix");
    Scalar d;
    echelon(m, nullptr, &d);
    return d;
}

std::size_t rank(Mat m) { return echelon(m, nullptr, nullptr).size(); }

std::optional<Mat> inverse(Mat m) {
    if (m.rows() != m.cols()) throw error("inverse of non-square matrix");
    std::size_t n = m.rows();
    Mat aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    auto piv = echelon(aug, nullptr, nullptr);
    // singular iff any pivot escapes the left block
    if (piv.size() != n || piv.back() != n - 1) return std::nullopt;
    // back substitution
    for (std::size_t ri = n; ri-- > 0;) {
        Scalar p = aug(ri, ri);
        for (std::size_t j = ri; j < 2 * n; ++j) aug(ri, j) /= p;
        for (std::size_t i = 0; i < ri; ++i) {
            Scalar f = aug(i, ri);
            if (f == 0) continue;
            for (std::size_t j = ri; j < 2 * n; ++j) aug(i, j) -= f * aug(ri, j);
        }
    }
    Mat inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

std::optional<Vec> solve(Mat a, Vec b) {
    if (a.rows() != b.size()) throw error("solve shape mismatch");
    auto piv = echelon(a, &b, nullptr);
    for (std::size_t i = piv.size(); i < a.rows(); ++i)
        if (b[i] != 0) return std::nullopt;
    Vec x(a.cols(), Scalar(0));
    for (std::size_t k = piv.size(); k-- > 0;) {
        Scalar s = b[k];
        for (std::size_t j = piv[k] + 1; j < a.cols(); ++j) s -= a(k, j) * x[j];
        x[piv[k]] = s / a(k, piv[k]);
    }
    return x;
}

std::vector<Vec> nullspace(Mat a) {
    std::size_t n = a.cols();
    auto piv = echelon(a, nullptr, nullptr);
    std::vector<bool> is_piv(n, false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<Vec> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_piv[f]) continue;
        Vec x(n, Scalar(0));
        x[f] = 1;
        for (std::size_t k = piv.size(); k-- > 0;) {
            Scalar s(0);
            for (std::size_t j = piv[k] + 1; j < n; ++j) s -= a(k, j) * x[j];
            x[piv[k]] = s / a(k, piv[k]);
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

Vec operator+(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw error("vector size mismatch");
    Vec r(u);
    for (std::size_t i = 0; i < v.size(); ++i) r[i] += v[i];
    return r;
}

Vec operator-(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw error("vector size mismatch");
    Vec r(u);
    for (std::size_t i = 0; i < v.size(); ++i) r[i] -= v[i];
    return r;
}

Vec operator*(const Scalar& s, const Vec& v) {
    Vec r(v);
    for (auto& x : r) x *= s;
    return r;
}

Scalar dot(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw error("vector size mismatch");
    Scalar s(0);
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

Scalar norm2(const Vec& v) { return dot(v, v); }

}  // namespace chiro
