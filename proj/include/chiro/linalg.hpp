#pragma once

#include <optional>
#include <vector>

#include "chiro/scalar.hpp"

namespace chiro {

using Vec = std::vector<Scalar>;

// Dense rational matrix, row-major.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Scalar(0)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Scalar& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    static Mat identity(std::size_t n);
    Mat operator*(const Mat& o) const;
    Vec apply(const Vec& v) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Scalar> a_;
};

Scalar det(Mat m);               // square
std::size_t rank(Mat m);
std::optional<Mat> inverse(Mat m);

// Solves A x = b; empty optional if inconsistent. If underdetermined,
// returns one solution (free variables set to zero).
std::optional<Vec> solve(Mat a, Vec b);

// Basis of the null space of A.
std::vector<Vec> nullspace(Mat a);

Vec operator+(const Vec& u, const Vec& v);
Vec operator-(const Vec& u, const Vec& v);
Vec operator*(const Scalar& s, const Vec& v);
Scalar dot(const Vec& u, const Vec& v);
Scalar norm2(const Vec& v);  // squared euclidean norm

}  // namespace chiro
