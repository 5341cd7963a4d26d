#pragma once

#include <optional>

#include "chiro/linalg.hpp"

namespace chiro {

// Sign of an orientation / determinant: -1, 0, +1.
using Sign = int;

// Point of d-dimensional projective space, homogeneous coordinates with
// the homogenizing coordinate last. Canonicalized to coprime integer
// coordinates with positive leading sign to keep bit sizes small.
class ProjectivePoint {
  public:
    ProjectivePoint() = default;
    explicit ProjectivePoint(Vec homogeneous);
    static ProjectivePoint from_affine(const Vec& coords);
    static ProjectivePoint at_infinity(const Vec& direction);

    std::size_t dim() const { return h_.empty() ? 0 : h_.size() - 1; }
    const Vec& h() const { return h_; }
    bool is_affine() const { return h_.back() != 0; }
    Vec affine() const;  // throws if at infinity

    bool operator==(const ProjectivePoint& o) const;
    bool operator!=(const ProjectivePoint& o) const { return !(*this == o); }

  private:
    Vec h_;  // size d+1, not all zero
};

// Orientation of d+1 affine points in R^d: sign of the lifted determinant.
Sign orientation(const std::vector<Vec>& points);
Sign orientation(const std::vector<ProjectivePoint>& points);

bool collinear(const ProjectivePoint& a, const ProjectivePoint& b, const ProjectivePoint& c);
bool collinear(const std::vector<ProjectivePoint>& pts);

// Cross-ratio (p,q;r,s) of four collinear points; nullopt means infinity.
// Requires at least three distinct points among the four.
std::optional<Scalar> cross_ratio(const ProjectivePoint& p, const ProjectivePoint& q,
                                  const ProjectivePoint& r, const ProjectivePoint& s);

// Projective basis (b0, b1, b_inf) of a line: three distinct collinear points.
struct LineBasis {
    ProjectivePoint b0, b1, b_inf;

    LineBasis(ProjectivePoint p0, ProjectivePoint p1, ProjectivePoint pinf);

    // Point b(t) with (b0, b_inf; b(t), b1) = t; b(infinity) = b_inf.
    ProjectivePoint param_point(const std::optional<Scalar>& t) const;
    ProjectivePoint param_point(const Scalar& t) const;

    // Inverse of param_point; throws if x is not on the line.
    std::optional<Scalar> param_of(const ProjectivePoint& x) const;

    bool contains(const ProjectivePoint& x) const;

  private:
    Vec u_, v_;  // scaled homogeneous representatives: b(t) = u + t v
};

// Invertible projective transform of RP^d, (d+1)x(d+1) rational matrix.
class ProjectiveMap {
  public:
    explicit ProjectiveMap(Mat m);
    const Mat& matrix() const { return m_; }
    ProjectivePoint operator()(const ProjectivePoint& p) const;
    ProjectiveMap inverse() const;

  private:
    Mat m_;
};

// Invertible affine transform (projective matrix with last row 0..0 1).
class AffineMap {
  public:
    AffineMap(Mat linear, Vec translation);
    std::size_t dim() const { return t_.size(); }
    Vec operator()(const Vec& p) const;
    ProjectivePoint operator()(const ProjectivePoint& p) const;
    Scalar linear_det() const;
    bool direct() const { return linear_det() > 0; }
    AffineMap inverse() const;
    ProjectiveMap projective() const;
    const Mat& linear() const { return lin_; }
    const Vec& translation() const { return t_; }

  private:
    Mat lin_;
    Vec t_;
};

// Unique affine map sending src[i] to dst[i] for d+1 affinely independent
// src points; nullopt if either tuple is degenerate.
std::optional<AffineMap> find_affine_map(const std::vector<Vec>& src, const std::vector<Vec>& dst);

// Line through two distinct projective points; intersection helpers.
// Returns the intersection point of lines (a,b) and (c,d) in the plane
// (d=2 homogeneous), or nullopt if the lines coincide.
std::optional<ProjectivePoint> line_intersect_2d(const ProjectivePoint& a, const ProjectivePoint& b,
                                                 const ProjectivePoint& c, const ProjectivePoint& d);

// Intersection of line(a,b) with the affine hyperplane {x : n.x = c} in R^d;
// a point at infinity when the line is parallel, nullopt when contained.
std::optional<ProjectivePoint> line_hyperplane_intersect(const ProjectivePoint& a,
                                                         const ProjectivePoint& b, const Vec& n,
                                                         const Scalar& c);

// Affine hull utilities on affine point lists.
std::size_t affine_rank(const std::vector<Vec>& pts);  // dim of affine hull + 1
bool affinely_independent(const std::vector<Vec>& pts);

// Normal vector and offset of the hyperplane spanned by d affinely
// independent points in R^d: {x : n.x = c}. nullopt if degenerate.
std::optional<std::pair<Vec, Scalar>> hyperplane_through(const std::vector<Vec>& pts);

// Squared distance from point to hyperplane {n.x = c}, as the rational
// (n.p - c)^2 / |n|^2.
Scalar dist2_to_hyperplane(const Vec& p, const Vec& n, const Scalar& c);

}  // namespace chiro
