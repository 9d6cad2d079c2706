#pragma once

// Affine hyperplanes a_1 x_1 + ... + a_N x_N + b = 0, stored as the
// homogeneous coefficient vector (a_1, ..., a_N, b).  All geometric
// quantities are invariant under scaling of the whole vector.
//
// Sign convention used throughout: writing the plane as sum a_i x_i = gamma
// gives gamma = -b.  The distance of the plane from the origin within the
// leading 3-coordinate subspace is |gamma| / |(a_1,a_2,a_3)|.

#include <Eigen/Dense>

namespace cutvol {

struct Hyperplane {
    // (a_1, ..., a_N, b); dimension N = coeffs.size() - 1
    Eigen::VectorXd coeffs;

    Hyperplane() = default;
    explicit Hyperplane(Eigen::VectorXd c) : coeffs(std::move(c)) {}
    Hyperplane(Eigen::VectorXd normal, double offset) {
        coeffs.resize(normal.size() + 1);
        coeffs.head(normal.size()) = normal;
        coeffs(normal.size()) = offset;
    }

    int dim() const { return static_cast<int>(coeffs.size()) - 1; }
    Eigen::VectorXd normal() const { return coeffs.head(dim()); }
    double b() const { return coeffs(dim()); }

    // Signed height of a point: a . p + b.
    double side_value(const Eigen::VectorXd& p) const {
        return coeffs.head(dim()).dot(p) + coeffs(dim());
    }
};

// Unit normal, first nonzero a_i positive.  Idempotent at the bit level: a
// vector whose normal is already unit length (within a few ulp) is only
// sign-canonicalized, never rescaled again.
Hyperplane normalize(const Hyperplane& h);

// |gamma| / |(a_1,a_2,a_3)| for bodies split as R^3_x + R^m_y.
// Throws VerticalDegenerate when a_1 = a_2 = a_3 = 0.
double subspace_distance(const Hyperplane& h);

// Signed variant: positive when the origin lies in the halfspace
// {a . x + b > 0}, i.e. equals b / |(a_1,a_2,a_3)|.
double signed_subspace_distance(const Hyperplane& h);

// Angle in [0, pi/2] between the plane normal and the leading 3-coordinate
// subspace; 0 iff all remaining coefficients vanish.
double angle_to_x_subspace(const Hyperplane& h);

}  // namespace cutvol
