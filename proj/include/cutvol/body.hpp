#pragma once

// Smooth bodies W in R^N given by a signed defining function f:
// f < 0 strictly inside, f = 0 on the boundary, f > 0 outside, with nonzero
// gradient on the boundary.  Four kinds are built in: balls, ellipsoids,
// implicit polynomial bodies, and tube bodies
//   (|x| - 1)^2 + psi(y) <= eps^2,  x in R^3, y in R^m, 0 < eps < 1,
// where psi is even, positive away from 0 and has its only critical point
// (a minimum) at the origin.

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace cutvol {

enum class BodyKind { ball, ellipsoid, implicit_poly, tube };

// Transverse profile of a tube body.
struct PsiSpec {
    enum class Form {
        quadratic_diagonal,  // sum w_i y_i^2, all w_i > 0
        radial_even,         // c2 |y|^2 + c4 |y|^4 + ..., leading coeff > 0
    };

    Form form = Form::quadratic_diagonal;
    int m = 1;
    std::vector<double> coeffs;  // weights w_i, or (c2, c4, ...)

    double value(const Eigen::VectorXd& y) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& y) const;

    // Largest |y| over the sublevel set {psi <= level}.
    double sublevel_extent(double level) const;

    // Largest |y_i| over the sublevel set, per coordinate.
    double axis_extent(double level, int axis) const;

    // Radial reduction of integrals over {psi <= level}:
    //   integral g(psi(y)) dy = jacobian * S_{m-1} *
    //       integral_0^radial_max g(profile(r)) r^{m-1} dr.
    double radial_profile(double r) const;
    double radial_max(double level) const;
    double reduction_jacobian() const;

    // Throws InvalidPsi when the profile violates its contract
    // (positivity, monotone growth up to the sublevel boundary).
    void validate(double eps_level, std::size_t line = 0, std::size_t column = 0) const;
};

struct ImplicitTerm {
    double coef = 0.0;
    std::vector<int> exponents;  // one per coordinate
};

class BodyModel {
public:
    static BodyModel ball(double radius, Eigen::VectorXd center);
    static BodyModel ellipsoid(Eigen::VectorXd semiaxes);
    static BodyModel implicit(int dim, std::vector<ImplicitTerm> terms);
    static BodyModel implicit(int dim, std::vector<ImplicitTerm> terms,
                              Eigen::VectorXd box_lo, Eigen::VectorXd box_hi);
    static BodyModel tube(PsiSpec psi, double eps);

    int dim() const { return dim_; }
    BodyKind kind() const { return kind_; }

    double evaluate(const Eigen::VectorXd& p) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& p) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& p) const;

    const Eigen::VectorXd& box_lo() const { return box_lo_; }
    const Eigen::VectorXd& box_hi() const { return box_hi_; }
    double box_volume() const { return (box_hi_ - box_lo_).prod(); }
    double diameter() const { return (box_hi_ - box_lo_).norm(); }
    Eigen::VectorXd box_center() const { return 0.5 * (box_lo_ + box_hi_); }

    double radius() const { return radius_; }
    const Eigen::VectorXd& center() const { return center_; }
    const Eigen::VectorXd& semiaxes() const { return semiaxes_; }
    const std::vector<ImplicitTerm>& terms() const { return terms_; }
    const PsiSpec& psi() const { return psi_; }
    double eps() const { return eps_; }

private:
    BodyModel() = default;

    int dim_ = 0;
    BodyKind kind_ = BodyKind::ball;
    Eigen::VectorXd box_lo_, box_hi_;

    double radius_ = 0.0;
    Eigen::VectorXd center_;
    Eigen::VectorXd semiaxes_;
    std::vector<ImplicitTerm> terms_;
    PsiSpec psi_;
    double eps_ = 0.0;
};

// Operation-style wrappers.
inline double evaluate(const BodyModel& body, const Eigen::VectorXd& p) {
    return body.evaluate(p);
}
std::pair<Eigen::VectorXd, Eigen::MatrixXd> derivatives(const BodyModel& body,
                                                        const Eigen::VectorXd& p);

// Central finite differences, used as the cross-check path for the analytic
// derivatives.  Step scales with the coordinate magnitude.
Eigen::VectorXd fd_gradient(const BodyModel& body, const Eigen::VectorXd& p);
Eigen::MatrixXd fd_hessian(const BodyModel& body, const Eigen::VectorXd& p);

}  // namespace cutvol
