#include "cutvol/body.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cutvol/errors.hpp"

namespace cutvol {

namespace {

double ipow(double x, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// PsiSpec

double PsiSpec::value(const Eigen::VectorXd& y) const {
    if (form == Form::quadratic_diagonal) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += coeffs[static_cast<size_t>(i)] * y(i) * y(i);
        return s;
    }
    const double q = y.squaredNorm();
    double s = 0.0;
    double qk = q;
    for (double c : coeffs) {
        s += c * qk;
        qk *= q;
    }
    return s;
}

Eigen::VectorXd PsiSpec::gradient(const Eigen::VectorXd& y) const {
    Eigen::VectorXd g(m);
    if (form == Form::quadratic_diagonal) {
        for (int i = 0; i < m; ++i) g(i) = 2.0 * coeffs[static_cast<size_t>(i)] * y(i);
        return g;
    }
    // psi = P(q), q = |y|^2  =>  grad = 2 P'(q) y
    const double q = y.squaredNorm();
    double dp = 0.0;
    double qk = 1.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        dp += coeffs[k] * static_cast<double>(k + 1) * qk;
        qk *= q;
    }
    return 2.0 * dp * y;
}

Eigen::MatrixXd PsiSpec::hessian(const Eigen::VectorXd& y) const {
    if (form == Form::quadratic_diagonal) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) h(i, i) = 2.0 * coeffs[static_cast<size_t>(i)];
        return h;
    }
    // hess = 2 P'(q) I + 4 P''(q) y y^T
    const double q = y.squaredNorm();
    double dp = 0.0, ddp = 0.0;
    double qk = 1.0, qk2 = 1.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        dp += coeffs[k] * static_cast<double>(k + 1) * qk;
        qk *= q;
        if (k >= 1) {
            ddp += coeffs[k] * static_cast<double>((k + 1) * k) * qk2;
            qk2 *= q;
        }
    }
    Eigen::MatrixXd h = (2.0 * dp) * Eigen::MatrixXd::Identity(m, m);
    h += (4.0 * ddp) * (y * y.transpose());
    return h;
}

double PsiSpec::radial_profile(double r) const {
    if (form == Form::quadratic_diagonal) return r * r;
    double s = 0.0;
    const double q = r * r;
    double qk = q;
    for (double c : coeffs) {
        s += c * qk;
        qk *= q;
    }
    return s;
}

double PsiSpec::radial_max(double level) const {
    if (level <= 0.0) return 0.0;
    if (form == Form::quadratic_diagonal) return std::sqrt(level);
    // bracket, then bisect radial_profile(r) = level
    double hi = 1.0;
    for (int k = 0; k < 200 && radial_profile(hi) < level; ++k) hi *= 2.0;
    double lo = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (radial_profile(mid) < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double PsiSpec::reduction_jacobian() const {
    if (form != Form::quadratic_diagonal) return 1.0;
    double j = 1.0;
    for (double w : coeffs) j /= std::sqrt(w);
    return j;
}

double PsiSpec::sublevel_extent(double level) const {
    if (form == Form::quadratic_diagonal) {
        double wmin = std::numeric_limits<double>::infinity();
        for (double w : coeffs) wmin = std::min(wmin, w);
        return std::sqrt(level / wmin);
    }
    return radial_max(level);
}

double PsiSpec::axis_extent(double level, int axis) const {
    if (form == Form::quadratic_diagonal)
        return std::sqrt(level / coeffs[static_cast<size_t>(axis)]);
    return radial_max(level);
}

void PsiSpec::validate(double eps_level, std::size_t line, std::size_t column) const {
    if (m < 1) throw InvalidPsi("psi needs m >= 1", line, column);
    if (coeffs.empty()) throw InvalidPsi("psi has no coefficients", line, column);
    if (form == Form::quadratic_diagonal) {
        if (static_cast<int>(coeffs.size()) != m)
            throw InvalidPsi("quadratic psi needs one weight per coordinate", line, column);
        for (double w : coeffs)
            if (!(w > 0.0))
                throw InvalidPsi("quadratic psi weights must be positive", line, column);
        return;
    }
    if (!(coeffs.back() > 0.0))
        throw InvalidPsi("radial psi needs a positive leading coefficient", line, column);
    // The only critical point must be the minimum at the origin: the radial
    // profile has to grow strictly on (0, r_max].
    const double rmax = radial_max(eps_level);
    const int probes = 1000;
    for (int k = 1; k <= probes; ++k) {
        const double r = rmax * static_cast<double>(k) / probes;
        const double q = r * r;
        double dp = 0.0, qj = 1.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            dp += coeffs[j] * static_cast<double>(j + 1) * qj;
            qj *= q;
        }
        if (!(dp > 0.0))
            throw InvalidPsi(
                "radial psi is not strictly increasing up to the sublevel boundary; "
                "the unique critical point must be a minimum point at the origin",
                line, column);
    }
}

// ---------------------------------------------------------------------------
// BodyModel construction

BodyModel BodyModel::ball(double radius, Eigen::VectorXd center) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    if (center.size() < 2) throw std::invalid_argument("ball needs dimension >= 2");
    BodyModel b;
    b.kind_ = BodyKind::ball;
    b.dim_ = static_cast<int>(center.size());
    b.radius_ = radius;
    b.center_ = std::move(center);
    b.box_lo_ = b.center_.array() - radius;
    b.box_hi_ = b.center_.array() + radius;
    return b;
}

BodyModel BodyModel::ellipsoid(Eigen::VectorXd semiaxes) {
    if (semiaxes.size() < 2) throw std::invalid_argument("ellipsoid needs dimension >= 2");
    if (!(semiaxes.minCoeff() > 0.0))
        throw std::invalid_argument("ellipsoid semiaxes must be positive");
    BodyModel b;
    b.kind_ = BodyKind::ellipsoid;
    b.dim_ = static_cast<int>(semiaxes.size());
    b.semiaxes_ = std::move(semiaxes);
    b.box_lo_ = -b.semiaxes_;
    b.box_hi_ = b.semiaxes_;
    return b;
}

BodyModel BodyModel::implicit(int dim, std::vector<ImplicitTerm> terms) {
    // No box in the description: fall back to a generous default the caller
    // is responsible for (documented in the body-file grammar).
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -4.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, 4.0);
    return implicit(dim, std::move(terms), std::move(lo), std::move(hi));
}

BodyModel BodyModel::implicit(int dim, std::vector<ImplicitTerm> terms,
                              Eigen::VectorXd box_lo, Eigen::VectorXd box_hi) {
    if (dim < 2) throw std::invalid_argument("implicit body needs dimension >= 2");
    if (terms.empty()) throw std::invalid_argument("implicit body needs at least one term");
    for (const auto& t : terms) {
        if (static_cast<int>(t.exponents.size()) != dim)
            throw std::invalid_argument("implicit term exponent count != dim");
        for (int e : t.exponents)
            if (e < 0) throw std::invalid_argument("implicit term exponents must be >= 0");
    }
    if (box_lo.size() != dim || box_hi.size() != dim ||
        !((box_hi - box_lo).minCoeff() > 0.0))
        throw std::invalid_argument("implicit body box is degenerate");
    BodyModel b;
    b.kind_ = BodyKind::implicit_poly;
    b.dim_ = dim;
    b.terms_ = std::move(terms);
    b.box_lo_ = std::move(box_lo);
    b.box_hi_ = std::move(box_hi);
    return b;
}

BodyModel BodyModel::tube(PsiSpec psi, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("tube requires 0 < eps < 1");
    psi.validate(eps * eps);
    BodyModel b;
    b.kind_ = BodyKind::tube;
    b.dim_ = 3 + psi.m;
    b.eps_ = eps;
    b.psi_ = std::move(psi);
    b.box_lo_.resize(b.dim_);
    b.box_hi_.resize(b.dim_);
    for (int i = 0; i < 3; ++i) {
        b.box_lo_(i) = -(1.0 + eps);
        b.box_hi_(i) = 1.0 + eps;
    }
    // y-box of {psi <= eps^2}, inflated by 1%
    for (int i = 3; i < b.dim_; ++i) {
        const double ext = 1.01 * b.psi_.axis_extent(eps * eps, i - 3);
        b.box_lo_(i) = -ext;
        b.box_hi_(i) = ext;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Evaluation

double BodyModel::evaluate(const Eigen::VectorXd& p) const {
    switch (kind_) {
        case BodyKind::ball:
            return (p - center_).squaredNorm() - radius_ * radius_;
        case BodyKind::ellipsoid: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double u = p(i) / semiaxes_(i);
                s += u * u;
            }
            return s - 1.0;
        }
        case BodyKind::implicit_poly: {
            double s = 0.0;
            for (const auto& t : terms_) {
                double mono = t.coef;
                for (int i = 0; i < dim_; ++i) mono *= ipow(p(i), t.exponents[static_cast<size_t>(i)]);
                s += mono;
            }
            return s;
        }
        case BodyKind::tube: {
            const double rho = p.head(3).norm();
            const double t = rho - 1.0;
            return t * t + psi_.value(p.tail(dim_ - 3)) - eps_ * eps_;
        }
    }
    return 0.0;
}

Eigen::VectorXd BodyModel::gradient(const Eigen::VectorXd& p) const {
    switch (kind_) {
        case BodyKind::ball:
            return 2.0 * (p - center_);
        case BodyKind::ellipsoid: {
            Eigen::VectorXd g(dim_);
            for (int i = 0; i < dim_; ++i) g(i) = 2.0 * p(i) / (semiaxes_(i) * semiaxes_(i));
            return g;
        }
        case BodyKind::implicit_poly: {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
            for (const auto& t : terms_) {
                for (int i = 0; i < dim_; ++i) {
                    const int e = t.exponents[static_cast<size_t>(i)];
                    if (e == 0) continue;
                    double mono = t.coef * e * ipow(p(i), e - 1);
                    for (int j = 0; j < dim_; ++j)
                        if (j != i) mono *= ipow(p(j), t.exponents[static_cast<size_t>(j)]);
                    g(i) += mono;
                }
            }
            return g;
        }
        case BodyKind::tube: {
            const Eigen::Vector3d x = p.head(3);
            const double rho = x.norm();
            if (rho < 1e-12)
                throw NonSmoothPoint("tube defining function is not smooth on the axis x = 0");
            Eigen::VectorXd g(dim_);
            g.head(3) = 2.0 * (rho - 1.0) / rho * x;
            g.tail(dim_ - 3) = psi_.gradient(p.tail(dim_ - 3));
            return g;
        }
    }
    return Eigen::VectorXd();
}

Eigen::MatrixXd BodyModel::hessian(const Eigen::VectorXd& p) const {
    switch (kind_) {
        case BodyKind::ball:
            return 2.0 * Eigen::MatrixXd::Identity(dim_, dim_);
        case BodyKind::ellipsoid: {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
            for (int i = 0; i < dim_; ++i) h(i, i) = 2.0 / (semiaxes_(i) * semiaxes_(i));
            return h;
        }
        case BodyKind::implicit_poly: {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
            for (const auto& t : terms_) {
                for (int i = 0; i < dim_; ++i) {
                    const int ei = t.exponents[static_cast<size_t>(i)];
                    if (ei == 0) continue;
                    // diagonal
                    if (ei >= 2) {
                        double mono = t.coef * ei * (ei - 1) * ipow(p(i), ei - 2);
                        for (int j = 0; j < dim_; ++j)
                            if (j != i) mono *= ipow(p(j), t.exponents[static_cast<size_t>(j)]);
                        h(i, i) += mono;
                    }
                    // upper triangle
                    for (int j = i + 1; j < dim_; ++j) {
                        const int ej = t.exponents[static_cast<size_t>(j)];
                        if (ej == 0) continue;
                        double mono = t.coef * ei * ej * ipow(p(i), ei - 1) * ipow(p(j), ej - 1);
                        for (int k = 0; k < dim_; ++k)
                            if (k != i && k != j) mono *= ipow(p(k), t.exponents[static_cast<size_t>(k)]);
                        h(i, j) += mono;
                        h(j, i) += mono;
                    }
                }
            }
            return h;
        }
        case BodyKind::tube: {
            const Eigen::Vector3d x = p.head(3);
            const double rho = x.norm();
            if (rho < 1e-12)
                throw NonSmoothPoint("tube defining function is not smooth on the axis x = 0");
            const Eigen::Vector3d xhat = x / rho;
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
            const Eigen::Matrix3d proj = xhat * xhat.transpose();
            h.topLeftCorner(3, 3) =
                2.0 * proj + 2.0 * (1.0 - 1.0 / rho) * (Eigen::Matrix3d::Identity() - proj);
            h.bottomRightCorner(dim_ - 3, dim_ - 3) = psi_.hessian(p.tail(dim_ - 3));
            return h;
        }
    }
    return Eigen::MatrixXd();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> derivatives(const BodyModel& body,
                                                        const Eigen::VectorXd& p) {
    return {body.gradient(p), body.hessian(p)};
}

// ---------------------------------------------------------------------------
// Finite differences

Eigen::VectorXd fd_gradient(const BodyModel& body, const Eigen::VectorXd& p) {
    const int n = body.dim();
    const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    Eigen::VectorXd g(n);
    Eigen::VectorXd q = p;
    for (int i = 0; i < n; ++i) {
        const double h = h0 * std::max(1.0, std::fabs(p(i)));
        q(i) = p(i) + h;
        const double fp = body.evaluate(q);
        q(i) = p(i) - h;
        const double fm = body.evaluate(q);
        q(i) = p(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd fd_hessian(const BodyModel& body, const Eigen::VectorXd& p) {
    const int n = body.dim();
    const double h0 = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd q = p;
    const double f0 = body.evaluate(p);
    for (int i = 0; i < n; ++i) {
        const double hi = h0 * std::max(1.0, std::fabs(p(i)));
        q(i) = p(i) + hi;
        const double fp = body.evaluate(q);
        q(i) = p(i) - hi;
        const double fm = body.evaluate(q);
        q(i) = p(i);
        h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (int j = i + 1; j < n; ++j) {
            const double hj = h0 * std::max(1.0, std::fabs(p(j)));
            q(i) = p(i) + hi; q(j) = p(j) + hj;
            const double fpp = body.evaluate(q);
            q(j) = p(j) - hj;
            const double fpm = body.evaluate(q);
            q(i) = p(i) - hi; q(j) = p(j) + hj;
            const double fmp = body.evaluate(q);
            q(j) = p(j) - hj;
            const double fmm = body.evaluate(q);
            q(i) = p(i); q(j) = p(j);
            h(i, j) = h(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
        }
    }
    return h;
}

}  // namespace cutvol
