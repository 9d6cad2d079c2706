#include "cutvol/hyperplane.hpp"

#include <cmath>
#include <limits>

#include "cutvol/errors.hpp"

namespace cutvol {

namespace {
void require_valid(const Hyperplane& h) {
    if (h.dim() < 1) throw DegenerateHyperplane("hyperplane needs at least one coordinate");
}
}  // namespace

Hyperplane normalize(const Hyperplane& h) {
    require_valid(h);
    const int n = h.dim();
    const double norm2 = h.coeffs.head(n).squaredNorm();
    if (norm2 == 0.0) throw DegenerateHyperplane();

    Hyperplane out = h;
    // Skip the division when the normal is already unit length to a few ulp;
    // this is what makes normalize(normalize(h)) == normalize(h) exactly.
    if (std::fabs(norm2 - 1.0) > 8.0 * std::numeric_limits<double>::epsilon()) {
        out.coeffs /= std::sqrt(norm2);
    }
    for (int i = 0; i < n; ++i) {
        if (out.coeffs(i) != 0.0) {
            if (out.coeffs(i) < 0.0) out.coeffs = -out.coeffs;
            break;
        }
    }
    return out;
}

double subspace_distance(const Hyperplane& h) {
    return std::fabs(signed_subspace_distance(h));
}

double signed_subspace_distance(const Hyperplane& h) {
    require_valid(h);
    if (h.dim() < 3) throw VerticalDegenerate("subspace split needs dimension >= 3");
    const double alpha_norm = h.coeffs.head(3).norm();
    if (alpha_norm == 0.0)
        throw VerticalDegenerate("plane normal has no component in the x-subspace");
    return h.b() / alpha_norm;
}

double angle_to_x_subspace(const Hyperplane& h) {
    require_valid(h);
    const int n = h.dim();
    if (n < 3) throw VerticalDegenerate("subspace split needs dimension >= 3");
    if (h.coeffs.head(n).squaredNorm() == 0.0) throw DegenerateHyperplane();
    const double alpha_norm = h.coeffs.head(3).norm();
    const double beta_norm = h.coeffs.segment(3, n - 3).norm();
    return std::atan2(beta_norm, alpha_norm);
}

}  // namespace cutvol
