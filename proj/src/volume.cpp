#include "cutvol/volume.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "cutvol/errors.hpp"
#include "cutvol/quadrature.hpp"
#include "cutvol/rng.hpp"
#include "cutvol/special.hpp"

namespace cutvol {

namespace {

constexpr std::uint64_t kChunk = 1u << 16;

double binom_std_error(double box_volume, std::uint64_t hits, std::uint64_t n) {
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Counts per chunk for a predicate over the fixed sample stream.  The
// predicate sees the sample point and returns -1 / 0 / +1 buckets via two
// counters; kept generic enough for both the cut and the slab estimators.
template <class Classify>
void run_chunks(const BodyModel& body, std::uint64_t n, std::uint64_t seed,
                uint32_t stream, Exec exec, Classify classify,
                std::uint64_t* acc0, std::uint64_t* acc1) {
    const int dim = body.dim();
    const Eigen::VectorXd lo = body.box_lo();
    const Eigen::VectorXd width = body.box_hi() - body.box_lo();
    const std::uint64_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> c0(nchunks, 0), c1(nchunks, 0);

    const auto body_ptr = &body;
    auto run_one = [&, body_ptr](std::uint64_t chunk) {
        const std::uint64_t begin = chunk * kChunk;
        const std::uint64_t end = std::min(n, begin + kChunk);
        std::uint64_t a = 0, b = 0;
        Eigen::VectorXd p(dim);
        for (std::uint64_t i = begin; i < end; ++i) {
            rng::Sequence seq(seed, stream, i);
            for (int d = 0; d < dim; ++d) p(d) = lo(d) + seq.u01() * width(d);
            if (body_ptr->evaluate(p) < 0.0) classify(p, a, b);
        }
        c0[chunk] = a;
        c1[chunk] = b;
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long chunk = 0; chunk < static_cast<long long>(nchunks); ++chunk)
            run_one(static_cast<std::uint64_t>(chunk));
    } else {
        for (std::uint64_t chunk = 0; chunk < nchunks; ++chunk) run_one(chunk);
    }

    // merge in chunk-index order (integer counts: order-independent anyway)
    std::uint64_t t0 = 0, t1 = 0;
    for (std::uint64_t chunk = 0; chunk < nchunks; ++chunk) {
        t0 += c0[chunk];
        t1 += c1[chunk];
    }
    *acc0 = t0;
    *acc1 = t1;
}

}  // namespace

CutVolumes mc_cut_volumes(const BodyModel& body, const Hyperplane& plane, std::uint64_t n,
                          std::uint64_t seed, Exec exec) {
    if (n < 1) throw DomainError("mc_cut_volumes needs n >= 1");
    if (plane.dim() != body.dim())
        throw DomainError("plane dimension does not match the body");
    const int dim = body.dim();
    const Eigen::VectorXd a = plane.normal();
    if (a.squaredNorm() == 0.0) throw DegenerateHyperplane();
    const double b = plane.b();

    std::uint64_t plus = 0, minus = 0;
    run_chunks(
        body, n, seed, rng::kStreamVolume, exec,
        [&a, b, dim](const Eigen::VectorXd& p, std::uint64_t& cp, std::uint64_t& cm) {
            double s = b;
            for (int d = 0; d < dim; ++d) s += a(d) * p(d);
            if (s > 0.0)
                ++cp;
            else
                ++cm;
        },
        &plus, &minus);

    const double box = body.box_volume();
    const double nn = static_cast<double>(n);
    CutVolumes out;
    out.count_plus = plus;
    out.count_minus = minus;
    out.vplus = {box * (static_cast<double>(plus) / nn), binom_std_error(box, plus, n), n,
                 seed, rng::kGeneratorName};
    out.vminus = {box * (static_cast<double>(minus) / nn), binom_std_error(box, minus, n),
                  n, seed, rng::kGeneratorName};
    out.body = {out.vplus.value + out.vminus.value,
                binom_std_error(box, plus + minus, n), n, seed, rng::kGeneratorName};
    return out;
}

VolumeEstimate mc_section_volume(const BodyModel& body, const Hyperplane& plane,
                                 double slab, std::uint64_t n, std::uint64_t seed,
                                 Exec exec) {
    if (n < 1) throw DomainError("mc_section_volume needs n >= 1");
    if (plane.dim() != body.dim())
        throw DomainError("plane dimension does not match the body");
    const int dim = body.dim();
    const Eigen::VectorXd a = plane.normal();
    const double anorm = a.norm();
    if (anorm == 0.0) throw DegenerateHyperplane();
    const double b = plane.b();
    if (slab <= 0.0) slab = 1e-3 * body.diameter();
    const double half = 0.5 * slab * anorm;  // compare |a.p + b| < half

    std::uint64_t in_slab = 0, rest = 0;
    run_chunks(
        body, n, seed, rng::kStreamSection, exec,
        [&a, b, half, dim](const Eigen::VectorXd& p, std::uint64_t& cs, std::uint64_t& cr) {
            double s = b;
            for (int d = 0; d < dim; ++d) s += a(d) * p(d);
            if (std::fabs(s) < half)
                ++cs;
            else
                ++cr;
        },
        &in_slab, &rest);

    const double box = body.box_volume();
    VolumeEstimate est;
    est.value = box * (static_cast<double>(in_slab) / static_cast<double>(n)) / slab;
    est.std_error = binom_std_error(box, in_slab, n) / slab;
    est.samples = n;
    est.seed = seed;
    est.generator = rng::kGeneratorName;
    return est;
}

double exact_cap_volume(int dim, double radius, double t) {
    if (dim < 1 || !(radius > 0.0))
        throw DomainError("exact_cap_volume needs dim >= 1 and radius > 0");
    const double full = nball_volume(dim, radius);
    if (t >= radius) return 0.0;
    if (t <= -radius) return full;
    if (t < 0.0) return full - exact_cap_volume(dim, radius, -t);
    const double u = t / radius;
    const double z = 1.0 - u * u;
    return 0.5 * full * betainc(0.5 * (dim + 1), 0.5, z);
}

std::pair<double, double> ellipsoid_cut_volume(const Eigen::VectorXd& semiaxes,
                                               const Hyperplane& plane) {
    const int dim = static_cast<int>(semiaxes.size());
    if (!(semiaxes.minCoeff() > 0.0)) throw DomainError("semiaxes must be positive");
    if (plane.dim() != dim) throw DomainError("plane dimension does not match");
    // x = S u maps the unit ball onto the ellipsoid; the plane pulls back to
    // (a o S) . u + b = 0.
    Eigen::VectorXd as = plane.normal().cwiseProduct(semiaxes);
    const double as_norm = as.norm();
    if (as_norm == 0.0) throw DegenerateHyperplane();
    const double t = -plane.b() / as_norm;  // signed distance toward {a.x+b>0}
    const double scale = semiaxes.prod();
    const double vplus = scale * exact_cap_volume(dim, 1.0, t);
    const double total = scale * nball_volume(dim, 1.0);
    return {vplus, total - vplus};
}

TubeConstants tube_constants(const BodyModel& body) {
    if (body.kind() != BodyKind::tube)
        throw DomainError("tube_constants needs a tube body");
    const PsiSpec& psi = body.psi();
    const double eps2 = body.eps() * body.eps();
    const double rmax = psi.radial_max(eps2);
    const double area = unit_sphere_area(psi.m);
    const double jac = psi.reduction_jacobian();
    const int m = psi.m;

    // Omega = 4 pi * integral sqrt(eps^2 - psi) dy over {psi <= eps^2};
    // C     =        integral 8 pi s + (8 pi / 3) s^3 dy,  s = sqrt(eps^2 - psi):
    // each y-slice of the tube is the spherical layer between radii 1 - s and
    // 1 + s.  Both reduce to radial profiles.
    auto s_of_r = [&](double r) {
        const double d = eps2 - psi.radial_profile(r);
        return d > 0.0 ? std::sqrt(d) : 0.0;
    };
    constexpr double kPi = 3.141592653589793238462643383279502884;
    const QuadResult omega_q = tanh_sinh(
        [&](double r) { return s_of_r(r) * std::pow(r, m - 1); }, 0.0, rmax, 1e-12);
    const QuadResult c_q = tanh_sinh(
        [&](double r) {
            const double s = s_of_r(r);
            return (8.0 * kPi * s + (8.0 * kPi / 3.0) * s * s * s) * std::pow(r, m - 1);
        },
        0.0, rmax, 1e-12);

    TubeConstants out;
    out.section = 4.0 * kPi * jac * area * omega_q.value;
    out.volume = jac * area * c_q.value;
    out.quadrature_error = std::max(omega_q.rel_error, c_q.rel_error);
    return out;
}

TubeCutResult tube_cut_volumes(const TubeConstants& constants, const BodyModel& body,
                               const Hyperplane& plane) {
    if (body.kind() != BodyKind::tube)
        throw DomainError("tube_cut_volumes needs a tube body");
    if (plane.dim() != body.dim())
        throw DomainError("plane dimension does not match the body");
    if (plane.normal().squaredNorm() == 0.0) throw DegenerateHyperplane();

    TubeCutResult out;
    const double alpha_norm = plane.coeffs.head(3).norm();
    if (alpha_norm == 0.0) {
        out.vplus = out.vminus = std::numeric_limits<double>::quiet_NaN();
        out.valid = false;
        return out;
    }
    // d > 0 when the origin lies in {a.x + b > 0}; that side gets the larger
    // piece.  Computed from raw coefficients: the ratio is scale-invariant
    // and independent of the beta_j bit for bit.
    const double d = plane.b() / alpha_norm;
    out.vplus = 0.5 * constants.volume + constants.section * d;
    out.vminus = 0.5 * constants.volume - constants.section * d;

    const double beta_norm = plane.coeffs.segment(3, body.dim() - 3).norm();
    const double tan_alpha = beta_norm / alpha_norm;
    const double extent = body.psi().sublevel_extent(body.eps() * body.eps());
    out.valid = std::fabs(d) + tan_alpha * extent < 1.0 - body.eps();
    return out;
}

TubeCutResult tube_cut_volumes(const BodyModel& body, const Hyperplane& plane) {
    return tube_cut_volumes(tube_constants(body), body, plane);
}

double tube_section_volume(const TubeConstants& constants, const BodyModel& body,
                           const Hyperplane& plane) {
    if (body.kind() != BodyKind::tube)
        throw DomainError("tube_section_volume needs a tube body");
    if (plane.dim() != body.dim())
        throw DomainError("plane dimension does not match the body");
    const double alpha_norm = plane.coeffs.head(3).norm();
    if (alpha_norm == 0.0)
        throw VerticalDegenerate("section volume undefined at alpha(X) = pi/2");
    const double full_norm = plane.normal().norm();
    if (full_norm == 0.0) throw DegenerateHyperplane();
    const double cos_alpha = alpha_norm / full_norm;
    return constants.section / cos_alpha;
}

double tube_section_volume(const BodyModel& body, const Hyperplane& plane) {
    return tube_section_volume(tube_constants(body), body, plane);
}

double body_volume(const BodyModel& body, std::uint64_t mc_samples, std::uint64_t seed,
                   double* mc_std_error) {
    if (mc_std_error) *mc_std_error = 0.0;
    switch (body.kind()) {
        case BodyKind::ball:
            return nball_volume(body.dim(), body.radius());
        case BodyKind::ellipsoid:
            return body.semiaxes().prod() * nball_volume(body.dim(), 1.0);
        case BodyKind::tube:
            return tube_constants(body).volume;
        case BodyKind::implicit_poly: {
            // any plane through the box works; counts are summed
            Hyperplane h(Eigen::VectorXd::Unit(body.dim(), 0), 0.0);
            const CutVolumes cv = mc_cut_volumes(body, h, mc_samples, seed);
            if (mc_std_error) *mc_std_error = cv.body.std_error;
            return cv.body.value;
        }
    }
    return 0.0;
}

}  // namespace cutvol
