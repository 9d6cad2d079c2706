#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>

#include "cutvol/body.hpp"
#include "cutvol/errors.hpp"
#include "cutvol/rng.hpp"
#include "cutvol/special.hpp"
#include "cutvol/volume.hpp"
#include "oracles.hpp"

using namespace cutvol;
using oracles::kPi;

namespace {

BodyModel unit_tube(int m = 1, double eps = 0.3) {
    PsiSpec psi;
    psi.form = PsiSpec::Form::quadratic_diagonal;
    psi.m = m;
    psi.coeffs.assign(static_cast<size_t>(m), 1.0);
    return BodyModel::tube(psi, eps);
}

Hyperplane make_plane(std::initializer_list<double> vals) {
    Eigen::VectorXd c(static_cast<int>(vals.size()));
    int i = 0;
    for (double v : vals) c(i++) = v;
    return Hyperplane(c);
}

}  // namespace

TEST_CASE("exact_cap_volume: anchors and the classical cubic") {
    const double full = nball_volume(3, 1.0);
    CHECK(full == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
    CHECK(std::fabs(exact_cap_volume(3, 1.0, 0.0) - 2.0 * kPi / 3.0) < 1e-12 * 2.0 * kPi / 3.0);
    CHECK(exact_cap_volume(3, 1.0, 1.0) == 0.0);
    CHECK(exact_cap_volume(3, 1.0, -1.0) == doctest::Approx(full).epsilon(1e-15));
    CHECK(exact_cap_volume(3, 1.0, 2.0) == 0.0);          // plane misses the ball
    CHECK(exact_cap_volume(3, 1.0, -2.0) == full);        // other side, clamped
    CHECK(exact_cap_volume(3, 1.0, 0.5) ==
          doctest::Approx(oracles::cap3_classical(1.0, 0.5)).epsilon(1e-14));
    // half-integer dimensions of the beta arguments: N = 1 reduces to length
    CHECK(exact_cap_volume(1, 2.0, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
    // N = 2 reduces to the circular segment
    for (double t : {-0.8, -0.3, 0.0, 0.45, 0.9}) {
        CHECK(exact_cap_volume(2, 1.0, t) ==
              doctest::Approx(oracles::segment_area(1.0, t)).epsilon(1e-13));
    }
    // monotone decreasing in t
    double prev = exact_cap_volume(4, 1.3, -1.3);
    for (int k = 1; k <= 40; ++k) {
        const double t = -1.3 + 2.6 * k / 40.0;
        const double v = exact_cap_volume(4, 1.3, t);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("exact_cap_volume agrees with Monte Carlo across dimensions") {
    for (std::uint64_t c = 0; c < 20; ++c) {
        rng::Sequence seq(5, rng::kStreamTest, c);
        const int dim = 2 + static_cast<int>(seq.u01() * 4.999);  // 2..6
        const double radius = 0.5 + 1.5 * seq.u01();
        const double t = (2.0 * seq.u01() - 1.0) * radius * 0.9;
        const BodyModel ball = BodyModel::ball(radius, Eigen::VectorXd::Zero(dim));
        Eigen::VectorXd dir = oracles::random_unit_vec(dim, 5, 1000 + c);
        const Hyperplane h(dir, -t);  // dir . x = t
        const CutVolumes cv = mc_cut_volumes(ball, h, 200000, 42 + c);
        const double vexact = exact_cap_volume(dim, radius, t);
        CHECK(std::fabs(cv.vplus.value - vexact) <= 3.0 * cv.vplus.std_error);
    }
}

TEST_CASE("ellipsoid cut volumes: pullback, symmetry, conservation") {
    const Eigen::Vector3d unit(1, 1, 1);
    const auto [vp, vm] = ellipsoid_cut_volume(unit, make_plane({0, 1, 0, 0}));
    CHECK(vp == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(vm == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-14));

    const Eigen::Vector3d semi(2, 1, 1);
    const auto [sp, sm] = ellipsoid_cut_volume(semi, make_plane({1, 0, 0, 0}));
    CHECK(sp == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(sp == doctest::Approx(sm).epsilon(1e-15));

    // plane x1 = 1 pulls back to the unit-ball plane at t = 0.5
    const auto [qp, qm] = ellipsoid_cut_volume(semi, make_plane({1, 0, 0, -1}));
    CHECK(qp == doctest::Approx(2.0 * exact_cap_volume(3, 1.0, 0.5)).epsilon(1e-14));
    // conservation is exact by construction
    const double total = semi.prod() * nball_volume(3, 1.0);
    CHECK(qp + qm == total);

    // against Monte Carlo
    const BodyModel body = BodyModel::ellipsoid(semi);
    const CutVolumes cv = mc_cut_volumes(body, make_plane({1, 0, 0, -1}), 400000, 3);
    CHECK(std::fabs(cv.vplus.value - qp) <= 3.0 * cv.vplus.std_error);
}

TEST_CASE("tube constants: radial quadrature against complete-Beta closed forms") {
    const BodyModel tube = unit_tube(1, 0.3);
    const TubeConstants tc = tube_constants(tube);
    const double omega_ref = 2.0 * kPi * kPi * 0.09;
    CHECK(std::fabs(tc.section - omega_ref) < 1e-10 * omega_ref);
    const double c_ref = 4.0 * kPi * kPi * 0.09 + kPi * kPi * std::pow(0.3, 4);
    CHECK(std::fabs(tc.volume - c_ref) < 1e-10 * c_ref);
    CHECK(tc.quadrature_error <= 1e-10);

    // general quadratic weights, any m
    PsiSpec psi;
    psi.form = PsiSpec::Form::quadratic_diagonal;
    psi.m = 3;
    psi.coeffs = {1.0, 4.0, 0.5};
    const BodyModel tube3 = BodyModel::tube(psi, 0.45);
    const TubeConstants tc3 = tube_constants(tube3);
    const double omega3 = oracles::tube_omega_closed(3, 0.45, psi.coeffs);
    const double vol3 = oracles::tube_volume_closed(3, 0.45, psi.coeffs);
    CHECK(std::fabs(tc3.section - omega3) < 1e-10 * omega3);
    CHECK(std::fabs(tc3.volume - vol3) < 1e-10 * vol3);

    // radial profile |y|^4 with m = 1: the substitution v = r^4/eps^2 gives
    //   integral_0^{sqrt(eps)} (eps^2 - r^4)^{1/2} dr = (1/4) eps^{3/2} B(1/4, 3/2)
    PsiSpec quart;
    quart.form = PsiSpec::Form::radial_even;
    quart.m = 1;
    quart.coeffs = {0.0, 1.0};
    const BodyModel tubeq = BodyModel::tube(quart, 0.4);
    const TubeConstants tcq = tube_constants(tubeq);
    const double beta_14_32 =
        std::exp(std::lgamma(0.25) + std::lgamma(1.5) - std::lgamma(1.75));
    const double omega_q = 4.0 * kPi * 2.0 * 0.25 * std::pow(0.4, 1.5) * beta_14_32;
    CHECK(std::fabs(tcq.section - omega_q) < 1e-10 * omega_q);

    // degenerating tube: both constants shrink
    const TubeConstants tiny = tube_constants(unit_tube(1, 1e-3));
    CHECK(tiny.volume < 1e-4);
    CHECK(tiny.section < 1e-4);

    // Monte Carlo volume of the body agrees with C
    const CutVolumes cv = mc_cut_volumes(tube, make_plane({1, 0, 0, 0, 0}), 1000000, 9);
    CHECK(std::fabs(cv.body.value - tc.volume) <= 3.0 * cv.body.std_error);
}

TEST_CASE("tube cut volumes: closed form") {
    const BodyModel tube = unit_tube(1, 0.3);
    const TubeConstants tc = tube_constants(tube);

    // plane through the origin: exactly C/2 each
    const TubeCutResult mid = tube_cut_volumes(tc, tube, make_plane({1, 0, 0, 0, 0}));
    CHECK(mid.valid);
    CHECK(mid.vplus == 0.5 * tc.volume);
    CHECK(mid.vminus == 0.5 * tc.volume);

    // gamma = 0.1: the halfspace {x1 > 0.1} holds the smaller piece
    const TubeCutResult off = tube_cut_volumes(tc, tube, make_plane({1, 0, 0, 0, -0.1}));
    CHECK(off.valid);
    CHECK(off.vplus == doctest::Approx(0.5 * tc.volume - 0.1 * tc.section).epsilon(1e-14));
    CHECK(off.vminus == doctest::Approx(0.5 * tc.volume + 0.1 * tc.section).epsilon(1e-14));

    // beta-independence, bit for bit
    const TubeCutResult beta_a = tube_cut_volumes(tc, tube, make_plane({1, 0, 0, -0.2, -0.1}));
    const TubeCutResult beta_b = tube_cut_volumes(tc, tube, make_plane({1, 0, 0, 0.2, -0.1}));
    CHECK(beta_a.vplus == off.vplus);
    CHECK(beta_a.vminus == off.vminus);
    CHECK(beta_b.vplus == off.vplus);

    // against Monte Carlo
    const CutVolumes cv = mc_cut_volumes(tube, make_plane({1, 0, 0, 0, -0.1}), 1000000, 5);
    CHECK(std::fabs(cv.vplus.value - off.vplus) <= 3.0 * cv.vplus.std_error);
    CHECK(std::fabs(cv.vminus.value - off.vminus) <= 3.0 * cv.vminus.std_error);

    // validity: a steep plane fails the conservative check but still returns values
    const TubeCutResult steep = tube_cut_volumes(tc, tube, make_plane({0.1, 0, 0, 1, -0.05}));
    CHECK_FALSE(steep.valid);
    CHECK(std::isfinite(steep.vplus));
    // vertical degenerate: alpha = 0
    const TubeCutResult vert = tube_cut_volumes(tc, tube, make_plane({0, 0, 0, 1, -0.05}));
    CHECK_FALSE(vert.valid);
    CHECK(std::isnan(vert.vplus));
}

TEST_CASE("tube cut volumes are affine along a parallel pencil") {
    const BodyModel tube = unit_tube(1, 0.3);
    const TubeConstants tc = tube_constants(tube);
    const Eigen::VectorXd normal = (Eigen::VectorXd(4) << 2, 1, 0.5, 0.25).finished();
    const double anorm = normal.norm();
    const double cos_alpha = normal.head(3).norm() / anorm;

    std::vector<double> values;
    const double h = 0.03125;  // dyadic step
    for (int k = -2; k <= 2; ++k) {
        Hyperplane plane(normal, -anorm * h * k);  // shift by distance h*k
        const TubeCutResult r = tube_cut_volumes(tc, tube, plane);
        CHECK(r.valid);
        values.push_back(r.vplus);
    }
    // second differences vanish to roundoff; the slope is -Omega / cos(alpha)
    for (int k = 0; k + 2 < static_cast<int>(values.size()); ++k) {
        CHECK(std::fabs(values[static_cast<size_t>(k)] - 2.0 * values[static_cast<size_t>(k + 1)] +
                        values[static_cast<size_t>(k + 2)]) < 1e-13 * tc.volume);
    }
    const double slope = (values[4] - values[0]) / (4.0 * h);
    CHECK(slope == doctest::Approx(-tc.section / cos_alpha).epsilon(1e-10));

    // Monte Carlo slope within combined errors
    const Hyperplane lo(normal, -anorm * (-0.0625));
    const Hyperplane hi(normal, -anorm * (+0.0625));
    const CutVolumes cv_lo = mc_cut_volumes(tube, lo, 1000000, 21);
    const CutVolumes cv_hi = mc_cut_volumes(tube, hi, 1000000, 22);
    const double mc_slope = (cv_hi.vplus.value - cv_lo.vplus.value) / 0.125;
    const double sigma = std::sqrt(cv_lo.vplus.std_error * cv_lo.vplus.std_error +
                                   cv_hi.vplus.std_error * cv_hi.vplus.std_error) /
                         0.125;
    CHECK(std::fabs(mc_slope + tc.section / cos_alpha) <= 3.0 * sigma);
}

TEST_CASE("tube section volume: Omega / cos(alpha)") {
    const BodyModel tube = unit_tube(1, 0.3);
    const TubeConstants tc = tube_constants(tube);
    CHECK(tube_section_volume(tc, tube, make_plane({1, 0, 0, 0, 0})) == tc.section);
    CHECK(tube_section_volume(tc, tube, make_plane({1, 0, 0, 1, 0})) ==
          doctest::Approx(tc.section * std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(tube_section_volume(tc, tube, make_plane({0, 0, 0, 1, 0})),
                    VerticalDegenerate);

    // Monte Carlo slab estimate within 2%
    const Hyperplane h = make_plane({1, 0.2, -0.1, 0.15, -0.05});
    const TubeCutResult domain = tube_cut_volumes(tc, tube, h);
    REQUIRE(domain.valid);
    const double closed = tube_section_volume(tc, tube, h);
    const VolumeEstimate slab =
        mc_section_volume(tube, h, 5e-3 * tube.diameter(), 20000000, 77);
    CHECK(std::fabs(slab.value - closed) / closed < 0.02);
}

TEST_CASE("mc_section_volume: great disk and empty section") {
    const BodyModel ball = BodyModel::ball(1.0, Eigen::VectorXd::Zero(3));
    const VolumeEstimate disk =
        mc_section_volume(ball, make_plane({0, 0, 1, 0}), 2e-3, 2000000, 4);
    CHECK(std::fabs(disk.value - kPi) <= 3.0 * disk.std_error + 1e-4);
    const VolumeEstimate empty =
        mc_section_volume(ball, make_plane({1, 0, 0, -1.5}), 2e-3, 100000, 4);
    CHECK(empty.value == 0.0);
}

TEST_CASE("mc_cut_volumes: conservation, determinism, antisymmetry") {
    const BodyModel tube = unit_tube(1, 0.3);
    const Hyperplane h = make_plane({0.8, -0.4, 0.3, 0.1, -0.07});

    const CutVolumes a = mc_cut_volumes(tube, h, 500000, 123);
    // conservation: the counts partition the inside hits and the body value
    // is the partition sum
    CHECK(a.vplus.value + a.vminus.value == a.body.value);
    const double box = tube.box_volume();
    CHECK(a.vplus.value == box * (static_cast<double>(a.count_plus) / 500000.0));
    // std_error follows the binomial formula
    const double p = static_cast<double>(a.count_plus) / 500000.0;
    CHECK(a.vplus.std_error == box * std::sqrt(p * (1.0 - p) / 500000.0));
    CHECK(std::string(a.vplus.generator) == "philox4x32-10");

    // repeat run: bit-identical
    const CutVolumes b = mc_cut_volumes(tube, h, 500000, 123);
    CHECK(a.vplus.value == b.vplus.value);
    CHECK(a.count_plus == b.count_plus);

    // serial reference: bit-identical
    const CutVolumes s = mc_cut_volumes(tube, h, 500000, 123, Exec::serial);
    CHECK(a.vplus.value == s.vplus.value);
    CHECK(a.count_minus == s.count_minus);

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const CutVolumes t1 = mc_cut_volumes(tube, h, 500000, 123);
    omp_set_num_threads(8);
    const CutVolumes t8 = mc_cut_volumes(tube, h, 500000, 123);
    omp_set_num_threads(saved);
    CHECK(t1.vplus.value == t8.vplus.value);
    CHECK(t1.count_plus == t8.count_plus);
#endif

    // flipping every coefficient swaps the sides exactly
    const CutVolumes flip = mc_cut_volumes(tube, Hyperplane(Eigen::VectorXd(-h.coeffs)),
                                           500000, 123);
    CHECK(flip.vplus.value == a.vminus.value);
    CHECK(flip.vminus.value == a.vplus.value);
    CHECK(flip.count_plus == a.count_minus);

    // a plane that misses the body entirely
    const BodyModel ball = BodyModel::ball(1.0, Eigen::VectorXd::Zero(3));
    const CutVolumes miss = mc_cut_volumes(ball, make_plane({1, 0, 0, -2}), 200000, 0);
    CHECK(miss.vplus.value == 0.0);
    CHECK(std::fabs(miss.vminus.value - 4.0 * kPi / 3.0) <= 3.0 * miss.vminus.std_error);

    CHECK_THROWS_AS(mc_cut_volumes(ball, make_plane({0, 0, 0, 1}), 10, 0),
                    DegenerateHyperplane);
}

TEST_CASE("mc estimates are rotation invariant for the ball") {
    const BodyModel ball = BodyModel::ball(1.0, Eigen::VectorXd::Zero(3));
    const double t = 0.4;
    std::vector<CutVolumes> runs;
    const Eigen::Vector3d base(1, 0, 0);
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Eigen::MatrixXd q = oracles::random_rotation(3, 31, k);
        const Eigen::VectorXd dir = q * base;
        // the exact volume depends on t only
        CHECK(exact_cap_volume(3, 1.0, t) == exact_cap_volume(3, 1.0, t));
        runs.push_back(mc_cut_volumes(ball, Hyperplane(dir, -t), 200000, 100 + k));
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            const double diff = std::fabs(runs[i].vplus.value - runs[j].vplus.value);
            const double sigma = std::sqrt(runs[i].vplus.std_error * runs[i].vplus.std_error +
                                           runs[j].vplus.std_error * runs[j].vplus.std_error);
            CHECK(diff <= 3.5 * sigma);
        }
    }
}

TEST_CASE("body_volume dispatches to the best oracle") {
    CHECK(body_volume(BodyModel::ball(1.0, Eigen::VectorXd::Zero(3))) ==
          doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(body_volume(BodyModel::ellipsoid(Eigen::Vector3d(2, 1, 1))) ==
          doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-14));
    const BodyModel tube = unit_tube(1, 0.3);
    CHECK(body_volume(tube) == tube_constants(tube).volume);
    std::vector<ImplicitTerm> terms = {{1, {2, 0}}, {1, {0, 2}}, {-1, {0, 0}}};
    const BodyModel disk = BodyModel::implicit(
        2, terms, Eigen::Vector2d(-1.5, -1.5), Eigen::Vector2d(1.5, 1.5));
    double se = 0.0;
    const double v = body_volume(disk, 1u << 20, 0, &se);
    CHECK(se > 0.0);
    CHECK(std::fabs(v - kPi) <= 3.0 * se);
}
