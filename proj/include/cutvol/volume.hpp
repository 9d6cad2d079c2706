#pragma once

// The two-valued cut-volume function V_W(X): Monte Carlo estimators with a
// deterministic chunked sample stream, exact oracles for balls and
// ellipsoids, and the closed form for tube bodies.
//
// Determinism contract: every Monte Carlo routine draws sample i from a
// counter-based stream keyed by (seed, stream, i) and accumulates integer hit
// counts per fixed-size chunk, merged in chunk order.  Results are therefore
// bit-identical across runs and across any number of OpenMP workers.  The
// serial reference implementation (Exec::serial) walks the same chunks in a
// plain loop and must produce bit-identical output; a benchmark target
// compares the two.

#include <cstdint>
#include <utility>

#include "cutvol/body.hpp"
#include "cutvol/hyperplane.hpp"

namespace cutvol {

enum class Exec { serial, parallel };

struct VolumeEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    const char* generator = "";
};

struct CutVolumes {
    VolumeEstimate vplus;   // vol(W intersect {a.x + b > 0})
    VolumeEstimate vminus;  // vol(W intersect {a.x + b < 0})
    // Same-stream estimate of vol(W); defined as vplus.value + vminus.value,
    // so conservation holds bit-exactly by construction (the two hit counts
    // partition the inside count exactly).
    VolumeEstimate body;
    std::uint64_t count_plus = 0;
    std::uint64_t count_minus = 0;
};

// Monte Carlo cut volumes from n uniform box samples.
CutVolumes mc_cut_volumes(const BodyModel& body, const Hyperplane& plane, std::uint64_t n,
                          std::uint64_t seed, Exec exec = Exec::parallel);

// Monte Carlo estimate of vol_{N-1}(X intersect W) through a slab of width
// `slab` around the plane: vol(W intersect {|dist| < slab/2}) / slab.
// slab <= 0 selects the default 1e-3 * bounding-box diameter.
VolumeEstimate mc_section_volume(const BodyModel& body, const Hyperplane& plane,
                                 double slab, std::uint64_t n, std::uint64_t seed,
                                 Exec exec = Exec::parallel);

// Exact volume of the cap {x in B_R : <u, x> > t} of the N-ball, t the signed
// distance from the center to the plane.  Evaluated through the regularized
// incomplete beta function; |t| > R clamps to 0 or the full ball volume.
double exact_cap_volume(int dim, double radius, double t);

// Exact cut volumes for an origin-centered axis-aligned ellipsoid: pulls the
// plane back through the diagonal map onto the unit ball.  Returns
// (V_plus, V_minus); the two values sum to the ellipsoid volume.
std::pair<double, double> ellipsoid_cut_volume(const Eigen::VectorXd& semiaxes,
                                               const Hyperplane& plane);

struct TubeConstants {
    double volume = 0.0;            // C, the volume of the tube body
    double section = 0.0;           // Omega, the (N-1)-volume of a vertical section
    double quadrature_error = 0.0;  // relative, from the radial quadrature
};

// C and Omega by 1-D radial quadrature of the psi profile.
TubeConstants tube_constants(const BodyModel& body);

struct TubeCutResult {
    double vplus = 0.0;
    double vminus = 0.0;
    bool valid = false;  // conservative closed-form domain check
};

// Closed-form cut volumes C/2 +- Omega * d for a nearly vertical plane, d the
// signed distance of X intersect R^3_x from the origin (d = b / |alpha|,
// positive when the origin lies in {a.x + b > 0}).  The values do not depend
// on the y-coefficients beta_j.  `valid` reports the conservative domain
// check  |d| + tan(alpha(X)) * psi_extent < 1 - eps,  which keeps every
// 2-plane slice of every spherical layer a full annulus.  Out-of-domain
// planes still get values (caller decides); a plane with alpha = 0 gets NaN
// values and valid = false.
TubeCutResult tube_cut_volumes(const BodyModel& body, const Hyperplane& plane);
TubeCutResult tube_cut_volumes(const TubeConstants& constants, const BodyModel& body,
                               const Hyperplane& plane);

// Omega / cos(alpha(X)).  Throws VerticalDegenerate when alpha(X) = pi/2.
double tube_section_volume(const BodyModel& body, const Hyperplane& plane);
double tube_section_volume(const TubeConstants& constants, const BodyModel& body,
                           const Hyperplane& plane);

// Best available volume of W: exact for balls, ellipsoids and tubes, Monte
// Carlo for implicit bodies (std_error reported through *mc_std_error).
double body_volume(const BodyModel& body, std::uint64_t mc_samples = 1u << 20,
                   std::uint64_t seed = 0, double* mc_std_error = nullptr);

}  // namespace cutvol
