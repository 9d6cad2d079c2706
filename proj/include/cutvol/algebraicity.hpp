#pragma once

// Empirical algebraicity probe: samples the cut-volume function over a small
// ball of hyperplanes inside one transversal domain and searches for a
// polynomial relation F(a_1, ..., a_N, b, V) = 0 through null-space analysis
// of a monomial evaluation matrix.
//
// Two reductions shape the candidate family.
//
// Chart variables: samples are normalized representatives, so the
// coefficient vector satisfies sum a_i^2 = 1 identically and the coefficient
// of largest mean magnitude (the pivot) is an analytic function of the
// others on the sampled patch.  Both facts plant exact or near-exact
// relations in the raw basis that say nothing about V.  The search therefore
// eliminates the pivot: candidates are polynomials in the remaining
// coefficients, b and V.  Any relation F on the projective cone induces a
// chart relation of at most twice the degree (split F into even and odd
// pivot parts and square), so the chart test is sound and complete up to
// that degree doubling.
//
// Graph form: candidates are monic-linear in V, i.e. V - p(coefficients).
// Families with higher V-powers admit Hermite-Pade-type algebraic
// approximants that reproduce square-root branch behavior exactly; measured
// on the disk (the classical non-algebraic case) they vanish to machine
// precision by degree 6, which erases the separation between algebraic and
// non-algebraic bodies at any finite tolerance.  The graph family keeps the
// separation (the disk residual stays near 1e-2 at degree 8) while every
// relation this toolkit detects on the positive side - cap cubics, the tube
// closed form and its Taylor truncations, V identically 0 - is of graph
// form.  The per-degree statistic is
//     S_d = dist(V column, span of coefficient monomials of degree <= d),
// on unit-scaled columns; it lies in [0, 1] and is non-increasing in d.

#include <cstdint>
#include <vector>

#include "cutvol/body.hpp"
#include "cutvol/hyperplane.hpp"

namespace cutvol {

struct DomainSpec {
    Hyperplane base;     // normalized representative inside the domain
    double radius = 0.0; // perturbation radius in coefficient space
    int count = 0;       // number of samples
};

struct DomainSample {
    Eigen::VectorXd coeffs;  // normalized (a_1, ..., a_N, b)
    double v = 0.0;          // V_plus for the canonical representative
    double std_error = 0.0;  // 0 for exact oracles
};

struct DomainSamples {
    std::vector<DomainSample> pts;
    int dim = 0;                // N
    double body_volume = 0.0;   // used to pre-scale V
    double max_std_error = 0.0;
};

struct TransversalityOptions {
    double min_angle = 1e-3;  // radians, between grad f and the plane normal
    int rays = 256;           // rays cast inside the plane per sample
    int march_steps = 160;    // coarse sign-change scan per ray
};

// Draws `spec.count` hyperplanes uniformly in the radius-ball around the
// base (then normalized) and computes V_plus with the best available oracle
// (exact for balls, ellipsoids and valid tube planes; Monte Carlo with
// mc_samples points otherwise).  Every sample must pass the transversality
// check: along a dense sample of X intersect boundary(W), the angle between
// grad f and the plane normal stays above min_angle.  Throws
// TangencyInRegion otherwise.
DomainSamples sample_domain(const BodyModel& body, const DomainSpec& spec,
                            std::uint64_t seed, std::uint64_t mc_samples = 1u << 20,
                            const TransversalityOptions& topt = {});

// Full monomial evaluation matrix over (a_1, ..., a_N, b, V/vol(W)), all
// monomials of total degree <= degree in graded-lex order, columns scaled to
// unit norm.  Requires rows >= 2 * columns.
struct MonomialMatrix {
    Eigen::MatrixXd scaled;
    Eigen::VectorXd column_scales;             // 1.0 recorded for zero columns
    std::vector<std::vector<int>> exponents;   // per column
};
MonomialMatrix monomial_matrix(const DomainSamples& samples, int degree);

struct RelationTerm {
    std::vector<int> exponents;  // over (a_1, ..., a_N, b, V); pivot entry always 0
    double coefficient = 0.0;
};

struct DegreeRecord {
    int degree = 0;
    int rows = 0;
    int full_columns = 0;     // all-monomial count C(N+2+d, d)
    int tested_columns = 0;   // chart coefficient monomials plus the V column
    double sigma_ratio = 1.0; // S_d, in [0, 1]
};

struct AlgebraicityReport {
    std::vector<DegreeRecord> records;
    bool relation_found = false;
    int found_degree = -1;
    std::vector<RelationTerm> candidate;  // descaled, unit norm, canonical sign
    double in_sample_residual = 0.0;      // max |row . c| per unit scaled-coefficient norm
    double held_out_residual = 0.0;       // same statistic on the held-out set
    double rank_tol = 0.0;
    int degree_max = 0;
    int pivot = 0;  // index of the eliminated coefficient variable
};

// Scans degrees 1..d_max on the training set and validates any candidate on
// the held-out set (same spec, different seed).  Refuses (NoiseFloor) when
// rank_tol is not above 10 * max std_error / vol(W).
AlgebraicityReport relation_search(const DomainSamples& train,
                                   const DomainSamples& holdout, int d_max,
                                   double rank_tol);

// Number of monomials of total degree <= degree in nvars variables.
long long monomial_count(int nvars, int degree);

}  // namespace cutvol
