#pragma once

// Tangent hyperplanes and the inertia-parity classification of the adjacent
// domains of the hyperplane space.
//
// A tangency of W in direction v is a critical point of the height function
// <v, x> on the boundary: f(u) = 0 and grad f(u) parallel to v.  Near such a
// point the boundary is the graph y_1 = chi(y_2, ..., y_N) over the tangent
// hyperplane; the positive inertia index of the quadratic part of chi decides
// whether the neighboring domain of transversal planes on that side carries a
// pair of single-valued analytic volume branches (a local lacuna): the
// verdict is true iff the index is even.
//
// Side convention: side = +1 orients the y_1-axis toward increasing <v, x>,
// i.e. index_plus classifies the domain of planes with offsets above the
// tangent plane and index_minus the domain below it.

#include <cstdint>
#include <string>
#include <vector>

#include "cutvol/body.hpp"

namespace cutvol {

struct TangencyReport {
    Eigen::VectorXd u;          // tangency point on the boundary
    Eigen::VectorXd direction;  // unit v
    double offset = 0.0;        // <v, u>, the critical value of the height
    int index_plus = 0;         // positive inertia index, y_1 toward larger offsets
    int index_minus = 0;        // the same toward smaller offsets
    bool verdict_plus = false;  // local lacuna on the larger-offset side
    bool verdict_minus = false;
    double morse_margin = 0.0;  // smallest |eigenvalue| of the chi-Hessian
};

struct TangencySearch {
    std::vector<TangencyReport> tangencies;      // Morse, deduplicated, sorted by offset
    std::vector<Eigen::VectorXd> non_morse;      // rejected points (margin under tolerance)
    std::size_t no_convergence = 0;              // starts dropped without a root
};

struct TangencyOptions {
    double newton_tol = 1e-12;
    int max_iterations = 100;
    double morse_tol = 1e-8;      // relative to the chi-Hessian spectral norm
    double dedup_scale = 1e-8;    // merge radius, times the body diameter
};

// Multistart Newton search for all tangencies in direction v (|v| = 1).
TangencySearch find_tangencies(const BodyModel& body, const Eigen::VectorXd& v,
                               int starts, std::uint64_t seed,
                               const TangencyOptions& opt = {});

// Hessian of the local graph chi at a tangency point:
//   Hess(chi) = -(1 / <grad f(u), side * v>) P^T Hess(f)(u) P,
// P an orthonormal basis of the tangent hyperplane.  Flipping side negates
// the matrix exactly.  Throws NotATangency when grad f(u) is not parallel
// to v.
Eigen::MatrixXd chi_hessian(const BodyModel& body, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v, int side,
                            double tangency_tol = 1e-8);

// Number of eigenvalues above tol * spectral norm.  Throws NonMorseTangency
// when any |eigenvalue| falls below that threshold.
int positive_inertia_index(const Eigen::MatrixXd& m, double tol = 1e-8);

// verdict = (index is even), per side.
std::pair<bool, bool> local_lacuna_verdicts(int index_plus, int index_minus);

// Orthonormal basis of the hyperplane orthogonal to v (columns), built from a
// deterministic Householder reflector.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& v);

struct ScanSummary {
    int dim = 0;
    int directions = 0;
    std::size_t tangency_count = 0;
    std::size_t non_morse_skipped = 0;
    std::size_t no_convergence = 0;
    std::vector<std::size_t> index_counts;  // histogram over 0..N-1 (both sides)
    bool odd_index_found = false;
    bool alternation_consistent = true;  // even N: one lacuna side per tangency
    std::string verdict;
};

// Samples unit directions, collects tangency indices and issues the parity
// verdict: for odd N "obstructed" when any odd index is found, otherwise
// "no obstruction found by this scan"; for even N a consistency statement
// about the one-sided alternation.
ScanSummary integrability_scan(const BodyModel& body, int directions, std::uint64_t seed,
                               int starts_per_direction = 48,
                               const TangencyOptions& opt = {});

}  // namespace cutvol
