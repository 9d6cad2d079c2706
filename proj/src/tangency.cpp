#include "cutvol/tangency.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "cutvol/errors.hpp"
#include "cutvol/rng.hpp"

namespace cutvol {

namespace {

Eigen::VectorXd random_unit(int dim, rng::Sequence& seq) {
    Eigen::VectorXd v(dim);
    double norm2;
    do {
        for (int i = 0; i < dim; ++i) v(i) = seq.normal();
        norm2 = v.squaredNorm();
    } while (norm2 < 1e-12);
    return v / std::sqrt(norm2);
}

// Lexicographic comparison used to make multistart merges order-independent.
bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

struct Candidate {
    Eigen::VectorXd u;
    double offset = 0.0;
    double residual = 0.0;
};

// Newton iteration on {f(u) = 0, grad f(u) - mu v = 0} from a boundary seed.
bool newton_tangency(const BodyModel& body, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& u0, const TangencyOptions& opt,
                     Candidate* out) {
    const int n = body.dim();
    Eigen::VectorXd u = u0;
    double mu = body.gradient(u0).dot(v);
    const double step_cap = 0.25 * body.diameter();

    for (int it = 0; it < opt.max_iterations; ++it) {
        Eigen::VectorXd g;
        Eigen::MatrixXd h;
        try {
            g = body.gradient(u);
            h = body.hessian(u);
        } catch (const NonSmoothPoint&) {
            return false;
        }
        Eigen::VectorXd r(n + 1);
        r(0) = body.evaluate(u);
        r.tail(n) = g - mu * v;
        const double scale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
        if (r.lpNorm<Eigen::Infinity>() <= opt.newton_tol * scale) {
            if (g.lpNorm<Eigen::Infinity>() < 1e-10) return false;  // boundary critical point
            out->u = u;
            out->offset = v.dot(u);
            out->residual = r.lpNorm<Eigen::Infinity>();
            return true;
        }
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 1, n + 1);
        jac.block(0, 0, 1, n) = g.transpose();
        jac.block(1, 0, n, n) = h;
        jac.block(1, n, n, 1) = -v;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) return false;
        Eigen::VectorXd delta = lu.solve(-r);
        const double du = delta.head(n).norm();
        if (du > step_cap) delta *= step_cap / du;
        u += delta.head(n);
        mu += delta(n);
        if (!u.allFinite()) return false;
    }
    return false;
}

}  // namespace

Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    // Householder reflector mapping e_1 to v (up to sign); columns 2..n then
    // span the orthogonal complement of v.
    Eigen::VectorXd w = v;
    w(0) += (v(0) >= 0.0 ? 1.0 : -1.0) * v.norm();
    const double wn2 = w.squaredNorm();
    Eigen::MatrixXd basis(n, n - 1);
    for (int j = 1; j < n; ++j) {
        Eigen::VectorXd col = Eigen::VectorXd::Unit(n, j);
        col -= (2.0 * w(j) / wn2) * w;
        basis.col(j - 1) = col;
    }
    return basis;
}

Eigen::MatrixXd chi_hessian(const BodyModel& body, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v, int side, double tangency_tol) {
    if (side != 1 && side != -1) throw DomainError("side must be +1 or -1");
    const Eigen::VectorXd g = body.gradient(u);
    const double gnorm = g.norm();
    if (gnorm == 0.0) throw NotATangency("gradient vanishes at the point");
    const double mu = g.dot(v);
    if ((g - mu * v).norm() > tangency_tol * gnorm)
        throw NotATangency("gradient is not parallel to the direction");

    const Eigen::MatrixXd basis = tangent_basis(v);
    const Eigen::MatrixXd projected =
        basis.transpose() * body.hessian(u) * basis;
    const double denom = side > 0 ? mu : -mu;
    Eigen::MatrixXd chi = (-1.0 / denom) * projected;
    // exact symmetry, so side-flip antisymmetry holds bit for bit
    chi = 0.5 * (chi + chi.transpose()).eval();
    return chi;
}

int positive_inertia_index(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) throw DomainError("inertia index needs a square matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    const double spectral = ev.cwiseAbs().maxCoeff();
    if (spectral == 0.0) throw NonMorseTangency("chi-Hessian is zero");
    int pos = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::fabs(ev(i)) <= tol * spectral)
            throw NonMorseTangency("chi-Hessian has an eigenvalue below tolerance");
        if (ev(i) > 0.0) ++pos;
    }
    return pos;
}

std::pair<bool, bool> local_lacuna_verdicts(int index_plus, int index_minus) {
    return {index_plus % 2 == 0, index_minus % 2 == 0};
}

TangencySearch find_tangencies(const BodyModel& body, const Eigen::VectorXd& v,
                               int starts, std::uint64_t seed,
                               const TangencyOptions& opt) {
    const int n = body.dim();
    if (v.size() != n) throw DomainError("direction dimension does not match the body");
    if (std::fabs(v.norm() - 1.0) > 1e-8) throw DomainError("direction must be a unit vector");
    if (starts < 1) throw DomainError("need at least one start");

    const Eigen::VectorXd center = body.box_center();
    const double circum = 0.5 * body.diameter() * 1.5;

    std::vector<std::vector<Candidate>> found(static_cast<size_t>(starts));
    std::vector<char> ok(static_cast<size_t>(starts), 0);

    // Each start casts a chord through the bounding region and runs Newton
    // from every boundary crossing along it, so inner boundary sheets
    // (cavities of non-convex bodies) are seeded as well.
#pragma omp parallel for schedule(static)
    for (int s = 0; s < starts; ++s) {
        rng::Sequence seq(seed, rng::kStreamTangencyStarts, static_cast<std::uint64_t>(s));
        const Eigen::VectorXd dir = random_unit(n, seq);
        const Eigen::VectorXd outside = center + circum * dir;
        const Eigen::VectorXd antipode = center - circum * dir;
        const int steps = 128;
        double prev_f = body.evaluate(outside);
        for (int k = 1; k <= steps; ++k) {
            const double t = static_cast<double>(k) / steps;
            const Eigen::VectorXd q = outside + t * (antipode - outside);
            const double f = body.evaluate(q);
            if ((prev_f < 0.0) != (f < 0.0)) {
                Eigen::VectorXd a =
                    outside + (static_cast<double>(k - 1) / steps) * (antipode - outside);
                Eigen::VectorXd b = q;
                double fa = prev_f;
                for (int j = 0; j < 80; ++j) {
                    const Eigen::VectorXd mid = 0.5 * (a + b);
                    const double fm = body.evaluate(mid);
                    if ((fa < 0.0) == (fm < 0.0)) {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                Candidate cand;
                if (newton_tangency(body, v, 0.5 * (a + b), opt, &cand)) {
                    found[static_cast<size_t>(s)].push_back(std::move(cand));
                    ok[static_cast<size_t>(s)] = 1;
                }
            }
            prev_f = f;
        }
    }

    std::vector<Candidate> converged;
    std::size_t dropped = 0;
    for (int s = 0; s < starts; ++s) {
        if (ok[static_cast<size_t>(s)])
            for (auto& c : found[static_cast<size_t>(s)]) converged.push_back(std::move(c));
        else
            ++dropped;
    }

    std::sort(converged.begin(), converged.end(), [](const Candidate& a, const Candidate& b) {
        if (a.offset != b.offset) return a.offset < b.offset;
        return lex_less(a.u, b.u);
    });

    const double merge_radius = opt.dedup_scale * body.diameter();
    std::vector<Candidate> unique;
    for (auto& c : converged) {
        bool dup = false;
        for (const auto& kept : unique) {
            if ((c.u - kept.u).norm() <= merge_radius) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(std::move(c));
    }

    TangencySearch out;
    out.no_convergence = dropped;
    for (const auto& c : unique) {
        Eigen::MatrixXd chi;
        try {
            chi = chi_hessian(body, c.u, v, +1);
        } catch (const NotATangency&) {
            ++out.no_convergence;
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(chi, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = solver.eigenvalues();
        const double spectral = ev.cwiseAbs().maxCoeff();
        const double margin = ev.cwiseAbs().minCoeff();
        // Degeneracy shows up either as a spread of eigenvalue magnitudes or,
        // when the whole matrix is small (flat contact), as curvature far
        // below the body scale; the relative test alone cannot see the
        // latter for nearly scalar matrices.
        const double curvature_floor = std::sqrt(opt.morse_tol) / body.diameter();
        if (spectral == 0.0 || margin <= opt.morse_tol * spectral ||
            margin <= curvature_floor) {
            out.non_morse.push_back(c.u);
            continue;
        }
        TangencyReport rep;
        rep.u = c.u;
        rep.direction = v;
        rep.offset = c.offset;
        rep.morse_margin = margin;
        rep.index_plus = 0;
        for (int i = 0; i < ev.size(); ++i)
            if (ev(i) > 0.0) ++rep.index_plus;
        rep.index_minus = static_cast<int>(ev.size()) - rep.index_plus;
        std::tie(rep.verdict_plus, rep.verdict_minus) =
            local_lacuna_verdicts(rep.index_plus, rep.index_minus);
        out.tangencies.push_back(std::move(rep));
    }
    return out;
}

ScanSummary integrability_scan(const BodyModel& body, int directions, std::uint64_t seed,
                               int starts_per_direction, const TangencyOptions& opt) {
    if (directions < 1) throw DomainError("scan needs directions >= 1");
    const int n = body.dim();
    ScanSummary sum;
    sum.dim = n;
    sum.directions = directions;
    sum.index_counts.assign(static_cast<size_t>(n), 0);

    for (int d = 0; d < directions; ++d) {
        rng::Sequence seq(seed, rng::kStreamScanDirections, static_cast<std::uint64_t>(d));
        const Eigen::VectorXd v = random_unit(n, seq);
        // decorrelate the multistart seeds between directions
        const TangencySearch search = find_tangencies(
            body, v, starts_per_direction,
            seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(d + 1), opt);
        sum.no_convergence += search.no_convergence;
        sum.non_morse_skipped += search.non_morse.size();
        for (const auto& rep : search.tangencies) {
            ++sum.tangency_count;
            ++sum.index_counts[static_cast<size_t>(rep.index_plus)];
            ++sum.index_counts[static_cast<size_t>(rep.index_minus)];
            if (rep.index_plus % 2 == 1 || rep.index_minus % 2 == 1)
                sum.odd_index_found = true;
            if (rep.verdict_plus == rep.verdict_minus && n % 2 == 0)
                sum.alternation_consistent = false;
        }
    }

    if (n % 2 == 1) {
        sum.verdict = sum.odd_index_found ? "obstructed"
                                          : "no obstruction found by this scan";
    } else {
        sum.verdict = sum.alternation_consistent
                          ? "alternation consistent: one local-lacuna side per tangency"
                          : "alternation violated";
    }
    return sum;
}

}  // namespace cutvol
