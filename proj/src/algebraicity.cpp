#include "cutvol/algebraicity.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cutvol/errors.hpp"
#include "cutvol/rng.hpp"
#include "cutvol/tangency.hpp"
#include "cutvol/volume.hpp"

namespace cutvol {

namespace {

void enumerate_rec(int nvars, int var, int remaining, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
    if (var == nvars - 1) {
        cur[static_cast<size_t>(var)] = remaining;
        out.push_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[static_cast<size_t>(var)] = e;
        enumerate_rec(nvars, var + 1, remaining - e, cur, out);
    }
}

// All exponent tuples with total degree exactly `deg`, deterministic order.
std::vector<std::vector<int>> monomials_of_degree(int nvars, int deg) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<size_t>(nvars), 0);
    enumerate_rec(nvars, 0, deg, cur, out);
    return out;
}

double eval_monomial(const Eigen::VectorXd& z, const std::vector<int>& expo) {
    double r = 1.0;
    for (int i = 0; i < z.size(); ++i)
        for (int k = 0; k < expo[static_cast<size_t>(i)]; ++k) r *= z(i);
    return r;
}

// Boundary points of X intersect boundary(W), by casting rays inside the
// plane from the in-plane point nearest the box center and bisecting the
// sign changes of f.  Rays whose f stays positive but dips to (numerically)
// zero contribute their minimizer as well: a grazing plane touches the
// boundary without ever crossing it, and the angle test must still see the
// contact point.
std::vector<Eigen::VectorXd> plane_boundary_points(const BodyModel& body,
                                                   const Hyperplane& plane,
                                                   std::uint64_t seed,
                                                   std::uint64_t ray_base,
                                                   const TransversalityOptions& topt) {
    const int n = body.dim();
    const Eigen::VectorXd a = plane.normal();
    const double anorm2 = a.squaredNorm();
    const Eigen::VectorXd c = body.box_center();
    const Eigen::VectorXd anchor = c - (plane.side_value(c) / anorm2) * a;
    const Eigen::MatrixXd basis = tangent_basis(a / std::sqrt(anorm2));
    const double reach = 0.75 * body.diameter();

    std::vector<Eigen::VectorXd> points;
    for (int r = 0; r < topt.rays; ++r) {
        rng::Sequence seq(seed, rng::kStreamTransversalityRays,
                          ray_base + static_cast<std::uint64_t>(r));
        Eigen::VectorXd w(n - 1);
        double wn2;
        do {
            for (int i = 0; i < n - 1; ++i) w(i) = seq.normal();
            wn2 = w.squaredNorm();
        } while (wn2 < 1e-12);
        const Eigen::VectorXd dir = basis * (w / std::sqrt(wn2));
        auto eval = [&](double t) { return body.evaluate(anchor + t * dir); };

        bool crossed = false;
        double min_t = -reach;
        double min_f = eval(min_t);
        double prev_t = min_t;
        double prev_f = min_f;
        for (int s = 1; s <= topt.march_steps; ++s) {
            const double t = -reach + 2.0 * reach * static_cast<double>(s) / topt.march_steps;
            const double f = eval(t);
            if (f < min_f) {
                min_f = f;
                min_t = t;
            }
            if ((prev_f < 0.0) != (f < 0.0)) {
                crossed = true;
                double lo = prev_t, hi = t, flo = prev_f;
                for (int k = 0; k < 60; ++k) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = eval(mid);
                    if ((flo < 0.0) == (fm < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                points.push_back(anchor + 0.5 * (lo + hi) * dir);
                if (points.size() >= 1024) return points;
            }
            prev_t = t;
            prev_f = f;
        }
        if (!crossed && min_f >= 0.0) {
            // refine the positive minimum and keep it when it sits on the
            // boundary to first order
            const double step = 2.0 * reach / topt.march_steps;
            double lo = min_t - step, hi = min_t + step;
            for (int k = 0; k < 60; ++k) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (eval(m1) < eval(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            const double tq = 0.5 * (lo + hi);
            const Eigen::VectorXd q = anchor + tq * dir;
            const double fq = body.evaluate(q);
            Eigen::VectorXd g;
            try {
                g = body.gradient(q);
            } catch (const NonSmoothPoint&) {
                continue;
            }
            const double gn = g.norm();
            if (gn > 0.0 && fq / gn < 1e-7 * body.diameter()) {
                points.push_back(q);
                if (points.size() >= 1024) return points;
            }
        }
    }
    return points;
}

// Smallest angle between grad f and the plane normal along X intersect
// boundary(W); +inf when the plane misses the boundary.
double min_transversality_angle(const BodyModel& body, const Hyperplane& plane,
                                std::uint64_t seed, std::uint64_t ray_base,
                                const TransversalityOptions& topt) {
    const auto points = plane_boundary_points(body, plane, seed, ray_base, topt);
    const Eigen::VectorXd an = plane.normal().normalized();
    double min_angle = std::numeric_limits<double>::infinity();
    for (const auto& q : points) {
        Eigen::VectorXd g;
        try {
            g = body.gradient(q);
        } catch (const NonSmoothPoint&) {
            continue;
        }
        const double gn = g.norm();
        if (gn == 0.0) continue;
        const double cosang = std::min(1.0, std::fabs(g.dot(an)) / gn);
        min_angle = std::min(min_angle, std::acos(cosang));
    }
    return min_angle;
}

double oracle_vplus(const BodyModel& body, const TubeConstants* tube_const,
                    const Hyperplane& plane, std::uint64_t mc_seed,
                    std::uint64_t mc_samples, double* std_error) {
    *std_error = 0.0;
    switch (body.kind()) {
        case BodyKind::ball: {
            const double anorm = plane.normal().norm();
            const double t = -plane.side_value(body.center()) / anorm;
            return exact_cap_volume(body.dim(), body.radius(), t);
        }
        case BodyKind::ellipsoid:
            return ellipsoid_cut_volume(body.semiaxes(), plane).first;
        case BodyKind::tube: {
            const TubeCutResult r = tube_cut_volumes(*tube_const, body, plane);
            if (r.valid) return r.vplus;
            break;  // fall through to Monte Carlo
        }
        case BodyKind::implicit_poly:
            break;
    }
    const CutVolumes cv = mc_cut_volumes(body, plane, mc_samples, mc_seed);
    *std_error = cv.vplus.std_error;
    return cv.vplus.value;
}

}  // namespace

long long monomial_count(int nvars, int degree) {
    long long c = 1;
    for (int i = 1; i <= nvars; ++i) c = c * (degree + i) / i;
    return c;
}

DomainSamples sample_domain(const BodyModel& body, const DomainSpec& spec,
                            std::uint64_t seed, std::uint64_t mc_samples,
                            const TransversalityOptions& topt) {
    const int n = body.dim();
    if (spec.base.dim() != n) throw DomainError("base plane dimension mismatch");
    if (!(spec.radius > 0.0)) throw DomainError("spec radius must be positive");
    if (spec.count < 1) throw DomainError("spec count must be >= 1");

    const Hyperplane base = normalize(spec.base);
    TubeConstants tube_const;
    if (body.kind() == BodyKind::tube) tube_const = tube_constants(body);

    const double base_angle = min_transversality_angle(
        body, base, seed, static_cast<std::uint64_t>(1) << 40, topt);
    if (base_angle <= topt.min_angle)
        throw TangencyInRegion("base plane fails the transversality check (min angle " +
                               std::to_string(base_angle) + ")");

    DomainSamples out;
    out.dim = n;
    out.pts.resize(static_cast<size_t>(spec.count));
    out.body_volume = body_volume(body, mc_samples, seed + 2);

    std::vector<double> fail_angle(static_cast<size_t>(spec.count),
                                   std::numeric_limits<double>::infinity());

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < spec.count; ++i) {
        rng::Sequence seq(seed, rng::kStreamDomainSamples, static_cast<std::uint64_t>(i));
        Eigen::VectorXd g(n + 1);
        double gn2;
        do {
            for (int k = 0; k <= n; ++k) g(k) = seq.normal();
            gn2 = g.squaredNorm();
        } while (gn2 < 1e-12);
        const double u = seq.u01_open();
        const double r = spec.radius * std::pow(u, 1.0 / (n + 1));
        Hyperplane h(Eigen::VectorXd(base.coeffs + (r / std::sqrt(gn2)) * g));
        h = normalize(h);

        const double angle = min_transversality_angle(
            body, h, seed, static_cast<std::uint64_t>(i) << 12, topt);
        if (angle <= topt.min_angle) {
            fail_angle[static_cast<size_t>(i)] = angle;
            continue;
        }
        double se = 0.0;
        // independent Monte Carlo stream per sampled plane
        const std::uint64_t mc_seed =
            seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(i) + 1));
        const double v = oracle_vplus(body, &tube_const, h, mc_seed, mc_samples, &se);
        out.pts[static_cast<size_t>(i)] = {h.coeffs, v, se};
    }

    for (int i = 0; i < spec.count; ++i) {
        if (std::isfinite(fail_angle[static_cast<size_t>(i)]))
            throw TangencyInRegion(
                "sample " + std::to_string(i) + " fails the transversality check (angle " +
                std::to_string(fail_angle[static_cast<size_t>(i)]) +
                "); the region likely crosses a wall - shrink the radius");
        out.max_std_error = std::max(out.max_std_error, out.pts[static_cast<size_t>(i)].std_error);
    }
    return out;
}

MonomialMatrix monomial_matrix(const DomainSamples& samples, int degree) {
    if (degree < 1) throw DomainError("degree must be >= 1");
    if (samples.pts.empty()) throw InsufficientSamples("no samples");
    const int n = samples.dim;
    const int nvars = n + 2;
    const long long cols = monomial_count(nvars, degree);
    const long long rows = static_cast<long long>(samples.pts.size());
    if (rows < 2 * cols)
        throw InsufficientSamples("need at least " + std::to_string(2 * cols) +
                                  " samples for degree " + std::to_string(degree) +
                                  ", got " + std::to_string(rows));

    MonomialMatrix out;
    for (int d = 0; d <= degree; ++d)
        for (auto& e : monomials_of_degree(nvars, d)) out.exponents.push_back(std::move(e));

    out.scaled.resize(rows, static_cast<long long>(out.exponents.size()));
    Eigen::VectorXd z(nvars);
    for (long long i = 0; i < rows; ++i) {
        const auto& s = samples.pts[static_cast<size_t>(i)];
        z.head(n + 1) = s.coeffs;
        z(n + 1) = s.v / samples.body_volume;
        for (std::size_t j = 0; j < out.exponents.size(); ++j)
            out.scaled(i, static_cast<long long>(j)) = eval_monomial(z, out.exponents[j]);
    }
    out.column_scales.resize(static_cast<long long>(out.exponents.size()));
    for (long long j = 0; j < out.scaled.cols(); ++j) {
        const double norm = out.scaled.col(j).norm();
        out.column_scales(j) = norm > 0.0 ? norm : 1.0;
        out.scaled.col(j) /= out.column_scales(j);
    }
    return out;
}

AlgebraicityReport relation_search(const DomainSamples& train,
                                   const DomainSamples& holdout, int d_max,
                                   double rank_tol) {
    if (d_max < 1) throw DomainError("d_max must be >= 1");
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw DomainError("rank_tol must be in (0,1)");
    if (train.pts.empty() || holdout.pts.empty())
        throw InsufficientSamples("empty sample set");

    const int n = train.dim;
    const int nvars = n + 2;
    const long long rows = static_cast<long long>(train.pts.size());

    const double noise = std::max(train.max_std_error, holdout.max_std_error) /
                         train.body_volume;
    if (noise > 0.0 && rank_tol <= 10.0 * noise)
        throw NoiseFloor("rank_tol " + std::to_string(rank_tol) +
                         " is inside the Monte Carlo noise floor (10 * " +
                         std::to_string(noise) + "); reduce std_error or raise rank_tol");

    // chart pivot: coefficient of largest mean magnitude
    int pivot = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        double mean = 0.0;
        for (const auto& s : train.pts) mean += std::fabs(s.coeffs(i));
        if (mean > best) {
            best = mean;
            pivot = i;
        }
    }

    // coefficient monomials of the chart (pivot and V excluded) in graded-lex
    // order, with per-degree prefix sizes; the V column is appended last
    std::vector<std::vector<int>> expo;
    std::vector<int> prefix(static_cast<size_t>(d_max) + 1, 0);
    for (int d = 0; d <= d_max; ++d) {
        for (auto& e : monomials_of_degree(nvars, d))
            if (e[static_cast<size_t>(pivot)] == 0 && e[static_cast<size_t>(nvars - 1)] == 0)
                expo.push_back(std::move(e));
        prefix[static_cast<size_t>(d)] = static_cast<int>(expo.size());
    }
    const int cols = static_cast<int>(expo.size());

    for (int d = 1; d <= d_max; ++d)
        if (rows < 2 * (prefix[static_cast<size_t>(d)] + 1))
            throw InsufficientSamples(
                "need at least " + std::to_string(2 * (prefix[static_cast<size_t>(d)] + 1)) +
                " samples for degree " + std::to_string(d));

    auto build = [&](const DomainSamples& set, Eigen::MatrixXd* m, Eigen::VectorXd* vcol) {
        const long long nr = static_cast<long long>(set.pts.size());
        m->resize(nr, cols);
        vcol->resize(nr);
        Eigen::VectorXd z(nvars);
        for (long long i = 0; i < nr; ++i) {
            const auto& s = set.pts[static_cast<size_t>(i)];
            z.head(n + 1) = s.coeffs;
            z(n + 1) = s.v / train.body_volume;
            for (int j = 0; j < cols; ++j)
                (*m)(i, j) = eval_monomial(z, expo[static_cast<size_t>(j)]);
            (*vcol)(i) = z(n + 1);
        }
    };

    Eigen::MatrixXd a;
    Eigen::VectorXd vcol;
    build(train, &a, &vcol);
    Eigen::VectorXd scales(cols);
    for (int j = 0; j < cols; ++j) {
        const double norm = a.col(j).norm();
        scales(j) = norm > 0.0 ? norm : 1.0;
        a.col(j) /= scales(j);
    }
    const double vnorm_raw = vcol.norm();
    const double vscale = vnorm_raw > 0.0 ? vnorm_raw : 1.0;
    const Eigen::VectorXd vhat = vcol / vscale;

    AlgebraicityReport report;
    report.rank_tol = rank_tol;
    report.degree_max = d_max;
    report.pivot = pivot;

    for (int d = 1; d <= d_max; ++d) {
        const int k = prefix[static_cast<size_t>(d)];
        const Eigen::MatrixXd ad = a.leftCols(k);
        Eigen::VectorXd fit(k);
        double ratio;
        if (vnorm_raw == 0.0) {
            // V vanishes identically: the relation is "V = 0"
            fit.setZero();
            ratio = 0.0;
        } else {
            fit = Eigen::BDCSVD<Eigen::MatrixXd>(ad, Eigen::ComputeThinU | Eigen::ComputeThinV)
                      .solve(vhat);
            ratio = (vhat - ad * fit).norm();
        }

        DegreeRecord rec;
        rec.degree = d;
        rec.rows = static_cast<int>(rows);
        rec.full_columns = static_cast<int>(monomial_count(nvars, d));
        rec.tested_columns = k + 1;
        rec.sigma_ratio = ratio;
        report.records.push_back(rec);

        if (!report.relation_found && ratio < rank_tol) {
            report.relation_found = true;
            report.found_degree = d;

            // relation in unit-scaled columns: vhat - sum fit_j * col_j
            Eigen::VectorXd c_scaled(k + 1);
            c_scaled.head(k) = -fit;
            c_scaled(k) = 1.0;
            const double cnorm = c_scaled.norm();
            Eigen::VectorXd res = vhat - ad * fit;
            report.in_sample_residual = res.lpNorm<Eigen::Infinity>() / cnorm;

            Eigen::MatrixXd h;
            Eigen::VectorXd hv;
            build(holdout, &h, &hv);
            for (int j = 0; j < cols; ++j) h.col(j) /= scales(j);
            Eigen::VectorXd hres = hv / vscale - h.leftCols(k) * fit;
            report.held_out_residual = hres.lpNorm<Eigen::Infinity>() / cnorm;

            // descale to monomial coefficients, normalize, canonical sign
            Eigen::VectorXd coef(k + 1);
            coef.head(k) = (-fit).cwiseQuotient(scales.head(k));
            coef(k) = 1.0 / vscale;
            coef /= coef.norm();
            int imax = 0;
            coef.cwiseAbs().maxCoeff(&imax);
            if (coef(imax) < 0.0) coef = -coef;
            std::vector<int> v_expo(static_cast<size_t>(nvars), 0);
            v_expo[static_cast<size_t>(nvars - 1)] = 1;
            for (int j = 0; j < k; ++j)
                if (coef(j) != 0.0)
                    report.candidate.push_back({expo[static_cast<size_t>(j)], coef(j)});
            report.candidate.push_back({v_expo, coef(k)});
        }
    }
    return report;
}

}  // namespace cutvol
