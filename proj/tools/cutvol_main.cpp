// cutvol: cut-volume toolkit command line.
//
// Sign convention used everywhere: a plane literal "a1,...,aN;b" denotes
// a1*x1 + ... + aN*xN + b = 0.  Writing the same plane as sum a_i x_i = gamma
// gives gamma = -b; tube-body closed forms are expressed through gamma.

#include <CLI11.hpp>

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cutvol/algebraicity.hpp"
#include "cutvol/body.hpp"
#include "cutvol/body_parser.hpp"
#include "cutvol/errors.hpp"
#include "cutvol/hyperplane.hpp"
#include "cutvol/special.hpp"
#include "cutvol/tangency.hpp"
#include "cutvol/volume.hpp"

namespace {

using namespace cutvol;

constexpr const char* kConventionFooter =
    "Conventions: a plane literal 'a1,...,aN;b' is the hyperplane "
    "a1*x1+...+aN*xN+b=0; written as sum a_i x_i = gamma this means gamma = -b. "
    "Tube closed forms are valid under the conservative check "
    "|gamma|/|alpha| + tan(alpha(X)) * psi_extent < 1 - eps, where alpha(X) is the "
    "angle between the plane normal and the x-subspace.";

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_csv_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error("bad " + what + " literal: '" + item + "'");
        }
    }
    if (out.empty()) throw Error("empty " + what + " literal");
    return out;
}

Hyperplane parse_plane(const std::string& lit) {
    const auto semi = lit.find(';');
    if (semi == std::string::npos)
        throw Error("plane literal must be 'a1,...,aN;b' (semicolon before the constant)");
    const auto a = parse_csv_doubles(lit.substr(0, semi), "plane normal");
    const auto b = parse_csv_doubles(lit.substr(semi + 1), "plane offset");
    if (b.size() != 1) throw Error("plane literal needs exactly one constant after ';'");
    Eigen::VectorXd coeffs(a.size() + 1);
    for (std::size_t i = 0; i < a.size(); ++i) coeffs(static_cast<int>(i)) = a[i];
    coeffs(static_cast<int>(a.size())) = b[0];
    return Hyperplane(coeffs);
}

Eigen::VectorXd parse_direction(const std::string& lit) {
    const auto v = parse_csv_doubles(lit, "direction");
    Eigen::VectorXd d(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) d(static_cast<int>(i)) = v[i];
    const double n = d.norm();
    if (n == 0.0) throw Error("direction must be nonzero");
    return d / n;
}

// CSV sink: stdout or a file, '\n' line ends, trailing newline guaranteed.
class Csv {
public:
    explicit Csv(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error("cannot open output file '" + path + "'");
        }
    }
    void line(const std::string& s) { stream() << s << '\n'; }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

struct CommonOpts {
    std::string body_path;
    std::string out_path;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 0;
};

void add_body_flag(CLI::App* cmd, CommonOpts* o) {
    cmd->add_option("--body", o->body_path, "body description file")->required();
}

int cmd_volume(const CommonOpts& o, const std::string& plane_lit, bool serial) {
    const BodyModel body = parse_body_file(o.body_path);
    const Hyperplane h = parse_plane(plane_lit);
    const CutVolumes cv =
        mc_cut_volumes(body, h, o.samples, o.seed, serial ? Exec::serial : Exec::parallel);
    Csv csv(o.out_path);
    csv.line("quantity,value,std_error,samples,seed,generator");
    csv.line("Vplus," + g17(cv.vplus.value) + "," + g17(cv.vplus.std_error) + "," +
             std::to_string(cv.vplus.samples) + "," + std::to_string(cv.vplus.seed) + "," +
             cv.vplus.generator);
    csv.line("Vminus," + g17(cv.vminus.value) + "," + g17(cv.vminus.std_error) + "," +
             std::to_string(cv.vminus.samples) + "," + std::to_string(cv.vminus.seed) + "," +
             cv.vminus.generator);
    return 0;
}

int cmd_section(const CommonOpts& o, const std::string& plane_lit, double slab) {
    const BodyModel body = parse_body_file(o.body_path);
    const Hyperplane h = parse_plane(plane_lit);
    if (slab <= 0.0) slab = 1e-3 * body.diameter();
    const VolumeEstimate est = mc_section_volume(body, h, slab, o.samples, o.seed);
    // curvature-bias check at twice the slab width
    const VolumeEstimate wide = mc_section_volume(body, h, 2.0 * slab, o.samples, o.seed);
    const double sigma =
        std::sqrt(est.std_error * est.std_error + wide.std_error * wide.std_error);
    if (std::fabs(est.value - wide.value) > 3.0 * sigma)
        std::cerr << "warning: slab estimates at widths " << g17(slab) << " and "
                  << g17(2.0 * slab)
                  << " differ by more than 3 sigma; the slab may be too wide for the local "
                     "curvature\n";
    Csv csv(o.out_path);
    csv.line("method,value,std_error");
    csv.line("slab," + g17(est.value) + "," + g17(est.std_error));
    if (body.kind() == BodyKind::tube) {
        const TubeConstants tc = tube_constants(body);
        const TubeCutResult domain = tube_cut_volumes(tc, body, h);
        if (domain.valid) {
            csv.line("closed_form," + g17(tube_section_volume(tc, body, h)) + ",0");
        } else {
            std::cerr << "note: plane is outside the closed-form validity domain; only the "
                         "slab estimate is reported\n";
        }
    }
    return 0;
}

int cmd_cap(const std::string& out_path, int dim, double radius, double t) {
    const double v = exact_cap_volume(dim, radius, t);
    Csv csv(out_path);
    csv.line("N,R,t,volume");
    csv.line(std::to_string(dim) + "," + g17(radius) + "," + g17(t) + "," + g17(v));
    return 0;
}

int cmd_tube_verify(const CommonOpts& o, double gamma, const std::string& alpha_lit,
                    const std::string& beta_lit) {
    const BodyModel body = parse_body_file(o.body_path);
    if (body.kind() != BodyKind::tube) throw DomainError("tube-verify needs a tube body");
    const int m = body.dim() - 3;
    const auto alpha = parse_csv_doubles(alpha_lit, "alpha");
    if (alpha.size() != 3) throw Error("--alpha needs exactly three components");
    std::vector<double> beta(static_cast<size_t>(m), 0.0);
    if (!beta_lit.empty()) {
        beta = parse_csv_doubles(beta_lit, "beta");
        if (static_cast<int>(beta.size()) != m) throw Error("--beta needs exactly m components");
    }
    Eigen::VectorXd coeffs(body.dim() + 1);
    for (int i = 0; i < 3; ++i) coeffs(i) = alpha[static_cast<size_t>(i)];
    for (int i = 0; i < m; ++i) coeffs(3 + i) = beta[static_cast<size_t>(i)];
    coeffs(body.dim()) = -gamma;  // sum a_i x_i = gamma
    const Hyperplane h(coeffs);

    Eigen::VectorXd coeffs0 = coeffs;
    coeffs0.segment(3, m).setZero();
    const Hyperplane h0(coeffs0);

    const TubeConstants tc = tube_constants(body);
    const TubeCutResult with_beta = tube_cut_volumes(tc, body, h);
    const TubeCutResult without_beta = tube_cut_volumes(tc, body, h0);
    const bool beta_independent = with_beta.vplus == without_beta.vplus &&
                                  with_beta.vminus == without_beta.vminus;

    const CutVolumes mc = mc_cut_volumes(body, h, o.samples, o.seed);
    const double zp = (mc.vplus.value - with_beta.vplus) / mc.vplus.std_error;
    const double zm = (mc.vminus.value - with_beta.vminus) / mc.vminus.std_error;

    Csv csv(o.out_path);
    csv.line("gamma,valid,Vplus_formula,Vminus_formula,Vplus_mc,Vminus_mc,stderr_plus,"
             "stderr_minus,z_plus,z_minus,beta_independent");
    csv.line(g17(gamma) + "," + (with_beta.valid ? "true" : "false") + "," +
             g17(with_beta.vplus) + "," + g17(with_beta.vminus) + "," + g17(mc.vplus.value) +
             "," + g17(mc.vminus.value) + "," + g17(mc.vplus.std_error) + "," +
             g17(mc.vminus.std_error) + "," + g17(zp) + "," + g17(zm) + "," +
             (beta_independent ? "PASS" : "FAIL"));
    return 0;
}

int cmd_tangency(const CommonOpts& o, const std::string& dir_lit, int starts) {
    const BodyModel body = parse_body_file(o.body_path);
    const Eigen::VectorXd v = parse_direction(dir_lit);
    if (v.size() != body.dim()) throw DomainError("direction dimension does not match body");
    const TangencySearch search = find_tangencies(body, v, starts, o.seed);
    if (search.no_convergence > 0)
        std::cerr << "note: " << search.no_convergence << " start(s) did not converge\n";
    if (!search.non_morse.empty())
        std::cerr << "note: " << search.non_morse.size()
                  << " tangency point(s) rejected as non-Morse\n";
    Csv csv(o.out_path);
    std::string header;
    const int n = body.dim();
    for (int i = 1; i <= n; ++i) header += "dir_" + std::to_string(i) + ",";
    header += "offset,";
    for (int i = 1; i <= n; ++i) header += "u_" + std::to_string(i) + ",";
    header += "index_plus,index_minus,verdict_plus,verdict_minus,morse_margin";
    csv.line(header);
    for (const auto& r : search.tangencies) {
        std::string row;
        for (int i = 0; i < n; ++i) row += g17(r.direction(i)) + ",";
        row += g17(r.offset) + ",";
        for (int i = 0; i < n; ++i) row += g17(r.u(i)) + ",";
        row += std::to_string(r.index_plus) + "," + std::to_string(r.index_minus) + "," +
               (r.verdict_plus ? "true" : "false") + "," +
               (r.verdict_minus ? "true" : "false") + "," + g17(r.morse_margin);
        csv.line(row);
    }
    return 0;
}

int cmd_scan(const CommonOpts& o, int directions, int starts) {
    const BodyModel body = parse_body_file(o.body_path);
    const ScanSummary s = integrability_scan(body, directions, o.seed, starts);
    Csv csv(o.out_path);
    csv.line("key,value");
    csv.line("dimension," + std::to_string(s.dim));
    csv.line("directions," + std::to_string(s.directions));
    csv.line("tangencies," + std::to_string(s.tangency_count));
    csv.line("non_morse_skipped," + std::to_string(s.non_morse_skipped));
    csv.line("no_convergence," + std::to_string(s.no_convergence));
    for (std::size_t i = 0; i < s.index_counts.size(); ++i)
        csv.line("index_" + std::to_string(i) + "," + std::to_string(s.index_counts[i]));
    if (s.dim % 2 == 0)
        csv.line(std::string("alternation_consistent,") +
                 (s.alternation_consistent ? "true" : "false"));
    csv.line("verdict," + s.verdict);
    return 0;
}

int cmd_probe(const CommonOpts& o, const std::string& plane_lit, double radius, int count,
              int degree_max, double rank_tol, std::uint64_t mc_samples) {
    const BodyModel body = parse_body_file(o.body_path);
    DomainSpec spec{normalize(parse_plane(plane_lit)), radius, count};
    const DomainSamples train = sample_domain(body, spec, o.seed, mc_samples);
    const DomainSamples holdout = sample_domain(body, spec, o.seed + 1, mc_samples);
    const AlgebraicityReport rep = relation_search(train, holdout, degree_max, rank_tol);

    Csv csv(o.out_path);
    csv.line("degree,columns,sigma_ratio,verdict");
    for (const auto& r : rep.records) {
        const char* verdict = "none";
        if (rep.relation_found && r.degree == rep.found_degree) verdict = "relation-found";
        csv.line(std::to_string(r.degree) + "," + std::to_string(r.tested_columns) + "," +
                 g17(r.sigma_ratio) + "," + verdict);
    }
    if (rep.relation_found) {
        std::cerr << "relation found at degree " << rep.found_degree << " (in-sample residual "
                  << g17(rep.in_sample_residual) << ", held-out residual "
                  << g17(rep.held_out_residual)
                  << "); candidate terms (exponents over a_1..a_N, b, V):\n";
        for (const auto& term : rep.candidate) {
            std::cerr << "  " << g17(term.coefficient) << " * [";
            for (std::size_t i = 0; i < term.exponents.size(); ++i)
                std::cerr << (i ? "," : "") << term.exponents[i];
            std::cerr << "]\n";
        }
    } else {
        std::cerr << "no relation up to degree " << degree_max << " at tolerance "
                  << g17(rank_tol) << "\n";
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& plane_lit, double lambda_min,
              double lambda_max, int steps, bool force_mc) {
    const BodyModel body = parse_body_file(o.body_path);
    const Hyperplane h = parse_plane(plane_lit);
    if (h.dim() != body.dim()) throw DomainError("plane dimension does not match body");
    if (steps < 1) throw Error("--steps must be >= 1");
    const double anorm = h.normal().norm();
    if (anorm == 0.0) throw DegenerateHyperplane();

    std::optional<TubeConstants> tc;
    if (body.kind() == BodyKind::tube) tc = tube_constants(body);

    Csv csv(o.out_path);
    csv.line("lambda,Vplus,Vminus,stderr");
    for (int k = 0; k < steps; ++k) {
        const double lam =
            steps == 1 ? lambda_min : lambda_min + (lambda_max - lambda_min) * k / (steps - 1);
        // shift by distance lambda along the positive normal
        Hyperplane shifted = h;
        shifted.coeffs(h.dim()) = h.b() - lam * anorm;
        double vplus = 0.0, vminus = 0.0, err = 0.0;
        bool exact = false;
        if (!force_mc) {
            if (body.kind() == BodyKind::ball) {
                const double t = -shifted.side_value(body.center()) / anorm;
                vplus = exact_cap_volume(body.dim(), body.radius(), t);
                vminus = nball_volume(body.dim(), body.radius()) - vplus;
                exact = true;
            } else if (body.kind() == BodyKind::ellipsoid) {
                std::tie(vplus, vminus) = ellipsoid_cut_volume(body.semiaxes(), shifted);
                exact = true;
            } else if (body.kind() == BodyKind::tube) {
                const TubeCutResult r = tube_cut_volumes(*tc, body, shifted);
                if (r.valid) {
                    vplus = r.vplus;
                    vminus = r.vminus;
                    exact = true;
                }
            }
        }
        if (!exact) {
            const CutVolumes cv = mc_cut_volumes(body, shifted, o.samples, o.seed);
            vplus = cv.vplus.value;
            vminus = cv.vminus.value;
            err = std::max(cv.vplus.std_error, cv.vminus.std_error);
        }
        csv.line(g17(lam) + "," + g17(vplus) + "," + g17(vminus) + "," + g17(err));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"cutvol: volumes cut from smooth bodies by hyperplanes, tangency "
                 "classification, and polynomial-relation probing"};
    app.footer(kConventionFooter);
    app.require_subcommand(1);

    CommonOpts o;
    std::string plane_lit, dir_lit, alpha_lit, beta_lit;
    bool serial = false, force_mc = false;
    double slab = 0.0, t_value = 0.0, radius = 1.0, gamma = 0.0;
    double probe_radius = 0.05, rank_tol = 1e-9;
    double lambda_min = 0.0, lambda_max = 1.0;
    int dim = 3, starts = 64, directions = 50, count = 200, degree_max = 8, steps = 21;
    std::uint64_t mc_samples = 1u << 20;

    auto* volume = app.add_subcommand("volume", "Monte Carlo cut volumes V+ and V-");
    add_body_flag(volume, &o);
    volume->add_option("--plane", plane_lit, "plane literal a1,...,aN;b")->required();
    volume->add_option("--samples", o.samples, "Monte Carlo samples (default 1000000)");
    volume->add_option("--seed", o.seed, "random seed (default 0)");
    volume->add_flag("--serial", serial, "use the serial reference kernel");
    volume->add_option("--out", o.out_path, "output CSV path (default stdout)");
    volume->footer(kConventionFooter);

    auto* section =
        app.add_subcommand("section", "Monte Carlo slab estimate of the section volume");
    add_body_flag(section, &o);
    section->add_option("--plane", plane_lit, "plane literal a1,...,aN;b")->required();
    section->add_option("--slab", slab, "slab width (default 1e-3 * box diameter)");
    section->add_option("--samples", o.samples, "Monte Carlo samples (default 1000000)");
    section->add_option("--seed", o.seed, "random seed (default 0)");
    section->add_option("--out", o.out_path, "output CSV path (default stdout)");
    section->footer(kConventionFooter);

    auto* cap = app.add_subcommand("cap", "exact N-ball cap volume");
    cap->add_option("--dim", dim, "dimension N (default 3)");
    cap->add_option("--radius", radius, "ball radius (default 1)");
    cap->add_option("--t", t_value, "signed distance from the center to the plane")->required();
    cap->add_option("--out", o.out_path, "output CSV path (default stdout)");
    cap->footer(kConventionFooter);

    auto* verify =
        app.add_subcommand("tube-verify", "closed-form tube cut volumes against Monte Carlo, "
                                          "with the beta-independence check");
    add_body_flag(verify, &o);
    verify->add_option("--gamma", gamma, "plane offset gamma (= -b)")->required();
    verify->add_option("--alpha", alpha_lit, "alpha1,alpha2,alpha3")->required();
    verify->add_option("--beta", beta_lit, "beta1,...,betam (default all zero)");
    verify->add_option("--samples", o.samples, "Monte Carlo samples (default 1000000)");
    verify->add_option("--seed", o.seed, "random seed (default 0)");
    verify->add_option("--out", o.out_path, "output CSV path (default stdout)");
    verify->footer(kConventionFooter);

    auto* tangency = app.add_subcommand(
        "tangency", "tangent planes in a direction and the inertia-parity verdicts");
    add_body_flag(tangency, &o);
    tangency->add_option("--direction", dir_lit, "direction v1,...,vN (normalized internally)")
        ->required();
    tangency->add_option("--starts", starts, "multistart count (default 64)");
    tangency->add_option("--seed", o.seed, "random seed (default 0)");
    tangency->add_option("--out", o.out_path, "output CSV path (default stdout)");
    tangency->footer(kConventionFooter);

    auto* scan = app.add_subcommand("scan", "sample directions and summarize inertia indices");
    add_body_flag(scan, &o);
    scan->add_option("--directions", directions, "number of directions (default 50)");
    scan->add_option("--starts", starts, "multistart count per direction (default 64)");
    scan->add_option("--seed", o.seed, "random seed (default 0)");
    scan->add_option("--out", o.out_path, "output CSV path (default stdout)");
    scan->footer(kConventionFooter);

    auto* probe = app.add_subcommand("probe", "sample a domain of planes and search for a "
                                              "polynomial relation F(a,b,V) = 0");
    add_body_flag(probe, &o);
    probe->add_option("--plane", plane_lit, "base plane literal a1,...,aN;b")->required();
    probe->add_option("--radius", probe_radius,
                      "sampling radius in coefficient space (default 0.05)");
    probe->add_option("--count", count, "sample count (default 200)");
    probe->add_option("--degree-max", degree_max, "largest total degree tested (default 8)");
    probe->add_option("--rank-tol", rank_tol, "relation detection tolerance (default 1e-9)");
    probe->add_option("--seed", o.seed, "random seed (default 0)");
    probe->add_option("--mc-samples", mc_samples,
                      "Monte Carlo samples per plane when no exact oracle applies");
    probe->add_option("--out", o.out_path, "output CSV path (default stdout)");
    probe->footer(kConventionFooter);

    auto* sweep = app.add_subcommand("sweep", "volumes along a pencil of parallel planes");
    add_body_flag(sweep, &o);
    sweep->add_option("--plane", plane_lit, "base plane literal a1,...,aN;b")->required();
    sweep->add_option("--lambda-min", lambda_min, "first shift distance (default 0)");
    sweep->add_option("--lambda-max", lambda_max, "last shift distance (default 1)");
    sweep->add_option("--steps", steps, "number of pencil planes (default 21)");
    sweep->add_option("--samples", o.samples, "Monte Carlo samples (default 1000000)");
    sweep->add_option("--seed", o.seed, "random seed (default 0)");
    sweep->add_flag("--mc", force_mc, "force Monte Carlo even when an exact oracle applies");
    sweep->add_option("--out", o.out_path, "output CSV path (default stdout)");
    sweep->footer(kConventionFooter);

    CLI11_PARSE(app, argc, argv);

    try {
        if (volume->parsed()) return cmd_volume(o, plane_lit, serial);
        if (section->parsed()) return cmd_section(o, plane_lit, slab);
        if (cap->parsed()) return cmd_cap(o.out_path, dim, radius, t_value);
        if (verify->parsed()) return cmd_tube_verify(o, gamma, alpha_lit, beta_lit);
        if (tangency->parsed()) return cmd_tangency(o, dir_lit, starts);
        if (scan->parsed()) return cmd_scan(o, directions, starts);
        if (probe->parsed())
            return cmd_probe(o, plane_lit, probe_radius, count, degree_max, rank_tol,
                             mc_samples);
        if (sweep->parsed())
            return cmd_sweep(o, plane_lit, lambda_min, lambda_max, steps, force_mc);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
