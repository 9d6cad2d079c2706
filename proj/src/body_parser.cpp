#include "cutvol/body_parser.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "cutvol/errors.hpp"

namespace cutvol {

namespace {

struct Field {
    std::string key;
    std::string value;
    std::size_t column;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, std::size_t line, std::size_t col) {
    if (s.empty()) throw ParseError("empty number", line, col);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError("bad number '" + s + "'", line, col);
    return v;
}

long parse_int(const std::string& s, std::size_t line, std::size_t col) {
    if (s.empty()) throw ParseError("empty integer", line, col);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError("bad integer '" + s + "'", line, col);
    return v;
}

Eigen::VectorXd parse_vector(const std::string& s, std::size_t line, std::size_t col) {
    const auto parts = split(s, ',');
    Eigen::VectorXd v(static_cast<int>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
        v(static_cast<int>(i)) = parse_double(parts[i], line, col);
    return v;
}

}  // namespace

BodyModel parse_body_line(const std::string& line, std::size_t line_no) {
    // tokenize on whitespace, remembering 1-based columns
    std::vector<Field> fields;
    std::string word;
    std::size_t start = 0;
    std::vector<std::pair<std::string, std::size_t>> tokens;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        const bool ws = (i == line.size()) || line[i] == ' ' || line[i] == '\t';
        if (ws) {
            if (!word.empty()) tokens.emplace_back(word, start + 1);
            word.clear();
        } else {
            if (word.empty()) start = i;
            word.push_back(line[i]);
        }
    }
    if (tokens.size() < 2 || tokens[0].first != "body")
        throw ParseError("expected 'body <kind> ...'", line_no, 1);
    const std::string kind = tokens[1].first;

    std::map<std::string, Field> kv;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
        const auto eq = tokens[i].first.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key=value, got '" + tokens[i].first + "'", line_no,
                             tokens[i].second);
        Field f{tokens[i].first.substr(0, eq), tokens[i].first.substr(eq + 1),
                tokens[i].second};
        if (kv.count(f.key))
            throw ParseError("duplicate key '" + f.key + "'", line_no, tokens[i].second);
        kv[f.key] = f;
    }
    auto need = [&](const std::string& key) -> const Field& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw ParseError("missing key '" + key + "' for body kind '" + kind + "'",
                             line_no, 1);
        return it->second;
    };
    auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [key, f] : kv) {
            bool ok = false;
            for (const char* a : allowed)
                if (key == a) ok = true;
            if (!ok) throw ParseError("unknown key '" + key + "'", line_no, f.column);
        }
    };

    if (kind == "ball") {
        reject_unknown({"radius", "center"});
        const Field& fr = need("radius");
        const Field& fc = need("center");
        const double r = parse_double(fr.value, line_no, fr.column);
        if (!(r > 0.0)) throw ParseError("ball radius must be positive", line_no, fr.column);
        Eigen::VectorXd c = parse_vector(fc.value, line_no, fc.column);
        if (c.size() < 2) throw ParseError("ball needs dimension >= 2", line_no, fc.column);
        return BodyModel::ball(r, std::move(c));
    }

    if (kind == "ellipsoid") {
        reject_unknown({"semiaxes"});
        const Field& fs = need("semiaxes");
        Eigen::VectorXd s = parse_vector(fs.value, line_no, fs.column);
        if (s.size() < 2) throw ParseError("ellipsoid needs dimension >= 2", line_no, fs.column);
        if (!(s.minCoeff() > 0.0))
            throw ParseError("ellipsoid semiaxes must be positive", line_no, fs.column);
        return BodyModel::ellipsoid(std::move(s));
    }

    if (kind == "tube") {
        reject_unknown({"m", "eps", "psi", "diag", "coeffs"});
        const Field& fm = need("m");
        const Field& fe = need("eps");
        const Field& fp = need("psi");
        const long m = parse_int(fm.value, line_no, fm.column);
        if (m < 1) throw ParseError("tube needs m >= 1", line_no, fm.column);
        const double eps = parse_double(fe.value, line_no, fe.column);
        if (!(eps > 0.0 && eps < 1.0))
            throw InvalidPsi("tube requires 0 < eps < 1", line_no, fe.column);
        PsiSpec psi;
        psi.m = static_cast<int>(m);
        if (fp.value == "quadratic") {
            const Field& fd = need("diag");
            psi.form = PsiSpec::Form::quadratic_diagonal;
            const Eigen::VectorXd w = parse_vector(fd.value, line_no, fd.column);
            if (w.size() != m)
                throw ParseError("diag needs exactly m weights", line_no, fd.column);
            psi.coeffs.assign(w.data(), w.data() + w.size());
            for (double ww : psi.coeffs)
                if (!(ww > 0.0))
                    throw InvalidPsi("quadratic psi weights must be positive; the unique "
                                     "critical point must be a minimum point at the origin",
                                     line_no, fd.column);
        } else if (fp.value == "radial") {
            const Field& fc = need("coeffs");
            psi.form = PsiSpec::Form::radial_even;
            const Eigen::VectorXd c = parse_vector(fc.value, line_no, fc.column);
            psi.coeffs.assign(c.data(), c.data() + c.size());
            psi.validate(eps * eps, line_no, fc.column);
        } else {
            throw ParseError("psi must be 'quadratic' or 'radial'", line_no, fp.column);
        }
        return BodyModel::tube(std::move(psi), eps);
    }

    if (kind == "implicit") {
        reject_unknown({"dim", "poly", "box"});
        const Field& fd = need("dim");
        const Field& fp = need("poly");
        const long dim = parse_int(fd.value, line_no, fd.column);
        if (dim < 2) throw ParseError("implicit body needs dim >= 2", line_no, fd.column);
        std::vector<ImplicitTerm> terms;
        for (const std::string& chunk : split(fp.value, ';')) {
            const auto parts = split(chunk, ',');
            if (static_cast<long>(parts.size()) != dim + 1)
                throw ParseError("poly term needs coef plus one exponent per coordinate",
                                 line_no, fp.column);
            ImplicitTerm t;
            t.coef = parse_double(parts[0], line_no, fp.column);
            for (long i = 1; i <= dim; ++i) {
                const long e = parse_int(parts[static_cast<size_t>(i)], line_no, fp.column);
                if (e < 0) throw ParseError("exponents must be >= 0", line_no, fp.column);
                t.exponents.push_back(static_cast<int>(e));
            }
            terms.push_back(std::move(t));
        }
        if (kv.count("box")) {
            const Field& fb = kv["box"];
            const auto halves = split(fb.value, ';');
            if (halves.size() != 2)
                throw ParseError("box needs <lo1,...;hi1,...>", line_no, fb.column);
            Eigen::VectorXd lo = parse_vector(halves[0], line_no, fb.column);
            Eigen::VectorXd hi = parse_vector(halves[1], line_no, fb.column);
            if (lo.size() != dim || hi.size() != dim)
                throw ParseError("box dimension mismatch", line_no, fb.column);
            if (!((hi - lo).minCoeff() > 0.0))
                throw ParseError("box must have positive extent", line_no, fb.column);
            return BodyModel::implicit(static_cast<int>(dim), std::move(terms),
                                       std::move(lo), std::move(hi));
        }
        return BodyModel::implicit(static_cast<int>(dim), std::move(terms));
    }

    throw ParseError("unknown body kind '" + kind + "'", line_no, tokens[1].second);
}

BodyModel parse_body_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open body file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    std::size_t found_at = 0;
    std::string body_line;
    bool have = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (have)
            throw ParseError("file contains more than one body (first at line " +
                                 std::to_string(found_at) + ")",
                             line_no, first + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        body_line = line;
        have = true;
        found_at = line_no;
    }
    if (!have) throw ParseError("no body line found", line_no == 0 ? 1 : line_no, 1);
    return parse_body_line(body_line, found_at);
}

}  // namespace cutvol
