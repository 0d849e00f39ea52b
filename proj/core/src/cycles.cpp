#include "lenschain/cycles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lenschain/errors.hpp"
#include "lenschain/mapio.hpp"

namespace lenschain {

Matrix stability_matrix(const PwaMap& map, const SymbolSequence& s) {
    const auto n = static_cast<long long>(s.size());
    Matrix m = map.branch(s[n - 1]);
    for (long long k = n - 2; k >= 0; --k) m = m * map.branch(s[k]);
    return m;
}

Matrix bc_matrix(const PwaMap& map, const SymbolSequence& s) {
    const auto n = static_cast<long long>(s.size());
    const std::size_t dim = map.dim();
    Matrix p = Matrix::identity(dim);
    Matrix prod = Matrix::identity(dim);
    for (long long k = n - 1; k >= 1; --k) {
        prod = prod * map.branch(s[k]);
        p += prod;
    }
    return p;
}

std::string to_string(AdmissibilityKind k) {
    switch (k) {
        case AdmissibilityKind::Admissible:
            return "admissible";
        case AdmissibilityKind::Boundary:
            return "boundary";
        case AdmissibilityKind::Virtual:
            return "virtual";
    }
    return "unknown";
}

Admissibility admissibility(std::span<const Vector> points, const SymbolSequence& s, double band) {
    if (points.size() != s.size()) throw DimensionError("admissibility: one point per symbol required");
    Admissibility a;
    a.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double si = points[i][0];
        if (std::abs(si) <= band * std::max(1.0, norm_inf(points[i]))) {
            a.boundary.push_back(i);
            continue;
        }
        a.margin = std::min(a.margin, std::abs(si));
        const Symbol want = si < 0.0 ? Symbol::L : Symbol::R;
        if (s[static_cast<long long>(i)] != want) a.violating.push_back(i);
    }
    if (!a.violating.empty())
        a.kind = AdmissibilityKind::Virtual;
    else if (!a.boundary.empty())
        a.kind = AdmissibilityKind::Boundary;
    else
        a.kind = AdmissibilityKind::Admissible;
    return a;
}

std::vector<Vector> orbit_under(const PwaMap& map, double mu, const SymbolSequence& s, std::span<const double> x0) {
    std::vector<Vector> pts;
    pts.reserve(s.size() + 1);
    pts.emplace_back(x0.begin(), x0.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
        pts.push_back(map.apply_branch(mu, s[static_cast<long long>(i)], pts.back()));
    }
    return pts;
}

CycleSolution solve_cycle(const PwaMap& map, double mu, const SymbolSequence& s, const Tolerances& tol) {
    const std::size_t dim = map.dim();
    const Matrix m = stability_matrix(map, s);
    const Matrix p = bc_matrix(map, s);
    const Matrix imm = Matrix::identity(dim) - m;
    CycleSolution c;
    c.sequence = s;
    c.mu = mu;
    c.det_IminusM = det(imm);
    c.det_P = det(p);
    if (is_singular_value(c.det_IminusM, imm, tol)) {
        throw SingularSystem("I - M_S is singular for S = " + s.str(), c.det_IminusM, c.det_P);
    }
    const Vector x0 = solve(imm, p * scale(map.b(), mu), tol);
    std::vector<Vector> orbit = orbit_under(map, mu, s, x0);
    c.wrap_residual = norm_inf(sub(orbit.back(), orbit.front())) / std::max(1.0, norm_inf(orbit.front()));
    orbit.pop_back();
    c.points = std::move(orbit);
    c.s_values.reserve(c.points.size());
    for (const Vector& x : c.points) c.s_values.push_back(x[0]);
    c.admissibility = admissibility(c.points, s, tol.band);
    c.multipliers = eigenvalues(m);
    return c;
}

PwaMap nth_iterate_map(const PwaMap& map, const SymbolSequence& s) {
    const SymbolSequence s_left = s[0] == Symbol::L ? s : flip(s, 0);
    const SymbolSequence s_right = flip(s_left, 0);
    return PwaMap(stability_matrix(map, s_left), stability_matrix(map, s_right), bc_matrix(map, s) * map.b());
}

std::string to_string(SolutionCell c) {
    switch (c) {
        case SolutionCell::UniqueOffManifold:
            return "unique-off-manifold";
        case SolutionCell::NoSolution:
            return "no-solution";
        case SolutionCell::UniqueOnManifold:
            return "unique-on-manifold";
        case SolutionCell::AffineFamily:
            return "affine-family";
        case SolutionCell::Degenerate:
            return "degenerate";
    }
    return "unknown";
}

SolutionNature solution_nature(const PwaMap& map, double mu, const SymbolSequence& s, const Tolerances& tol) {
    const std::size_t dim = map.dim();
    const Matrix imm = Matrix::identity(dim) - stability_matrix(map, s);
    const Matrix p = bc_matrix(map, s);
    SolutionNature out;
    out.det_IminusM = det(imm);
    out.det_P = det(p);
    out.singular_IminusM = is_singular_value(out.det_IminusM, imm, tol);
    out.singular_P = is_singular_value(out.det_P, p, tol);
    const Vector r = rho(map, 1e-8);
    const double rb = dot(r, map.b());
    if (mu == 0.0 || std::abs(rb) <= tol.sing * std::max(1.0, norm_inf(r) * norm_inf(map.b()))) {
        out.cell = SolutionCell::Degenerate;
        return out;
    }
    if (!out.singular_IminusM)
        out.cell = out.singular_P ? SolutionCell::UniqueOnManifold : SolutionCell::UniqueOffManifold;
    else
        out.cell = out.singular_P ? SolutionCell::AffineFamily : SolutionCell::NoSolution;
    return out;
}

AffineFamilySolution affine_family(const PwaMap& map, double mu, const SymbolSequence& s, double rank_tol) {
    const std::size_t dim = map.dim();
    const Matrix imm = Matrix::identity(dim) - stability_matrix(map, s);
    const Vector rhs = bc_matrix(map, s) * scale(map.b(), mu);
    RankSolve rs = solve_rank_deficient(imm, rhs, rank_tol);
    return AffineFamilySolution{std::move(rs.particular), std::move(rs.null_basis), rs.residual};
}

std::string write_cycle_csv(const CycleSolution& c) {
    std::ostringstream os;
    os << "# sequence = " << c.sequence.str() << '\n';
    os << "# mu = " << format_double(c.mu) << '\n';
    os << "# det_IminusM = " << format_double(c.det_IminusM) << '\n';
    os << "# det_P = " << format_double(c.det_P) << '\n';
    os << "# admissibility = " << to_string(c.admissibility.kind) << '\n';
    os << "# wrap_residual = " << format_double(c.wrap_residual) << '\n';
    for (const Complex& z : c.multipliers.eigenvalues) {
        os << "# multiplier = " << format_double(z.real()) << ", " << format_double(z.imag()) << '\n';
    }
    const std::size_t dim = c.points.empty() ? 0 : c.points.front().size();
    os << "index,s";
    for (std::size_t k = 0; k < dim; ++k) os << ",x" << (k + 1);
    os << '\n';
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        os << i << ',' << format_double(c.s_values[i]);
        for (double v : c.points[i]) os << ',' << format_double(v);
        os << '\n';
    }
    return os.str();
}

CycleTable read_cycle_csv(std::string_view text) {
    CycleTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            std::string value = line.substr(eq + 1);
            value.erase(0, value.find_first_not_of(' '));
            if (key == "sequence")
                t.sequence = SymbolSequence::parse(value);
            else if (key == "mu")
                t.mu = std::stod(value);
            else if (key == "det_IminusM")
                t.det_IminusM = std::stod(value);
            else if (key == "det_P")
                t.det_P = std::stod(value);
            continue;
        }
        if (!header_seen) {
            if (line.rfind("index,s", 0) != 0) throw ParseError("expected 'index,s,...' header", line_no, 1);
            header_seen = true;
            continue;
        }
        std::vector<double> fields;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) fields.push_back(std::stod(cell));
        if (fields.size() < 3) throw ParseError("row needs index, s and coordinates", line_no, 1);
        t.points.emplace_back(fields.begin() + 2, fields.end());
    }
    if (t.sequence.empty()) throw ParseError("missing '# sequence = ...' header", 1, 1);
    if (t.points.size() != t.sequence.size()) {
        throw ParseError("row count does not match the sequence length", line_no, 1);
    }
    return t;
}

}  // namespace lenschain
