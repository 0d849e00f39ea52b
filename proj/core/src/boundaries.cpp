// Continuation of tongue boundaries {s_k = 0} in the two-parameter plane:
// secant predictor, Newton corrector along the local gradient of s_k.

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lenschain/errors.hpp"
#include "lenschain/mapio.hpp"
#include "lenschain/scan.hpp"

namespace lenschain {

namespace {

struct Tracer {
    const MapFamily& family;
    SymbolSequence s;
    std::size_t k;
    const BoundaryOptions& opts;

    CycleSolution cycle(Point2 xi) const { return solve_cycle(family.at(xi[0], xi[1]), family.mu, s, opts.tol); }

    double value(Point2 xi) const { return cycle(xi).s_values[k]; }

    Point2 gradient(Point2 xi) const {
        const double h = std::max(1e-7, 1e-7 * std::hypot(xi[0], xi[1]));
        return {(value({xi[0] + h, xi[1]}) - value({xi[0] - h, xi[1]})) / (2.0 * h),
                (value({xi[0], xi[1] + h}) - value({xi[0], xi[1] - h})) / (2.0 * h)};
    }

    /// Newton along the gradient direction until |s_k| <= corrector_tol.
    std::optional<Point2> correct(Point2 xi) const {
        const Point2 g = gradient(xi);
        const double gn = std::hypot(g[0], g[1]);
        if (!(gn > 0.0)) return std::nullopt;
        const Point2 dir{g[0] / gn, g[1] / gn};
        for (int it = 0; it < 30; ++it) {
            const double f = value(xi);
            if (std::abs(f) <= opts.corrector_tol) return xi;
            // d/dalpha s_k(xi + alpha dir) by central difference.
            const double h = std::max(1e-7, 1e-7 * std::hypot(xi[0], xi[1]));
            const double df = (value({xi[0] + h * dir[0], xi[1] + h * dir[1]}) -
                               value({xi[0] - h * dir[0], xi[1] - h * dir[1]})) /
                              (2.0 * h);
            if (!(std::abs(df) > 0.0)) return std::nullopt;
            const double a = -f / df;
            xi = {xi[0] + a * dir[0], xi[1] + a * dir[1]};
        }
        return std::abs(value(xi)) <= opts.corrector_tol ? std::optional<Point2>(xi) : std::nullopt;
    }
};

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::vector<BoundaryCurve> tongue_boundaries(const MapFamily& family, const RotationalParams& p, Point2 seed,
                                             const BoundaryOptions& opts) {
    const SymbolSequence s = rotational(p);
    const int n = p.n;
    {
        const CycleSolution c = solve_cycle(family.at(seed[0], seed[1]), family.mu, s, opts.tol);
        if (c.admissibility.kind != AdmissibilityKind::Admissible) {
            throw SeedNotAdmissible("the S-cycle is not admissible at the seed");
        }
    }
    const double step0 =
        opts.step > 0.0 ? opts.step : std::hypot(family.box[1] - family.box[0], family.box[3] - family.box[2]) / 400.0;

    auto wrap = [n](long long i) { return static_cast<std::size_t>(((i % n) + n) % n); };
    std::vector<std::size_t> indices;
    for (long long i : {0LL, -static_cast<long long>(p.d), static_cast<long long>(p.l - 1) * p.d,
                        static_cast<long long>(p.l) * p.d}) {
        const std::size_t k = wrap(i);
        if (std::find(indices.begin(), indices.end(), k) == indices.end()) indices.push_back(k);
    }

    std::vector<BoundaryCurve> curves;
    for (std::size_t c = 0; c < indices.size(); ++c) {
        const Tracer tr{family, s, indices[c], opts};
        const std::optional<Point2> start = tr.correct(seed);
        if (!start) throw ContinuationStalled("could not reach {s_" + std::to_string(indices[c]) + " = 0} from the seed");

        BoundaryCurve curve;
        curve.curve_id = static_cast<int>(c);
        curve.index = static_cast<long long>(indices[c]);
        std::vector<Point2> branch[2];
        std::string reasons[2];

        const Point2 g = tr.gradient(*start);
        const double gn = std::hypot(g[0], g[1]);
        for (int b = 0; b < 2; ++b) {
            const double dirsign = b == 0 ? 1.0 : -1.0;
            Point2 tangent{-g[1] / gn * dirsign, g[0] / gn * dirsign};
            Point2 prev = *start;
            double gamma_prev = tr.cycle(prev).det_IminusM;
            reasons[b] = "budget";
            for (int st = 0; st < opts.max_steps; ++st) {
                double h = step0;
                std::optional<Point2> next;
                for (int tries = 0; tries < 4 && !next; ++tries, h *= 0.5) {
                    const Point2 pred{prev[0] + h * tangent[0], prev[1] + h * tangent[1]};
                    if (!family.contains(pred[0], pred[1])) break;
                    try {
                        next = tr.correct(pred);
                    } catch (const Error&) {
                        next.reset();
                    }
                }
                if (!next) {
                    const Point2 pred{prev[0] + step0 * tangent[0], prev[1] + step0 * tangent[1]};
                    reasons[b] = family.contains(pred[0], pred[1]) ? "stalled" : "box";
                    break;
                }
                if (!family.contains((*next)[0], (*next)[1])) {
                    reasons[b] = "box";
                    break;
                }
                CycleSolution cyc;
                try {
                    cyc = tr.cycle(*next);
                } catch (const SingularSystem&) {
                    reasons[b] = "gamma";
                    break;
                }
                if (sign(cyc.det_IminusM) != sign(gamma_prev)) {
                    reasons[b] = "gamma";
                    break;
                }
                if (cyc.admissibility.kind == AdmissibilityKind::Virtual) {
                    reasons[b] = "virtual";
                    break;
                }
                const double dx = (*next)[0] - prev[0], dy = (*next)[1] - prev[1];
                const double dn = std::hypot(dx, dy);
                if (!(dn > 0.0)) {
                    reasons[b] = "stalled";
                    break;
                }
                tangent = {dx / dn, dy / dn};
                prev = *next;
                gamma_prev = cyc.det_IminusM;
                branch[b].push_back(prev);
            }
        }
        std::reverse(branch[1].begin(), branch[1].end());
        for (const Point2& q : branch[1]) curve.points.push_back({q, tr.value(q)});
        curve.points.push_back({*start, tr.value(*start)});
        for (const Point2& q : branch[0]) curve.points.push_back({q, tr.value(q)});
        curve.stop_reason = reasons[1] + "/" + reasons[0];
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::string write_curve_csv(const std::vector<BoundaryCurve>& curves) {
    std::string out = "curve_id,index,p1,p2,s_residual\n";
    for (const BoundaryCurve& c : curves) {
        for (const CurvePoint& q : c.points) {
            out += std::to_string(c.curve_id) + ',' + std::to_string(c.index) + ',' + format_double(q.xi[0]) + ',' +
                   format_double(q.xi[1]) + ',' + format_double(q.s_residual) + '\n';
        }
    }
    return out;
}

std::vector<BoundaryCurve> read_curve_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("curve_id,index,p1,p2,s_residual", 0) != 0) {
        throw ParseError("expected curve CSV header", 1, 1);
    }
    std::vector<BoundaryCurve> curves;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 5) throw ParseError("curve row needs 5 fields", line_no, 1);
        try {
            const int id = std::stoi(f[0]);
            if (curves.empty() || curves.back().curve_id != id) {
                curves.push_back(BoundaryCurve{id, std::stoll(f[1]), {}, {}});
            }
            curves.back().points.push_back({{std::stod(f[2]), std::stod(f[3])}, std::stod(f[4])});
        } catch (const std::exception&) {
            throw ParseError("malformed curve row", line_no, 1);
        }
    }
    return curves;
}

}  // namespace lenschain
