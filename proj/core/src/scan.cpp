#include "lenschain/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "lenschain/errors.hpp"
#include "lenschain/mapio.hpp"

namespace lenschain {

namespace {

// Plain-array copy of the map for the iteration hot loop.
struct RawMap {
    std::size_t n = 0;
    double al[kMaxDim * kMaxDim]{};
    double ar[kMaxDim * kMaxDim]{};
    double mub[kMaxDim]{};

    RawMap(const PwaMap& map, double mu) : n(map.dim()) {
        for (std::size_t i = 0; i < n * n; ++i) {
            al[i] = map.left().data()[i];
            ar[i] = map.right().data()[i];
        }
        for (std::size_t i = 0; i < n; ++i) mub[i] = mu * map.b()[i];
    }

    void step(const double* x, double* y) const {
        const double* a = x[0] <= 0.0 ? al : ar;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = mub[i];
            for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
            y[i] = acc;
        }
    }
};

double inf_norm(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

bool usable(CellLabel l) {
    return l == CellLabel::FixedL || l == CellLabel::FixedR || l == CellLabel::Periodic ||
           l == CellLabel::NonRotational;
}

CellResult run_from(const PwaMap& map, double mu, const Vector& start, const ScanOptions& opts) {
    const RawMap raw(map, mu);
    const std::size_t n = raw.n;
    const double escape = opts.escape_factor * std::abs(mu);
    double x[kMaxDim], y[kMaxDim];
    std::copy(start.begin(), start.end(), x);

    CellResult out;
    for (int k = 0; k < opts.transient; ++k) {
        raw.step(x, y);
        std::copy(y, y + n, x);
        const double nx = inf_norm(x, n);
        if (!(nx <= escape)) {
            out.label = CellLabel::Diverged;
            return out;
        }
    }

    const int window = 2 * opts.n_max + 1;
    std::vector<double> hist(static_cast<std::size_t>(window) * n);
    std::copy(x, x + n, hist.begin());
    for (int k = 1; k < window; ++k) {
        raw.step(&hist[(k - 1) * n], &hist[k * n]);
        if (!(inf_norm(&hist[k * n], n) <= escape)) {
            out.label = CellLabel::Diverged;
            return out;
        }
    }

    int period = 0;
    for (int p = 1; p <= opts.n_max && period == 0; ++p) {
        bool ok = true;
        for (int k = 0; k < p && ok; ++k) {
            const double* a = &hist[k * n];
            const double* b = &hist[(k + p) * n];
            double dev = 0.0;
            for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(b[i] - a[i]));
            ok = dev <= opts.recurrence_tol * std::max(1.0, inf_norm(a, n));
        }
        if (ok) period = p;
    }
    if (period == 0) return out;

    std::vector<Symbol> itinerary;
    for (int k = 0; k < period; ++k) itinerary.push_back(hist[k * n] <= 0.0 ? Symbol::L : Symbol::R);

    if (period == 1) {
        const FixedPointReport fp = fixed_point(map, mu, itinerary[0], opts.tol);
        const double radius = eigenvalues(map.branch(itinerary[0])).spectral_radius();
        if (!fp.admissible || radius >= 1.0 + opts.tol.sing) return out;
        out.label = itinerary[0] == Symbol::L ? CellLabel::FixedL : CellLabel::FixedR;
        out.l = itinerary[0] == Symbol::L ? 1 : 0;
        out.n = 1;
        out.margin = std::abs(fp.s_star);
        out.max_multiplier = radius;
        return out;
    }

    const SymbolSequence seq(itinerary);
    const CycleSolution c = solve_cycle(map, mu, seq, opts.tol);
    const double radius = c.multipliers.spectral_radius();
    // The re-solved cycle must be the one we found, admissible and stable.
    const double match = norm_inf(sub(c.points[0], std::span<const double>(hist.data(), n)));
    if (!c.admissibility.ok() || radius >= 1.0 + opts.tol.sing ||
        match > 1e-6 * std::max(1.0, norm_inf(c.points[0]))) {
        return out;
    }
    out.n = period;
    out.max_multiplier = radius;
    out.margin = std::numeric_limits<double>::infinity();
    for (double s : c.s_values) out.margin = std::min(out.margin, std::abs(s));
    if (const auto rp = rotational_params(seq)) {
        out.label = CellLabel::Periodic;
        out.l = rp->l;
        out.m = rp->m;
    } else {
        out.label = CellLabel::NonRotational;
    }
    return out;
}

Vector offset_start(const Vector& x, double k) {
    Vector v = x;
    const double scale = 1e-3 * std::max(1.0, norm_inf(x));
    double w = 1.0;
    for (double& c : v) {
        c += k * scale * w;
        w *= -0.5;
    }
    return v;
}

}  // namespace

std::string to_string(CellLabel c) {
    switch (c) {
        case CellLabel::FixedL:
            return "fixed_L";
        case CellLabel::FixedR:
            return "fixed_R";
        case CellLabel::Periodic:
            return "periodic";
        case CellLabel::NonRotational:
            return "nonrotational";
        case CellLabel::None:
            return "none";
        case CellLabel::Diverged:
            return "diverged";
    }
    return "none";
}

CellLabel cell_label_from_string(std::string_view s) {
    for (CellLabel c : {CellLabel::FixedL, CellLabel::FixedR, CellLabel::Periodic, CellLabel::NonRotational,
                        CellLabel::None, CellLabel::Diverged}) {
        if (to_string(c) == s) return c;
    }
    throw ParseError("unknown cell label '" + std::string(s) + "'", 0, 0);
}

CellResult classify_cell(const PwaMap& map, double mu, const ScanOptions& opts) {
    std::vector<Vector> starts;
    std::vector<FixedPointReport> fixed;
    for (Symbol side : {Symbol::L, Symbol::R}) {
        try {
            const FixedPointReport fp = fixed_point(map, mu, side, opts.tol);
            if (fp.admissible) fixed.push_back(fp);
        } catch (const UnitMultiplier&) {
        }
    }
    // Starting exactly on a fixed point would never leave it, so nudge off it.
    starts.push_back(fixed.empty() ? scale(map.b(), mu) : offset_start(fixed.front().point, 1.0));
    if (opts.multi_start) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (const FixedPointReport& fp : fixed) {
            for (int k = 0; k < 2; ++k) starts.push_back(offset_start(fp.point, u(rng)));
        }
    }
    CellResult first;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        CellResult r;
        try {
            r = run_from(map, mu, starts[k], opts);
        } catch (const Error&) {
            r = CellResult{};
        }
        if (usable(r.label)) return r;
        if (k == 0) first = r;
    }
    return first;
}

TongueGrid scan_tongues(const MapFamily& family, int width, int height, const ScanOptions& opts) {
    if (width < 1 || height < 1) throw ConfigError("scan grid must have at least one cell");
    if (opts.n_max < 1) throw ConfigError("n_max must be at least 1");
    if (family.mu == 0.0) throw ConfigError("mu must be nonzero");
    TongueGrid g;
    g.width = width;
    g.height = height;
    g.box = family.box;
    const std::size_t total = static_cast<std::size_t>(width) * height;
    g.cells.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
            const int i = static_cast<int>(k % width);
            const int j = static_cast<int>(k / width);
            try {
                g.cells[k] = classify_cell(family.at(g.p1(i), g.p2(j)), family.mu, opts);
            } catch (const Error&) {
                g.cells[k] = CellResult{};
            }
        }
    };
    const int nthreads = std::max(1, opts.threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return g;
}

std::string write_grid_csv(const TongueGrid& g) {
    std::string out = "p1,p2,label,l,m,n,margin,max_multiplier\n";
    for (int j = 0; j < g.height; ++j) {
        for (int i = 0; i < g.width; ++i) {
            const CellResult& c = g.at(i, j);
            out += format_double(g.p1(i));
            out += ',';
            out += format_double(g.p2(j));
            out += ',';
            out += to_string(c.label);
            out += ',' + std::to_string(c.l) + ',' + std::to_string(c.m) + ',' + std::to_string(c.n) + ',';
            out += format_double(c.margin);
            out += ',';
            out += format_double(c.max_multiplier);
            out += '\n';
        }
    }
    return out;
}

TongueGrid read_grid_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || line.rfind("p1,p2,label,l,m,n,margin,max_multiplier", 0) != 0) {
        throw ParseError("expected grid CSV header", 1, 1);
    }
    ++line_no;
    std::vector<double> p1s, p2s;
    TongueGrid g;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 8) throw ParseError("grid row needs 8 fields", line_no, 1);
        CellResult c;
        try {
            p1s.push_back(std::stod(f[0]));
            p2s.push_back(std::stod(f[1]));
            c.label = cell_label_from_string(f[2]);
            c.l = std::stoi(f[3]);
            c.m = std::stoi(f[4]);
            c.n = std::stoi(f[5]);
            c.margin = std::strtod(f[6].c_str(), nullptr);
            c.max_multiplier = std::strtod(f[7].c_str(), nullptr);
        } catch (const ParseError&) {
            throw ParseError("unknown cell label '" + f[2] + "'", line_no, 1);
        } catch (const std::exception&) {
            throw ParseError("malformed grid row", line_no, 1);
        }
        g.cells.push_back(c);
    }
    if (g.cells.empty()) throw ParseError("grid CSV has no rows", line_no, 1);
    int w = 1;
    while (w < static_cast<int>(p2s.size()) && p2s[w] == p2s[0]) ++w;
    if (g.cells.size() % w != 0) throw ParseError("grid rows do not form a rectangle", line_no, 1);
    g.width = w;
    g.height = static_cast<int>(g.cells.size() / w);
    const double dx = w > 1 ? p1s[1] - p1s[0] : 0.0;
    const double dy = g.height > 1 ? p2s[w] - p2s[0] : 0.0;
    g.box = {p1s[0] - 0.5 * dx, p1s[w - 1] + 0.5 * dx, p2s[0] - 0.5 * dy, p2s.back() + 0.5 * dy};
    return g;
}

std::array<std::vector<Point2>, 2> tongue_edges(const TongueGrid& g, int m, int n) {
    std::array<std::vector<Point2>, 2> edges;
    const double half = 0.5 * (g.box[1] - g.box[0]) / g.width;
    int last = -1;  // previous occupied row
    for (int j = 0; j < g.height; ++j) {
        int lo = -1, hi = -1;
        for (int i = 0; i < g.width; ++i) {
            const CellResult& c = g.at(i, j);
            if (c.label == CellLabel::Periodic && c.m == m && c.n == n) {
                if (lo < 0) lo = i;
                hi = i;
            }
        }
        if (lo < 0) continue;
        const Point2 left{g.p1(lo) - half, g.p2(j)}, right{g.p1(hi) + half, g.p2(j)};
        if (last >= 0 && j > last + 1) {
            // Rows the tongue skips: it is narrower than a cell there.
            const Point2 a{0.5 * (edges[0].back()[0] + edges[1].back()[0]), edges[0].back()[1]};
            const Point2 b{0.5 * (left[0] + right[0]), left[1]};
            for (int k = last + 1; k < j; ++k) {
                const double f = static_cast<double>(k - last) / (j - last);
                const Point2 z{a[0] + f * (b[0] - a[0]), g.p2(k)};
                edges[0].push_back(z);
                edges[1].push_back(z);
            }
        }
        edges[0].push_back(left);
        edges[1].push_back(right);
        last = j;
    }
    return edges;
}

WidthProfile width_profile(const std::vector<Point2>& first, const std::vector<Point2>& second, int samples,
                           double threshold) {
    WidthProfile prof;
    if (first.size() < 2 || second.empty() || samples < 2) return prof;
    std::vector<double> cum{0.0};
    for (std::size_t k = 1; k < first.size(); ++k) {
        cum.push_back(cum.back() + std::hypot(first[k][0] - first[k - 1][0], first[k][1] - first[k - 1][1]));
    }
    const double total = cum.back();
    std::size_t seg = 0;
    for (int s = 0; s < samples; ++s) {
        const double target = total * s / (samples - 1);
        while (seg + 2 < cum.size() && cum[seg + 1] < target) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double f = len > 0.0 ? std::clamp((target - cum[seg]) / len, 0.0, 1.0) : 0.0;
        const Point2 a{first[seg][0] + f * (first[seg + 1][0] - first[seg][0]),
                       first[seg][1] + f * (first[seg + 1][1] - first[seg][1])};
        double best = std::numeric_limits<double>::infinity();
        Point2 bp = second.front();
        for (std::size_t k = 0; k < second.size(); ++k) {
            const Point2& p = second[k];
            const Point2& q = k + 1 < second.size() ? second[k + 1] : second[k];
            const double ex = q[0] - p[0], ey = q[1] - p[1];
            const double ee = ex * ex + ey * ey;
            const double t = ee > 0.0 ? std::clamp(((a[0] - p[0]) * ex + (a[1] - p[1]) * ey) / ee, 0.0, 1.0) : 0.0;
            const Point2 c{p[0] + t * ex, p[1] + t * ey};
            const double d = std::hypot(a[0] - c[0], a[1] - c[1]);
            if (d < best) {
                best = d;
                bp = c;
            }
        }
        prof.samples.push_back(WidthSample{target, best, a, bp});
        prof.max_width = std::max(prof.max_width, best);
    }
    // A minimum may be a plateau (a run of skipped rows); report its middle.
    const auto& sm = prof.samples;
    for (std::size_t k = 1; k + 1 < sm.size(); ++k) {
        const double w = sm[k].width;
        if (!(w < sm[k - 1].width) || !(w < threshold * prof.max_width)) continue;
        std::size_t end = k;
        while (end + 1 < sm.size() && sm[end + 1].width == w) ++end;
        if (end + 1 < sm.size() && sm[end + 1].width < w) continue;
        prof.minima.push_back((k + end) / 2);
        k = end;
    }
    return prof;
}

std::vector<ShrinkCandidate> locate_shrinking_points(const MapFamily& family, const TongueGrid& g, int m, int n,
                                                     const Tolerances& tol) {
    std::vector<ShrinkCandidate> out;
    const auto edges = tongue_edges(g, m, n);
    if (edges[0].size() < 3) return out;
    const WidthProfile prof = width_profile(edges[0], edges[1]);

    std::set<int> ls;
    for (const CellResult& c : g.cells) {
        if (c.label != CellLabel::Periodic || c.m != m || c.n != n) continue;
        for (int l = c.l - 1; l <= c.l + 1; ++l) {
            if (l > 1 && l < n - 1) ls.insert(l);
        }
    }
    const double diag = std::hypot(g.box[1] - g.box[0], g.box[3] - g.box[2]);

    for (std::size_t k : prof.minima) {
        const WidthSample& ws = prof.samples[k];
        ShrinkCandidate cand;
        cand.guess = {0.5 * (ws.a[0] + ws.b[0]), 0.5 * (ws.a[1] + ws.b[1])};
        cand.width = ws.width;
        double best = std::numeric_limits<double>::infinity();
        for (int l : ls) {
            try {
                const RotationalParams p = make_rotational_params(l, m, n);
                ShrinkSearch s = find_shrinking_point(family, p, cand.guess, {}, tol);
                if (!granted(s.verdict)) continue;
                const double dist = std::hypot(s.xi[0] - cand.guess[0], s.xi[1] - cand.guess[1]);
                if (dist < best && dist <= 0.1 * diag) {
                    best = dist;
                    cand.search = std::move(s);
                }
            } catch (const Error&) {
                continue;
            }
        }
        cand.note = cand.search ? "certified" : "no certified shrinking point near this minimum";
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const ShrinkCandidate& o) {
            return o.search && cand.search && std::hypot(o.search->xi[0] - cand.search->xi[0],
                                                         o.search->xi[1] - cand.search->xi[1]) < 1e-9;
        });
        if (!duplicate) out.push_back(std::move(cand));
    }
    return out;
}

}  // namespace lenschain
