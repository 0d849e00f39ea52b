// lenschain: command-line front end. Each subcommand wraps one library
// operation. Exit codes: 0 ok, 2 usage/input error, 3 negative verdict,
// 4 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lenschain/cycles.hpp"
#include "lenschain/errors.hpp"
#include "lenschain/family.hpp"
#include "lenschain/mapio.hpp"
#include "lenschain/pwamap.hpp"
#include "lenschain/scan.hpp"
#include "lenschain/shrink.hpp"
#include "lenschain/symseq.hpp"

using namespace lenschain;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNegative = 3;
constexpr int kNumerical = 4;

struct Globals {
    std::string map_path;
    std::string family = "fig1";
    std::optional<double> mu;
    double tol_sing = 1e-9;
    double band = 1e-8;
    int nmax = 30;
    std::string grid = "100x100";
    std::string box;
    std::string out;
    int threads = 1;
    std::uint64_t seed = 0;

    Tolerances tol() const { return Tolerances{tol_sing, band, 1e-9}; }
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad number '") + item + "' in " + what);
        }
    }
    if (out.size() != expected) {
        throw UsageError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated numbers");
    }
    return out;
}

std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw UsageError("--grid must look like WxH");
    try {
        return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    } catch (const std::exception&) {
        throw UsageError("--grid must look like WxH");
    }
}

void emit(const Globals& g, const std::string& csv) {
    if (g.out.empty()) return;
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + g.out + "'");
    f << csv;
}

MapConfig load_map(const Globals& g) {
    if (g.map_path.empty()) throw UsageError("--map is required");
    return load_map_config(g.map_path);
}

double mu_of(const Globals& g, const MapConfig& cfg) { return g.mu ? *g.mu : cfg.mu.value_or(1.0); }

FamilySpec load_family_spec(const Globals& g) {
    FamilySpec spec = load_family(g.family);
    if (g.mu) spec.mu = *g.mu;
    if (!g.box.empty()) {
        const auto b = parse_numbers(g.box, 4, "--box");
        set_box(spec, {b[0], b[1], b[2], b[3]});
    }
    return spec;
}

std::string join(const Vector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s;
}

std::string complex_str(const Complex& z) {
    if (z.imag() == 0.0) return format_double(z.real());
    return format_double(z.real()) + (z.imag() < 0 ? " - " : " + ") + format_double(std::abs(z.imag())) + "i";
}

void print_cycle(const CycleSolution& c) {
    std::printf("sequence: %s\n", c.sequence.str().c_str());
    std::printf("det_IminusM: %s\n", format_double(c.det_IminusM).c_str());
    std::printf("det_P: %s\n", format_double(c.det_P).c_str());
    std::printf("admissibility: %s\n", to_string(c.admissibility.kind).c_str());
    std::printf("stable: %s\n", c.is_stable() ? "true" : "false");
    std::printf("wrap_residual: %s\n", format_double(c.wrap_residual).c_str());
    for (const Complex& z : c.multipliers.eigenvalues) std::printf("multiplier: %s\n", complex_str(z).c_str());
    for (std::size_t i = 0; i < c.points.size(); ++i) std::printf("x%zu: %s\n", i, join(c.points[i]).c_str());
}

int print_verdict(const ShrinkVerdict& v) {
    if (granted(v)) {
        std::fputs(format_certificate(std::get<ShrinkingPointCertificate>(v)).c_str(), stdout);
        return kOk;
    }
    std::fputs(format_failure(std::get<FailureReport>(v)).c_str(), stdout);
    return kNegative;
}

ShrinkVerdict check_any(const PwaMap& map, double mu, int l, int m, int n, const Tolerances& tol) {
    if (l == n - 1) return check_terminating(map, mu, m, n, tol);
    return check_nonterminating(map, mu, l, m, n, tol);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic orbits, resonance tongues and shrinking points of piecewise-affine maps"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--map", g.map_path, "Map file (key = value)");
    app.add_option("--family", g.family, "Family file or built-in name")->capture_default_str();
    app.add_option("--mu", g.mu, "Override mu");
    app.add_option("--tol-sing", g.tol_sing, "Relative singularity threshold")->capture_default_str();
    app.add_option("--band", g.band, "Switching-manifold band (relative)")->capture_default_str();
    app.add_option("--nmax", g.nmax, "Largest period detected by scan")->capture_default_str();
    app.add_option("--grid", g.grid, "Scan grid WxH")->capture_default_str();
    app.add_option("--box", g.box, "Parameter box p1_min,p1_max,p2_min,p2_max");
    app.add_option("--out", g.out, "Write machine-readable CSV here");
    app.add_option("--threads", g.threads, "Worker threads for scan")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Seed for multi-start offsets")->capture_default_str();

    int cnt_n = 0;
    bool cnt_table = false;
    auto* count = app.add_subcommand("count", "Number of primitive and rotational sequences of length n");
    count->add_option("n", cnt_n)->required()->check(CLI::Range(1, 62));
    count->add_flag("--table", cnt_table, "Print the table for 1..n as CSV");

    int rl = 0, rm = 0, rn = 0;
    auto* rot = app.add_subcommand("rot", "Rotational sequence S[l,m,n]");
    rot->add_option("l", rl)->required();
    rot->add_option("m", rm)->required();
    rot->add_option("n", rn)->required();

    std::string seq_text;
    auto* params = app.add_subcommand("params", "Recover (l,m,n) from a sequence");
    params->add_option("sequence", seq_text)->required();

    std::string verify_path;
    auto* solve = app.add_subcommand("solve", "Solve the n-cycle system for a sequence");
    solve->add_option("--seq", seq_text, "Symbol sequence")->required();
    solve->add_option("--verify", verify_path, "Compare against a previously written cycle CSV");

    auto* nature = app.add_subcommand("nature", "Solution-set type of the n-cycle system");
    nature->add_option("--seq", seq_text, "Symbol sequence")->required();

    auto* classify = app.add_subcommand("classify", "Border-collision type of the fixed point at mu = 0");

    int sl = 0, sm = 0, sn = 0;
    auto add_lmn = [&](CLI::App* sub) {
        sub->add_option("--l", sl, "Points left of the switching manifold")->required();
        sub->add_option("--m", sm, "Rotation numerator")->required();
        sub->add_option("--n", sn, "Period")->required();
    };
    auto* check = app.add_subcommand("check-shrink", "Certify a shrinking point of S[l,m,n] (l = n-1: terminating)");
    add_lmn(check);

    int tau_grid = 64, theta_grid = 100;
    auto* poly = app.add_subcommand("polygon", "Invariant polygon at a certified shrinking point");
    add_lmn(poly);
    poly->add_option("--tau", tau_grid, "Samples of w(tau)")->capture_default_str();
    poly->add_option("--theta", theta_grid, "Angles for the rigid-rotation check")->capture_default_str();

    std::string guess_text, grid_csv;
    auto* find = app.add_subcommand("find-shrink", "Newton search for a shrinking point in a family");
    find->add_option("--l", sl, "Points left of the switching manifold");
    find->add_option("--m", sm, "Rotation numerator")->required();
    find->add_option("--n", sn, "Period")->required();
    find->add_option("--guess", guess_text, "Initial p1,p2");
    find->add_option("--from-grid", grid_csv, "Locate candidates from a scan CSV instead of --guess");

    double radius = 1e-3;
    auto* unf = app.add_subcommand("unfold", "Two-parameter unfolding at a shrinking point");
    add_lmn(unf);
    unf->add_option("--at", guess_text, "p1,p2 at (or near) the shrinking point")->required();
    unf->add_option("--radius", radius, "Chart radius")->capture_default_str();

    bool multi_start = false;
    auto* scan = app.add_subcommand("scan", "Label attractors on a parameter grid");
    scan->add_flag("--multi-start", multi_start, "Also start from both fixed points with seeded offsets");

    std::string from_text;
    int max_steps = 400;
    auto* bnd = app.add_subcommand("boundaries", "Trace the four tongue boundaries of S[l,m,n]");
    add_lmn(bnd);
    bnd->add_option("--from", from_text, "Seed p1,p2 where the S-cycle is admissible")->required();
    bnd->add_option("--steps", max_steps, "Continuation steps per direction")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        const Tolerances tol = g.tol();
        if (count->parsed()) {
            if (cnt_table) {
                std::string csv = "n,primitive,rotational\n";
                for (int k = 1; k <= cnt_n; ++k) {
                    csv += std::to_string(k) + ',' + std::to_string(count_primitive(k)) + ',' +
                           std::to_string(count_rotational(k)) + '\n';
                }
                std::fputs(csv.c_str(), stdout);
                emit(g, csv);
            } else {
                std::printf("primitive: %llu\nrotational: %llu\n",
                            static_cast<unsigned long long>(count_primitive(cnt_n)),
                            static_cast<unsigned long long>(count_rotational(cnt_n)));
            }
            return kOk;
        }
        if (rot->parsed()) {
            std::printf("%s\n", rotational(rl, rm, rn).str().c_str());
            return kOk;
        }
        if (params->parsed()) {
            const auto p = rotational_params(SymbolSequence::parse(seq_text));
            if (!p) {
                std::printf("not rotational\n");
                return kNegative;
            }
            std::printf("l: %d\nm: %d\nn: %d\nd: %d\n", p->l, p->m, p->n, p->d);
            return kOk;
        }
        if (solve->parsed()) {
            const MapConfig cfg = load_map(g);
            const CycleSolution c = solve_cycle(cfg.map, mu_of(g, cfg), SymbolSequence::parse(seq_text), tol);
            print_cycle(c);
            emit(g, write_cycle_csv(c));
            if (!verify_path.empty()) {
                const CycleTable t = read_cycle_csv(read_text_file(verify_path));
                double dev = t.sequence == c.sequence ? 0.0 : std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < t.points.size() && i < c.points.size(); ++i) {
                    dev = std::max(dev, norm_inf(sub(t.points[i], c.points[i])));
                }
                std::printf("verify_deviation: %s\n", format_double(dev).c_str());
                if (!(dev <= 1e-9 * std::max(1.0, norm_inf(c.points[0])))) return kNegative;
            }
            return c.admissibility.ok() ? kOk : kNegative;
        }
        if (nature->parsed()) {
            const MapConfig cfg = load_map(g);
            const SolutionNature sn2 = solution_nature(cfg.map, mu_of(g, cfg), SymbolSequence::parse(seq_text), tol);
            std::printf("cell: %s\ndet_IminusM: %s\ndet_P: %s\n", to_string(sn2.cell).c_str(),
                        format_double(sn2.det_IminusM).c_str(), format_double(sn2.det_P).c_str());
            return sn2.cell == SolutionCell::NoSolution ? kNegative : kOk;
        }
        if (classify->parsed()) {
            const MapConfig cfg = load_map(g);
            const BorderCollision bc = classify_border_collision(cfg.map, tol);
            std::printf("border_collision: %s\n", to_string(bc).c_str());
            for (Symbol side : {Symbol::L, Symbol::R}) {
                const Spectrum sp = eigenvalues(cfg.map.branch(side));
                std::printf("real_multipliers_above_one_%c: %d\n", static_cast<char>(side),
                            sp.count_real_greater_than_one());
            }
            return bc == BorderCollision::Degenerate ? kNegative : kOk;
        }
        if (check->parsed()) {
            const MapConfig cfg = load_map(g);
            const double mu = mu_of(g, cfg);
            const ShrinkVerdict v = check_any(cfg.map, mu, sl, sm, sn, tol);
            const int rc = print_verdict(v);
            if (rc == kOk) {
                const CorollaryReport cr = corollary_check(cfg.map, mu, make_rotational_params(sl, sm, sn), tol);
                std::printf("corollary_det_IminusM: %s\n", format_double(cr.det_IminusM).c_str());
                for (std::size_t i = 0; i < cr.det_P.size(); ++i) {
                    std::printf("corollary_det_P_%zu: %s\n", i, format_double(cr.det_P[i]).c_str());
                }
                std::printf("corollary_all_singular: %s\n", cr.all_singular() ? "true" : "false");
                emit(g, write_cycle_csv(std::get<ShrinkingPointCertificate>(v).p_orbit));
            }
            return rc;
        }
        if (poly->parsed()) {
            const MapConfig cfg = load_map(g);
            const ShrinkVerdict v = check_any(cfg.map, mu_of(g, cfg), sl, sm, sn, tol);
            if (!granted(v)) return print_verdict(v);
            const auto& cert = std::get<ShrinkingPointCertificate>(v);
            const Polygon pg = polygon(cert, tau_grid, tol);
            double wrap = 0.0;
            bool virt = false;
            for (const SampledCycle& s : pg.sampled_cycles) {
                wrap = std::max(wrap, s.wrap_residual);
                virt = virt || s.admissibility == AdmissibilityKind::Virtual;
            }
            const double dev = rigid_rotation_check(cert, pg, theta_grid);
            std::printf("vertices: %zu\n", pg.vertices.size());
            for (std::size_t j = 0; j < pg.vertices.size(); ++j) {
                std::printf("v%zu: %s\n", j, join(pg.vertices[j]).c_str());
            }
            std::printf("planarity_defect: %s\n", format_double(pg.planarity_defect).c_str());
            std::printf("min_edge_separation: %s\n", format_double(pg.min_edge_separation).c_str());
            std::printf("max_wrap_residual: %s\n", format_double(wrap).c_str());
            std::printf("any_virtual_sample: %s\n", virt ? "true" : "false");
            std::printf("rigid_rotation_deviation: %s\n", format_double(dev).c_str());
            if (pg.construction_residual) {
                std::printf("construction_residual: %s\n", format_double(*pg.construction_residual).c_str());
            }
            std::string csv = "index";
            for (std::size_t k = 0; k < cfg.map.dim(); ++k) csv += ",x" + std::to_string(k + 1);
            csv += '\n';
            for (std::size_t j = 0; j < pg.vertices.size(); ++j) {
                csv += std::to_string(j);
                for (double x : pg.vertices[j]) csv += ',' + format_double(x);
                csv += '\n';
            }
            emit(g, csv);
            return pg.self_intersecting || virt ? kNegative : kOk;
        }
        if (find->parsed()) {
            const FamilySpec spec = load_family_spec(g);
            const MapFamily fam = spec.family();
            if (!grid_csv.empty()) {
                const TongueGrid grid = read_grid_csv(read_text_file(grid_csv));
                const auto cands = locate_shrinking_points(fam, grid, sm, sn, tol);
                int found = 0;
                for (const ShrinkCandidate& c : cands) {
                    std::printf("candidate: %s, %s width %s: %s\n", format_double(c.guess[0]).c_str(),
                                format_double(c.guess[1]).c_str(), format_double(c.width).c_str(), c.note.c_str());
                    if (c.search) {
                        ++found;
                        const auto& cert = std::get<ShrinkingPointCertificate>(c.search->verdict);
                        std::printf("  xi: %s, %s  l: %d  residual: %s\n", format_double(c.search->xi[0]).c_str(),
                                    format_double(c.search->xi[1]).c_str(), cert.params.l,
                                    format_double(c.search->residual).c_str());
                    }
                }
                return found > 0 ? kOk : kNegative;
            }
            if (guess_text.empty() || sl == 0) throw UsageError("find-shrink needs --l and --guess (or --from-grid)");
            const auto gv = parse_numbers(guess_text, 2, "--guess");
            const ShrinkSearch s = find_shrinking_point(fam, make_rotational_params(sl, sm, sn), {gv[0], gv[1]}, {}, tol);
            std::printf("xi: %s, %s\niterations: %d\nresidual: %s\n", format_double(s.xi[0]).c_str(),
                        format_double(s.xi[1]).c_str(), s.iterations, format_double(s.residual).c_str());
            return print_verdict(s.verdict);
        }
        if (unf->parsed()) {
            const FamilySpec spec = load_family_spec(g);
            const MapFamily fam = spec.family();
            const auto at = parse_numbers(guess_text, 2, "--at");
            const RotationalParams p = make_rotational_params(sl, sm, sn);
            const ShrinkSearch s = find_shrinking_point(fam, p, {at[0], at[1]}, {}, tol);
            if (!granted(s.verdict)) return print_verdict(s.verdict);
            UnfoldOptions uo;
            uo.radius = radius;
            const Unfolding u = unfold(fam, s.xi, p, uo, tol);
            std::fputs(format_unfolding(u).c_str(), stdout);
            std::vector<BoundaryCurve> curves;
            int id = 0;
            for (const auto& [name, pts] : u.boundary_samples) {
                BoundaryCurve c;
                c.curve_id = id++;
                c.index = name.ends_with("_0") ? 0 : static_cast<long long>(p.l) * p.d % p.n;
                for (const ChartPoint& cp : pts) c.points.push_back({cp.xi, 0.0});
                curves.push_back(std::move(c));
                std::printf("curve %d: %s\n", id - 1, name.c_str());
            }
            emit(g, write_curve_csv(curves));
            return u.allk_pattern && u.g1_coeff < 0 && u.g2_coeff < 0 ? kOk : kNegative;
        }
        if (scan->parsed()) {
            const FamilySpec spec = load_family_spec(g);
            const auto [w, h] = parse_grid(g.grid);
            ScanOptions so;
            so.n_max = g.nmax;
            so.threads = g.threads;
            so.seed = g.seed;
            so.multi_start = multi_start;
            so.tol = tol;
            const TongueGrid grid = scan_tongues(spec.family(), w, h, so);
            std::map<std::string, int> tally;
            for (const CellResult& c : grid.cells) {
                std::string key = to_string(c.label);
                if (c.label == CellLabel::Periodic) key += " " + std::to_string(c.m) + "/" + std::to_string(c.n);
                ++tally[key];
            }
            std::printf("cells: %d x %d\n", w, h);
            for (const auto& [k, v] : tally) std::printf("%s: %d\n", k.c_str(), v);
            emit(g, write_grid_csv(grid));
            return kOk;
        }
        if (bnd->parsed()) {
            const FamilySpec spec = load_family_spec(g);
            const auto seed = parse_numbers(from_text, 2, "--from");
            BoundaryOptions bo;
            bo.max_steps = max_steps;
            bo.tol = tol;
            const auto curves =
                tongue_boundaries(spec.family(), make_rotational_params(sl, sm, sn), {seed[0], seed[1]}, bo);
            for (const BoundaryCurve& c : curves) {
                double worst = 0.0;
                for (const CurvePoint& q : c.points) worst = std::max(worst, std::abs(q.s_residual));
                std::printf("curve %d: index %lld, %zu points, max |s| %s, stopped %s\n", c.curve_id, c.index,
                            c.points.size(), format_double(worst).c_str(), c.stop_reason.c_str());
            }
            emit(g, write_curve_csv(curves));
            return kOk;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const EvalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const ContinuityViolated& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const BadL& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const NotCoprime& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const SeedNotAdmissible& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNegative;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
    return kUsage;
}
