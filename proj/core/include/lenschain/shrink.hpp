#pragma once

// Shrinking points of resonance tongues: certificates for the terminating
// and non-terminating cases, the invariant polygon of S-cycles, Newton
// location in two-parameter families and the local unfolding.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lenschain/cycles.hpp"
#include "lenschain/pwamap.hpp"
#include "lenschain/symseq.hpp"
#include "lenschain/tolerances.hpp"

namespace lenschain {

enum class ShrinkKind { NonTerminating, Terminating };

std::string to_string(ShrinkKind k);

/// Sequences attached to S = S[l,m,n].
struct ShrinkSequences {
    SymbolSequence s;      // S
    SymbolSequence check;  // S flipped at 0
    SymbolSequence hat;    // S flipped at l*d
};

ShrinkSequences shrink_sequences(const RotationalParams& p);

class ShrinkingPointCertificate {
public:
    ShrinkingPointCertificate(PwaMap map, double mu) : map(std::move(map)), mu(mu) {}

    PwaMap map;
    double mu;
    ShrinkKind kind = ShrinkKind::NonTerminating;
    RotationalParams params;
    CycleSolution p_orbit;  // the S-check cycle p_0 .. p_{n-1}
    Vector t_values;        // first components of p_i
    std::map<std::string, double> residuals;
    /// |t_0|, |t_{ld}| within the band.
    bool zeros_ok = false;
    /// t_d, t_{(l-1)d} < 0 < t_{(l+1)d}, t_{-d} (terminating: t_{id} < 0 for i != 0, -1).
    bool signs_ok = false;
    /// Smallest period of the p-orbit within tolerance; equals n for a genuine certificate.
    int minimal_period = 0;

    /// t_{i*d} with the index taken mod n.
    double t_at(long long i) const;
};

struct FailureReport {
    std::string clause;
    double residual = 0.0;
    std::string message;
};

using ShrinkVerdict = std::variant<FailureReport, ShrinkingPointCertificate>;

inline bool granted(const ShrinkVerdict& v) { return std::holds_alternative<ShrinkingPointCertificate>(v); }

/// Clauses, in order: preconditions, det_P_S, det_P_S_l1d, det_IminusM_check,
/// det_IminusM_hat, p_orbit. The first failing clause is reported.
ShrinkVerdict check_nonterminating(const PwaMap& map, double mu, int l, int m, int n, const Tolerances& tol = {});

/// l = n - 1. Clauses: preconditions, eigenvalue_gap, fixed_point, det_IminusM_check, eq_sid.
ShrinkVerdict check_terminating(const PwaMap& map, double mu, int m, int n, const Tolerances& tol = {});

/// s_{id} = s* (1 - cos(2 pi (i + 1/2) / n) / cos(pi / n)) for the terminating p-orbit.
double terminating_s(double s_star, long long i, int n);

struct SampledCycle {
    double tau = 0.0;
    std::vector<Vector> points;  // w_0(tau) .. w_{n-1}(tau)
    double wrap_residual = 0.0;  // max_i ||f_{S_i}(w_i) - w_{i+1}||_inf / max(1, ||w||_inf)
    AdmissibilityKind admissibility = AdmissibilityKind::Admissible;
};

struct Polygon {
    std::vector<Vector> vertices;  // p_{jd}, j = 0..n-1
    std::vector<SampledCycle> sampled_cycles;
    double planarity_defect = 0.0;
    /// Smallest distance between non-adjacent edges.
    double min_edge_separation = 0.0;
    bool self_intersecting = false;
    /// Terminating only: ||constructed orbit - solved p-orbit||_inf.
    std::optional<double> construction_residual;
};

/// w(tau) = tau p + (1 - tau) p_d on `tau_grid_size` points of [0, 1].
/// Throws DegenerateCertificate if p = p_d.
Polygon polygon(const ShrinkingPointCertificate& cert, int tau_grid_size, const Tolerances& tol = {});

/// RMS distance of the points from their best-fit plane.
double planarity_defect(const std::vector<Vector>& points);

/// Position on the polygon at angle theta (continuous, z(2 pi j / n) = p_{jd}).
Vector polygon_point(const Polygon& poly, double theta);

/// Angle of the polygon point closest to x.
double polygon_angle(const Polygon& poly, std::span<const double> x);

/// max |g(theta) - theta - 2 pi m / n| (mod 2 pi) over `grid` angles.
double rigid_rotation_check(const ShrinkingPointCertificate& cert, const Polygon& poly, int grid = 100);

struct CorollaryReport {
    double det_IminusM = 0.0;
    bool singular_IminusM = false;
    std::vector<double> det_P;  // det P_{S^(i)}, i = 0..n-1
    std::vector<bool> singular_P;
    /// Terminating only: index excluded because det P_{S^(-d)} vanishes quadratically.
    std::optional<long long> excluded_index;

    bool all_singular() const;
};

CorollaryReport corollary_check(const PwaMap& map, double mu, const RotationalParams& p, const Tolerances& tol = {});

struct MapFamily {
    std::function<PwaMap(double, double)> builder;
    double mu = 1.0;
    std::array<double, 4> box{0.0, 1.0, 0.0, 1.0};  // p1_min, p1_max, p2_min, p2_max

    PwaMap at(double p1, double p2) const { return builder(p1, p2); }
    bool contains(double p1, double p2) const;
};

using Point2 = std::array<double, 2>;

struct NewtonOptions {
    int max_iterations = 50;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_halvings = 20;
};

struct ShrinkSearch {
    Point2 xi{};
    int iterations = 0;
    double residual = 0.0;  // max(|det P_S|, |det P_{S^((l-1)d)}|) at xi
    ShrinkVerdict verdict;
};

/// Damped Newton on (det P_S, det P_{S^((l-1)d)}) with a central-difference
/// Jacobian. Throws SingularJacobian or NoConvergence.
ShrinkSearch find_shrinking_point(const MapFamily& family, const RotationalParams& p, Point2 guess,
                                  const NewtonOptions& opts = {}, const Tolerances& tol = {});

/// max(|det P_S|, |det P_{S^((l-1)d)}|) at xi.
double shrink_residual(const MapFamily& family, const RotationalParams& p, Point2 xi);

struct ChartPoint {
    double eta = 0.0;
    double nu = 0.0;
    Point2 xi{};
};

struct CycleProbe {
    AdmissibilityKind admissibility = AdmissibilityKind::Virtual;
    bool stable = false;
    int real_multipliers_above_one = 0;
    double spectral_radius = 0.0;
};

struct RegionProbe {
    ChartPoint where;
    CycleProbe s;
    CycleProbe check;
    CycleProbe hat;
};

struct QuadraticFit {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double rms = 0.0;
};

/// Least squares y = c0 + c1 x + c2 x^2.
QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y);

struct Unfolding {
    Point2 xi_star{};
    RotationalParams params;
    double radius = 0.0;
    /// d(eta, nu) / d(xi) at xi_star.
    std::array<double, 4> chart_jacobian{};
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
    /// Quadratic coefficient of eta = g1(nu) on {s-hat_{ld} = 0} and nu = g2(eta) on {s-hat_0 = 0}.
    double g1_coeff = 0.0, g2_coeff = 0.0;
    double g1_linear = 0.0, g2_linear = 0.0;
    double g1_predicted = 0.0, g2_predicted = 0.0;  // -k2/(k1 t_{(l+1)d}), -k1/(k2 t_{-d})
    double h_slope = 0.0;
    std::map<long long, double> q_slopes;  // i -> -k1 t_{(i+1)d} / (k2 t_{id})
    /// Labelled curves: check_0, check_ld (the chart axes), hat_0, hat_ld.
    std::map<std::string, std::vector<ChartPoint>> boundary_samples;
    /// max |s-check| along the traced axes (chart consistency).
    double axis_residual = 0.0;
    std::vector<RegionProbe> psi1;
    std::vector<RegionProbe> psi2;
    Vector t_values;
    /// sgn k1 = sgn k2 = -sgn k3 = sgn k4.
    bool allk_pattern = false;
    /// k1 k2 < 0 as drawn in the schematic.
    bool schematic_pattern = false;
    std::string sign_note;
};

struct UnfoldOptions {
    double radius = 1e-3;
    int samples = 11;  // per traced curve, at least 9
    double tangency_c = 10.0;
};

/// Unfolds a non-terminating shrinking point at xi_star. Throws DegenerateUnfolding.
Unfolding unfold(const MapFamily& family, Point2 xi_star, const RotationalParams& p, const UnfoldOptions& opts = {},
                 const Tolerances& tol = {});

struct VirtualCurve {
    long long index = 0;
    std::vector<ChartPoint> samples;
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;
    /// Admissibility of the S-cycle at each sample.
    std::vector<AdmissibilityKind> verdicts;
};

/// Traces {det P_{S^(id)} = 0} as nu = q_i(eta). Throws DegenerateUnfolding.
VirtualCurve virtual_curves(const MapFamily& family, Point2 xi_star, const RotationalParams& p, long long i,
                            double radius, const Tolerances& tol = {});

/// Indices i for which q_i exists (i != 0, l-1, l, -1 mod n).
std::vector<long long> virtual_curve_indices(const RotationalParams& p);

std::string format_certificate(const ShrinkingPointCertificate& c);
std::string format_failure(const FailureReport& f);
std::string format_unfolding(const Unfolding& u);

}  // namespace lenschain
