#pragma once

// Resonance-tongue diagrams: per-cell attractor labelling on a parameter
// grid, continuation of tongue boundaries, and shrinking-point candidates
// from tongue-width minima.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lenschain/shrink.hpp"
#include "lenschain/symseq.hpp"
#include "lenschain/tolerances.hpp"

namespace lenschain {

enum class CellLabel { FixedL, FixedR, Periodic, NonRotational, None, Diverged };

std::string to_string(CellLabel c);
CellLabel cell_label_from_string(std::string_view s);

struct CellResult {
    CellLabel label = CellLabel::None;
    int l = 0;
    int m = 0;
    int n = 0;
    double margin = 0.0;          // min |s_i| over the detected orbit
    double max_multiplier = 0.0;  // spectral radius of the re-solved cycle's stability matrix
};

struct TongueGrid {
    int width = 0;   // cells along p1
    int height = 0;  // cells along p2
    std::array<double, 4> box{};
    std::vector<CellResult> cells;  // row-major: index = j * width + i, j along p2

    double p1(int i) const { return box[0] + (i + 0.5) * (box[1] - box[0]) / width; }
    double p2(int j) const { return box[2] + (j + 0.5) * (box[3] - box[2]) / height; }
    const CellResult& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * width + i]; }
};

struct ScanOptions {
    int n_max = 30;
    int transient = 10000;
    double recurrence_tol = 1e-9;
    double escape_factor = 1e6;  // escape radius = escape_factor * |mu|
    int threads = 1;
    /// Also start from both fixed points with seeded random offsets; the
    /// first validated stable cycle wins.
    bool multi_start = false;
    std::uint64_t seed = 0;
    Tolerances tol;
};

/// Labels one parameter point.
CellResult classify_cell(const PwaMap& map, double mu, const ScanOptions& opts);

/// Throws ConfigError for an empty grid or n_max < 1.
TongueGrid scan_tongues(const MapFamily& family, int width, int height, const ScanOptions& opts = {});

/// Header `p1,p2,label,l,m,n,margin,max_multiplier`, one row per cell, %.17g.
std::string write_grid_csv(const TongueGrid& g);
TongueGrid read_grid_csv(std::string_view text);

struct CurvePoint {
    Point2 xi{};
    double s_residual = 0.0;
};

struct BoundaryCurve {
    int curve_id = 0;
    long long index = 0;  // cycle point on the switching manifold
    std::vector<CurvePoint> points;
    std::string stop_reason;
};

struct BoundaryOptions {
    double step = 0.0;  // parameter-space step; 0 = 1/400 of the box diagonal
    int max_steps = 400;
    double corrector_tol = 1e-12;
    Tolerances tol;
};

/// Traces {s_k = 0} for k in {0, -d, (l-1)d, ld} of the S[l,m,n]-cycle from a
/// seed where that cycle is admissible. Each curve goes both ways from the
/// projected seed and stops at the step budget, the box edge, a crossing of
/// det(I - M_S) = 0, or where another cycle point leaves its side.
/// Throws SeedNotAdmissible or ContinuationStalled.
std::vector<BoundaryCurve> tongue_boundaries(const MapFamily& family, const RotationalParams& p, Point2 seed,
                                             const BoundaryOptions& opts = {});

/// Header `curve_id,index,p1,p2,s_residual`.
std::string write_curve_csv(const std::vector<BoundaryCurve>& curves);
std::vector<BoundaryCurve> read_curve_csv(std::string_view text);

struct WidthSample {
    double arclength = 0.0;
    double width = 0.0;
    Point2 a{};  // point on the first curve
    Point2 b{};  // nearest point on the second curve
};

struct WidthProfile {
    std::vector<WidthSample> samples;
    std::vector<std::size_t> minima;  // indices into samples
    double max_width = 0.0;
};

/// Resamples `first` by arclength (`samples` points), pairs each point with
/// the nearest point of `second`, and flags local width minima below
/// `threshold * max_width`. A flat minimum is reported at its middle sample.
WidthProfile width_profile(const std::vector<Point2>& first, const std::vector<Point2>& second, int samples = 200,
                           double threshold = 0.1);

/// Left and right edges (per p2 row) of the cells labelled Periodic with the
/// given rotation number, as polylines ordered by p2. Rows inside the tongue's
/// p2 span that hold no such cell get a zero-width point interpolated between
/// the neighbouring row centres.
std::array<std::vector<Point2>, 2> tongue_edges(const TongueGrid& g, int m, int n);

struct ShrinkCandidate {
    Point2 guess{};
    double width = 0.0;
    std::optional<ShrinkSearch> search;
    std::string note;
};

/// scan -> tongue edges -> width minima -> find_shrinking_point, trying the
/// l values seen in the tongue (and their neighbours) at each candidate.
std::vector<ShrinkCandidate> locate_shrinking_points(const MapFamily& family, const TongueGrid& g, int m, int n,
                                                     const Tolerances& tol = {});

}  // namespace lenschain
