#pragma once

// Periodic solutions with a prescribed symbol sequence S: the stability
// matrix M_S, border-collision matrix P_S, the n-cycle solution system
//   (I - M_S) x0 = mu P_S b
// and admissibility of the resulting orbit.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenschain/pwamap.hpp"
#include "lenschain/smallmat.hpp"
#include "lenschain/symseq.hpp"
#include "lenschain/tolerances.hpp"

namespace lenschain {

/// M_S = A_{S_{n-1}} ... A_{S_0}, multiplied so that the last step is
/// (A_{S_{n-1}} ... A_{S_1}) * A_{S_0}; M_S and M_{S^0bar} then share
/// columns 2..N bit-for-bit.
Matrix stability_matrix(const PwaMap& map, const SymbolSequence& s);

/// P_S = I + A_{S_{n-1}} + A_{S_{n-1}} A_{S_{n-2}} + ... + A_{S_{n-1}} ... A_{S_1}.
/// Independent of S_0.
Matrix bc_matrix(const PwaMap& map, const SymbolSequence& s);

enum class AdmissibilityKind { Admissible, Boundary, Virtual };

std::string to_string(AdmissibilityKind k);

struct Admissibility {
    AdmissibilityKind kind = AdmissibilityKind::Admissible;
    std::vector<std::size_t> violating;  // strict sign mismatches
    std::vector<std::size_t> boundary;   // |s_i| within the band
    /// min |s_i| over the off-manifold points (+inf if there are none).
    double margin = 0.0;

    bool ok() const noexcept { return kind != AdmissibilityKind::Virtual; }
};

/// Checks S_i = L where s_i < 0 and S_i = R where s_i > 0. Points with
/// |s_i| <= band * max(1, ||x_i||) are boundary points and satisfy either symbol.
Admissibility admissibility(std::span<const Vector> points, const SymbolSequence& s, double band);

struct CycleSolution {
    SymbolSequence sequence;
    double mu = 0.0;
    std::vector<Vector> points;  // x_0 .. x_{n-1}
    Vector s_values;
    Admissibility admissibility;
    Spectrum multipliers;  // of M_S
    double det_IminusM = 0.0;
    double det_P = 0.0;
    /// ||x_n - x_0||_inf / max(1, ||x_0||_inf) after forward reconstruction.
    double wrap_residual = 0.0;

    /// Every multiplier strictly inside the unit circle.
    bool is_stable() const noexcept { return multipliers.spectral_radius() < 1.0; }
};

/// Solves the n-cycle solution system and reconstructs the orbit by forward
/// branch iteration. Throws SingularSystem when I - M_S is singular.
CycleSolution solve_cycle(const PwaMap& map, double mu, const SymbolSequence& s, const Tolerances& tol = {});

/// x_0 .. x_n with x_{i+1} = mu b + A_{S_i} x_i.
std::vector<Vector> orbit_under(const PwaMap& map, double mu, const SymbolSequence& s, std::span<const double> x0);

/// The n-th iterate along S as a map of the same form: M (S_0 = L) for s <= 0,
/// M (S_0 = R) for s >= 0, offset P_S b. Evaluate it with the same mu.
PwaMap nth_iterate_map(const PwaMap& map, const SymbolSequence& s);

enum class SolutionCell { UniqueOffManifold, NoSolution, UniqueOnManifold, AffineFamily, Degenerate };

std::string to_string(SolutionCell c);

struct SolutionNature {
    SolutionCell cell = SolutionCell::Degenerate;
    double det_IminusM = 0.0;
    double det_P = 0.0;
    bool singular_IminusM = false;
    bool singular_P = false;
};

/// Places S in the (det(I - M_S), det(P_S)) grid; Degenerate when mu = 0 or rho^T b = 0.
SolutionNature solution_nature(const PwaMap& map, double mu, const SymbolSequence& s, const Tolerances& tol = {});

/// Solution set of a singular but consistent system: particular + span(directions).
struct AffineFamilySolution {
    Vector particular;
    std::vector<Vector> directions;
    double residual = 0.0;  // ||(I - M_S) x - mu P_S b||_inf of the particular solution
};

AffineFamilySolution affine_family(const PwaMap& map, double mu, const SymbolSequence& s, double rank_tol = 1e-8);

/// CSV with a `# key = value` header block, then `index,s,x1..xN`.
std::string write_cycle_csv(const CycleSolution& c);

struct CycleTable {
    SymbolSequence sequence;
    double mu = 0.0;
    double det_IminusM = 0.0;
    double det_P = 0.0;
    std::vector<Vector> points;
};

CycleTable read_cycle_csv(std::string_view text);

}  // namespace lenschain
