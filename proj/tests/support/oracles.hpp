#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls the library's own solvers; the point is to disagree loudly if the
// library is wrong.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lenschain/pwamap.hpp"
#include "lenschain/symseq.hpp"

namespace oracle {

/// Lexicographically minimal representatives of the primitive binary words
/// of length n (L < R), found by enumerating all 2^n words.
std::vector<std::string> primitive_classes(int n);

/// x_0 .. x_{n-1} stacked, from Gaussian elimination (partial pivoting) on
/// the nN x nN system x_{i+1} - A_{S_i} x_i = mu b.
std::vector<std::vector<double>> stacked_cycle(const lenschain::PwaMap& map, double mu,
                                               const lenschain::SymbolSequence& s);

/// min_x ||K x - r|| for the same stacked system, by modified Gram-Schmidt
/// with reorthogonalisation; columns that collapse below `drop` times their
/// original norm are discarded.
double stacked_lsq_residual(const lenschain::PwaMap& map, double mu, const lenschain::SymbolSequence& s,
                            double drop = 1e-10);

/// Continuous pair with N(0, scale^2) entries; columns 2..N shared.
lenschain::PwaMap random_map(std::mt19937_64& rng, std::size_t n, double scale = 0.6);

lenschain::SymbolSequence random_sequence(std::mt19937_64& rng, int n);

/// Three-dimensional pentagon example with exact fractions.
lenschain::PwaMap pentagon_map();

/// Hand cofactor expansion, for cross-checking det on small matrices.
double cofactor_det(const std::vector<double>& a, std::size_t n);

}  // namespace oracle

namespace oracle {

/// 2D map whose left branch is the rotation by 2 pi m / n; the right branch
/// has first column (r1, r2). With b = e1 and mu = -1 the left fixed point
/// has s* = -1/2.
lenschain::PwaMap rotation_map(int m, int n, double r1 = -1.3, double r2 = 0.4);

/// Known shrinking point of the 2/7 tongue of the fig1 family (l = 3),
/// frozen from a converged Newton run.
inline constexpr double kFig1Shrink27[2] = {0.28411946168345, 0.75829458421279};

}  // namespace oracle
