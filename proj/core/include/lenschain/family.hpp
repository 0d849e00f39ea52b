#pragma once

// Two-parameter map families written as expressions in p1 and p2:
//   N   = 2
//   A_L = 6/5*cos(2*pi*p1), 1, -9/25, 0
//   A_R = 2/p2*cos(2*pi*p1), 1, -1/p2^2, 0
//   b   = 1, 0
//   mu  = 1
//   box = 0.275, 0.295, 0.65, 0.9     (p1_min, p1_max, p2_min, p2_max)

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lenschain/expr.hpp"
#include "lenschain/pwamap.hpp"
#include "lenschain/shrink.hpp"

namespace lenschain {

struct FamilySpec {
    std::size_t n = 0;
    std::vector<Expression> a_left;   // row-major, n*n
    std::vector<Expression> a_right;  // row-major, n*n
    std::vector<Expression> b;
    double mu = 1.0;
    std::array<double, 4> box{0.0, 1.0, 0.0, 1.0};
    std::optional<std::string> built_in;

    /// Throws EvalError on a non-finite entry, ContinuityViolated never (checked at parse).
    PwaMap instantiate(double p1, double p2) const;

    MapFamily family() const;
};

/// Throws ParseError, ConfigError, ContinuityViolated, or EvalError (corner check).
FamilySpec parse_family(std::string_view text);

/// Built-in families by name; currently only "fig1". Throws ConfigError.
FamilySpec builtin_family(std::string_view name);

/// A built-in name or a path to a family file.
FamilySpec load_family(const std::string& name_or_path);

/// Replaces the box and re-runs the corner check.
void set_box(FamilySpec& spec, const std::array<double, 4>& box);

}  // namespace lenschain
