#pragma once

// Randomised corpora for the cycle-algebra identities. Shared by the unit
// tests and the acceptance binary so both judge the same instances.

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct IdentitySuiteReport {
    int instances = 0;
    int singular_branch_instances = 0;
    double max_flip_identity_err = 0.0;   // det(I-M_S) s_0(S) vs the S_0-flipped system
    double max_cyclic_det_err = 0.0;      // det(I - M) over cyclic shifts
    bool p_independent_of_s0 = true;      // bit-exact
    bool m_columns_shared = true;         // bit-exact, columns 2..N
    double max_stacked_err = 0.0;         // solve_cycle vs stacked elimination

    int on_manifold = 0;
    int off_manifold = 0;
    int biconditional_failures = 0;

    int no_solution = 0;
    int no_solution_failures = 0;
    double min_lsq_residual = 0.0;

    std::vector<std::string> notes;
};

IdentitySuiteReport run_identity_suite(std::uint64_t seed, int instances = 240, int corpus_size = 60);

}  // namespace oracle
