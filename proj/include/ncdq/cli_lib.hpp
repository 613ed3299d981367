#pragma once
/* Front end: JSON quiver specs, job configuration, command dispatch, and
 * deterministic rendering (human tables or versioned structured output). */

#include "ncdq/deformation_calculus.hpp"
#include "ncdq/koszul.hpp"
#include "ncdq/periodicity.hpp"

#include <iosfwd>

namespace ncdq {

struct JobConfig {
    std::string input;
    std::string command;
    int N = -1, J = -1, D = -1, L = -1; /* window overrides; -1 = keep spec */
    int p = 0;                          /* period; 0 = scan 1..P */
    int P = 4;
    std::string field;            /* "", "Q" or "F<p>" */
    std::string format = "table"; /* table | structured */
    std::uint64_t seed = 99371;   /* fixed default: identical runs, identical bytes */
    long budget = 60000;
};

/* schema errors carry line/field diagnostics; code 0x80 */
QuiverSpec parse_spec(const std::string& path);
QuiverSpec parse_spec_text(const std::string& text, const std::string& name);

/* 0 = trusted checks pass, 1 = invariant failure, 2 = input, 3 = window */
int run_command(const JobConfig& cfg, std::ostream& out);

int exit_code_for(const Err& e);

/* the algebra as a one-degree dga window (weight-graded when A is graded);
 * weight cap W (<= A's own window) */
DgaWindow algebra_dga(const Algebra& A, int W);

} // namespace ncdq
