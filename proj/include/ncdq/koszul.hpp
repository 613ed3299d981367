#pragma once
/* Bar and cobar constructions and the Koszul dual, split per (degree,
 * weight).  The weight grading is what keeps every cell finite: bar words of
 * weight <= W have bounded length because letters carry positive weight. */

#include "ncdq/dg_core.hpp"

namespace ncdq {

/* Augmented dga whose weight-0 part is exactly the unit line: one cell at
 * (0, 0) spanning the unit.  Ungraded finite local inputs (all cells at
 * weight 0) are regraded by the radical filtration when that filtration is
 * multiplicative on the basis; otherwise augment refuses. */
struct AugmentedDgaWindow {
    DgaWindow a;
    int W = 0; /* weight cap of the carried window */
};

AugmentedDgaWindow augment(const DgaWindow& a, int W);

/* Tensor coalgebra on the shifted augmentation ideal; cells are bar words
 * [a_1|...|a_n], each letter a cell of the source dga, word degree
 * sum(deg - 1), word weight sum(wt).  d = letterwise d + merges. */
struct BarWord {
    std::vector<std::pair<NW, int>> letters;
};

struct CoalgebraWindow {
    Field f;
    GradedWindow g;
    std::map<NW, SparseMatrix> d;             /* same layout as ComplexWindow */
    std::map<NW, std::vector<BarWord>> words; /* parallel to g.cells */
    int W = 0;
};

CoalgebraWindow bar(const AugmentedDgaWindow& a, int W);

struct CoalgebraReport {
    bool ok = true;
    std::vector<std::string> violations;
    long checks = 0;
};

/* counit laws, coassociativity of deconcatenation, coderivation rule, d^2. */
CoalgebraReport check_coalgebra(const CoalgebraWindow& c, long budget = 200000);

/* Graded dual of the bar construction: cells are the same words, degree
 * negated, product = (signed) concatenation, differential the (signed)
 * transpose. */
DgaWindow koszul_dual(const AugmentedDgaWindow& a, int W);

/* Tensor algebra on the deshifted coaugmentation coideal. */
DgaWindow cobar(const CoalgebraWindow& c, int W);

struct DoubleDualReport {
    bool ok = false;
    std::string status;
    std::map<NW, int> lhs, rhs; /* H(A) vs H(A^{!!}) dims, common window */
    std::vector<std::string> notes;
};

/* Requires a nonpositive window with local H^0 and finite cells; compares
 * cohomology dimensions per bucket on the trusted common window. */
DoubleDualReport double_dual_compare(const AugmentedDgaWindow& a, int W, int nmin, int nmax);

} // namespace ncdq
