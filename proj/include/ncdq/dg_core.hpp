#pragma once
/* Windowed cochain complexes and dgas graded by (cohomological degree,
 * internal weight), their cohomology rings, cones and good truncations.
 * Every bucket carries a completeness flag; a cohomology component is
 * trusted only when the bucket and both degree-neighbours at the same
 * weight are complete.  Buckets absent from the cell table are taken to
 * be structurally zero (and complete); builders must flag buckets that
 * were cut off by the window as incomplete explicitly. */

#include "ncdq/scalars_linalg.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>

namespace ncdq {

using NW = std::pair<int, int>; /* (degree n, weight w) */

struct GradedWindow {
    Field f;
    int nmin = 0, nmax = 0, D = 0;
    std::map<NW, std::vector<std::string>> cells;
    std::map<NW, bool> complete_override; /* buckets cut by the window */
    int dim(NW b) const;
    bool complete(NW b) const;
};

struct ComplexWindow {
    GradedWindow g;
    std::map<NW, SparseMatrix> d; /* (n,w) -> (n+1,w); absent = zero */
    SparseMatrix dmat(NW b) const; /* zero matrix of the right shape if absent */
    void check_d2() const;         /* Err 0x30 on failure */
    SVec apply_d(NW b, const SVec& v) const;
};

struct DgaWindow {
    ComplexWindow c;
    /* product of cell i in bucket a with cell j in bucket b, written in the
     * bucket a+b; only meaningful when a+b is inside the window */
    std::function<SVec(NW a, int i, NW b, int j)> mul;
    SVec unit; /* in bucket (0,0) */
    std::optional<std::vector<Scalar>> aug; /* functional on bucket (0,0) */
    bool in_window(NW b) const;
    SVec mul_sv(NW a, const SVec& x, NW b, const SVec& y) const;
};

struct CohomologyRing {
    Field f;
    std::map<NW, int> dim;
    std::map<NW, std::vector<SVec>> reps; /* canonical cocycle representatives */
    std::map<NW, bool> trusted;
    bool has_product = false;
    /* products of classes on trusted components with trusted target bucket:
     * key (a, i, b, j) -> class coordinates in bucket a+b */
    std::map<std::tuple<NW, int, NW, int>, SVec> product;
    /* per bucket: coboundary reduction and the pivot columns of the chosen
     * representative basis, so cocycles can be written in class coordinates */
    std::map<NW, Rref> bred;
    std::map<NW, std::vector<int>> hpiv;
    std::vector<Scalar> to_classes(NW b, const SVec& cocycle) const; /* Err 0x31 */
    int total_dim(int n) const; /* sum over weights at degree n (trusted only) */
};

CohomologyRing cohomology(const ComplexWindow& c);
CohomologyRing cohomology(const DgaWindow& a);

struct DgaReport {
    bool ok = true;
    std::vector<std::string> violations;
    long checks = 0, skipped = 0;
    bool sampled = false;
};
DgaReport check_dga(const DgaWindow& a, long budget = 400000);

/* tau_{>= -n}: degrees -n..0, with coker(d) in degree -n.  Input nonpositive. */
DgaWindow good_truncation(const DgaWindow& a, int n);

struct ChainMap {
    ComplexWindow X, Y;
    std::map<NW, SparseMatrix> comp; /* X bucket -> Y bucket, degree 0, weight 0 */
};
ComplexWindow cone(const ChainMap& f); /* Err 0x32 if not a chain map */

} // namespace ncdq
