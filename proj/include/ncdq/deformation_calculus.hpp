#pragma once
/* Maurer-Cartan elements, the gauge action and its homotopies, and the
 * twisting-morphism correspondence, over explicit Artinian test algebras.
 * Test algebras are non-dg; E may be any dga window (unit optional). */

#include "ncdq/dg_core.hpp"
#include "ncdq/quiver_algebra.hpp"

namespace ncdq {

/* Finite local algebra with verified nilpotent maximal ideal. */
struct ArtinianTestAlgebra {
    AlgebraView A;
    std::vector<int> mbasis; /* basis indices of the maximal ideal */
    int unit_ix = -1;        /* index of the residue-line basis element */
    int nilpotency = 0;      /* least n with m^n = 0, computed */
};

/* Checks locality (unique residue line) and computes the nilpotency index. */
ArtinianTestAlgebra artinian(const AlgebraView& A);

/* E tensor m_G as a nonunital dga: cells (E cell, m basis element), grading
 * from E.  The unit is left empty. */
DgaWindow tensor_with_ideal(const DgaWindow& E, const ArtinianTestAlgebra& G);

/* Elements of a dga window, bucketwise. */
using DgElem = std::map<NW, SVec>;

DgElem el_add(const DgElem& x, const DgElem& y);
DgElem el_scale(const DgElem& x, const Scalar& c);
DgElem el_mul(const DgaWindow& T, const DgElem& x, const DgElem& y);
DgElem el_d(const DgaWindow& T, const DgElem& x);
bool el_zero(const DgElem& x);
int el_degree(const DgElem& x); /* common degree, Err if mixed */

/* dx + x^2 = 0, x of degree 1. */
bool is_mc(const DgaWindow& T, const DgElem& x);

/* v with (1+g)(1+v) = 1 for nilpotent g of degree 0. */
DgElem gauge_inverse_part(const DgaWindow& T, const DgElem& g);

/* (1+g).x = (1+g) x (1+g)^{-1} + (1+g) d((1+g)^{-1}); asserts the result is
 * again Maurer-Cartan. */
DgElem gauge_act(const DgaWindow& T, const DgElem& g, const DgElem& x);

/* g' = g + d(h) + y h + h x for a degree -1 element h; requires
 * (1+g).x = y and asserts (1+g').x = y. */
DgElem homotopy_act(const DgaWindow& T, const DgElem& h, const DgElem& g, const DgElem& x,
                    const DgElem& y);

struct TwistReport {
    bool ok = false;
    long tested = 0;
    bool exhaustive = false; /* full enumeration (small prime fields only) */
    std::vector<std::string> notes;
};

/* Membership comparison between MC(E tensor Z) and twisting morphisms
 * Z^* -> E under the canonical linear identification; Z a finite nonunital
 * dga concentrated in degree 0 (an Artinian maximal ideal). */
TwistReport twist_correspondence(const ArtinianTestAlgebra& Z, const DgaWindow& E, long seed,
                                 long budget);

} // namespace ncdq
