#pragma once
/* The explicit dg model of the derived quotient of A by the idempotent
 * ideal AeA: degree -n words x0 h x1 h ... h xn with x0 in Ae, middle
 * letters in the corner ring R = eAe, xn in eA, tensors over the field.
 * The differential collapses adjacent letters with alternating signs;
 * the product concatenates, merging the boundary letters in A. */

#include "ncdq/dg_core.hpp"
#include "ncdq/quiver_algebra.hpp"

namespace ncdq {

struct DqData {
    std::shared_ptr<Algebra> A;
    Idempotent e;
    Corner R;
    BimodulePiece ae, ea;
    bool graded = false;
    bool reduced = false;
    int J = 0, D = 0;
    std::map<NW, std::vector<std::vector<int>>> tup; /* cells as A-basis tuples */
    std::map<NW, std::map<std::string, int>> tix;
};

struct DerivedQuotientModel {
    DgaWindow dga;
    std::shared_ptr<DqData> data;
};

/* Degree window [-J, 0]; weight cap D applies when A is graded (D must not
 * exceed a truncated algebra's window).  e with no vertices gives A itself. */
DerivedQuotientModel build_model(const Algebra& A, const Idempotent& e, int J, int D);

/* Quotient by the acyclic degenerate subcomplex: middle letters run over the
 * positive-weight part of R and consecutive letters share endpoints.  Same
 * cohomology as build_model on far fewer cells; requires a graded algebra. */
DerivedQuotientModel build_model_reduced(const Algebra& A, const Idempotent& e, int J, int D);

CohomologyRing dq_cohomology_ring(const DerivedQuotientModel& m);

struct MarkedRelation {
    int rel = -1;                 /* relation index, -1 for composite classes */
    std::vector<int> split;       /* marking position per monomial */
    std::string label;            /* e.g. "z|x*y" */
    NW bucket;                    /* (-1, weight) */
    SVec chain;                   /* cocycle in the model's (-1,w) cells */
    std::vector<Scalar> cls;      /* coordinates in H^{-1} of the bucket */
};

struct MarkedRelationsResult {
    std::vector<MarkedRelation> marked; /* all V-vertex markings, every relation */
    int h1_dim = 0;                     /* total trusted dim of H^{-1} */
    int span_rank = 0;                  /* rank of the bimodule span of the classes */
    bool spans = false;
    bool h1_trusted = false;
    std::vector<int> basis_pick;        /* indices into `marked` giving a basis */
};

MarkedRelationsResult marked_relations(const QuiverSpec& spec);

/* d^2 * sum_i prod_j max(1, len_ij - 1); also checks dim H^{-1} <= bound
 * whenever H^{-1} is trusted in the probe window. */
long h1_bound(const QuiverSpec& spec);

struct TorResult {
    int j = 0;
    int dim = 0;                 /* total over weights in window */
    std::map<int, int> by_weight;
    int window = -1;             /* weight window used; -1 = exact, unwindowed */
    bool edge = false;           /* nonzero contribution at the window edge */
};

/* dim Tor^R_j(Ae, eA) from a minimal projective resolution of Ae over the
 * corner ring; shares no code with the dg model.  D caps the path weight
 * (-1: use the algebra's own window). */
TorResult tor_oracle(const Algebra& A, const Idempotent& e, int j, int D = -1);

/* dim ker(Ae tensor_R eA -> A) per weight, by direct linear algebra on the
 * underived tensor product; the model-free H^{-1} route. */
std::map<int, int> h1_kernel_dims(const Algebra& A, const Idempotent& e, int D);

struct StratifyingVerdict {
    bool stratifying = true; /* within the inspected window */
    int depth = 0;           /* negative degrees inspected with trust */
    std::string detail;
};

StratifyingVerdict is_stratifying(const Algebra& A, const Idempotent& e, int J, int D);
StratifyingVerdict is_stratifying(const DerivedQuotientModel& m, const CohomologyRing& H);

} // namespace ncdq
