#pragma once
/* Path algebras of quivers with relations: exact finite-dimensional quotients
 * (detected by basis stabilization) or length-graded truncations, together
 * with vertex idempotents, corner rings eAe, quotients A/AeA and the
 * bimodule pieces Ae, eA. */

#include "ncdq/scalars_linalg.hpp"

#include <functional>
#include <optional>
#include <unordered_map>

namespace ncdq {

struct Arrow {
    std::string name;
    int src = -1, tgt = -1;
};

struct Quiver {
    std::vector<std::string> vertices;
    std::vector<Arrow> arrows;
    int arrow_index(const std::string& name) const;
};

/* Arrows compose left to right: a path p: i -> j satisfies e_i p = p = p e_j. */
using Word = std::vector<int>;

struct PathWord {
    int vertex = -1; /* >= 0 for a length-0 path */
    Word w;
    int len() const { return vertex >= 0 ? 0 : (int)w.size(); }
};

struct RelTerm {
    Scalar coeff;
    Word word;
};
using Relation = std::vector<RelTerm>;

struct Truncation {
    int path_length = -1;      /* N; -1 = choose automatically */
    int dg_depth = 3;          /* J */
    int internal_degree = -1;  /* D; -1 = derive from context */
    int resolution_length = 4; /* L */
};

struct QuiverSpec {
    Quiver q;
    std::vector<Relation> relations;
    std::vector<int> marked; /* vertex indices of V, ascending */
    Field field;
    Truncation trunc;
    std::string name;
};

struct BasisPath {
    PathWord p;
    int src = -1, tgt = -1;
    std::string label;
};

/* A = kQ/(I) on an explicit path basis.  `exact` means the basis is closed
 * under products (finite-dimensional algebra); otherwise the algebra is
 * graded and truncated at length N, with products flagged when they escape. */
class Algebra {
public:
    Field f;
    Quiver q;
    bool exact = true;
    bool graded = false;
    int N = 0;                 /* word window actually used */
    int top_len = 0;           /* maximal basis path length */
    std::vector<BasisPath> basis;
    std::vector<int> idem;     /* basis index of e_v per vertex */
    SVec unit;

    int dim() const { return (int)basis.size(); }
    int wt(int i) const { return basis[i].p.len(); }

    /* reduction of an arbitrary in-window word to basis coordinates */
    SVec reduce(const PathWord& w) const;
    bool word_in_window(const PathWord& w) const { return w.len() <= N; }

    /* basis product; sets *overflow when a truncated product escapes N */
    SVec mul(int i, int j, bool* overflow = nullptr) const;
    SVec mul_vec(const SVec& a, const SVec& b, bool* overflow = nullptr) const;

    int index_of(const PathWord& w) const; /* -1 if not a basis word */

    /* internal */
    std::unordered_map<std::string, SVec> red_;
    std::unordered_map<std::string, int> idx_;
    mutable std::map<std::pair<int, int>, SVec> mulmemo_;
};

std::string word_key(const PathWord& w);

Algebra build_algebra(const QuiverSpec& spec);

/* Lightweight algebra view: what resolutions/dg need to know. */
struct AlgebraView {
    Field f;
    int dim = 0;
    bool exact = true;
    int wcap = 0; /* weight window for truncated mode */
    std::vector<int> wt, src, tgt;
    std::vector<std::string> label;
    std::vector<int> idem; /* idempotent basis indices (vertex order) */
    std::function<SVec(int, int, bool*)> mul;
    /* radical membership: basis indices of a spanning set of rad, ascending */
    std::vector<int> radical;
};

AlgebraView view_of(const Algebra& A);

/* e = sum of vertex idempotents over V. */
struct Idempotent {
    std::vector<int> verts; /* ascending vertex indices */
    SVec coords;            /* in A's basis */
};
Idempotent idempotent_for(const Algebra& A, const std::vector<int>& V);

/* R = eAe: basis paths with both endpoints in V, products inherited. */
struct Corner {
    std::vector<int> elems;  /* indices into A.basis */
    std::vector<int> back;   /* A index -> corner index or -1 */
    AlgebraView view;        /* self-contained algebra structure */
};
Corner corner_algebra(const Algebra& A, const Idempotent& e);

/* A/AeA presented on coset representatives of basis paths. */
struct QuotientAlgebra {
    std::vector<int> reps;   /* A-basis indices representing the quotient */
    QuotientBasis proj;
    AlgebraView view;
};
QuotientAlgebra quotient_by_idempotent_ideal(const Algebra& A, const Idempotent& e);

/* Ae and eA with their weights; elements indexed by A-basis subsets. */
struct BimodulePiece {
    std::vector<int> elems; /* indices into A.basis */
    std::vector<int> back;
};
BimodulePiece ae_piece(const Algebra& A, const Idempotent& e); /* paths ending in V */
BimodulePiece ea_piece(const Algebra& A, const Idempotent& e); /* paths starting in V */

/* Peirce bucket counts (eAe, eA(1-e), (1-e)Ae, (1-e)A(1-e)). */
std::array<int, 4> peirce_dims(const Algebra& A, const Idempotent& e);

} // namespace ncdq
