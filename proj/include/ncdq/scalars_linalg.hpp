#pragma once
/* Exact field arithmetic (rationals via GMP, or a prime field) and sparse
 * exact linear algebra.  Everything else in the library sits on top of this. */

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>
#include <gmpxx.h>

namespace ncdq {

struct Err : std::runtime_error {
    int code;
    Err(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

/* p == 0 means the rationals; p > 0 means F_p (p prime). */
struct Field {
    std::uint64_t p = 0;
    bool rational() const { return p == 0; }
    bool operator==(const Field& o) const { return p == o.p; }
};

bool is_prime_u64(std::uint64_t n);

class Scalar {
    mpq_class q_;          /* used when p_ == 0 */
    std::uint64_t r_ = 0;  /* used when p_ > 0, always in [0,p) */
    std::uint64_t p_ = 0;

public:
    Scalar() = default;
    Scalar(const Field& f) : p_(f.p) {}
    static Scalar zero(const Field& f) { return Scalar(f); }
    static Scalar one(const Field& f);
    static Scalar from_long(long v, const Field& f);
    /* parses "a", "-a", "a/b" exactly; reduces mod p in prime-field mode */
    static Scalar parse(const std::string& s, const Field& f);

    Field field() const { return Field{p_}; }
    bool is_zero() const { return p_ ? r_ == 0 : q_ == 0; }
    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar operator-() const;
    Scalar inv() const;

    std::string str() const;
    const mpq_class& rat() const { return q_; }
    std::uint64_t residue() const { return r_; }
};

/* Sparse vector: strictly increasing indices, no zero entries. */
using SVec = std::vector<std::pair<int, Scalar>>;

SVec sv_add(const SVec& a, const SVec& b);
SVec sv_scale(const SVec& a, const Scalar& c);
SVec sv_axpy(const SVec& a, const Scalar& c, const SVec& b); /* a + c*b */
Scalar sv_get(const SVec& a, int i, const Field& f);
bool sv_eq(const SVec& a, const SVec& b);

/* Row-major sparse matrix over an exact field. */
struct SparseMatrix {
    int rows = 0, cols = 0;
    Field f;
    std::vector<SVec> row;

    SparseMatrix() = default;
    SparseMatrix(int r, int c, Field fld) : rows(r), cols(c), f(fld), row(r) {}
    void set(int i, int j, const Scalar& v);
    Scalar get(int i, int j) const;
    SVec apply(const SVec& v) const;           /* matrix * column vector */
    SparseMatrix transpose() const;
    static SparseMatrix identity(int n, Field f);
    SparseMatrix mul(const SparseMatrix& o) const;
};

/* Canonical reduced row echelon form.  The RREF of a matrix is unique for a
 * fixed column order, so any pivot strategy gives the same answer; pivots are
 * chosen by leading column with sparsest-row tie-break to limit fill-in. */
struct Rref {
    std::vector<SVec> rows;     /* nonzero reduced rows, sorted by pivot col */
    std::vector<int> pivot_col; /* pivot column of each row */
    int cols = 0;
    Field f;

    int rank() const { return (int)rows.size(); }
    bool is_pivot(int col) const;
    /* reduce v modulo the row space; result supported on non-pivot columns */
    SVec reduce(const SVec& v) const;
    /* coordinates of v in the span of the rows, or nullopt-like failure */
    bool in_span(const SVec& v) const { return reduce(v).empty(); }
    std::vector<SVec> express(const SVec& v, bool* ok) const;
};

Rref rref(const SparseMatrix& m);
int rank(const SparseMatrix& m);

/* Linear-system solver for a fixed matrix: solve(b) returns x with M x = b,
 * or nothing when b lies outside the column space.  Built by eliminating the
 * columns of M while tracing each combination back to original columns. */
struct Solver {
    Rref rr;                 /* rref of the transpose (rows = columns of M) */
    std::vector<SVec> trace; /* trace[i]: original-column combination giving rr.rows[i] */
    Field f;
    int ncols = 0;
    std::optional<SVec> solve(const SVec& b) const;
};

Solver make_solver(const SparseMatrix& m);

/* Basis of the right kernel {v : m v = 0}; one vector per free column, free
 * coordinate set to 1, listed by increasing free column (lex-first). */
std::vector<SVec> kernel_basis(const SparseMatrix& m);

/* Coset representatives completing `subspace` to a basis of k^dim, plus a
 * projection expressing any vector in quotient coordinates. */
struct QuotientBasis {
    Rref sub;                       /* RREF of the subspace */
    std::vector<int> rep_cols;      /* representative = e_col, ascending */
    int dim = 0;
    /* coordinates of [v] with respect to the representatives */
    std::vector<Scalar> project(const SVec& v) const;
};

QuotientBasis quotient_basis(int dim, const std::vector<SVec>& subspace, Field f);

} // namespace ncdq
