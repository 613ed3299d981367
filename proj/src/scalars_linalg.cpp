#include "ncdq/scalars_linalg.hpp"

#include <algorithm>
#include <set>

namespace ncdq {

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

static std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    unsigned __int128 acc = 1, base = b % p;
    while (e) {
        if (e & 1) acc = acc * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return (std::uint64_t)acc;
}

Scalar Scalar::one(const Field& f) {
    Scalar s(f);
    if (f.rational()) s.q_ = 1;
    else s.r_ = 1 % f.p;
    return s;
}

Scalar Scalar::from_long(long v, const Field& f) {
    Scalar s(f);
    if (f.rational()) s.q_ = v;
    else {
        long m = v % (long)f.p;
        if (m < 0) m += (long)f.p;
        s.r_ = (std::uint64_t)m;
    }
    return s;
}

Scalar Scalar::parse(const std::string& str, const Field& f) {
    mpq_class q;
    if (q.set_str(str, 10) != 0)
        throw Err(0x10, "bad scalar literal: " + str);
    q.canonicalize();
    if (f.rational()) {
        Scalar s(f);
        s.q_ = q;
        return s;
    }
    mpz_class num = q.get_num(), den = q.get_den(), pz((unsigned long)f.p);
    mpz_class nr = num % pz, dr = den % pz;
    if (nr < 0) nr += pz;
    if (dr == 0) throw Err(0x11, "denominator divisible by p: " + str);
    Scalar s(f);
    std::uint64_t n = nr.get_ui(), d = mpz_class(dr).get_ui();
    s.r_ = (std::uint64_t)((unsigned __int128)n * mod_pow(d, f.p - 2, f.p) % f.p);
    return s;
}

static void chk(const Scalar& a, const Scalar& b) {
    if (!(a.field() == b.field()))
        throw Err(0x12, "mixed-field scalar arithmetic");
}

bool Scalar::operator==(const Scalar& o) const {
    chk(*this, o);
    return p_ ? r_ == o.r_ : q_ == o.q_;
}

Scalar Scalar::operator+(const Scalar& o) const {
    chk(*this, o);
    Scalar s(Field{p_});
    if (p_) s.r_ = (r_ + o.r_) % p_;
    else s.q_ = q_ + o.q_;
    return s;
}

Scalar Scalar::operator-(const Scalar& o) const {
    chk(*this, o);
    Scalar s(Field{p_});
    if (p_) s.r_ = (r_ + p_ - o.r_) % p_;
    else s.q_ = q_ - o.q_;
    return s;
}

Scalar Scalar::operator*(const Scalar& o) const {
    chk(*this, o);
    Scalar s(Field{p_});
    if (p_) s.r_ = (std::uint64_t)((unsigned __int128)r_ * o.r_ % p_);
    else s.q_ = q_ * o.q_;
    return s;
}

Scalar Scalar::inv() const {
    if (is_zero()) throw Err(0x13, "inverse of zero");
    Scalar s(Field{p_});
    if (p_) s.r_ = mod_pow(r_, p_ - 2, p_);
    else s.q_ = 1 / q_;
    return s;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inv(); }

Scalar Scalar::operator-() const {
    Scalar s(Field{p_});
    if (p_) s.r_ = r_ ? p_ - r_ : 0;
    else s.q_ = -q_;
    return s;
}

std::string Scalar::str() const {
    if (p_) return std::to_string(r_);
    return q_.get_str();
}

SVec sv_add(const SVec& a, const SVec& b) {
    SVec out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
            out.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first)
            out.push_back(b[j++]);
        else {
            Scalar s = a[i].second + b[j].second;
            if (!s.is_zero()) out.emplace_back(a[i].first, s);
            ++i, ++j;
        }
    }
    return out;
}

SVec sv_scale(const SVec& a, const Scalar& c) {
    if (c.is_zero()) return {};
    SVec out;
    out.reserve(a.size());
    for (auto& [i, v] : a) out.emplace_back(i, v * c);
    return out;
}

SVec sv_axpy(const SVec& a, const Scalar& c, const SVec& b) {
    if (c.is_zero()) return a;
    SVec out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
            out.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first) {
            out.emplace_back(b[j].first, c * b[j].second);
            ++j;
        } else {
            Scalar s = a[i].second + c * b[j].second;
            if (!s.is_zero()) out.emplace_back(a[i].first, s);
            ++i, ++j;
        }
    }
    return out;
}

Scalar sv_get(const SVec& a, int idx, const Field& f) {
    auto it = std::lower_bound(a.begin(), a.end(), idx,
                               [](const auto& p, int i) { return p.first < i; });
    if (it != a.end() && it->first == idx) return it->second;
    return Scalar::zero(f);
}

bool sv_eq(const SVec& a, const SVec& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].first != b[i].first || a[i].second != b[i].second) return false;
    return true;
}

void SparseMatrix::set(int i, int j, const Scalar& v) {
    auto& r = row[i];
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const auto& p, int c) { return p.first < c; });
    if (it != r.end() && it->first == j) {
        if (v.is_zero()) r.erase(it);
        else it->second = v;
    } else if (!v.is_zero())
        r.insert(it, {j, v});
}

Scalar SparseMatrix::get(int i, int j) const { return sv_get(row[i], j, f); }

SVec SparseMatrix::apply(const SVec& v) const {
    /* column-vector convention: (Mv)_i = sum_j M_ij v_j */
    SVec out;
    for (int i = 0; i < rows; ++i) {
        Scalar acc = Scalar::zero(f);
        size_t a = 0, b = 0;
        const SVec& r = row[i];
        while (a < r.size() && b < v.size()) {
            if (r[a].first < v[b].first) ++a;
            else if (v[b].first < r[a].first) ++b;
            else { acc = acc + r[a].second * v[b].second; ++a; ++b; }
        }
        if (!acc.is_zero()) out.emplace_back(i, acc);
    }
    return out;
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t(cols, rows, f);
    for (int i = 0; i < rows; ++i)
        for (auto& [j, v] : row[i]) t.row[j].emplace_back(i, v);
    return t;
}

SparseMatrix SparseMatrix::identity(int n, Field f) {
    SparseMatrix m(n, n, f);
    for (int i = 0; i < n; ++i) m.row[i] = {{i, Scalar::one(f)}};
    return m;
}

SparseMatrix SparseMatrix::mul(const SparseMatrix& o) const {
    if (cols != o.rows) throw Err(0x14, "matrix shape mismatch");
    SparseMatrix out(rows, o.cols, f);
    for (int i = 0; i < rows; ++i) {
        std::map<int, Scalar> acc;
        for (auto& [k, v] : row[i])
            for (auto& [j, w] : o.row[k]) {
                auto it = acc.find(j);
                if (it == acc.end()) acc.emplace(j, v * w);
                else it->second = it->second + v * w;
            }
        for (auto& [j, v] : acc)
            if (!v.is_zero()) out.row[i].emplace_back(j, v);
    }
    return out;
}

bool Rref::is_pivot(int col) const {
    return std::binary_search(pivot_col.begin(), pivot_col.end(), col);
}

SVec Rref::reduce(const SVec& v) const {
    SVec cur = v;
    for (size_t r = 0; r < rows.size(); ++r) {
        Scalar c = sv_get(cur, pivot_col[r], f);
        if (!c.is_zero()) cur = sv_axpy(cur, -c, rows[r]);
    }
    return cur;
}

std::vector<SVec> Rref::express(const SVec& v, bool* ok) const {
    /* coefficients on the rows reproducing v; empty + !ok if not in span */
    SVec cur = v;
    SVec coef;
    for (size_t r = 0; r < rows.size(); ++r) {
        Scalar c = sv_get(cur, pivot_col[r], f);
        if (!c.is_zero()) {
            coef.emplace_back((int)r, c);
            cur = sv_axpy(cur, -c, rows[r]);
        }
    }
    *ok = cur.empty();
    return {coef};
}

/* Canonical RREF by leading-column elimination.  Pivots are always the
 * leading entry of a row in the fixed column order, so the pivot set is the
 * greedy column basis of the row space and the output is the unique reduced
 * echelon form.  Waiting rows sit in per-column buckets; eliminating a row
 * only ever moves its leading column rightwards, so one ascending sweep
 * suffices.  Among rows competing for the same column the sparsest wins
 * (a speed choice only -- the result is pivot-strategy independent). */
Rref rref(const SparseMatrix& m) {
    Field f = m.f;
    std::vector<SVec> pool;
    pool.reserve(m.rows);
    std::vector<std::vector<int>> bucket(m.cols);
    for (auto& r : m.row)
        if (!r.empty()) {
            bucket[r.front().first].push_back((int)pool.size());
            pool.push_back(r);
        }
    Rref out;
    out.cols = m.cols;
    out.f = f;
    for (int c = 0; c < m.cols; ++c) {
        if (bucket[c].empty()) continue;
        int best = -1;
        for (int id : bucket[c])
            if (best < 0 || pool[id].size() < pool[best].size() ||
                (pool[id].size() == pool[best].size() && id < best))
                best = id;
        SVec piv = sv_scale(pool[best], pool[best].front().second.inv());
        for (int id : bucket[c]) {
            if (id == best) continue;
            SVec r = sv_axpy(pool[id], -pool[id].front().second, piv);
            pool[id].clear();
            if (!r.empty()) {
                int lead = r.front().first;
                bucket[lead].push_back((int)pool.size());
                pool.push_back(std::move(r));
            }
        }
        bucket[c].clear();
        out.rows.push_back(std::move(piv));
        out.pivot_col.push_back(c);
    }
    /* back-substitution right to left: rows further right are already fully
     * reduced, so the entries they contribute sit at non-pivot columns */
    std::map<int, int> at;
    for (size_t i = 0; i < out.pivot_col.size(); ++i) at[out.pivot_col[i]] = (int)i;
    for (int i = (int)out.rows.size() - 1; i >= 0; --i) {
        std::vector<std::pair<int, Scalar>> hits;
        for (auto& [j, v] : out.rows[i])
            if (j != out.pivot_col[i] && at.count(j)) hits.push_back({at[j], v});
        for (auto& [r, v] : hits) out.rows[i] = sv_axpy(out.rows[i], -v, out.rows[r]);
    }
    return out;
}

Solver make_solver(const SparseMatrix& m) {
    /* eliminate the columns of m (rows of the transpose), carrying a trace
     * of the combination of original columns that produced each rref row */
    Solver s;
    s.f = m.f;
    s.ncols = m.cols;
    SparseMatrix t = m.transpose();
    std::vector<SVec> pool, tr;
    std::vector<std::vector<int>> bucket(std::max(m.rows, 1));
    for (int i = 0; i < t.rows; ++i)
        if (!t.row[i].empty()) {
            bucket[t.row[i].front().first].push_back((int)pool.size());
            pool.push_back(t.row[i]);
            tr.push_back(SVec{{i, Scalar::one(m.f)}});
        }
    s.rr.cols = m.rows;
    s.rr.f = m.f;
    for (int c = 0; c < m.rows; ++c) {
        if ((int)bucket.size() <= c || bucket[c].empty()) continue;
        int best = -1;
        for (int id : bucket[c])
            if (best < 0 || pool[id].size() < pool[best].size() ||
                (pool[id].size() == pool[best].size() && id < best))
                best = id;
        Scalar inv = pool[best].front().second.inv();
        SVec piv = sv_scale(pool[best], inv);
        SVec ptr = sv_scale(tr[best], inv);
        for (int id : bucket[c]) {
            if (id == best) continue;
            Scalar lead = pool[id].front().second;
            SVec r = sv_axpy(pool[id], -lead, piv);
            SVec rt = sv_axpy(tr[id], -lead, ptr);
            pool[id].clear();
            tr[id].clear();
            if (!r.empty()) {
                bucket[r.front().first].push_back((int)pool.size());
                pool.push_back(std::move(r));
                tr.push_back(std::move(rt));
            }
        }
        bucket[c].clear();
        s.rr.rows.push_back(std::move(piv));
        s.rr.pivot_col.push_back(c);
        s.trace.push_back(std::move(ptr));
    }
    return s;
}

std::optional<SVec> Solver::solve(const SVec& b) const {
    SVec cur = b;
    SVec x;
    for (size_t r = 0; r < rr.rows.size(); ++r) {
        Scalar c = sv_get(cur, rr.pivot_col[r], f);
        if (!c.is_zero()) {
            cur = sv_axpy(cur, -c, rr.rows[r]);
            x = sv_axpy(x, c, trace[r]);
        }
    }
    if (!cur.empty()) return std::nullopt;
    return x;
}

int rank(const SparseMatrix& m) { return rref(m).rank(); }

std::vector<SVec> kernel_basis(const SparseMatrix& m) {
    Rref r = rref(m);
    std::set<int> piv(r.pivot_col.begin(), r.pivot_col.end());
    std::vector<SVec> out;
    for (int c = 0; c < m.cols; ++c) {
        if (piv.count(c)) continue;
        /* free column c: v_c = 1, pivot coords from the reduced rows */
        SVec v;
        for (size_t i = 0; i < r.rows.size(); ++i) {
            Scalar a = sv_get(r.rows[i], c, m.f);
            if (!a.is_zero()) v.emplace_back(r.pivot_col[i], -a);
        }
        v.emplace_back(c, Scalar::one(m.f));
        std::sort(v.begin(), v.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        out.push_back(v);
    }
    return out;
}

QuotientBasis quotient_basis(int dim, const std::vector<SVec>& subspace, Field f) {
    SparseMatrix m((int)subspace.size(), dim, f);
    m.row = subspace;
    QuotientBasis qb;
    qb.sub = rref(m);
    for (int c = 0; c < dim; ++c)
        if (!qb.sub.is_pivot(c)) qb.rep_cols.push_back(c);
    qb.dim = (int)qb.rep_cols.size();
    return qb;
}

std::vector<Scalar> QuotientBasis::project(const SVec& v) const {
    SVec red = sub.reduce(v);
    std::vector<Scalar> out(rep_cols.size(), Scalar::zero(sub.f));
    for (auto& [i, c] : red) {
        auto it = std::lower_bound(rep_cols.begin(), rep_cols.end(), i);
        if (it == rep_cols.end() || *it != i)
            throw Err(0x15, "projection support escaped representatives");
        out[(size_t)(it - rep_cols.begin())] = c;
    }
    return out;
}

} // namespace ncdq
