#include "ncdq/dg_core.hpp"

#include <algorithm>
#include <set>

namespace ncdq {

int GradedWindow::dim(NW b) const {
    auto it = cells.find(b);
    return it == cells.end() ? 0 : (int)it->second.size();
}

bool GradedWindow::complete(NW b) const {
    auto it = complete_override.find(b);
    return it == complete_override.end() ? true : it->second;
}

SparseMatrix ComplexWindow::dmat(NW b) const {
    auto it = d.find(b);
    if (it != d.end()) return it->second;
    return SparseMatrix(g.dim({b.first + 1, b.second}), g.dim(b), g.f);
}

void ComplexWindow::check_d2() const {
    for (auto& [b, m] : d) {
        NW up{b.first + 1, b.second};
        if (m.cols != g.dim(b) || m.rows != g.dim(up))
            throw Err(0x30, "differential shape mismatch at degree " + std::to_string(b.first) +
                                ", weight " + std::to_string(b.second));
        SparseMatrix sq = dmat(up).mul(m);
        for (const SVec& r : sq.row)
            if (!r.empty())
                throw Err(0x30, "d*d != 0 at degree " + std::to_string(b.first) + ", weight " +
                                    std::to_string(b.second));
    }
}

SVec ComplexWindow::apply_d(NW b, const SVec& v) const {
    return dmat(b).apply(v);
}

bool DgaWindow::in_window(NW b) const {
    return b.first >= c.g.nmin && b.first <= c.g.nmax && b.second >= 0 && b.second <= c.g.D;
}

SVec DgaWindow::mul_sv(NW a, const SVec& x, NW b, const SVec& y) const {
    SVec out;
    for (auto& [i, ci] : x)
        for (auto& [j, cj] : y) out = sv_axpy(out, ci * cj, mul(a, i, b, j));
    return out;
}

/* ---- cohomology --------------------------------------------------------- */

std::vector<Scalar> CohomologyRing::to_classes(NW b, const SVec& cocycle) const {
    auto bi = bred.find(b);
    auto pi = hpiv.find(b);
    auto ri = reps.find(b);
    if (bi == bred.end() || pi == hpiv.end() || ri == reps.end())
        throw Err(0x31, "no cohomology data at the requested bucket");
    SVec w = bi->second.reduce(cocycle);
    const std::vector<int>& piv = pi->second;
    std::vector<Scalar> out;
    SVec resid = w;
    for (size_t k = 0; k < piv.size(); ++k) {
        Scalar c = sv_get(w, piv[k], f);
        out.push_back(c);
        resid = sv_axpy(resid, -c, ri->second[k]);
    }
    if (!resid.empty()) throw Err(0x31, "vector is not a cocycle modulo coboundaries");
    return out;
}

int CohomologyRing::total_dim(int n) const {
    int s = 0;
    for (auto& [b, dd] : dim)
        if (b.first == n && trusted.at(b)) s += dd;
    return s;
}

CohomologyRing cohomology(const ComplexWindow& c) {
    c.check_d2();
    CohomologyRing H;
    H.f = c.g.f;
    /* coboundaries = column space of the incoming differential; its rank also
     * serves as the outgoing rank of the bucket below */
    for (auto& [b, labels] : c.g.cells) {
        if (labels.empty()) continue;
        NW dn{b.first - 1, b.second};
        SparseMatrix din = c.dmat(dn);
        std::vector<SVec> brows;
        SparseMatrix dt = din.transpose();
        for (const SVec& col : dt.row)
            if (!col.empty()) brows.push_back(col);
        SparseMatrix bm((int)brows.size(), (int)labels.size(), c.g.f);
        bm.row = std::move(brows);
        H.bred[b] = rref(bm);
    }
    for (auto& [b, labels] : c.g.cells) {
        if (labels.empty()) continue;
        NW dn{b.first - 1, b.second}, up{b.first + 1, b.second};
        const Rref& br = H.bred.at(b);
        auto bu = H.bred.find(up);
        int rout = bu != H.bred.end() ? bu->second.rank() : 0;
        H.dim[b] = (int)labels.size() - br.rank() - rout;
        H.reps[b] = {};
        H.hpiv[b] = {};
        if (H.dim[b] > 0) {
            /* cocycles reduced modulo coboundaries, canonical representatives */
            std::vector<SVec> zred;
            for (const SVec& z : kernel_basis(c.dmat(b))) {
                SVec r = br.reduce(z);
                if (!r.empty()) zred.push_back(r);
            }
            SparseMatrix zm((int)zred.size(), (int)labels.size(), c.g.f);
            zm.row = std::move(zred);
            Rref hr = rref(zm);
            if (hr.rank() != H.dim[b]) throw Err(0x31, "rank bookkeeping disagrees with kernel");
            H.reps[b] = hr.rows;
            H.hpiv[b] = hr.pivot_col;
        }
        H.trusted[b] = c.g.complete(dn) && c.g.complete(b) && c.g.complete(up);
    }
    return H;
}

CohomologyRing cohomology(const DgaWindow& a) {
    CohomologyRing H = cohomology(a.c);
    H.has_product = true;
    for (auto& [ba, ra] : H.reps) {
        if (!H.trusted.at(ba)) continue;
        for (auto& [bb, rb] : H.reps) {
            if (!H.trusted.at(bb)) continue;
            NW t{ba.first + bb.first, ba.second + bb.second};
            if (!a.in_window(t)) continue;
            auto ht = H.dim.find(t);
            bool t_zero = (a.c.g.dim(t) == 0);
            if (!t_zero && (ht == H.dim.end() || !H.trusted.at(t))) continue;
            for (int i = 0; i < (int)ra.size(); ++i)
                for (int j = 0; j < (int)rb.size(); ++j) {
                    SVec z = a.mul_sv(ba, ra[i], bb, rb[j]);
                    SVec cls;
                    if (!t_zero) {
                        std::vector<Scalar> co = H.to_classes(t, z);
                        for (int k = 0; k < (int)co.size(); ++k)
                            if (!co[k].is_zero()) cls.push_back({k, co[k]});
                    }
                    H.product[{ba, i, bb, j}] = cls;
                }
        }
    }
    return H;
}

/* ---- dga checking ------------------------------------------------------- */

static std::string bstr(NW b) {
    return "(" + std::to_string(b.first) + "," + std::to_string(b.second) + ")";
}

DgaReport check_dga(const DgaWindow& a, long budget) {
    DgaReport rep;
    auto fail = [&rep](const std::string& s) {
        rep.ok = false;
        if (rep.violations.size() < 32) rep.violations.push_back(s);
    };
    try {
        a.c.check_d2();
    } catch (const Err& e) {
        fail(e.what());
    }
    const GradedWindow& g = a.c.g;
    const Field& f = g.f;
    /* unit neutrality */
    NW z00{0, 0};
    for (auto& [b, labels] : g.cells)
        for (int i = 0; i < (int)labels.size(); ++i) {
            SVec e{{i, Scalar::one(f)}};
            if (a.mul_sv(z00, a.unit, b, e) != e) fail("unit*x != x at " + bstr(b) + " cell " + std::to_string(i));
            if (a.mul_sv(b, e, z00, a.unit) != e) fail("x*unit != x at " + bstr(b) + " cell " + std::to_string(i));
            rep.checks += 2;
        }
    /* Leibniz over complete bucket pairs */
    {
        std::vector<std::pair<NW, NW>> pairs;
        long total = 0;
        for (auto& [ba, la] : g.cells)
            for (auto& [bb, lb] : g.cells) {
                NW t{ba.first + bb.first, ba.second + bb.second};
                NW ta{ba.first + 1, ba.second}, tb{bb.first + 1, bb.second}, tu{t.first + 1, t.second};
                if (t.first < g.nmin || t.first > g.nmax || t.second > g.D) continue;
                if (!g.complete(t) || !g.complete(tu) || !g.complete(ta) || !g.complete(tb) ||
                    !g.complete(ba) || !g.complete(bb)) {
                    rep.skipped += (long)la.size() * (long)lb.size();
                    continue;
                }
                pairs.push_back({ba, bb});
                total += (long)la.size() * (long)lb.size();
            }
        long stride = total > budget ? total / budget + 1 : 1;
        if (stride > 1) rep.sampled = true;
        long ix = 0;
        for (auto& [ba, bb] : pairs) {
            int na = (int)g.cells.at(ba).size(), nb = (int)g.cells.at(bb).size();
            NW t{ba.first + bb.first, ba.second + bb.second};
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < nb; ++j) {
                    if (ix++ % stride) continue;
                    SVec ei{{i, Scalar::one(f)}}, ej{{j, Scalar::one(f)}};
                    SVec ab = a.mul(ba, i, bb, j);
                    SVec lhs = a.c.apply_d(t, ab);
                    SVec rhs = a.mul_sv({ba.first + 1, ba.second}, a.c.apply_d(ba, ei), bb, ej);
                    SVec second = a.mul_sv(ba, ei, {bb.first + 1, bb.second}, a.c.apply_d(bb, ej));
                    Scalar sgn = Scalar::from_long(ba.first % 2 ? -1 : 1, f);
                    rhs = sv_axpy(rhs, sgn, second);
                    rep.checks++;
                    if (!sv_eq(lhs, rhs))
                        fail("Leibniz fails at " + bstr(ba) + " cell " + std::to_string(i) + " times " +
                             bstr(bb) + " cell " + std::to_string(j));
                }
        }
    }
    /* associativity over complete bucket triples */
    {
        struct Tri { NW a, b, c; };
        std::vector<Tri> tris;
        long total = 0;
        for (auto& [ba, la] : g.cells)
            for (auto& [bb, lb] : g.cells)
                for (auto& [bc, lc] : g.cells) {
                    NW ab{ba.first + bb.first, ba.second + bb.second};
                    NW abc{ab.first + bc.first, ab.second + bc.second};
                    NW bc2{bb.first + bc.first, bb.second + bc.second};
                    if (abc.first < g.nmin || abc.second > g.D) continue;
                    bool okab = ab.first >= g.nmin && ab.second <= g.D && g.complete(ab);
                    bool okbc = bc2.first >= g.nmin && bc2.second <= g.D && g.complete(bc2);
                    if (!okab || !okbc || !g.complete(abc)) {
                        rep.skipped += (long)la.size() * lb.size() * lc.size();
                        continue;
                    }
                    tris.push_back({ba, bb, bc});
                    total += (long)la.size() * lb.size() * lc.size();
                }
        long stride = total > budget ? total / budget + 1 : 1;
        if (stride > 1) rep.sampled = true;
        long ix = 0;
        for (const Tri& tr : tris) {
            int na = (int)g.cells.at(tr.a).size(), nb = (int)g.cells.at(tr.b).size(),
                nc = (int)g.cells.at(tr.c).size();
            NW ab{tr.a.first + tr.b.first, tr.a.second + tr.b.second};
            NW bc{tr.b.first + tr.c.first, tr.b.second + tr.c.second};
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < nb; ++j)
                    for (int k = 0; k < nc; ++k) {
                        if (ix++ % stride) continue;
                        SVec ek{{k, Scalar::one(f)}}, ei{{i, Scalar::one(f)}};
                        SVec lhs = a.mul_sv(ab, a.mul(tr.a, i, tr.b, j), tr.c, ek);
                        SVec rhs = a.mul_sv(tr.a, ei, bc, a.mul(tr.b, j, tr.c, k));
                        rep.checks++;
                        if (!sv_eq(lhs, rhs))
                            fail("associativity fails on cells " + bstr(tr.a) + ":" + std::to_string(i) +
                                 " " + bstr(tr.b) + ":" + std::to_string(j) + " " + bstr(tr.c) + ":" +
                                 std::to_string(k));
                    }
        }
    }
    /* augmentation, when present */
    if (a.aug) {
        const std::vector<Scalar>& au = *a.aug;
        auto ev = [&au, &f](const SVec& v) {
            Scalar s = Scalar::zero(f);
            for (auto& [i, c] : v) s = s + c * au[i];
            return s;
        };
        if (!(ev(a.unit) == Scalar::one(f))) fail("augmentation does not send the unit to 1");
        int n0 = g.dim(z00);
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n0; ++j) {
                SVec p = a.mul(z00, i, z00, j);
                if (!(ev(p) == au[i] * au[j]))
                    fail("augmentation not multiplicative on (0,0) cells " + std::to_string(i) + "," +
                         std::to_string(j));
                rep.checks++;
            }
        NW m10{-1, 0};
        SparseMatrix dm = a.c.dmat(m10);
        for (const SVec& col : dm.transpose().row)
            if (!ev(col).is_zero()) fail("augmentation does not kill exact degree-0 vectors");
    }
    return rep;
}

/* ---- good truncation ---------------------------------------------------- */

DgaWindow good_truncation(const DgaWindow& a, int n) {
    if (a.c.g.nmax > 0) throw Err(0x33, "good truncation requires a nonpositive dga");
    auto base = std::make_shared<DgaWindow>(a);
    int bot = -n;
    DgaWindow out;
    out.c.g.f = a.c.g.f;
    out.c.g.nmin = std::max(bot, a.c.g.nmin);
    out.c.g.nmax = a.c.g.nmax;
    out.c.g.D = a.c.g.D;
    auto projs = std::make_shared<std::map<int, QuotientBasis>>(); /* weight -> coker */
    for (auto& [b, labels] : a.c.g.cells) {
        if (b.first > bot) {
            out.c.g.cells[b] = labels;
            if (!a.c.g.complete(b)) out.c.g.complete_override[b] = false;
            if (a.c.d.count(b)) out.c.d[b] = a.c.d.at(b);
        } else if (b.first == bot) {
            SparseMatrix din = a.c.dmat({bot - 1, b.second});
            std::vector<SVec> sub;
            for (const SVec& col : din.transpose().row)
                if (!col.empty()) sub.push_back(col);
            QuotientBasis qb = quotient_basis((int)labels.size(), sub, a.c.g.f);
            std::vector<std::string> cl;
            for (int r : qb.rep_cols) cl.push_back(labels[r]);
            out.c.g.cells[b] = cl;
            bool comp = a.c.g.complete(b) && a.c.g.complete({bot - 1, b.second});
            if (!comp) out.c.g.complete_override[b] = false;
            /* induced differential on the cokernel: original columns at reps */
            SparseMatrix dold = a.c.dmat(b);
            SparseMatrix dnew(dold.rows, (int)qb.rep_cols.size(), a.c.g.f);
            std::map<int, int> repix;
            for (int k = 0; k < (int)qb.rep_cols.size(); ++k) repix[qb.rep_cols[k]] = k;
            for (int r = 0; r < dold.rows; ++r) {
                SVec nr;
                for (auto& [cix, cv] : dold.row[r]) {
                    auto it = repix.find(cix);
                    if (it != repix.end()) nr.push_back({it->second, cv});
                }
                dnew.row[r] = nr;
            }
            /* well-definedness: d must kill the killed subspace */
            for (const SVec& s : sub) {
                SVec img = dold.apply(s);
                if (!img.empty()) throw Err(0x33, "differential does not descend to the cokernel");
            }
            out.c.d[b] = dnew;
            (*projs)[b.second] = qb;
        }
    }
    auto reindex = [projs, bot](NW b, int i) -> int {
        if (b.first != bot) return i;
        return projs->at(b.second).rep_cols[i];
    };
    out.mul = [base, projs, bot, reindex](NW ba, int i, NW bb, int j) -> SVec {
        NW t{ba.first + bb.first, ba.second + bb.second};
        if (t.first < bot) return {};
        SVec raw = base->mul(ba, reindex(ba, i), bb, reindex(bb, j));
        if (t.first > bot) return raw;
        auto it = projs->find(t.second);
        if (it == projs->end()) return raw; /* bucket was not truncated (no cells) */
        std::vector<Scalar> c = it->second.project(raw);
        SVec outv;
        for (int k = 0; k < (int)c.size(); ++k)
            if (!c[k].is_zero()) outv.push_back({k, c[k]});
        return outv;
    };
    if (bot == 0) {
        auto it = projs->find(0);
        if (it != projs->end()) {
            std::vector<Scalar> c = it->second.project(base->unit);
            out.unit.clear();
            for (int k = 0; k < (int)c.size(); ++k)
                if (!c[k].is_zero()) out.unit.push_back({k, c[k]});
        } else {
            out.unit = base->unit;
        }
    } else {
        out.unit = base->unit;
        out.aug = base->aug;
    }
    return out;
}

/* ---- cones --------------------------------------------------------------- */

ComplexWindow cone(const ChainMap& f) {
    const Field& fl = f.X.g.f;
    auto cmat = [&f, &fl](NW b) {
        auto it = f.comp.find(b);
        if (it != f.comp.end()) return it->second;
        return SparseMatrix(f.Y.g.dim(b), f.X.g.dim(b), fl);
    };
    /* chain-map check on every X bucket */
    for (auto& [b, labels] : f.X.g.cells) {
        NW up{b.first + 1, b.second};
        SparseMatrix lhs = cmat(up).mul(f.X.dmat(b));
        SparseMatrix rhs = f.Y.dmat(b).mul(cmat(b));
        for (int r = 0; r < lhs.rows; ++r)
            if (!sv_eq(lhs.row[r], rhs.row[r]))
                throw Err(0x32, "input to cone is not a chain map at " + bstr(b));
    }
    ComplexWindow out;
    out.g.f = fl;
    out.g.nmin = std::min(f.Y.g.nmin, f.X.g.nmin - 1);
    out.g.nmax = std::max(f.Y.g.nmax, f.X.g.nmax - 1);
    out.g.D = std::max(f.Y.g.D, f.X.g.D);
    std::set<NW> buckets;
    for (auto& [b, l] : f.Y.g.cells) buckets.insert(b);
    for (auto& [b, l] : f.X.g.cells) buckets.insert({b.first - 1, b.second});
    for (NW b : buckets) {
        NW bx{b.first + 1, b.second};
        std::vector<std::string> cl;
        for (const std::string& s : f.Y.g.cells.count(b) ? f.Y.g.cells.at(b) : std::vector<std::string>{})
            cl.push_back("y:" + s);
        for (const std::string& s : f.X.g.cells.count(bx) ? f.X.g.cells.at(bx) : std::vector<std::string>{})
            cl.push_back("x:" + s);
        if (cl.empty()) continue;
        out.g.cells[b] = cl;
        if (!(f.Y.g.complete(b) && f.X.g.complete(bx))) out.g.complete_override[b] = false;
    }
    for (NW b : buckets) {
        if (!out.g.cells.count(b)) continue;
        NW up{b.first + 1, b.second};
        NW bx{b.first + 1, b.second}, bxup{b.first + 2, b.second};
        int ny = f.Y.g.dim(b), nx = f.X.g.dim(bx);
        int nyu = f.Y.g.dim(up), nxu = f.X.g.dim(bxup);
        if (nyu + nxu == 0) continue;
        SparseMatrix m(nyu + nxu, ny + nx, fl);
        SparseMatrix dy = f.Y.dmat(b), dx = f.X.dmat(bx), fc = cmat(bx);
        for (int r = 0; r < nyu; ++r) {
            SVec row = dy.row[r]; /* indices < ny, then the shifted f block */
            for (auto& [c, v] : fc.row[r]) row.push_back({c + ny, v});
            m.row[r] = row;
        }
        for (int r = 0; r < nxu; ++r) {
            SVec row;
            for (auto& [c, v] : dx.row[r]) row.push_back({c + ny, -v});
            m.row[nyu + r] = row;
        }
        out.d[b] = m;
    }
    return out;
}

} // namespace ncdq
