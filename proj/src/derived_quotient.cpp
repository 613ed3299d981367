#include "ncdq/derived_quotient.hpp"

#include "ncdq/resolutions_ext.hpp"

#include <algorithm>
#include <functional>

namespace ncdq {

static std::string tuple_label(const Algebra& A, const std::vector<int>& t) {
    std::string s;
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += "|";
        s += A.basis[t[i]].label;
    }
    return s;
}

static int vert_pos(const std::vector<int>& verts, int v) {
    auto it = std::lower_bound(verts.begin(), verts.end(), v);
    return (it != verts.end() && *it == v) ? (int)(it - verts.begin()) : -1;
}

/* ---- the dg model --------------------------------------------------------- */

static DerivedQuotientModel build_model_common(const Algebra& A0, const Idempotent& e, int J,
                                               int D, bool reduced) {
    if (J < 0) throw Err(0x34, "model depth must be nonnegative");
    if (A0.graded) {
        if (D < 0) throw Err(0x34, "a graded model needs a weight cap");
        if (!A0.exact && D > A0.N) throw Err(0x34, "weight cap exceeds the algebra window");
    } else {
        if (!A0.exact) throw Err(0x34, "an ungraded model needs an exact algebra");
        if (reduced) throw Err(0x34, "the reduced model requires a graded algebra");
        D = 0;
    }
    auto data = std::make_shared<DqData>();
    data->A = std::make_shared<Algebra>(A0);
    const Algebra& A = *data->A;
    const Field f = A.f;
    const bool graded = A.graded;
    data->e = e;
    data->R = corner_algebra(A, e);
    data->ae = ae_piece(A, e);
    data->ea = ea_piece(A, e);
    data->graded = graded;
    data->reduced = reduced;
    data->J = J;
    data->D = D;

    DgaWindow dga;
    dga.c.g.f = f;
    dga.c.g.nmin = -J;
    dga.c.g.nmax = 0;
    dga.c.g.D = D;

    auto place = [&](NW b, std::vector<int> t) {
        std::string lab = tuple_label(A, t);
        int idx = (int)dga.c.g.cells[b].size();
        dga.c.g.cells[b].push_back(lab);
        data->tix[b][std::move(lab)] = idx;
        data->tup[b].push_back(std::move(t));
    };

    /* degree 0: the algebra itself */
    for (int i = 0; i < A.dim(); ++i) {
        int w = graded ? A.wt(i) : 0;
        if (graded && w > D) continue;
        place({0, w}, {i});
    }

    /* letters sorted by weight, middles and tails bucketed by source vertex */
    std::vector<int> heads = data->ae.elems;
    std::sort(heads.begin(), heads.end(),
              [&A](int a, int b) { return A.wt(a) != A.wt(b) ? A.wt(a) < A.wt(b) : a < b; });
    std::map<int, std::vector<int>> mids, tails; /* source vertex -> letters */
    for (int r : data->R.elems) {
        if (reduced && A.wt(r) == 0) continue;
        mids[A.basis[r].src].push_back(r);
    }
    for (int b : data->ea.elems) tails[A.basis[b].src].push_back(b);
    for (auto* m : {&mids, &tails})
        for (auto& [v, ls] : *m) {
            (void)v;
            std::sort(ls.begin(), ls.end(), [&A](int a, int b) {
                return A.wt(a) != A.wt(b) ? A.wt(a) < A.wt(b) : a < b;
            });
        }
    std::vector<int> all_mids, all_tails;
    for (int r : data->R.elems)
        if (!reduced || A.wt(r) > 0) all_mids.push_back(r);
    all_tails = data->ea.elems;
    for (auto* ls : {&all_mids, &all_tails})
        std::sort(ls->begin(), ls->end(),
                  [&A](int a, int b) { return A.wt(a) != A.wt(b) ? A.wt(a) < A.wt(b) : a < b; });

    if (!e.verts.empty())
        for (int n = 1; n <= J; ++n) {
            std::vector<int> t(n + 1);
            std::function<void(int, int, int)> rec = [&](int slot, int wsum, int vprev) {
                const std::vector<int>* ls;
                if (slot < n) {
                    if (reduced) {
                        auto it = mids.find(vprev);
                        if (it == mids.end()) return;
                        ls = &it->second;
                    } else ls = &all_mids;
                } else {
                    if (reduced) {
                        auto it = tails.find(vprev);
                        if (it == tails.end()) return;
                        ls = &it->second;
                    } else ls = &all_tails;
                }
                for (int x : *ls) {
                    int w = wsum + A.wt(x);
                    if (graded && w > D) break; /* letters sorted by weight */
                    t[slot] = x;
                    if (slot == n) place({-n, graded ? w : 0}, t);
                    else rec(slot + 1, w, A.basis[x].tgt);
                }
            };
            for (int a : heads) {
                if (graded && A.wt(a) > D) break;
                t[0] = a;
                rec(1, A.wt(a), A.basis[a].tgt);
            }
        }

    /* differential: alternating sum of adjacent merges */
    for (auto& [b, tups] : data->tup) {
        int n = -b.first;
        if (n == 0 || tups.empty()) continue;
        NW up{b.first + 1, b.second};
        std::vector<SVec> srows(tups.size());
        const auto& upIx = data->tix[up];
        for (size_t c = 0; c < tups.size(); ++c) {
            const std::vector<int>& t = tups[c];
            std::map<int, Scalar> acc;
            for (int i = 0; i < n; ++i) {
                bool of = false;
                SVec prod = A.mul(t[i], t[i + 1], &of);
                if (of) throw Err(0x34, "differential escaped the algebra window");
                for (const auto& [k, cv] : prod) {
                    std::vector<int> t2;
                    t2.reserve(n);
                    t2.insert(t2.end(), t.begin(), t.begin() + i);
                    t2.push_back(k);
                    t2.insert(t2.end(), t.begin() + i + 2, t.end());
                    auto it = upIx.find(tuple_label(A, t2));
                    if (it == upIx.end()) throw Err(0x34, "differential left the model window");
                    Scalar v = (i % 2) ? -cv : cv;
                    auto jt = acc.find(it->second);
                    if (jt == acc.end()) acc.emplace(it->second, v);
                    else jt->second = jt->second + v;
                }
            }
            SVec row;
            for (const auto& [i2, v2] : acc)
                if (!v2.is_zero()) row.push_back({i2, v2});
            srows[c] = std::move(row);
        }
        SparseMatrix st((int)tups.size(), dga.c.g.dim(up), f);
        st.row = std::move(srows);
        dga.c.d[b] = st.transpose();
    }

    /* structural cells one degree past the window make those buckets unknown */
    if (!e.verts.empty()) {
        if (graded) {
            int nv = reduced ? (int)e.verts.size() : 1;
            std::vector<std::vector<char>> fr(nv, std::vector<char>(D + 1, 0));
            for (int a : data->ae.elems) {
                if (A.wt(a) > D) continue;
                int vi = reduced ? vert_pos(e.verts, A.basis[a].tgt) : 0;
                fr[vi][A.wt(a)] = 1;
            }
            for (int step = 0; step < J; ++step) {
                std::vector<std::vector<char>> nx(nv, std::vector<char>(D + 1, 0));
                for (int r : data->R.elems) {
                    if (reduced && A.wt(r) == 0) continue;
                    int vi = reduced ? vert_pos(e.verts, A.basis[r].src) : 0;
                    int vj = reduced ? vert_pos(e.verts, A.basis[r].tgt) : 0;
                    for (int w = A.wt(r); w <= D; ++w)
                        if (fr[vi][w - A.wt(r)]) nx[vj][w] = 1;
                }
                fr = std::move(nx);
            }
            for (int b : data->ea.elems) {
                int vi = reduced ? vert_pos(e.verts, A.basis[b].src) : 0;
                for (int w = A.wt(b); w <= D; ++w)
                    if (fr[vi][w - A.wt(b)]) dga.c.g.complete_override[{-J - 1, w}] = false;
            }
        } else if (!data->ae.elems.empty() && !data->ea.elems.empty()) {
            dga.c.g.complete_override[{-J - 1, 0}] = false;
        }
    }

    /* unit and product */
    for (const auto& [k, cv] : A.unit)
        dga.unit.push_back({data->tix.at({0, 0}).at(A.basis[k].label), cv});
    std::sort(dga.unit.begin(), dga.unit.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    auto dp = data;
    dga.mul = [dp](NW a, int i, NW b, int j) -> SVec {
        const DqData& dq = *dp;
        const Algebra& AA = *dq.A;
        const std::vector<int>& ta = dq.tup.at(a)[i];
        const std::vector<int>& tb = dq.tup.at(b)[j];
        bool midslot = (a.first < 0 && b.first < 0);
        bool of = false;
        SVec prod = AA.mul(ta.back(), tb.front(), &of);
        if (of) throw Err(0x34, "product escaped the algebra window");
        NW t{a.first + b.first, dq.graded ? a.second + b.second : 0};
        std::map<int, Scalar> acc;
        const std::map<std::string, int>* tixT = nullptr;
        for (const auto& [k, cv] : prod) {
            if (midslot && dq.reduced && AA.wt(k) == 0) continue; /* normalized part only */
            if (!tixT) {
                auto it = dq.tix.find(t);
                if (it == dq.tix.end()) throw Err(0x34, "product outside the model window");
                tixT = &it->second;
            }
            std::vector<int> t2;
            t2.reserve(ta.size() + tb.size() - 1);
            t2.insert(t2.end(), ta.begin(), ta.end() - 1);
            t2.push_back(k);
            t2.insert(t2.end(), tb.begin() + 1, tb.end());
            auto it = tixT->find(tuple_label(AA, t2));
            if (it == tixT->end()) throw Err(0x34, "product outside the model window");
            auto jt = acc.find(it->second);
            if (jt == acc.end()) acc.emplace(it->second, cv);
            else jt->second = jt->second + cv;
        }
        SVec out;
        for (const auto& [i2, v2] : acc)
            if (!v2.is_zero()) out.push_back({i2, v2});
        return out;
    };

    return DerivedQuotientModel{std::move(dga), std::move(data)};
}

DerivedQuotientModel build_model(const Algebra& A, const Idempotent& e, int J, int D) {
    return build_model_common(A, e, J, D, false);
}

DerivedQuotientModel build_model_reduced(const Algebra& A, const Idempotent& e, int J, int D) {
    return build_model_common(A, e, J, D, true);
}

CohomologyRing dq_cohomology_ring(const DerivedQuotientModel& m) { return cohomology(m.dga); }

/* ---- marked relations ------------------------------------------------------ */

static bool bucket_trusted(const CohomologyRing& H, const GradedWindow& g, NW b) {
    auto it = H.trusted.find(b);
    if (it != H.trusted.end()) return it->second;
    return g.complete({b.first - 1, b.second}) && g.complete(b) &&
           g.complete({b.first + 1, b.second});
}

static int word_vertex_at(const Quiver& q, const Word& u, int p) {
    return p == 0 ? q.arrows[u[0]].src : q.arrows[u[p - 1]].tgt;
}

static std::string subword_label(const Quiver& q, const Word& u, int from, int to, int vtx) {
    if (from == to) return "e_" + q.vertices[vtx];
    std::string s;
    for (int i = from; i < to; ++i) {
        if (i > from) s += "*";
        s += q.arrows[u[i]].name;
    }
    return s;
}

static int probe_weight_cap(const QuiverSpec& spec, const Algebra& A) {
    if (!A.graded) return 0;
    if (spec.trunc.internal_degree >= 0) return spec.trunc.internal_degree;
    int m = 0;
    for (const Relation& r : spec.relations)
        for (const RelTerm& t : r) m = std::max(m, (int)t.word.size());
    if (!A.exact) m = std::min(m, A.N);
    return m;
}

MarkedRelationsResult marked_relations(const QuiverSpec& spec) {
    Algebra A = build_algebra(spec);
    Idempotent e = idempotent_for(A, spec.marked);
    int D = probe_weight_cap(spec, A);
    int J = 2; /* H^{-1} needs good buckets at -2, -1, 0 */
    DerivedQuotientModel m =
        A.graded ? build_model_reduced(A, e, J, D) : build_model(A, e, J, D);
    CohomologyRing H = dq_cohomology_ring(m);
    const GradedWindow& g = m.dga.c.g;
    const Field f = A.f;

    MarkedRelationsResult res;
    /* total trusted H^{-1} with a global coordinate layout over its buckets */
    std::map<int, int> off;
    res.h1_trusted = true;
    for (int w = 0; w <= D; ++w) {
        NW b{-1, w};
        if (!bucket_trusted(H, g, b)) {
            res.h1_trusted = false;
            continue;
        }
        int dd = H.dim.count(b) ? H.dim.at(b) : 0;
        if (dd > 0) {
            off[w] = res.h1_dim;
            res.h1_dim += dd;
        }
    }

    /* every V-vertex marking of every relation */
    for (int ri = 0; ri < (int)spec.relations.size(); ++ri) {
        const Relation& rel = spec.relations[ri];
        std::vector<std::vector<int>> cand(rel.size());
        bool markable = !rel.empty();
        for (size_t tj = 0; tj < rel.size(); ++tj) {
            const Word& u = rel[tj].word;
            int l = (int)u.size();
            if (l == 0) {
                markable = false;
                break;
            }
            for (int p = 1; p < l; ++p)
                if (vert_pos(e.verts, word_vertex_at(spec.q, u, p)) >= 0)
                    cand[tj].push_back(p);
            if (vert_pos(e.verts, word_vertex_at(spec.q, u, 0)) >= 0) cand[tj].push_back(0);
            if (vert_pos(e.verts, spec.q.arrows[u[l - 1]].tgt) >= 0) cand[tj].push_back(l);
            if (cand[tj].empty()) {
                markable = false;
                break;
            }
        }
        if (!markable) continue;
        long total = 1;
        for (const auto& c : cand) total = std::min<long>(64, total * (long)c.size());
        std::vector<int> pick(rel.size(), 0);
        for (long mi = 0; mi < total; ++mi) {
            MarkedRelation mr;
            mr.rel = ri;
            std::map<int, Scalar> acc;
            int wb = 0;
            std::string lab;
            for (size_t tj = 0; tj < rel.size(); ++tj) {
                const Word& u = rel[tj].word;
                int l = (int)u.size();
                int p = cand[tj][pick[tj]];
                mr.split.push_back(p);
                int vtx = word_vertex_at(spec.q, u, p == 0 ? 0 : p);
                if (p == 0) vtx = spec.q.arrows[u[0]].src;
                PathWord pre = p == 0 ? PathWord{vtx, {}} : PathWord{-1, Word(u.begin(), u.begin() + p)};
                PathWord post =
                    p == l ? PathWord{spec.q.arrows[u[l - 1]].tgt, {}}
                           : PathWord{-1, Word(u.begin() + p, u.end())};
                if (A.graded) wb = l;
                if (!lab.empty()) lab += " + ";
                std::string cs = rel[tj].coeff.str();
                if (cs != "1") lab += cs + "*";
                lab += subword_label(spec.q, u, 0, p, vtx) + "|" +
                       subword_label(spec.q, u, p, l, vtx);
                SVec ra = A.reduce(pre), rb = A.reduce(post);
                for (const auto& [ai, ca] : ra)
                    for (const auto& [bi, cb] : rb) {
                        NW bkt{-1, A.graded ? A.wt(ai) + A.wt(bi) : 0};
                        std::string cl = A.basis[ai].label + "|" + A.basis[bi].label;
                        int ix = m.data->tix.at(bkt).at(cl);
                        Scalar v = rel[tj].coeff * ca * cb;
                        auto jt = acc.find(ix);
                        if (jt == acc.end()) acc.emplace(ix, v);
                        else jt->second = jt->second + v;
                    }
            }
            mr.label = lab;
            mr.bucket = {-1, A.graded ? wb : 0};
            for (const auto& [ix, v] : acc)
                if (!v.is_zero()) mr.chain.push_back({ix, v});
            if (H.reps.count(mr.bucket)) mr.cls = H.to_classes(mr.bucket, mr.chain);
            res.marked.push_back(std::move(mr));
            /* next marking, lexicographic over the candidate lists */
            for (int tj = (int)rel.size() - 1; tj >= 0; --tj) {
                if (++pick[tj] < (int)cand[tj].size()) break;
                pick[tj] = 0;
            }
        }
    }

    /* global H^{-1} coordinates of each marked class */
    auto gvec = [&](const MarkedRelation& mr) -> SVec {
        SVec v;
        auto it = off.find(mr.bucket.second);
        if (it == off.end()) return v;
        for (int k = 0; k < (int)mr.cls.size(); ++k)
            if (!mr.cls[k].is_zero()) v.push_back({it->second + k, mr.cls[k]});
        return v;
    };

    /* a basis among the marked classes themselves */
    {
        std::vector<SVec> rows;
        int rk = 0;
        for (int mi = 0; mi < (int)res.marked.size(); ++mi) {
            SVec v = gvec(res.marked[mi]);
            if (v.empty()) continue;
            rows.push_back(v);
            SparseMatrix mm((int)rows.size(), res.h1_dim, f);
            mm.row = rows;
            int r2 = rank(mm);
            if (r2 > rk) {
                rk = r2;
                res.basis_pick.push_back(mi);
            } else rows.pop_back();
        }
    }

    /* close the marked span under the two-sided H^0 action */
    std::vector<SVec> pool;
    for (const MarkedRelation& mr : res.marked) {
        SVec v = gvec(mr);
        if (!v.empty()) pool.push_back(v);
    }
    std::vector<NW> h0;
    for (const auto& [b, dd] : H.dim)
        if (b.first == 0 && dd > 0 && bucket_trusted(H, g, b)) h0.push_back(b);
    int rk = -1;
    while (true) {
        SparseMatrix mm((int)pool.size(), res.h1_dim, f);
        mm.row = pool;
        Rref rr = rref(mm);
        if (rr.rank() == rk) break;
        rk = rr.rank();
        std::vector<SVec> base = rr.rows;
        for (const SVec& v : base)
            for (const auto& [gi, cv] : v) {
                /* decompose the global coordinate */
                int w = -1, loc = gi;
                for (const auto& [w2, o2] : off)
                    if (gi >= o2 && gi < o2 + (H.dim.count({-1, w2}) ? H.dim.at({-1, w2}) : 0)) {
                        w = w2;
                        loc = gi - o2;
                    }
                if (w < 0) continue;
                NW bw{-1, w};
                for (NW bh : h0)
                    for (int k = 0; k < H.dim.at(bh); ++k) {
                        for (int side = 0; side < 2; ++side) {
                            auto key = side == 0
                                           ? std::make_tuple(bh, k, bw, loc)
                                           : std::make_tuple(bw, loc, bh, k);
                            auto pit = H.product.find(key);
                            if (pit == H.product.end()) continue;
                            int wt2 = w + bh.second;
                            auto oit = off.find(wt2);
                            if (oit == off.end()) continue;
                            SVec nv;
                            for (const auto& [ci, cc] : pit->second)
                                nv.push_back({oit->second + ci, cv * cc});
                            if (!nv.empty()) pool.push_back(nv);
                        }
                    }
            }
        if ((int)pool.size() > 4096) break; /* defensive cap; rank is what matters */
    }
    res.span_rank = std::max(rk, 0);
    res.spans = res.h1_trusted && res.span_rank == res.h1_dim;
    return res;
}

long h1_bound(const QuiverSpec& spec) {
    Algebra A = build_algebra(spec);
    Idempotent e = idempotent_for(A, spec.marked);
    QuotientAlgebra Q = quotient_by_idempotent_ideal(A, e);
    long d = Q.view.dim;
    long l = 0;
    for (const Relation& r : spec.relations) {
        long li = 1;
        for (const RelTerm& t : r) li *= std::max<long>(1, (long)t.word.size() - 1);
        l += li;
    }
    long bound = d * d * l;
    /* the trusted window must stay under the bound */
    int D = probe_weight_cap(spec, A);
    DerivedQuotientModel m = A.graded ? build_model_reduced(A, e, 2, D) : build_model(A, e, 2, D);
    CohomologyRing H = cohomology(m.dga.c);
    int h1 = 0;
    bool tr = true;
    for (int w = 0; w <= D; ++w) {
        NW b{-1, w};
        if (!bucket_trusted(H, m.dga.c.g, b)) {
            tr = false;
            continue;
        }
        h1 += H.dim.count(b) ? H.dim.at(b) : 0;
    }
    if (tr && h1 > bound)
        throw Err(0x35, "first-cohomology bound violated: dim " + std::to_string(h1) +
                            " exceeds " + std::to_string(bound));
    return bound;
}

/* ---- model-free H^{-1}: the kernel of the underived tensor product --------- */

std::map<int, int> h1_kernel_dims(const Algebra& A, const Idempotent& e, int D) {
    BimodulePiece ae = ae_piece(A, e), ea = ea_piece(A, e);
    Corner R = corner_algebra(A, e);
    const Field f = A.f;
    if (!A.graded) D = 0;
    if (!A.exact && D > A.N) throw Err(0x34, "window exceeds the algebra window");
    std::map<int, int> out;
    for (int w = 0; w <= D; ++w) {
        std::vector<std::pair<int, int>> pairs;
        std::map<std::pair<int, int>, int> pix;
        for (int a : ae.elems)
            for (int b : ea.elems) {
                if (A.graded && A.wt(a) + A.wt(b) != w) continue;
                pix[{a, b}] = (int)pairs.size();
                pairs.push_back({a, b});
            }
        if (pairs.empty()) continue;
        /* balancing moves x r (x) y - x (x) r y over the corner ring */
        std::vector<SVec> urows;
        for (int x : ae.elems)
            for (int rI : R.elems) {
                int rA = rI;
                for (int y : ea.elems) {
                    if (A.graded && A.wt(x) + A.wt(rA) + A.wt(y) != w) continue;
                    std::map<int, Scalar> acc;
                    bool of = false;
                    for (const auto& [k, c] : A.mul(x, rA, &of)) {
                        int ix = pix.at({k, y});
                        auto jt = acc.find(ix);
                        if (jt == acc.end()) acc.emplace(ix, c);
                        else jt->second = jt->second + c;
                    }
                    for (const auto& [k, c] : A.mul(rA, y, &of)) {
                        int ix = pix.at({x, k});
                        auto jt = acc.find(ix);
                        if (jt == acc.end()) acc.emplace(ix, -c);
                        else jt->second = jt->second - c;
                    }
                    if (of) throw Err(0x34, "window exceeds the algebra window");
                    SVec row;
                    for (const auto& [i2, v2] : acc)
                        if (!v2.is_zero()) row.push_back({i2, v2});
                    if (!row.empty()) urows.push_back(std::move(row));
                }
            }
        SparseMatrix U((int)urows.size(), (int)pairs.size(), f);
        U.row = std::move(urows);
        /* multiplication to A on the raw pair space */
        SparseMatrix M((int)pairs.size(), A.dim(), f);
        for (int p = 0; p < (int)pairs.size(); ++p) {
            bool of = false;
            M.row[p] = A.mul(pairs[p].first, pairs[p].second, &of);
            if (of) throw Err(0x34, "window exceeds the algebra window");
        }
        int dim = (int)pairs.size() - rank(U) - rank(M);
        if (dim != 0) out[w] = dim;
        if (!A.graded) break;
    }
    return out;
}

/* ---- Tor oracle ------------------------------------------------------------ */

TorResult tor_oracle(const Algebra& A, const Idempotent& e, int j, int D) {
    if (j < 0) throw Err(0x34, "Tor degree must be nonnegative");
    TorResult res;
    res.j = j;
    if (e.verts.empty()) {
        res.window = D;
        return res;
    }
    Corner R = corner_algebra(A, e);
    BimodulePiece ae = ae_piece(A, e), ea = ea_piece(A, e);
    const Field f = A.f;
    int cap = D >= 0 ? D : (A.exact ? -1 : A.N);
    if (!A.exact && cap > A.N) throw Err(0x34, "oracle window exceeds the algebra window");
    res.window = cap;

    /* Ae as a right module over the corner ring */
    ModuleWindow M;
    M.A = R.view;
    for (int a : ae.elems) {
        if (cap >= 0 && A.wt(a) > cap) continue;
        M.wt.push_back(A.wt(a));
        M.vtx.push_back(A.basis[a].tgt);
        M.label.push_back(A.basis[a].label);
    }
    M.dim = (int)M.wt.size();
    std::vector<int> mel; /* module index -> A basis index */
    for (int a : ae.elems)
        if (cap < 0 || A.wt(a) <= cap) mel.push_back(a);
    std::map<int, int> mback;
    for (int i = 0; i < (int)mel.size(); ++i) mback[mel[i]] = i;
    const Algebra* ap = &A;
    std::vector<int> relems = R.elems;
    M.act = [ap, mel, mback, relems](int m2, int r2) -> SVec {
        bool of = false;
        SVec t = ap->mul(mel[m2], relems[r2], &of);
        if (of) throw Err(0x34, "module action escaped the algebra window");
        SVec out;
        for (const auto& [k, c] : t) {
            auto it = mback.find(k);
            if (it == mback.end()) throw Err(0x34, "module action escaped the weight cap");
            out.push_back({it->second, c});
        }
        return out;
    };
    ResolutionWindow r = minimal_resolution(M, j + 1, cap);
    int nt = (int)r.terms.size();

    /* C_i = P_i tensor eA: cells (summand, eA element), weight-blocked */
    auto cells_of = [&](int i) {
        std::map<int, std::vector<std::pair<int, int>>> cw;
        if (i < 0 || i >= nt) return cw;
        for (int s = 0; s < (int)r.terms[i].size(); ++s)
            for (int b : ea.elems) {
                if (A.basis[b].src != r.terms[i][s].vertex) continue;
                int w = r.terms[i][s].shift + A.wt(b);
                if (cap >= 0 && w > cap) continue;
                cw[w].push_back({s, b});
            }
        return cw;
    };
    auto cj = cells_of(j), cjm = cells_of(j - 1), cjp = cells_of(j + 1);

    /* q-columns of the resolution differentials, read at generator cells */
    auto pixmaps = [&](int i) {
        std::map<std::pair<int, int>, int> px;
        for (int c = 0; c < (int)r.pbasis[i].size(); ++c) px[r.pbasis[i][c]] = c;
        return px;
    };
    auto dmat_between = [&](int i, std::map<int, std::vector<std::pair<int, int>>>& src,
                            std::map<int, std::vector<std::pair<int, int>>>& tgt) {
        /* d tensor id per weight block: rows = tgt cells, cols = src cells */
        std::map<int, SparseMatrix> dW;
        if (i < 1 || i >= nt) return dW;
        auto pxi = pixmaps(i);
        SparseMatrix dt = r.d[i].transpose();
        std::map<int, std::map<std::pair<int, int>, int>> tix;
        for (auto& [w, cs] : tgt)
            for (int c = 0; c < (int)cs.size(); ++c) tix[w][cs[c]] = c;
        for (auto& [w, cs] : src) {
            SparseMatrix m2((int)(tgt.count(w) ? tgt[w].size() : 0), (int)cs.size(), f);
            for (int c = 0; c < (int)cs.size(); ++c) {
                auto [s, b] = cs[c];
                int vp = vert_pos(e.verts, r.terms[i][s].vertex);
                int gcell = pxi.at({s, R.view.idem[vp]});
                std::map<int, Scalar> acc;
                for (const auto& [pc, cq] : dt.row[gcell]) {
                    auto [s2, q] = r.pbasis[i - 1][pc];
                    bool of = false;
                    SVec t = A.mul(R.elems[q], b, &of);
                    if (of) throw Err(0x34, "oracle differential escaped the window");
                    for (const auto& [k, c2] : t) {
                        auto it = tix[w].find({s2, k});
                        if (it == tix[w].end())
                            throw Err(0x34, "oracle differential left the weight block");
                        Scalar v = cq * c2;
                        auto jt = acc.find(it->second);
                        if (jt == acc.end()) acc.emplace(it->second, v);
                        else jt->second = jt->second + v;
                    }
                }
                for (const auto& [rI, v2] : acc)
                    if (!v2.is_zero()) m2.set(rI, c, v2);
            }
            dW[w] = std::move(m2);
        }
        return dW;
    };
    auto dj = dmat_between(j, cj, cjm);
    auto djp = dmat_between(j + 1, cjp, cj);

    for (auto& [w, cs] : cj) {
        int dim = (int)cs.size();
        int rin = djp.count(w) ? rank(djp.at(w)) : 0;
        int rout = dj.count(w) ? rank(dj.at(w)) : 0;
        int h = dim - rin - rout;
        if (h != 0) res.by_weight[w] = h;
        res.dim += h;
    }
    if (cap >= 0 && res.by_weight.count(cap) && res.by_weight.at(cap) != 0) res.edge = true;
    return res;
}

/* ---- stratification -------------------------------------------------------- */

StratifyingVerdict is_stratifying(const Algebra& A, const Idempotent& e, int J, int D) {
    DerivedQuotientModel m = A.graded ? build_model_reduced(A, e, J, D) : build_model(A, e, J, D);
    CohomologyRing H = cohomology(m.dga.c);
    return is_stratifying(m, H);
}

StratifyingVerdict is_stratifying(const DerivedQuotientModel& m, const CohomologyRing& H) {
    StratifyingVerdict v;
    int J = m.data->J, D = m.data->D;
    int wmax = m.data->graded ? D : 0;
    for (int n = 1; n <= J; ++n) {
        bool all = true;
        for (int w = 0; w <= wmax; ++w) {
            NW b{-n, w};
            if (!bucket_trusted(H, m.dga.c.g, b)) {
                all = false;
                continue;
            }
            int dd = H.dim.count(b) ? H.dim.at(b) : 0;
            if (dd > 0 && v.stratifying) {
                v.stratifying = false;
                v.detail = "H^{" + std::to_string(-n) + "} is nonzero at weight " +
                           std::to_string(w) + " (dim " + std::to_string(dd) + ")";
            }
        }
        if (all) v.depth = n;
        else break;
    }
    if (v.stratifying)
        v.detail = "no negative cohomology within the trusted window (depth " +
                   std::to_string(v.depth) + ")";
    return v;
}

} // namespace ncdq
