#include "ncdq/resolutions_ext.hpp"

#include "ncdq/derived_quotient.hpp"
#include "ncdq/koszul.hpp"

#include <algorithm>

namespace ncdq {

ModuleWindow simple_module(const AlgebraView& A, int vertex) {
    if (vertex < 0 || vertex >= (int)A.idem.size())
        throw Err(0x70, "simple_module: vertex outside the vertex range");
    ModuleWindow M;
    M.A = A;
    M.dim = 1;
    M.wt = {0};
    M.vtx = {vertex};
    M.label = {"S_" + std::to_string(vertex)};
    Field f = A.f;
    int unit = A.idem[vertex];
    M.act = [f, unit](int, int a) -> SVec {
        if (a == unit) return SVec{{0, Scalar::one(f)}};
        return {};
    };
    return M;
}

SimpleTop simple_top(const Algebra& A, const Idempotent& e) {
    SimpleTop st;
    st.quotient = quotient_by_idempotent_ideal(A, e);
    const AlgebraView& qv = st.quotient.view;
    if (qv.dim == 0) throw Err(0x70, "A/AeA is zero, so it has no simple top");
    /* local <=> one residue line over the nilpotent positive part */
    int residue = qv.dim - (int)qv.radical.size();
    if (residue != 1 || qv.idem.size() != 1)
        throw Err(0x70, "A/AeA is not local: residue part has dimension " +
                            std::to_string(residue) + " with " + std::to_string(qv.idem.size()) +
                            " surviving vertex idempotents");
    st.vertex = qv.src[qv.idem[0]];
    st.M = simple_module(view_of(A), st.vertex);
    return st;
}

/* ---- minimal resolutions ------------------------------------------------- */

ResolutionWindow minimal_resolution(const ModuleWindow& M0, int L, int D) {
    ResolutionWindow R;
    R.A = M0.A;
    R.M = M0;
    R.L = L;
    R.D = D;
    const Field f = M0.A.f;
    const AlgebraView& V = M0.A;
    const int cap = D;
    if (cap < 0 && !V.exact)
        throw Err(0x71, "a resolution over a truncated algebra needs a weight cap");
    if (cap >= 0 && !V.exact && cap > V.wcap)
        throw Err(0x71, "resolution weight cap exceeds the algebra window");

    /* the current syzygy module, on an explicit basis */
    int dim = M0.dim;
    std::vector<int> wt = M0.wt, vtx = M0.vtx;
    std::function<SVec(int, int)> act = M0.act;
    if (cap >= 0)
        for (int m = 0; m < dim; ++m)
            if (wt[m] > cap) throw Err(0x71, "module basis exceeds the weight cap");
    SparseMatrix emb; /* embedding of the current module into the previous P */

    for (int step = 0; step <= L; ++step) {
        if (dim == 0) break; /* resolved completely */
        /* minimal generators = basis of module / module*rad */
        std::vector<SVec> sub;
        for (int m = 0; m < dim; ++m)
            for (int r : V.radical) {
                if (cap >= 0 && wt[m] + V.wt[r] > cap) continue;
                SVec v = act(m, r);
                if (!v.empty()) sub.push_back(v);
            }
        QuotientBasis qb = quotient_basis(dim, sub, f);
        std::vector<int> gens = qb.rep_cols;
        if (gens.empty()) throw Err(0x71, "graded cover failed: no generators for a nonzero module");
        std::vector<ProjSummand> ts;
        for (int g : gens) ts.push_back({vtx[g], wt[g]});

        /* basis of the projective term, capped by weight */
        std::vector<std::pair<int, int>> pb;
        std::map<std::pair<int, int>, int> pix;
        for (int s = 0; s < (int)ts.size(); ++s)
            for (int a = 0; a < V.dim; ++a) {
                if (V.src[a] != ts[s].vertex) continue;
                if (cap >= 0 && ts[s].shift + V.wt[a] > cap) continue;
                pix[{s, a}] = (int)pb.size();
                pb.push_back({s, a});
            }

        /* cover pi: P -> module, column (s, a) = gen_s * a */
        SparseMatrix cols((int)pb.size(), dim, f);
        for (int c = 0; c < (int)pb.size(); ++c) {
            auto [s, a] = pb[c];
            cols.row[c] = act(gens[s], a);
        }
        SparseMatrix pi = cols.transpose();

        R.terms.push_back(ts);
        R.pbasis.push_back(pb);
        /* d in projective coordinates: embed the module when it is a syzygy */
        R.d.push_back(step == 0 ? pi : emb.transpose().mul(pi));

        if (step == L) break; /* window ends here; next kernel not computed */

        /* syzygies: kernel of pi, echelon basis with free-column coordinates */
        Rref rr = rref(pi);
        std::vector<int> freec;
        for (int c = 0; c < (int)pb.size(); ++c)
            if (!rr.is_pivot(c)) freec.push_back(c);
        std::vector<SVec> K;
        for (int c : freec) {
            SVec v;
            for (size_t i = 0; i < rr.rows.size(); ++i) {
                Scalar a = sv_get(rr.rows[i], c, f);
                if (!a.is_zero()) v.emplace_back(rr.pivot_col[i], -a);
            }
            v.emplace_back(c, Scalar::one(f));
            std::sort(v.begin(), v.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            K.push_back(v);
        }
        for (const SVec& k : K) {
            bool rad = true;
            for (const auto& [ci, cv] : k) {
                (void)cv;
                if (V.wt[pb[ci].second] == 0) rad = false;
            }
            if (!rad) {
                R.minimal = false;
                R.notes.push_back("non-radical kernel entry after step " + std::to_string(step));
            }
        }

        /* the kernel becomes the next module */
        emb = SparseMatrix((int)K.size(), (int)pb.size(), f);
        emb.row = K;
        std::vector<int> nwt, nvtx;
        for (const SVec& k : K) {
            auto [s, a] = pb[k.front().first];
            nwt.push_back(ts[s].shift + V.wt[a]);
            nvtx.push_back(V.tgt[a]);
        }
        AlgebraView Vc = V;
        auto pbC = pb;
        auto pixC = pix;
        auto KC = K;
        auto freeC = freec;
        act = [Vc, pbC, pixC, KC, freeC, f](int l, int a2) -> SVec {
            /* act on projective coordinates, then read off kernel coordinates
             * at the echelon free columns and verify the residual */
            std::map<int, Scalar> acc;
            for (const auto& [ci, c] : KC[l]) {
                auto [s, b] = pbC[ci];
                bool of = false;
                SVec prod = Vc.mul(b, a2, &of);
                if (of) throw Err(0x71, "syzygy action escaped the algebra window");
                for (const auto& [b2, c2] : prod) {
                    auto it = pixC.find({s, b2});
                    if (it == pixC.end()) throw Err(0x71, "syzygy action escaped the weight cap");
                    Scalar add = c * c2;
                    auto jt = acc.find(it->second);
                    if (jt == acc.end()) acc.emplace(it->second, add);
                    else jt->second = jt->second + add;
                }
            }
            SVec w;
            for (const auto& [i2, c2] : acc)
                if (!c2.is_zero()) w.push_back({i2, c2});
            SVec out, resid = w;
            for (int l2 = 0; l2 < (int)freeC.size(); ++l2) {
                Scalar c2 = sv_get(w, freeC[l2], f);
                if (!c2.is_zero()) {
                    out.push_back({l2, c2});
                    resid = sv_axpy(resid, -c2, KC[l2]);
                }
            }
            if (!resid.empty()) throw Err(0x71, "syzygy action left the kernel");
            return out;
        };
        dim = (int)K.size();
        wt = nwt;
        vtx = nvtx;
    }

    if (cap >= 0) {
        R.window_limited = true;
        R.notes.push_back("weight-capped: dimensions trusted per weight <= " + std::to_string(cap));
    }
    if ((int)R.terms.size() <= L) R.notes.push_back("module resolved to zero");
    /* consecutive composites vanish */
    for (size_t i = 1; i < R.d.size(); ++i) {
        SparseMatrix sq = R.d[i - 1].mul(R.d[i]);
        for (const SVec& r : sq.row)
            if (!r.empty()) throw Err(0x71, "resolution differentials do not compose to zero");
    }
    return R;
}

/* ---- Ext of a simple ------------------------------------------------------ */

static std::vector<std::map<std::pair<int, int>, int>> pbasis_index(const ResolutionWindow& r) {
    std::vector<std::map<std::pair<int, int>, int>> pix(r.pbasis.size());
    for (size_t i = 0; i < r.pbasis.size(); ++i)
        for (int c = 0; c < (int)r.pbasis[i].size(); ++c) pix[i][r.pbasis[i][c]] = c;
    return pix;
}

/* apply a map given on generators (img[s] over pbasis[tgt]) to a vector over
 * pbasis[src]: module maps extend by (s, a) |-> img[s] * a */
static SVec apply_gen_map(const ResolutionWindow& r,
                          const std::vector<std::map<std::pair<int, int>, int>>& pix, int src,
                          int tgt, const std::vector<SVec>& img, const SVec& w) {
    std::map<int, Scalar> acc;
    for (const auto& [ci, c] : w) {
        auto [s, a] = r.pbasis[src][ci];
        for (const auto& [di, dc] : img[s]) {
            auto [t, b] = r.pbasis[tgt][di];
            bool of = false;
            SVec prod = r.A.mul(b, a, &of);
            if (of) throw Err(0x72, "chain lift escaped the algebra window");
            for (const auto& [b2, c2] : prod) {
                auto it = pix[tgt].find({t, b2});
                if (it == pix[tgt].end()) throw Err(0x72, "chain lift escaped the weight cap");
                Scalar add = c * dc * c2;
                auto jt = acc.find(it->second);
                if (jt == acc.end()) acc.emplace(it->second, add);
                else jt->second = jt->second + add;
            }
        }
    }
    SVec out;
    for (const auto& [i, c] : acc)
        if (!c.is_zero()) out.push_back({i, c});
    return out;
}

std::map<int, int> ext_dims_via_hom_complex(const ResolutionWindow& r) {
    if (r.M.dim != 1) throw Err(0x72, "hom-complex route expects a simple module");
    const int v = r.M.vtx[0];
    const int n = (int)r.terms.size();
    const Field f = r.A.f;
    auto pix = pbasis_index(r);
    /* svert[j] = the S-supported summands of P_j; Hom(P_j, S) = k^{svert[j]} */
    std::vector<std::vector<int>> svert(n);
    for (int j = 0; j < n; ++j)
        for (int s = 0; s < (int)r.terms[j].size(); ++s)
            if (r.terms[j][s].vertex == v) svert[j].push_back(s);
    /* T_j: Hom(P_j, S) -> Hom(P_{j+1}, S), phi |-> phi after d_{j+1}; the
     * dual-of-summand functional reads the coefficient at its generator cell */
    std::vector<SparseMatrix> T;
    for (int j = 0; j + 1 < n; ++j) {
        SparseMatrix t((int)svert[j + 1].size(), (int)svert[j].size(), f);
        for (int row = 0; row < (int)svert[j + 1].size(); ++row) {
            int gcell = pix[j + 1].at({svert[j + 1][row], r.A.idem[v]});
            for (int col = 0; col < (int)svert[j].size(); ++col) {
                int scell = pix[j].at({svert[j][col], r.A.idem[v]});
                Scalar c = r.d[j + 1].get(scell, gcell);
                if (!c.is_zero()) t.set(row, col, c);
            }
        }
        T.push_back(t);
    }
    bool finished = n <= r.L; /* the final kernel was computed and was zero */
    std::map<int, int> dims;
    for (int j = 0; j < n; ++j) {
        if (j == n - 1 && !finished) break; /* outgoing differential unknown */
        int rin = (j > 0) ? rank(T[j - 1]) : 0;
        int rout = (j + 1 < n) ? rank(T[j]) : 0;
        dims[j] = (int)svert[j].size() - rin - rout;
    }
    return dims;
}

ExtAlgebraWindow ext_algebra(const ResolutionWindow& r) {
    if (r.M.dim != 1) throw Err(0x72, "ext_algebra expects a simple module");
    ExtAlgebraWindow E;
    const int v = r.M.vtx[0];
    E.vertex = v;
    E.L = (int)r.terms.size() - 1;
    E.D = r.D;
    const Field f = r.A.f;
    auto pix = pbasis_index(r);
    for (int j = 0; j <= E.L; ++j) {
        std::vector<std::pair<int, int>> b;
        for (int s = 0; s < (int)r.terms[j].size(); ++s)
            if (r.terms[j][s].vertex == v) b.push_back({s, r.terms[j][s].shift});
        E.dims[j] = (int)b.size();
        for (const auto& [s, w] : b) {
            (void)s;
            E.dim_by_wt[{j, w}]++;
        }
        E.basis[j] = std::move(b);
    }
    /* independent recomputation from the hom complex */
    E.two_route_ok = true;
    for (const auto& [j, dd] : ext_dims_via_hom_complex(r))
        if (dd != E.dims.at(j)) {
            E.two_route_ok = false;
            E.notes.push_back("hom-complex route disagrees at degree " + std::to_string(j));
        }
    if (!r.minimal) E.notes.push_back("resolution not minimal; cover dimensions are invalid");
    if (r.window_limited) E.notes.push_back("weight-capped window: use dim_by_wt up to the cap");

    /* Yoneda products by chain lifting: a class is the dual of an S-supported
     * summand; its lift through i steps reads off products with degree-i
     * classes at generator cells (well defined over a minimal resolution) */
    std::vector<Solver> sv;
    for (const SparseMatrix& m : r.d) sv.push_back(make_solver(m));
    std::vector<SparseMatrix> dt;
    for (const SparseMatrix& m : r.d) dt.push_back(m.transpose());

    std::map<std::pair<int, int>, std::vector<std::vector<SVec>>> lifts;
    for (int j = 0; j <= E.L; ++j)
        for (int b = 0; b < (int)E.basis[j].size(); ++b) {
            int tb = E.basis[j][b].first;
            std::vector<std::vector<SVec>> lf;
            std::vector<SVec> img0(r.terms[j].size());
            auto x0 = sv[0].solve(SVec{{0, Scalar::one(f)}});
            if (!x0) throw Err(0x72, "projective cover is not surjective onto the simple");
            img0[tb] = *x0;
            lf.push_back(img0);
            for (int k = 1; j + k <= E.L; ++k) {
                std::vector<SVec> imgk(r.terms[j + k].size());
                bool fail = false;
                for (int u = 0; u < (int)r.terms[j + k].size(); ++u) {
                    int gcell = pix[j + k].at({u, r.A.idem[r.terms[j + k][u].vertex]});
                    /* column of d_{j+k} at the generator cell of summand u */
                    const SVec& w = dt[j + k].row[gcell];
                    SVec rhs = apply_gen_map(r, pix, j + k - 1, k - 1, lf[k - 1], w);
                    if (rhs.empty()) continue;
                    auto x = sv[k].solve(rhs);
                    if (!x) {
                        fail = true;
                        break;
                    }
                    imgk[u] = *x;
                }
                if (fail) {
                    E.notes.push_back("lift of class (" + std::to_string(j) + "," +
                                      std::to_string(b) + ") stopped at step " + std::to_string(k) +
                                      ": window too small");
                    break;
                }
                lf.push_back(std::move(imgk));
            }
            lifts[{j, b}] = std::move(lf);
        }
    for (int i = 0; i <= E.L; ++i)
        for (int j = 0; i + j <= E.L; ++j)
            for (int a = 0; a < (int)E.basis[i].size(); ++a)
                for (int b = 0; b < (int)E.basis[j].size(); ++b) {
                    const auto& lf = lifts.at({j, b});
                    if ((int)lf.size() <= i) continue; /* lift unavailable; noted above */
                    int gcell = pix[i].at({E.basis[i][a].first, r.A.idem[v]});
                    SVec coords;
                    for (int w = 0; w < (int)E.basis[i + j].size(); ++w) {
                        int sw = E.basis[i + j][w].first;
                        Scalar c = sv_get(lf[i][sw], gcell, f);
                        if (!c.is_zero()) coords.push_back({w, c});
                    }
                    E.product[{i, a, j, b}] = coords;
                }
    return E;
}

/* ---- two-route consistency ------------------------------------------------ */

static bool bucket_trusted(const CohomologyRing& H, const GradedWindow& g, NW b) {
    auto it = H.trusted.find(b);
    if (it != H.trusted.end()) return it->second;
    return g.complete({b.first - 1, b.second}) && g.complete(b) &&
           g.complete({b.first + 1, b.second});
}

ThmAReport theorem_a_consistency(const Algebra& A, const Idempotent& e, int J, int D, int L) {
    ThmAReport rep;
    rep.notes.push_back("the Ext-algebra is dualized with zero differential (formality assumed)");
    if (!A.graded) {
        rep.status = "requires a graded algebra";
        return rep;
    }
    SimpleTop st;
    try {
        st = simple_top(A, e);
    } catch (const Err& er) {
        rep.status = std::string("hypothesis violated: ") + er.what();
        return rep;
    }
    rep.hypothesis_ok = true;
    ResolutionWindow res = minimal_resolution(st.M, L, D);
    ExtAlgebraWindow E = ext_algebra(res);

    /* Ext(S) as a dga window with zero differential */
    DgaWindow eg;
    eg.c.g.f = A.f;
    eg.c.g.nmin = 0;
    eg.c.g.nmax = E.L;
    eg.c.g.D = D;
    std::map<std::pair<int, int>, std::pair<NW, int>> cellof; /* (deg, class) -> (bucket, cell) */
    for (const auto& [j, bs] : E.basis)
        for (int b = 0; b < (int)bs.size(); ++b) {
            NW bu{j, bs[b].second};
            cellof[{j, b}] = {bu, (int)eg.c.g.cells[bu].size()};
            eg.c.g.cells[bu].push_back("x" + std::to_string(j) + "_" + std::to_string(b));
        }
    bool finished = (int)res.terms.size() <= L;
    if (!finished) /* degrees past the window could hold more generators */
        for (int jd = E.L + 1; jd <= J + 2; ++jd)
            for (int w = 1; w <= D; ++w) eg.c.g.complete_override[{jd, w}] = false;
    if (E.dims.at(0) != 1) {
        rep.status = "Ext^0 is not one-dimensional";
        return rep;
    }
    eg.unit = {{0, Scalar::one(A.f)}};
    auto Ec = std::make_shared<ExtAlgebraWindow>(std::move(E));
    auto cm = std::make_shared<std::map<std::pair<int, int>, std::pair<NW, int>>>(std::move(cellof));
    eg.mul = [Ec, cm](NW ba, int i, NW bb, int j) -> SVec {
        int da = ba.first, db = bb.first;
        int ia = -1, ib = -1;
        for (const auto& [k, bc] : *cm) {
            if (k.first == da && bc.first == ba && bc.second == i) ia = k.second;
            if (k.first == db && bc.first == bb && bc.second == j) ib = k.second;
        }
        if (ia < 0 || ib < 0) throw Err(0x72, "Ext product at an unknown cell");
        auto it = Ec->product.find({da, ia, db, ib});
        if (it == Ec->product.end()) throw Err(0x72, "Ext product outside the lifted window");
        NW tb{da + db, ba.second + bb.second};
        SVec out;
        for (const auto& [w, c] : it->second) {
            auto bc = cm->at({da + db, w});
            if (bc.first != tb) throw Err(0x72, "Ext product violates the weight grading");
            out.push_back({bc.second, c});
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        return out;
    };

    AugmentedDgaWindow ag = augment(eg, D);
    DgaWindow dual = koszul_dual(ag, D);
    CohomologyRing Hd = cohomology(dual.c);

    DerivedQuotientModel m = build_model_reduced(A, e, J, D);
    CohomologyRing Hm = cohomology(m.dga.c);

    /* compare on the common trusted window */
    rep.consistent = true;
    for (int n = 0; n >= -J; --n)
        for (int w = 0; w <= D; ++w) {
            NW b{n, w};
            if (!bucket_trusted(Hm, m.dga.c.g, b) || !bucket_trusted(Hd, dual.c.g, b)) continue;
            int dm = Hm.dim.count(b) ? Hm.dim.at(b) : 0;
            int dd = Hd.dim.count(b) ? Hd.dim.at(b) : 0;
            if (dm == 0 && dd == 0) continue;
            rep.model_dims[b] = dm;
            rep.dual_dims[b] = dd;
            if (dm != dd) rep.consistent = false;
        }
    rep.status = rep.consistent ? "consistent" : "inconsistent (possible non-formality)";
    return rep;
}

} // namespace ncdq
