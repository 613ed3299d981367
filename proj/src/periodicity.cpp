#include "ncdq/periodicity.hpp"

#include <algorithm>
#include <set>

namespace ncdq {

static bool bucket_trusted(const CohomologyRing& H, const GradedWindow& g, NW b) {
    auto it = H.trusted.find(b);
    if (it != H.trusted.end()) return it->second;
    return g.complete({b.first - 1, b.second}) && g.complete(b) &&
           g.complete({b.first + 1, b.second});
}

static bool degree_trusted(const CohomologyRing& H, const GradedWindow& g, int n, int D) {
    for (int w = 0; w <= D; ++w)
        if (!bucket_trusted(H, g, {n, w})) return false;
    return true;
}

static int hdim(const CohomologyRing& H, NW b) { return H.dim.count(b) ? H.dim.at(b) : 0; }

/* trusted window depth: largest d with every degree -1..-d fully trusted */
static int trusted_depth(const CohomologyRing& H, const GradedWindow& g, int J, int D) {
    int d = 0;
    for (int n = 1; n <= J; ++n) {
        if (!degree_trusted(H, g, -n, D)) break;
        d = n;
    }
    return d;
}

/* the action of a candidate on one degree: 1 = iso, 0 = fails, -1 = unverifiable */
static int action_iso(const CohomologyRing& H, const GradedWindow& g, const EtaCandidate& eta,
                      int j, int D, int* checked_dim) {
    int we = eta.bucket.second, p = eta.p;
    if (!degree_trusted(H, g, j, D) || !degree_trusted(H, g, j - p, D)) return -1;
    /* sources up to weight D - we, targets shifted by we */
    std::map<int, int> soff, toff;
    int S = 0, T = 0;
    for (int w = 0; w + we <= D; ++w) {
        int dd = hdim(H, {j, w});
        if (dd) {
            soff[w] = S;
            S += dd;
        }
    }
    for (int v = 0; v <= D; ++v) {
        int dd = hdim(H, {j - p, v});
        if (dd == 0) continue;
        if (v < we) return 0; /* no source can reach this weight */
        toff[v] = T;
        T += dd;
    }
    *checked_dim = S + T;
    if (S != T) return 0;
    if (S == 0) return 1;
    std::vector<SVec> cols;
    for (const auto& [w, off] : soff) {
        (void)off;
        NW sb{j, w};
        for (int i = 0; i < hdim(H, sb); ++i) {
            auto it = H.product.find({eta.bucket, eta.cell, sb, i});
            if (it == H.product.end()) return -1;
            SVec col;
            int base = toff.count(w + we) ? toff.at(w + we) : -1;
            for (const auto& [k, c] : it->second) {
                if (base < 0) return 0; /* nonzero image in an empty target */
                col.push_back({base + k, c});
            }
            cols.push_back(col);
        }
    }
    SparseMatrix M(S, T, H.f); /* rows = source index, entries in target coords */
    for (int i = 0; i < S; ++i) M.row[i] = cols[i];
    return rank(M) == S ? 1 : 0;
}

EtaSearch find_eta(const DerivedQuotientModel& m, const CohomologyRing& H, int p) {
    if (p < 1) throw Err(0x60, "the period must be positive");
    const GradedWindow& g = m.dga.c.g;
    int J = -g.nmin, D = g.D;
    if (J < 2 * p) throw Err(0x60, "window too shallow for the period");
    EtaSearch es;
    es.p = p;
    es.window_ok = trusted_depth(H, g, J, D) >= 2 * p;
    if (!es.window_ok) es.notes.push_back("trusted depth is below twice the period");
    for (int w = 0; w <= D; ++w) {
        NW b{-p, w};
        if (!bucket_trusted(H, g, b)) {
            if (hdim(H, b)) es.notes.push_back("untrusted candidate bucket skipped");
            continue;
        }
        for (int i = 0; i < hdim(H, b); ++i) {
            EtaCandidate cand{p, b, i};
            bool ok = true;
            int nontrivial = 0;
            for (int j = 0; j - p >= -J && ok; --j) {
                int cd = 0;
                int r = action_iso(H, g, cand, j, D, &cd);
                if (r == 0) ok = false;
                else if (r == 1 && cd > 0) ++nontrivial;
                else if (r == -1)
                    es.notes.push_back("degree " + std::to_string(j) +
                                       " skipped (outside the trusted window)");
            }
            if (ok && nontrivial > 0) es.found.push_back(cand);
        }
    }
    if (es.found.empty() && es.notes.empty())
        es.notes.push_back("no class acts isomorphically across the window");
    return es;
}

bool centrality_check(const DerivedQuotientModel& m, const CohomologyRing& H,
                      const EtaCandidate& eta) {
    const GradedWindow& g = m.dga.c.g;
    (void)g;
    for (const auto& [b, dd] : H.dim) {
        for (int i = 0; i < dd; ++i) {
            auto l = H.product.find({eta.bucket, eta.cell, b, i});
            auto r = H.product.find({b, i, eta.bucket, eta.cell});
            if (l == H.product.end() || r == H.product.end()) continue;
            /* central in H as a ring: eta x - x eta = 0, no sign */
            SVec rs = r->second;
            for (auto& [k, c] : rs) {
                (void)k;
                c = -c;
            }
            SVec comm = sv_add(l->second, rs);
            for (const auto& [k, c] : comm) {
                (void)k;
                if (!c.is_zero()) return false;
            }
        }
    }
    return true;
}

LocalizedRingWindow localize_at_eta(const DerivedQuotientModel& m, const CohomologyRing& H,
                                    const EtaCandidate& eta) {
    if (!centrality_check(m, H, eta)) throw Err(0x60, "eta is not central");
    const GradedWindow& g = m.dga.c.g;
    int J = -g.nmin, D = g.D, p = eta.p;
    LocalizedRingWindow L;
    L.p = p;
    /* central localization is flat: trusted degree j <= 0 keeps its dimension */
    for (int j = -J; j <= 0; ++j) {
        if (!degree_trusted(H, g, j, D)) {
            L.notes.push_back("degree " + std::to_string(j) + " untrusted, skipped");
            continue;
        }
        int s = 0;
        for (int w = 0; w <= D; ++w) s += hdim(H, {j, w});
        L.dims[j] = s;
        L.source_deg[j] = j;
    }
    /* positive degrees exist after inverting eta; fold down by the period */
    for (int j = 1; j <= 2 * p; ++j) {
        int k = (j + p - 1) / p;
        int jd = j - k * p; /* in (-p, 0] */
        if (!L.dims.count(jd)) continue;
        L.dims[j] = L.dims.at(jd);
        L.source_deg[j] = jd;
    }
    for (const auto& [j, dj] : L.dims) {
        if (!L.dims.count(j - p)) continue;
        if (L.dims.at(j - p) != dj) L.periodic = false;
    }
    if (!L.periodic) L.notes.push_back("window dimensions are not period-stable");
    return L;
}

UniquenessReport uniqueness_report(const DerivedQuotientModel& m, const CohomologyRing& H,
                                   int p) {
    const GradedWindow& g = m.dga.c.g;
    int J = -g.nmin, D = g.D;
    UniquenessReport rep;
    int h0 = 0;
    bool h0tr = degree_trusted(H, g, 0, D);
    for (int w = 0; w <= D; ++w) h0 += hdim(H, {0, w});
    rep.h0_local = h0tr && h0 == 1;
    if (!rep.h0_local)
        rep.notes.push_back(
            "H^0 is not local in the window; candidates are only non-elements of the "
            "Jacobson radical");
    EtaSearch es = find_eta(m, H, p);
    std::set<std::pair<NW, int>> cand;
    for (const EtaCandidate& c : es.found) cand.insert({c.bucket, c.cell});

    bool all_resolved = true;
    for (int w = 0; w <= D; ++w) {
        NW b{-p, w};
        if (!bucket_trusted(H, g, b)) {
            if (hdim(H, b)) {
                rep.notes.push_back("untrusted classes at weight " + std::to_string(w));
                all_resolved = false;
            }
            continue;
        }
        for (int i = 0; i < hdim(H, b); ++i) {
            EtaCandidate c{p, b, i};
            if (cand.count({b, i})) {
                rep.verdicts.push_back({c, "candidate"});
                continue;
            }
            /* powers until zero or until the window is left */
            NW pb = b;
            SVec pv = {{i, Scalar::one(H.f)}};
            int k = 1;
            std::string verdict;
            while (true) {
                NW nb{pb.first - p, pb.second + w};
                if (nb.first < -J || nb.second > D || !bucket_trusted(H, g, nb)) {
                    verdict = "undetermined (left window at power " + std::to_string(k + 1) +
                              ")";
                    break;
                }
                std::map<int, Scalar> acc;
                bool missing = false;
                for (const auto& [ci, cc] : pv) {
                    auto it = H.product.find({pb, ci, b, i});
                    if (it == H.product.end()) {
                        missing = true;
                        break;
                    }
                    for (const auto& [k2, c2] : it->second) {
                        Scalar t = cc * c2;
                        auto jt = acc.find(k2);
                        if (jt == acc.end()) acc.emplace(k2, t);
                        else jt->second = jt->second + t;
                    }
                }
                if (missing) {
                    verdict = "undetermined (left window at power " + std::to_string(k + 1) +
                              ")";
                    break;
                }
                SVec nv;
                for (const auto& [k2, c2] : acc)
                    if (!c2.is_zero()) nv.push_back({k2, c2});
                ++k;
                if (nv.empty()) {
                    verdict = "nilpotent in window (power " + std::to_string(k) + ")";
                    break;
                }
                pb = nb;
                pv = std::move(nv);
            }
            if (verdict.rfind("undetermined", 0) == 0) all_resolved = false;
            rep.verdicts.push_back({c, verdict});
        }
    }
    rep.unique_line = !es.found.empty() && all_resolved;
    for (const auto& [c, v] : rep.verdicts) {
        (void)c;
        if (v.rfind("candidate", 0) != 0 && v.rfind("nilpotent", 0) != 0)
            rep.unique_line = false;
    }
    return rep;
}

/* ---- stable Ext cross-check --------------------------------------------------- */

/* Ae as a right module over the corner ring, weight-capped */
static ModuleWindow ae_module(const Algebra& A, const Corner& R, const BimodulePiece& ae,
                              int cap) {
    ModuleWindow M;
    M.A = R.view;
    std::vector<int> mel;
    for (int a : ae.elems) {
        if (cap >= 0 && A.wt(a) > cap) continue;
        mel.push_back(a);
        M.wt.push_back(A.wt(a));
        M.vtx.push_back(A.basis[a].tgt);
        M.label.push_back(A.basis[a].label);
    }
    M.dim = (int)mel.size();
    std::map<int, int> mback;
    for (int i = 0; i < (int)mel.size(); ++i) mback[mel[i]] = i;
    const Algebra* ap = &A;
    std::vector<int> relems = R.elems;
    M.act = [ap, mel, mback, relems](int m2, int r2) -> SVec {
        bool of = false;
        SVec t = ap->mul(mel[m2], relems[r2], &of);
        if (of) throw Err(0x60, "module action escaped the algebra window");
        SVec out;
        for (const auto& [k, c] : t) {
            auto it = mback.find(k);
            if (it == mback.end()) throw Err(0x60, "module action escaped the weight cap");
            out.push_back({it->second, c});
        }
        return out;
    };
    return M;
}

/* dim Ext_R^j(Ae, Ae) for j = 0..jmax via the Hom complex of a minimal
 * resolution; computed per internal weight, only weights certain to be
 * complete are counted */
static std::map<int, int> ext_r_dims(const Algebra& A, const Idempotent& e, int jmax, int cap,
                                     std::vector<std::string>& notes) {
    Corner R = corner_algebra(A, e);
    BimodulePiece ae = ae_piece(A, e);
    const Field f = A.f;
    ModuleWindow M = ae_module(A, R, ae, cap);
    ResolutionWindow r = minimal_resolution(M, jmax + 1, cap);
    int nt = (int)r.terms.size();
    bool finished = nt <= jmax + 1;
    auto maxshift = [&](int i) {
        int s = 0;
        if (i >= 0 && i < nt)
            for (const ProjSummand& t : r.terms[i]) s = std::max(s, t.shift);
        return s;
    };
    /* cells of C^i = Hom(P_i, Ae): (summand, b in Ae with tgt(b) = vertex) */
    auto cells_of = [&](int i) {
        std::map<int, std::vector<std::pair<int, int>>> cw;
        if (i < 0 || i >= nt) return cw;
        for (int s = 0; s < (int)r.terms[i].size(); ++s)
            for (int b : ae.elems) {
                if (cap >= 0 && A.wt(b) > cap) continue;
                if (A.basis[b].tgt != r.terms[i][s].vertex) continue;
                cw[A.wt(b) - r.terms[i][s].shift].push_back({s, b});
            }
        return cw;
    };
    auto pixmaps = [&](int i) {
        std::map<std::pair<int, int>, int> px;
        for (int c = 0; c < (int)r.pbasis[i].size(); ++c) px[r.pbasis[i][c]] = c;
        return px;
    };
    /* T_i : C^i -> C^{i+1}, phi -> phi o d_{i+1}, per weight */
    auto tmat = [&](int i, std::map<int, std::vector<std::pair<int, int>>>& src,
                    std::map<int, std::vector<std::pair<int, int>>>& tgt) {
        std::map<int, SparseMatrix> dW;
        if (i + 1 < 1 || i + 1 >= nt) return dW;
        SparseMatrix dt = r.d[i + 1].transpose();
        auto pxn = pixmaps(i + 1);
        std::map<int, std::map<std::pair<int, int>, int>> tix;
        for (auto& [w, cs] : tgt)
            for (int c = 0; c < (int)cs.size(); ++c) tix[w][cs[c]] = c;
        for (auto& [w, cs] : src) {
            /* a weight block is representable only when its targets stay
             * under the cap; higher blocks are untrusted and never read */
            if (cap >= 0 && w + maxshift(i + 1) > cap) continue;
            SparseMatrix m2(tgt.count(w) ? (int)tgt[w].size() : 0, (int)cs.size(), f);
            for (int c = 0; c < (int)cs.size(); ++c) {
                auto [s, b] = cs[c];
                std::map<int, Scalar> acc; /* over target cells */
                for (int s2 = 0; s2 < (int)r.terms[i + 1].size(); ++s2) {
                    int vp = -1;
                    {
                        const auto& verts = e.verts;
                        auto it = std::lower_bound(verts.begin(), verts.end(),
                                                   r.terms[i + 1][s2].vertex);
                        if (it != verts.end() && *it == r.terms[i + 1][s2].vertex)
                            vp = (int)(it - verts.begin());
                    }
                    int gcell = pxn.at({s2, R.view.idem[vp]});
                    for (const auto& [pc, cq] : dt.row[gcell]) {
                        auto [sp, q] = r.pbasis[i][pc];
                        if (sp != s) continue;
                        bool of = false;
                        SVec t = A.mul(b, R.elems[q], &of);
                        if (of) throw Err(0x60, "hom complex escaped the window");
                        for (const auto& [k, c2] : t) {
                            if (cap >= 0 && A.wt(k) > cap)
                                throw Err(0x60, "hom complex escaped the weight cap");
                            auto it2 = tix[w].find({s2, k});
                            if (it2 == tix[w].end())
                                throw Err(0x60, "hom complex left the weight block");
                            Scalar v = cq * c2;
                            auto jt = acc.find(it2->second);
                            if (jt == acc.end()) acc.emplace(it2->second, v);
                            else jt->second = jt->second + v;
                        }
                    }
                }
                for (const auto& [rI, v2] : acc)
                    if (!v2.is_zero()) m2.set(rI, c, v2);
            }
            dW[w] = std::move(m2);
        }
        return dW;
    };
    std::map<int, int> out;
    for (int j = 0; j <= jmax; ++j) {
        if (j >= nt) {
            if (finished) out[j] = 0;
            else notes.push_back("Ext^" + std::to_string(j) + " is outside the resolved window");
            continue;
        }
        auto cj = cells_of(j), cjm = cells_of(j - 1), cjp = cells_of(j + 1);
        auto tj = tmat(j, cj, cjp);
        auto tjm = tmat(j - 1, cjm, cj);
        /* weights certain to be complete at all three levels */
        int wtrust = cap < 0 ? 0
                             : cap - std::max(maxshift(j),
                                              std::max(maxshift(j - 1), maxshift(j + 1)));
        int total = 0;
        bool cut = false;
        for (auto& [w, cs] : cj) {
            if (cap >= 0 && w > wtrust) {
                cut = true;
                continue;
            }
            /* incoming rank: T_{j-1} restricted to weight w */
            int rin = tjm.count(w) ? rank(tjm.at(w)) : 0;
            int rout = tj.count(w) ? rank(tj.at(w)) : 0;
            total += (int)cs.size() - rin - rout;
        }
        if (!finished && j + 1 >= nt) {
            notes.push_back("Ext^" + std::to_string(j) +
                            " lacks the next differential; value skipped");
            continue;
        }
        if (cut)
            notes.push_back("Ext^" + std::to_string(j) +
                            " counted on certain weights only");
        out[j] = total;
    }
    return out;
}

StableExtReport stable_ext_crosscheck(const Algebra& A, const Idempotent& e, int J, int D,
                                      int p) {
    StableExtReport rep;
    DerivedQuotientModel m = A.graded ? build_model_reduced(A, e, J, D) : build_model(A, e, J, D);
    CohomologyRing H = dq_cohomology_ring(m);
    EtaSearch es;
    try {
        es = find_eta(m, H, p);
    } catch (const Err& er) {
        rep.notes.push_back(std::string("eta search failed: ") + er.what());
        return rep;
    }
    if (es.found.empty()) {
        rep.notes.push_back("not applicable: no periodicity candidate");
        return rep;
    }
    rep.applicable = true;
    EtaCandidate eta = es.found[0];
    if (!centrality_check(m, H, eta)) {
        rep.notes.push_back("candidate is not central");
        return rep;
    }
    LocalizedRingWindow L = localize_at_eta(m, H, eta);
    rep.ok = true;

    int cap = D >= 0 ? D : (A.exact ? -1 : A.N);
    std::map<int, int> er = ext_r_dims(A, e, p + 2, cap, rep.notes);
    for (int j = 2; j <= p + 2; ++j) {
        if (!L.dims.count(j) || !er.count(j)) continue;
        rep.table[j] = {L.dims.at(j), er.at(j)};
        if (L.dims.at(j) != er.at(j)) rep.ok = false;
    }
    for (int j = -2; j >= -(p + 2); --j) {
        if (!L.dims.count(j)) continue;
        TorResult tr = tor_oracle(A, e, -j - 1, D);
        if (tr.edge) {
            rep.notes.push_back("Tor at degree " + std::to_string(j) +
                                " touches the window edge");
        }
        rep.table[j] = {L.dims.at(j), tr.dim};
        if (L.dims.at(j) != tr.dim) rep.ok = false;
    }
    if (rep.table.empty()) {
        rep.notes.push_back("no comparable degrees in the window");
        rep.ok = false;
    }
    return rep;
}

} // namespace ncdq
