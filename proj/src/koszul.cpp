#include "ncdq/koszul.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace ncdq {

/* ---- augmentation ---------------------------------------------------------- */

AugmentedDgaWindow augment(const DgaWindow& a, int W) {
    const GradedWindow& g = a.c.g;
    if (W < 0) throw Err(0x40, "augmentation needs a nonnegative weight cap");
    int w0 = 0;
    for (const auto& [b, cs] : g.cells)
        if (b.second == 0) w0 += (int)cs.size();
    if (w0 == 1) {
        if (!g.cells.count({0, 0}) || g.dim({0, 0}) != 1)
            throw Err(0x40, "the weight-zero line must sit in degree zero");
        if (a.unit.empty()) throw Err(0x40, "augmentation needs a unit");
        if (W > g.D) throw Err(0x40, "weight cap exceeds the source window");
        return {a, W};
    }

    /* ungraded local input: regrade by the radical filtration */
    if (g.cells.size() != 1 || !g.cells.count({0, 0}))
        throw Err(0x40, "augmentation needs a connected algebra: the weight-zero "
                        "part has dimension " + std::to_string(w0));
    for (const auto& [b, m] : a.c.d) {
        (void)b;
        for (const SVec& r : m.row)
            if (!r.empty()) throw Err(0x40, "ungraded augmentation needs a zero differential");
    }
    const Field f = g.f;
    int n = g.dim({0, 0});
    if (a.unit.empty()) throw Err(0x40, "augmentation needs a unit");

    std::vector<SVec> radv;
    if (a.aug) {
        const std::vector<Scalar>& phi = *a.aug;
        SVec row;
        for (int i = 0; i < n; ++i)
            if (!phi[i].is_zero()) row.push_back({i, phi[i]});
        SparseMatrix pm(1, n, f);
        pm.row[0] = row;
        radv = kernel_basis(pm);
    } else {
        /* nilpotent basis cells of a local algebra span the radical */
        for (int i = 0; i < n; ++i) {
            SparseMatrix L(n, n, f);
            for (int j = 0; j < n; ++j)
                for (const auto& [k, c] : a.mul({0, 0}, i, {0, 0}, j)) L.set(k, j, c);
            SparseMatrix P = L;
            bool nil = false;
            for (int s = 0; s < n && !nil; ++s) {
                nil = true;
                for (const SVec& r : P.row)
                    if (!r.empty()) nil = false;
                if (!nil) P = L.mul(P);
            }
            for (const SVec& r : P.row)
                if (!r.empty()) nil = false;
            if (nil) radv.push_back({{i, Scalar::one(f)}});
        }
    }
    SparseMatrix rm((int)radv.size(), n, f);
    rm.row = radv;
    Rref rr = rref(rm);
    if (rr.rank() != n - 1) throw Err(0x40, "could not identify a local augmentation");
    if (rr.in_span(a.unit)) throw Err(0x40, "the unit lies in the candidate radical");
    /* two-sided ideal check */
    for (int i = 0; i < n; ++i)
        for (const SVec& v : radv) {
            SVec l = a.mul_sv({0, 0}, {{i, Scalar::one(f)}}, {0, 0}, v);
            SVec r = a.mul_sv({0, 0}, v, {0, 0}, {{i, Scalar::one(f)}});
            if (!rr.in_span(l) || !rr.in_span(r))
                throw Err(0x40, "the candidate radical is not an ideal");
        }

    /* radical filtration and cell weights */
    std::vector<int> wt(n, 0);
    std::vector<std::vector<SVec>> filt;
    filt.push_back(radv);
    while (!filt.back().empty() && (int)filt.size() <= n + 1) {
        std::vector<SVec> nx;
        for (const SVec& x : filt.back())
            for (const SVec& y : radv) {
                SVec p = a.mul_sv({0, 0}, x, {0, 0}, y);
                if (!p.empty()) nx.push_back(p);
            }
        filt.push_back(std::move(nx));
    }
    if (!filt.back().empty()) throw Err(0x40, "the candidate radical is not nilpotent");
    for (int k = (int)filt.size() - 1; k >= 1; --k) {
        SparseMatrix fm((int)filt[k - 1].size(), n, f);
        fm.row = filt[k - 1];
        Rref fr = rref(fm);
        for (int i = 0; i < n; ++i)
            if (wt[i] == 0 && fr.in_span({{i, Scalar::one(f)}})) wt[i] = k;
    }
    int zeros = 0, zcell = -1;
    for (int i = 0; i < n; ++i)
        if (wt[i] == 0) {
            ++zeros;
            zcell = i;
        }
    if (zeros != 1) throw Err(0x40, "the basis is not adapted to the radical filtration");
    if (a.unit.size() != 1 || a.unit[0].first != zcell)
        throw Err(0x40, "the unit is not a basis line");
    /* the regrading must make the product weight-homogeneous */
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& [k, c] : a.mul({0, 0}, i, {0, 0}, j)) {
                (void)c;
                if (wt[k] != wt[i] + wt[j])
                    throw Err(0x40, "radical filtration is not multiplicative on this basis");
            }

    DgaWindow nd;
    nd.c.g.f = f;
    nd.c.g.nmin = 0;
    nd.c.g.nmax = 0;
    nd.c.g.D = W;
    auto o2n = std::make_shared<std::vector<std::pair<int, int>>>(n, std::make_pair(-1, -1));
    auto n2o = std::make_shared<std::map<int, std::vector<int>>>();
    for (int i = 0; i < n; ++i) {
        if (wt[i] > W) continue; /* quotient by the deeper filtration step */
        (*o2n)[i] = {wt[i], (int)nd.c.g.cells[{0, wt[i]}].size()};
        nd.c.g.cells[{0, wt[i]}].push_back(g.cells.at({0, 0})[i]);
        (*n2o)[wt[i]].push_back(i);
    }
    nd.unit = {{(*o2n)[zcell].second, a.unit[0].second}};
    nd.aug = std::vector<Scalar>{Scalar::one(f)};
    auto om = a.mul;
    nd.mul = [om, o2n, n2o, W](NW ba, int i, NW bb, int j) -> SVec {
        int oi = n2o->at(ba.second)[i], oj = n2o->at(bb.second)[j];
        SVec p = om({0, 0}, oi, {0, 0}, oj);
        std::map<int, Scalar> acc;
        for (const auto& [k, c] : p) {
            auto [wk, nk] = (*o2n)[k];
            if (wk < 0 || wk > W) continue;
            acc[nk] = acc.count(nk) ? acc[nk] + c : c;
        }
        SVec out;
        for (const auto& [k2, v2] : acc)
            if (!v2.is_zero()) out.push_back({k2, v2});
        return out;
    };
    return {nd, W};
}

/* ---- bar construction ------------------------------------------------------ */

struct BarLetter {
    NW b;
    int ix, n, w;
};

CoalgebraWindow bar(const AugmentedDgaWindow& au, int W) {
    const DgaWindow& src = au.a;
    const GradedWindow& g = src.c.g;
    if (W > au.W) throw Err(0x41, "bar window exceeds the augmented window");
    CoalgebraWindow C;
    C.f = g.f;
    C.W = W;
    C.g.f = g.f;
    C.g.D = W;

    std::vector<BarLetter> ls;
    for (const auto& [b, cs] : g.cells) {
        if (b.second < 1 || b.second > W) continue;
        for (int i = 0; i < (int)cs.size(); ++i) ls.push_back({b, i, b.first, b.second});
    }
    std::sort(ls.begin(), ls.end(), [](const BarLetter& a, const BarLetter& b) {
        return std::tie(a.w, a.n, a.b, a.ix) < std::tie(b.w, b.n, b.b, b.ix);
    });

    std::map<NW, std::map<std::vector<std::pair<NW, int>>, int>> widx;
    std::map<NW, std::map<std::string, int>> used;
    auto place = [&](int deg, int wt, const std::vector<std::pair<NW, int>>& word) {
        NW b{deg, wt};
        std::string lab = "[";
        for (size_t i = 0; i < word.size(); ++i) {
            if (i) lab += "|";
            lab += g.cells.at(word[i].first)[word[i].second];
        }
        lab += "]";
        int& cnt = used[b][lab];
        if (cnt++) lab += "#" + std::to_string(cnt);
        widx[b][word] = (int)C.g.cells[b].size();
        C.g.cells[b].push_back(lab);
        C.words[b].push_back(BarWord{word});
    };
    place(0, 0, {});
    std::vector<std::pair<NW, int>> cur;
    std::function<void(int, int)> rec = [&](int deg, int wt) {
        for (const BarLetter& L : ls) {
            if (wt + L.w > W) break; /* letters sorted by weight */
            cur.push_back({L.b, L.ix});
            place(deg + L.n - 1, wt + L.w, cur);
            rec(deg + L.n - 1, wt + L.w);
            cur.pop_back();
        }
    };
    rec(0, 0);

    int blo = 0, bhi = 0;
    for (const auto& [b, cs] : C.g.cells) {
        (void)cs;
        blo = std::min(blo, b.first);
        bhi = std::max(bhi, b.first);
    }
    C.g.nmin = blo;
    C.g.nmax = bhi;

    /* differential: letterwise d plus adjacent merges */
    std::map<NW, SparseMatrix> dT; /* transposed source differentials */
    auto dcol = [&](NW b, int ix) -> const SVec& {
        auto it = dT.find(b);
        if (it == dT.end()) it = dT.emplace(b, src.c.dmat(b).transpose()).first;
        return it->second.row[ix];
    };
    for (const auto& [b, ws] : C.words) {
        NW up{b.first + 1, b.second};
        std::vector<SVec> srows(ws.size());
        bool bucket_marked = false;
        for (size_t ci = 0; ci < ws.size(); ++ci) {
            const auto& word = ws[ci].letters;
            int l = (int)word.size();
            std::map<int, Scalar> acc;
            bool mark = false;
            int pre = 0; /* parity of sum of bar degrees before slot i */
            for (int i = 0; i < l; ++i) {
                NW lb = word[i].first;
                /* letterwise differential */
                NW tb{lb.first + 1, lb.second};
                if (g.cells.count(tb)) {
                    for (const auto& [k, cv] : dcol(lb, word[i].second)) {
                        std::vector<std::pair<NW, int>> w2 = word;
                        w2[i] = {tb, k};
                        int t = widx.at(up).at(w2);
                        Scalar v = (pre % 2 == 0) ? -cv : cv; /* sign (-1)^{pre+1} */
                        auto jt = acc.find(t);
                        if (jt == acc.end()) acc.emplace(t, v);
                        else jt->second = jt->second + v;
                    }
                }
                if (!g.complete(tb)) mark = true;
                int di = lb.first - 1; /* bar degree of letter i */
                /* merge with the next letter */
                if (i + 1 < l) {
                    NW rb = word[i + 1].first;
                    NW mb{lb.first + rb.first, lb.second + rb.second};
                    int post = (pre + di) % 2;
                    if (g.cells.count(mb)) {
                        SVec prod;
                        bool ok = true;
                        try {
                            prod = src.mul(lb, word[i].second, rb, word[i + 1].second);
                        } catch (const Err&) {
                            ok = false;
                            mark = true;
                        }
                        if (ok)
                            for (const auto& [k, cv] : prod) {
                                std::vector<std::pair<NW, int>> w2;
                                w2.reserve(l - 1);
                                w2.insert(w2.end(), word.begin(), word.begin() + i);
                                w2.push_back({mb, k});
                                w2.insert(w2.end(), word.begin() + i + 2, word.end());
                                int t = widx.at(up).at(w2);
                                Scalar v = (post % 2 == 0) ? cv : -cv; /* sign (-1)^{post} */
                                auto jt = acc.find(t);
                                if (jt == acc.end()) acc.emplace(t, v);
                                else jt->second = jt->second + v;
                            }
                    }
                    if (!g.complete(mb)) mark = true;
                }
                pre = (pre + di) % 2;
            }
            SVec row;
            for (const auto& [i2, v2] : acc)
                if (!v2.is_zero()) row.push_back({i2, v2});
            srows[ci] = std::move(row);
            if (mark) bucket_marked = true;
        }
        SparseMatrix st((int)ws.size(), C.g.dim(up), C.f);
        st.row = std::move(srows);
        C.d[b] = st.transpose();
        if (bucket_marked) C.g.complete_override[b] = false;
    }

    /* words through buckets the source window could not certify */
    std::vector<std::pair<int, int>> ph;
    bool w0bad = false;
    for (const auto& [b, v] : g.complete_override)
        if (!v) {
            if (b.second == 0) w0bad = true;
            else if (b.second <= W) ph.push_back({b.first, b.second});
        }
    if (w0bad)
        for (int dg = blo - 1; dg <= bhi + 1; ++dg)
            for (int w = 0; w <= W; ++w) C.g.complete_override[{dg, w}] = false;
    if (!ph.empty()) {
        std::set<std::pair<int, int>> rb;
        int minN = 0, maxN = 0;
        for (const BarLetter& L : ls) {
            rb.insert({L.n, L.w});
            minN = std::min(minN, L.n);
            maxN = std::max(maxN, L.n);
        }
        for (auto [pn, pw] : ph) {
            (void)pw;
            minN = std::min(minN, pn);
            maxN = std::max(maxN, pn);
        }
        /* reachability of words containing at least one uncertified letter */
        std::set<std::tuple<int, int, int>> seen;
        std::deque<std::tuple<int, int, int>> q;
        auto push = [&](int s, int l, int w) {
            if (w > W) return;
            auto st = std::make_tuple(s, l, w);
            if (seen.insert(st).second) q.push_back(st);
        };
        for (auto [pn, pw] : ph) push(pn, 1, pw);
        while (!q.empty()) {
            auto [s, l, w] = q.front();
            q.pop_front();
            C.g.complete_override[{s - l, w}] = false;
            for (auto [rn, rw] : rb) push(s + rn, l + 1, w + rw);
            for (auto [pn, pw] : ph) push(s + pn, l + 1, w + pw);
        }
        /* blanket marks for unknown letters beyond the marked frontier */
        int mlow = 0, mhigh = 0;
        bool deepBelow = false, deepAbove = false;
        for (auto [pn, pw] : ph) {
            (void)pw;
            if (pn <= g.nmin - 1) {
                deepBelow = true;
                mlow = std::min(mlow == 0 ? pn : mlow, pn);
            }
            if (pn >= g.nmax + 1) {
                deepAbove = true;
                mhigh = std::max(mhigh == 0 ? pn : mhigh, pn);
            }
        }
        if (deepBelow) {
            int hi = std::min(bhi + 1, (mlow - 2) + (W - 1) * std::max(0, maxN - 1));
            for (int dg = blo - 1; dg <= hi; ++dg)
                for (int w = 1; w <= W; ++w) C.g.complete_override[{dg, w}] = false;
        }
        if (deepAbove) {
            int lo = std::max(blo - 1, mhigh + (W - 1) * std::min(0, minN - 1));
            for (int dg = lo; dg <= bhi + 1; ++dg)
                for (int w = 1; w <= W; ++w) C.g.complete_override[{dg, w}] = false;
        }
    }
    return C;
}

/* ---- coalgebra checks ------------------------------------------------------ */

CoalgebraReport check_coalgebra(const CoalgebraWindow& c, long budget) {
    CoalgebraReport rep;
    auto fail = [&rep](const std::string& s) {
        rep.ok = false;
        if (rep.violations.size() < 20) rep.violations.push_back(s);
    };
    /* counit */
    if (!c.g.cells.count({0, 0}) || c.g.dim({0, 0}) != 1 ||
        !c.words.at({0, 0})[0].letters.empty())
        fail("counit cell missing or not the empty word");
    ++rep.checks;

    /* cell lookup for subwords */
    std::map<std::vector<std::pair<NW, int>>, std::pair<NW, int>> gw;
    for (const auto& [b, ws] : c.words)
        for (int i = 0; i < (int)ws.size(); ++i) gw[ws[i].letters] = {b, i};

    /* d^2 = 0 */
    for (const auto& [b, m] : c.d) {
        NW up{b.first + 1, b.second};
        auto it = c.d.find(up);
        if (it == c.d.end()) continue;
        SparseMatrix p = it->second.mul(m);
        for (int r = 0; r < p.rows; ++r)
            if (!p.row[r].empty()) {
                fail("d^2 != 0 out of bucket (" + std::to_string(b.first) + "," +
                     std::to_string(b.second) + ")");
                break;
            }
        if (++rep.checks >= budget) return rep;
    }

    std::map<NW, SparseMatrix> dT;
    auto dcol = [&](NW b, int ix) -> const SVec& {
        auto it = dT.find(b);
        if (it == dT.end()) {
            SparseMatrix m(c.g.dim({b.first + 1, b.second}), c.g.dim(b), c.f);
            auto jt = c.d.find(b);
            if (jt != c.d.end()) m = jt->second;
            it = dT.emplace(b, m.transpose()).first;
        }
        return it->second.row[ix];
    };
    using Cell = std::pair<NW, int>;
    auto bardeg = [&](const std::vector<Cell>& w, int from, int to) {
        int s = 0;
        for (int i = from; i < to; ++i) s += w[i].first.first - 1;
        return s;
    };

    for (const auto& [b, ws] : c.words) {
        for (int ci = 0; ci < (int)ws.size(); ++ci) {
            const auto& word = ws[ci].letters;
            int l = (int)word.size();
            if (l < 2) continue;
            /* coassociativity of deconcatenation: both double splits agree */
            std::set<std::tuple<Cell, Cell, Cell>> lhs3, rhs3;
            for (int i = 1; i < l; ++i)
                for (int j2 = i + 1; j2 < l; ++j2) {
                    std::vector<Cell> u(word.begin(), word.begin() + i);
                    std::vector<Cell> v(word.begin() + i, word.begin() + j2);
                    std::vector<Cell> w2(word.begin() + j2, word.end());
                    lhs3.insert({gw.at(u), gw.at(v), gw.at(w2)});
                }
            for (int j2 = 2; j2 < l; ++j2)
                for (int i = 1; i < j2; ++i) {
                    std::vector<Cell> u(word.begin(), word.begin() + i);
                    std::vector<Cell> v(word.begin() + i, word.begin() + j2);
                    std::vector<Cell> w2(word.begin() + j2, word.end());
                    rhs3.insert({gw.at(u), gw.at(v), gw.at(w2)});
                }
            if (lhs3 != rhs3) fail("deconcatenation is not coassociative");
            if (++rep.checks >= budget) return rep;

            /* coderivation: reduced Delta after d vs (d x 1 + 1 x d) */
            std::map<std::pair<Cell, Cell>, Scalar> L, R;
            NW up{b.first + 1, b.second};
            for (const auto& [t, ct] : dcol(b, ci)) {
                const auto& tw = c.words.at(up)[t].letters;
                for (int i = 1; i < (int)tw.size(); ++i) {
                    std::vector<Cell> u(tw.begin(), tw.begin() + i);
                    std::vector<Cell> v(tw.begin() + i, tw.end());
                    auto key = std::make_pair(gw.at(u), gw.at(v));
                    L[key] = L.count(key) ? L[key] + ct : ct;
                }
            }
            for (int i = 1; i < l; ++i) {
                std::vector<Cell> u(word.begin(), word.begin() + i);
                std::vector<Cell> v(word.begin() + i, word.end());
                Cell cu = gw.at(u), cv = gw.at(v);
                for (const auto& [t, ct] : dcol(cu.first, cu.second)) {
                    auto key = std::make_pair(Cell{{cu.first.first + 1, cu.first.second}, t}, cv);
                    R[key] = R.count(key) ? R[key] + ct : ct;
                }
                int su = bardeg(word, 0, i) % 2;
                for (const auto& [t, ct] : dcol(cv.first, cv.second)) {
                    Scalar v2 = su ? -ct : ct;
                    auto key = std::make_pair(cu, Cell{{cv.first.first + 1, cv.first.second}, t});
                    R[key] = R.count(key) ? R[key] + v2 : v2;
                }
            }
            bool same = true;
            for (const auto& [k, v] : L) {
                Scalar r = R.count(k) ? R.at(k) : Scalar::zero(c.f);
                if (!(v - r).is_zero()) same = false;
            }
            for (const auto& [k, v] : R)
                if (!L.count(k) && !v.is_zero()) same = false;
            if (!same)
                fail("coderivation rule fails at " + c.g.cells.at(b)[ci] + " in bucket (" +
                     std::to_string(b.first) + "," + std::to_string(b.second) + ")");
            if (++rep.checks >= budget) return rep;
        }
    }
    return rep;
}

/* ---- Koszul dual ------------------------------------------------------------ */

DgaWindow koszul_dual(const AugmentedDgaWindow& au, int W) {
    CoalgebraWindow C = bar(au, W);
    DgaWindow K;
    K.c.g.f = C.f;
    K.c.g.D = W;
    auto words = std::make_shared<std::map<NW, std::vector<BarWord>>>();
    auto widx =
        std::make_shared<std::map<NW, std::map<std::vector<std::pair<NW, int>>, int>>>();
    int lo = 0, hi = 0;
    for (const auto& [b, cs] : C.g.cells) {
        NW db{-b.first, b.second};
        K.c.g.cells[db] = cs;
        (*words)[db] = C.words.at(b);
        auto& ix = (*widx)[db];
        for (int i = 0; i < (int)C.words.at(b).size(); ++i) ix[C.words.at(b)[i].letters] = i;
        lo = std::min(lo, db.first);
        hi = std::max(hi, db.first);
    }
    K.c.g.nmin = lo;
    K.c.g.nmax = hi;
    for (const auto& [b, v] : C.g.complete_override)
        K.c.g.complete_override[{-b.first, b.second}] = v;
    /* dual differential: signed transpose */
    for (const auto& [b, m] : C.d) {
        int n = b.first + 1; /* bar target degree */
        if (m.rows == 0 || m.cols == 0) continue;
        SparseMatrix t = m.transpose();
        if (n % 2 == 0) { /* sign (-1)^{n+1} */
            for (auto& r : t.row)
                for (auto& [k, v] : r) {
                    (void)k;
                    v = -v;
                }
        }
        bool nz = false;
        for (const SVec& r : t.row)
            if (!r.empty()) nz = true;
        if (nz) K.c.d[{-n, b.second}] = std::move(t);
    }
    K.unit = {{widx->at({0, 0}).at({}), Scalar::one(C.f)}};
    K.aug = std::vector<Scalar>{Scalar::one(C.f)};
    Field f = C.f;
    K.mul = [words, widx, f](NW a, int i, NW b, int j) -> SVec {
        const auto& u = words->at(a)[i].letters;
        const auto& v = words->at(b)[j].letters;
        std::vector<std::pair<NW, int>> uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        NW t{a.first + b.first, a.second + b.second};
        auto it = widx->find(t);
        if (it == widx->end()) throw Err(0x41, "dual product outside the window");
        auto jt = it->second.find(uv);
        if (jt == it->second.end()) throw Err(0x41, "dual product outside the window");
        Scalar c = Scalar::one(f);
        if ((a.first % 2) && (b.first % 2)) c = -c; /* sign (-1)^{|u||v|} */
        return {{jt->second, c}};
    };
    return K;
}

/* ---- cobar ------------------------------------------------------------------ */

DgaWindow cobar(const CoalgebraWindow& c, int W) {
    if (!c.g.cells.count({0, 0}) || c.g.dim({0, 0}) != 1 ||
        !c.words.at({0, 0})[0].letters.empty())
        throw Err(0x41, "cobar needs a counital coalgebra window");
    if (W > c.W) throw Err(0x41, "cobar window exceeds the coalgebra window");
    DgaWindow K;
    K.c.g.f = c.f;
    K.c.g.D = W;

    struct CLetter {
        NW b;
        int ix, n, w;
    };
    std::vector<CLetter> ls;
    for (const auto& [b, cs] : c.g.cells) {
        if (b.second < 1 || b.second > W) continue;
        for (int i = 0; i < (int)cs.size(); ++i) ls.push_back({b, i, b.first, b.second});
    }
    std::sort(ls.begin(), ls.end(), [](const CLetter& a, const CLetter& b) {
        return std::tie(a.w, a.n, a.b, a.ix) < std::tie(b.w, b.n, b.b, b.ix);
    });

    auto widx =
        std::make_shared<std::map<NW, std::map<std::vector<std::pair<NW, int>>, int>>>();
    auto words = std::make_shared<std::map<NW, std::vector<BarWord>>>();
    std::map<NW, std::map<std::string, int>> used;
    auto place = [&](int deg, int wt, const std::vector<std::pair<NW, int>>& word) {
        NW b{deg, wt};
        std::string lab = "(";
        for (size_t i = 0; i < word.size(); ++i) {
            if (i) lab += "|";
            lab += c.g.cells.at(word[i].first)[word[i].second];
        }
        lab += ")";
        int& cnt = used[b][lab];
        if (cnt++) lab += "#" + std::to_string(cnt);
        (*widx)[b][word] = (int)K.c.g.cells[b].size();
        K.c.g.cells[b].push_back(lab);
        (*words)[b].push_back(BarWord{word});
    };
    place(0, 0, {});
    std::vector<std::pair<NW, int>> cur;
    std::function<void(int, int)> rec = [&](int deg, int wt) {
        for (const CLetter& L : ls) {
            if (wt + L.w > W) break;
            cur.push_back({L.b, L.ix});
            place(deg + L.n + 1, wt + L.w, cur);
            rec(deg + L.n + 1, wt + L.w);
            cur.pop_back();
        }
    };
    rec(0, 0);
    int lo = 0, hi = 0;
    for (const auto& [b, cs] : K.c.g.cells) {
        (void)cs;
        lo = std::min(lo, b.first);
        hi = std::max(hi, b.first);
    }
    K.c.g.nmin = lo;
    K.c.g.nmax = hi;

    std::map<std::vector<std::pair<NW, int>>, std::pair<NW, int>> gw;
    for (const auto& [b, ws] : c.words)
        for (int i = 0; i < (int)ws.size(); ++i) gw[ws[i].letters] = {b, i};
    std::map<NW, SparseMatrix> dT;
    auto dcol = [&](NW b, int ix) -> const SVec& {
        auto it = dT.find(b);
        if (it == dT.end()) {
            SparseMatrix m(c.g.dim({b.first + 1, b.second}), c.g.dim(b), c.f);
            auto jt = c.d.find(b);
            if (jt != c.d.end()) m = jt->second;
            it = dT.emplace(b, m.transpose()).first;
        }
        return it->second.row[ix];
    };

    for (const auto& [b, ws] : *words) {
        NW up{b.first + 1, b.second};
        std::vector<SVec> srows(ws.size());
        bool bucket_marked = false;
        for (size_t ci = 0; ci < ws.size(); ++ci) {
            const auto& word = ws[ci].letters;
            int l = (int)word.size();
            std::map<int, Scalar> acc;
            bool mark = false;
            int pre = 0; /* parity of sum of (deg+1) before slot i */
            for (int i = 0; i < l; ++i) {
                NW lb = word[i].first;
                NW tb{lb.first + 1, lb.second};
                if (c.g.cells.count(tb)) {
                    for (const auto& [k, cv] : dcol(lb, word[i].second)) {
                        std::vector<std::pair<NW, int>> w2 = word;
                        w2[i] = {tb, k};
                        int t = widx->at(up).at(w2);
                        Scalar v = (pre % 2 == 0) ? -cv : cv; /* sign (-1)^{pre+1} */
                        auto jt = acc.find(t);
                        if (jt == acc.end()) acc.emplace(t, v);
                        else jt->second = jt->second + v;
                    }
                }
                if (!c.g.complete(tb)) mark = true;
                /* reduced deconcatenation of the letter */
                const auto& lw = c.words.at(lb)[word[i].second].letters;
                for (int s = 1; s < (int)lw.size(); ++s) {
                    std::vector<std::pair<NW, int>> u(lw.begin(), lw.begin() + s);
                    std::vector<std::pair<NW, int>> v(lw.begin() + s, lw.end());
                    auto cu = gw.at(u), cv2 = gw.at(v);
                    std::vector<std::pair<NW, int>> w2;
                    w2.reserve(l + 1);
                    w2.insert(w2.end(), word.begin(), word.begin() + i);
                    w2.push_back(cu);
                    w2.push_back(cv2);
                    w2.insert(w2.end(), word.begin() + i + 1, word.end());
                    int t = widx->at(up).at(w2);
                    int sg = (pre + cu.first.first) % 2; /* (-1)^{pre + |u|} */
                    Scalar v2 = sg ? -Scalar::one(c.f) : Scalar::one(c.f);
                    auto jt = acc.find(t);
                    if (jt == acc.end()) acc.emplace(t, v2);
                    else jt->second = jt->second + v2;
                }
                pre = (pre + lb.first + 1) % 2;
            }
            SVec row;
            for (const auto& [i2, v2] : acc)
                if (!v2.is_zero()) row.push_back({i2, v2});
            srows[ci] = std::move(row);
            if (mark) bucket_marked = true;
        }
        SparseMatrix st((int)ws.size(), K.c.g.dim(up), c.f);
        st.row = std::move(srows);
        K.c.d[b] = st.transpose();
        if (bucket_marked) K.c.g.complete_override[b] = false;
    }

    /* words through uncertified coalgebra buckets */
    std::vector<std::pair<int, int>> ph;
    for (const auto& [b, v] : c.g.complete_override)
        if (!v && b.second >= 1 && b.second <= W) ph.push_back({b.first, b.second});
    if (!ph.empty()) {
        std::set<std::pair<int, int>> rbb;
        for (const CLetter& L : ls) rbb.insert({L.n, L.w});
        std::set<std::tuple<int, int, int>> seen;
        std::deque<std::tuple<int, int, int>> q;
        auto push = [&](int s, int l, int w) {
            if (w > W) return;
            auto st = std::make_tuple(s, l, w);
            if (seen.insert(st).second) q.push_back(st);
        };
        for (auto [pn, pw] : ph) push(pn, 1, pw);
        while (!q.empty()) {
            auto [s, l, w] = q.front();
            q.pop_front();
            K.c.g.complete_override[{s + l, w}] = false;
            for (auto [rn, rw] : rbb) push(s + rn, l + 1, w + rw);
            for (auto [pn, pw] : ph) push(s + pn, l + 1, w + pw);
        }
    }

    K.unit = {{widx->at({0, 0}).at({}), Scalar::one(c.f)}};
    K.aug = std::vector<Scalar>{Scalar::one(c.f)};
    Field f = c.f;
    K.mul = [words, widx, f](NW a, int i, NW b, int j) -> SVec {
        const auto& u = words->at(a)[i].letters;
        const auto& v = words->at(b)[j].letters;
        std::vector<std::pair<NW, int>> uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        NW t{a.first + b.first, a.second + b.second};
        auto it = widx->find(t);
        if (it == widx->end()) throw Err(0x41, "cobar product outside the window");
        auto jt = it->second.find(uv);
        if (jt == it->second.end()) throw Err(0x41, "cobar product outside the window");
        return {{jt->second, Scalar::one(f)}};
    };
    return K;
}

/* ---- double dual ------------------------------------------------------------ */

static bool triple_complete(const CohomologyRing& H, const GradedWindow& g, NW b) {
    auto it = H.trusted.find(b);
    if (it != H.trusted.end()) return it->second;
    return g.complete({b.first - 1, b.second}) && g.complete(b) &&
           g.complete({b.first + 1, b.second});
}

DoubleDualReport double_dual_compare(const AugmentedDgaWindow& a, int W, int nmin, int nmax) {
    DoubleDualReport rep;
    if (a.a.c.g.nmax > 0) {
        rep.status = "needs a nonpositive source window";
        return rep;
    }
    CohomologyRing Hs = cohomology(a.a.c);
    DgaWindow d1 = koszul_dual(a, W);
    AugmentedDgaWindow a1;
    try {
        a1 = augment(d1, W);
    } catch (const Err& e) {
        rep.status = std::string("dual augmentation failed: ") + e.what();
        return rep;
    }
    DgaWindow d2 = koszul_dual(a1, W);
    CohomologyRing H2 = cohomology(d2.c);
    rep.ok = true;
    int skipped = 0;
    for (int n = nmin; n <= nmax; ++n)
        for (int w = 0; w <= W; ++w) {
            NW b{n, w};
            bool tl = triple_complete(Hs, a.a.c.g, b);
            bool tr = triple_complete(H2, d2.c.g, b);
            int dl = Hs.dim.count(b) ? Hs.dim.at(b) : 0;
            int dr = H2.dim.count(b) ? H2.dim.at(b) : 0;
            if (!tl || !tr) {
                if (dl || dr) ++skipped;
                continue;
            }
            if (dl == 0 && dr == 0) continue;
            rep.lhs[b] = dl;
            rep.rhs[b] = dr;
            if (dl != dr) {
                rep.ok = false;
                if (rep.status.empty())
                    rep.status = "mismatch at (" + std::to_string(n) + "," +
                                 std::to_string(w) + ")";
            }
        }
    if (skipped)
        rep.notes.push_back(std::to_string(skipped) + " buckets skipped outside the trusted window");
    if (rep.ok) rep.status = "double dual matches on the trusted window";
    return rep;
}

} // namespace ncdq
