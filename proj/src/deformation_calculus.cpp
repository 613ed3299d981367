#include "ncdq/deformation_calculus.hpp"

#include <algorithm>
#include <random>

namespace ncdq {

/* ---- test algebras ----------------------------------------------------------- */

ArtinianTestAlgebra artinian(const AlgebraView& A) {
    if (!A.exact) throw Err(0x50, "test algebra must be exact");
    if (A.idem.size() != 1) throw Err(0x50, "test algebra is not local");
    if (A.dim - (int)A.radical.size() != 1) throw Err(0x50, "test algebra is not local");
    ArtinianTestAlgebra G;
    G.A = A;
    G.mbasis = A.radical;
    G.unit_ix = A.idem[0];
    /* nilpotency index by span iteration */
    std::vector<SVec> span;
    for (int i : G.mbasis) span.push_back({{i, Scalar::one(A.f)}});
    int n = 1;
    while (!span.empty()) {
        if (n > A.dim + 1) throw Err(0x50, "maximal ideal is not nilpotent");
        std::vector<SVec> nx;
        for (const SVec& v : span)
            for (int j : G.mbasis) {
                std::map<int, Scalar> acc;
                for (const auto& [i, c] : v) {
                    bool of = false;
                    for (const auto& [k, c2] : A.mul(i, j, &of)) {
                        Scalar t = c * c2;
                        auto it = acc.find(k);
                        if (it == acc.end()) acc.emplace(k, t);
                        else it->second = it->second + t;
                    }
                    if (of) throw Err(0x50, "test algebra escaped its window");
                }
                SVec w;
                for (const auto& [k, c2] : acc)
                    if (!c2.is_zero()) w.push_back({k, c2});
                if (!w.empty()) nx.push_back(std::move(w));
            }
        SparseMatrix m((int)nx.size(), A.dim, A.f);
        m.row = nx;
        Rref rr = rref(m);
        span = rr.rows;
        ++n;
    }
    G.nilpotency = n;
    return G;
}

DgaWindow tensor_with_ideal(const DgaWindow& E, const ArtinianTestAlgebra& G) {
    DgaWindow T;
    T.c.g = E.c.g;
    T.c.g.cells.clear();
    int nm = (int)G.mbasis.size();
    for (const auto& [b, cs] : E.c.g.cells) {
        auto& out = T.c.g.cells[b];
        for (const std::string& l : cs)
            for (int q = 0; q < nm; ++q) out.push_back(l + "." + G.A.label[G.mbasis[q]]);
    }
    /* d = d_E tensor id */
    for (const auto& [b, m] : E.c.d) {
        SparseMatrix t(m.rows * nm, m.cols * nm, E.c.g.f);
        for (int r = 0; r < m.rows; ++r)
            for (const auto& [cix, v] : m.row[r])
                for (int q = 0; q < nm; ++q) t.set(r * nm + q, cix * nm + q, v);
        T.c.d[b] = std::move(t);
    }
    auto mb = std::make_shared<std::vector<int>>(G.mbasis);
    std::map<int, int> back0;
    for (int q = 0; q < nm; ++q) back0[G.mbasis[q]] = q;
    auto back = std::make_shared<std::map<int, int>>(std::move(back0));
    auto gv = std::make_shared<AlgebraView>(G.A);
    auto em = E.mul;
    T.mul = [mb, back, gv, em, nm](NW a, int i, NW b, int j) -> SVec {
        int ci = i / nm, qi = i % nm, cj = j / nm, qj = j % nm;
        SVec ep = em(a, ci, b, cj);
        if (ep.empty()) return {};
        bool of = false;
        SVec gp = gv->mul((*mb)[qi], (*mb)[qj], &of);
        if (of) throw Err(0x50, "test algebra escaped its window");
        std::map<int, Scalar> acc;
        for (const auto& [k, c] : ep)
            for (const auto& [g, c2] : gp) {
                int ix = k * nm + back->at(g);
                Scalar t = c * c2;
                auto it = acc.find(ix);
                if (it == acc.end()) acc.emplace(ix, t);
                else it->second = it->second + t;
            }
        SVec out;
        for (const auto& [k, v] : acc)
            if (!v.is_zero()) out.push_back({k, v});
        return out;
    };
    return T;
}

/* ---- element calculus --------------------------------------------------------- */

static void el_norm(DgElem& x) {
    for (auto it = x.begin(); it != x.end();) {
        SVec v;
        for (const auto& [k, c] : it->second)
            if (!c.is_zero()) v.push_back({k, c});
        if (v.empty()) it = x.erase(it);
        else {
            it->second = std::move(v);
            ++it;
        }
    }
}

DgElem el_add(const DgElem& x, const DgElem& y) {
    DgElem out = x;
    for (const auto& [b, v] : y) {
        auto it = out.find(b);
        if (it == out.end()) out[b] = v;
        else it->second = sv_add(it->second, v);
    }
    el_norm(out);
    return out;
}

DgElem el_scale(const DgElem& x, const Scalar& c) {
    DgElem out;
    for (const auto& [b, v] : x) {
        SVec w;
        for (const auto& [k, s] : v) w.push_back({k, s * c});
        out[b] = std::move(w);
    }
    el_norm(out);
    return out;
}

DgElem el_mul(const DgaWindow& T, const DgElem& x, const DgElem& y) {
    DgElem out;
    for (const auto& [a, va] : x)
        for (const auto& [b, vb] : y) {
            if (va.empty() || vb.empty()) continue;
            NW t{a.first + b.first, a.second + b.second};
            if (!T.in_window(t)) throw Err(0x50, "product escapes the window");
            SVec p = T.mul_sv(a, va, b, vb);
            if (p.empty()) continue;
            auto it = out.find(t);
            if (it == out.end()) out[t] = p;
            else it->second = sv_add(it->second, p);
        }
    el_norm(out);
    return out;
}

DgElem el_d(const DgaWindow& T, const DgElem& x) {
    DgElem out;
    for (const auto& [b, v] : x) {
        SVec w = T.c.apply_d(b, v);
        if (!w.empty()) out[{b.first + 1, b.second}] = std::move(w);
    }
    el_norm(out);
    return out;
}

bool el_zero(const DgElem& x) {
    for (const auto& [b, v] : x) {
        (void)b;
        for (const auto& [k, c] : v) {
            (void)k;
            if (!c.is_zero()) return false;
        }
    }
    return true;
}

int el_degree(const DgElem& x) {
    int deg = 0;
    bool seen = false;
    for (const auto& [b, v] : x) {
        if (v.empty()) continue;
        if (!seen) {
            deg = b.first;
            seen = true;
        } else if (b.first != deg) throw Err(0x50, "element has mixed degree");
    }
    return deg;
}

static bool el_eq(const DgElem& x, const DgElem& y) {
    DgElem ny;
    for (const auto& [b, v] : y) {
        SVec w;
        for (const auto& [k, c] : v) w.push_back({k, -c});
        ny[b] = std::move(w);
    }
    return el_zero(el_add(x, ny));
}

bool is_mc(const DgaWindow& T, const DgElem& x) {
    if (el_zero(x)) return true;
    if (el_degree(x) != 1) throw Err(0x50, "Maurer-Cartan elements have degree one");
    return el_zero(el_add(el_d(T, x), el_mul(T, x, x)));
}

DgElem gauge_inverse_part(const DgaWindow& T, const DgElem& g) {
    if (!el_zero(g) && el_degree(g) != 0) throw Err(0x50, "gauge elements have degree zero");
    Scalar mone = -Scalar::one(T.c.g.f);
    DgElem v, p = g;
    int k = 0;
    Scalar sgn = mone;
    while (!el_zero(p)) {
        if (++k > 512) throw Err(0x50, "gauge element is not nilpotent in the window");
        v = el_add(v, el_scale(p, sgn));
        p = el_mul(T, p, g);
        sgn = sgn * mone;
    }
    /* (1+g)(1+v) = 1:  g + v + g v = 0 */
    DgElem chk = el_add(el_add(g, v), el_mul(T, g, v));
    if (!el_zero(chk)) throw Err(0x50, "gauge inverse verification failed");
    return v;
}

DgElem gauge_act(const DgaWindow& T, const DgElem& g, const DgElem& x) {
    if (!is_mc(T, x)) throw Err(0x50, "gauge source is not Maurer-Cartan");
    DgElem v = gauge_inverse_part(T, g);
    /* (1+g) x (1+v) = x + xv + gx + gxv */
    DgElem xv = el_mul(T, x, v);
    DgElem gx = el_mul(T, g, x);
    DgElem y = el_add(el_add(x, xv), el_add(gx, el_mul(T, g, xv)));
    /* (1+g) d(1+v) = dv + g dv */
    DgElem dv = el_d(T, v);
    y = el_add(y, el_add(dv, el_mul(T, g, dv)));
    if (!is_mc(T, y)) throw Err(0x50, "gauge action broke Maurer-Cartan");
    return y;
}

DgElem homotopy_act(const DgaWindow& T, const DgElem& h, const DgElem& g, const DgElem& x,
                    const DgElem& y) {
    if (!el_zero(h) && el_degree(h) != -1) throw Err(0x50, "homotopies have degree minus one");
    DgElem gy = gauge_act(T, g, x);
    if (!el_eq(gy, y)) throw Err(0x50, "homotopy requires the gauge relation to hold");
    DgElem g2 = el_add(el_add(g, el_d(T, h)), el_add(el_mul(T, y, h), el_mul(T, h, x)));
    DgElem gy2 = gauge_act(T, g2, x);
    if (!el_eq(gy2, y)) throw Err(0x50, "homotopy step broke the gauge relation");
    return g2;
}

/* ---- twisting morphisms -------------------------------------------------------- */

TwistReport twist_correspondence(const ArtinianTestAlgebra& Z, const DgaWindow& E, long seed,
                                 long budget) {
    TwistReport rep;
    const Field f = E.c.g.f;
    int nm = (int)Z.mbasis.size();
    DgaWindow T = tensor_with_ideal(E, Z);

    /* coordinates: degree-1 cells of E crossed with the ideal basis */
    std::vector<std::pair<NW, int>> ecells;
    for (const auto& [b, cs] : E.c.g.cells)
        if (b.first == 1)
            for (int i = 0; i < (int)cs.size(); ++i) ecells.push_back({b, i});
    long coords = (long)ecells.size() * nm;
    if (coords == 0) {
        rep.ok = true;
        rep.notes.push_back("degree-one part is empty; only the zero element exists");
        rep.exhaustive = true;
        rep.tested = 1;
        return rep;
    }

    /* structure constants of the ideal */
    std::map<int, int> back;
    for (int q = 0; q < nm; ++q) back[Z.mbasis[q]] = q;
    std::vector<std::vector<SVec>> sc(nm, std::vector<SVec>(nm));
    for (int q1 = 0; q1 < nm; ++q1)
        for (int q2 = 0; q2 < nm; ++q2) {
            bool of = false;
            SVec p = Z.A.mul(Z.mbasis[q1], Z.mbasis[q2], &of);
            if (of) throw Err(0x50, "test algebra escaped its window");
            SVec out;
            for (const auto& [k, c] : p) out.push_back({back.at(k), c});
            sc[q1][q2] = std::move(out);
        }

    /* one sample: coordinates c[(cell, q)] -> both membership tests */
    auto run = [&](const std::vector<Scalar>& cv) -> bool {
        /* MC side, in E tensor m */
        DgElem x;
        for (int ci = 0; ci < (int)ecells.size(); ++ci)
            for (int q = 0; q < nm; ++q) {
                const Scalar& c = cv[ci * nm + q];
                if (c.is_zero()) continue;
                x[ecells[ci].first].push_back({ecells[ci].second * nm + q, c});
            }
        for (auto& [b, v] : x) {
            (void)b;
            std::sort(v.begin(), v.end(),
                      [](const auto& a, const auto& b2) { return a.first < b2.first; });
        }
        bool mc = is_mc(T, x);

        /* twisting side: per ideal coordinate, d tau_q + sum c^q tau_q1 tau_q2 = 0 */
        std::vector<DgElem> tau(nm);
        for (int ci = 0; ci < (int)ecells.size(); ++ci)
            for (int q = 0; q < nm; ++q) {
                const Scalar& c = cv[ci * nm + q];
                if (c.is_zero()) continue;
                tau[q][ecells[ci].first].push_back({ecells[ci].second, c});
            }
        for (auto& t : tau)
            for (auto& [b, v] : t) {
                (void)b;
                std::sort(v.begin(), v.end(),
                          [](const auto& a, const auto& b2) { return a.first < b2.first; });
            }
        bool tw = true;
        for (int q = 0; q < nm && tw; ++q) {
            DgElem r = el_d(E, tau[q]);
            for (int q1 = 0; q1 < nm; ++q1)
                for (int q2 = 0; q2 < nm; ++q2)
                    for (const auto& [qq, c] : sc[q1][q2])
                        if (qq == q) r = el_add(r, el_scale(el_mul(E, tau[q1], tau[q2]), c));
            if (!el_zero(r)) tw = false;
        }
        return mc == tw;
    };

    rep.ok = true;
    auto consume = [&](const std::vector<Scalar>& cv) {
        if (!run(cv)) rep.ok = false;
        ++rep.tested;
    };

    if (f.p > 1) {
        double bits = coords * std::log2((double)f.p);
        if (bits <= 16.0) {
            rep.exhaustive = true;
            std::vector<Scalar> cv(coords, Scalar::zero(f));
            std::vector<long> digits(coords, 0);
            long total = 1;
            for (long i = 0; i < coords; ++i) total *= f.p;
            for (long n = 0; n < total && rep.tested < budget; ++n) {
                for (long i = 0; i < coords; ++i) cv[i] = Scalar::from_long(digits[i], f);
                consume(cv);
                for (long i = 0; i < coords; ++i) {
                    if (++digits[i] < (long)f.p) break;
                    digits[i] = 0;
                }
            }
            rep.notes.push_back("exhaustive over F_" + std::to_string(f.p));
        }
    }
    if (!rep.exhaustive) {
        std::mt19937_64 rng((unsigned long long)seed);
        /* corner cases: zero and single monomials */
        std::vector<Scalar> cv(coords, Scalar::zero(f));
        consume(cv);
        for (long i = 0; i < coords && rep.tested < budget; ++i) {
            std::fill(cv.begin(), cv.end(), Scalar::zero(f));
            cv[i] = Scalar::one(f);
            consume(cv);
        }
        while (rep.tested < budget) {
            for (long i = 0; i < coords; ++i) {
                long r = (long)(rng() % 7) - 3;
                cv[i] = Scalar::from_long(r, f);
            }
            consume(cv);
        }
        rep.notes.push_back("seeded sampling with monomial corner cases");
    }
    return rep;
}

} // namespace ncdq
