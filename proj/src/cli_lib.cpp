#include "ncdq/cli_lib.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace ncdq {

using njson = nlohmann::ordered_json;

/* ---- spec parsing ------------------------------------------------------- */

static Err sx(const std::string& where, const std::string& what) {
    return Err(0x80, "spec error at " + where + ": " + what);
}

static std::string jstr(const njson& j, const std::string& where) {
    if (!j.is_string()) throw sx(where, "expected a string");
    return j.get<std::string>();
}

static Field field_of_json(const njson& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "Q" || s == "q") return Field{0};
        throw sx("$.field", "unknown field \"" + s + "\" (use \"Q\" or {\"p\": prime})");
    }
    if (j.is_object() && j.contains("p") && j["p"].is_number_integer()) {
        long long p = j["p"].get<long long>();
        if (p < 2 || !is_prime_u64((std::uint64_t)p))
            throw sx("$.field.p", std::to_string(p) + " is not prime");
        return Field{(std::uint64_t)p};
    }
    throw sx("$.field", "expected \"Q\" or {\"p\": prime}");
}

QuiverSpec parse_spec_text(const std::string& text, const std::string& name) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < ex.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw Err(0x80, "spec parse error (line " + std::to_string(line) + "): " + ex.what());
    }
    if (!j.is_object()) throw sx("$", "top level must be an object");
    QuiverSpec s;
    s.name = j.contains("name") ? jstr(j["name"], "$.name") : name;

    if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty())
        throw sx("$.vertices", "a nonempty array of vertex names is required");
    std::map<std::string, int> vix;
    for (std::size_t i = 0; i < j["vertices"].size(); ++i) {
        std::string v = jstr(j["vertices"][i], "$.vertices[" + std::to_string(i) + "]");
        if (v.empty() || vix.count(v))
            throw sx("$.vertices[" + std::to_string(i) + "]",
                     "vertex names must be nonempty and unique");
        vix[v] = (int)i;
        s.q.vertices.push_back(v);
    }

    if (!j.contains("field")) throw sx("$.field", "required: \"Q\" or {\"p\": prime}");
    s.field = field_of_json(j["field"]);

    std::map<std::string, int> aix;
    if (j.contains("arrows")) {
        if (!j["arrows"].is_array()) throw sx("$.arrows", "expected an array");
        for (std::size_t i = 0; i < j["arrows"].size(); ++i) {
            std::string at = "$.arrows[" + std::to_string(i) + "]";
            const njson& a = j["arrows"][i];
            if (!a.is_object()) throw sx(at, "expected {name, src, tgt}");
            Arrow ar;
            ar.name = jstr(a.value("name", njson()), at + ".name");
            if (ar.name.empty() || aix.count(ar.name) || vix.count(ar.name))
                throw sx(at + ".name", "arrow names must be nonempty, unique, "
                                       "and distinct from vertex names");
            std::string sv = jstr(a.value("src", njson()), at + ".src");
            std::string tv = jstr(a.value("tgt", njson()), at + ".tgt");
            if (!vix.count(sv)) throw sx(at + ".src", "unknown vertex \"" + sv + "\"");
            if (!vix.count(tv)) throw sx(at + ".tgt", "unknown vertex \"" + tv + "\"");
            ar.src = vix[sv];
            ar.tgt = vix[tv];
            aix[ar.name] = (int)s.q.arrows.size();
            s.q.arrows.push_back(ar);
        }
    }

    if (j.contains("relations")) {
        if (!j["relations"].is_array()) throw sx("$.relations", "expected an array");
        for (std::size_t i = 0; i < j["relations"].size(); ++i) {
            std::string rt = "$.relations[" + std::to_string(i) + "]";
            const njson& rj = j["relations"][i];
            if (!rj.is_array() || rj.empty()) throw sx(rt, "expected a nonempty term array");
            Relation rel;
            int rsrc = -1, rtgt = -1;
            for (std::size_t t = 0; t < rj.size(); ++t) {
                std::string tt = rt + "[" + std::to_string(t) + "]";
                const njson& term = rj[t];
                if (!term.is_object() || !term.contains("path"))
                    throw sx(tt, "expected {coeff, path}");
                RelTerm rterm;
                if (term.contains("coeff")) {
                    std::string c = term["coeff"].is_number_integer()
                                        ? std::to_string(term["coeff"].get<long long>())
                                        : jstr(term["coeff"], tt + ".coeff");
                    try {
                        rterm.coeff = Scalar::parse(c, s.field);
                    } catch (const std::exception& ex) {
                        throw sx(tt + ".coeff", ex.what());
                    }
                } else {
                    rterm.coeff = Scalar::one(s.field);
                }
                const njson& pj = term["path"];
                if (!pj.is_array() || pj.empty())
                    throw sx(tt + ".path", "expected a nonempty array of arrow names");
                int tsrc = -1, ttgt = -1;
                for (std::size_t k = 0; k < pj.size(); ++k) {
                    std::string an = jstr(pj[k], tt + ".path[" + std::to_string(k) + "]");
                    auto it = aix.find(an);
                    if (it == aix.end())
                        throw sx(tt + ".path[" + std::to_string(k) + "]",
                                 "unknown arrow \"" + an + "\"");
                    const Arrow& ar = s.q.arrows[it->second];
                    if (k == 0) tsrc = ar.src;
                    else if (ttgt != ar.src)
                        throw sx(tt + ".path",
                                 "does not compose at position " + std::to_string(k) +
                                     ": \"" + s.q.arrows[rterm.word.back()].name +
                                     "\" ends at \"" + s.q.vertices[ttgt] + "\" but \"" + an +
                                     "\" starts at \"" + s.q.vertices[ar.src] + "\"");
                    ttgt = ar.tgt;
                    rterm.word.push_back(it->second);
                }
                if (rsrc < 0) {
                    rsrc = tsrc;
                    rtgt = ttgt;
                } else if (rsrc != tsrc || rtgt != ttgt) {
                    throw sx(tt, "mismatched endpoints: this term runs \"" +
                                     s.q.vertices[tsrc] + "\" -> \"" + s.q.vertices[ttgt] +
                                     "\" but term 0 runs \"" + s.q.vertices[rsrc] + "\" -> \"" +
                                     s.q.vertices[rtgt] + "\"");
                }
                if (!rterm.coeff.is_zero()) rel.push_back(rterm);
            }
            if (!rel.empty()) s.relations.push_back(rel);
        }
    }

    if (!j.contains("idempotent_vertices") || !j["idempotent_vertices"].is_array())
        throw sx("$.idempotent_vertices", "an array of vertex names is required");
    for (std::size_t i = 0; i < j["idempotent_vertices"].size(); ++i) {
        std::string at = "$.idempotent_vertices[" + std::to_string(i) + "]";
        std::string v = jstr(j["idempotent_vertices"][i], at);
        if (!vix.count(v)) throw sx(at, "unknown vertex \"" + v + "\"");
        s.marked.push_back(vix[v]);
    }
    std::sort(s.marked.begin(), s.marked.end());
    if (std::adjacent_find(s.marked.begin(), s.marked.end()) != s.marked.end())
        throw sx("$.idempotent_vertices", "vertices listed twice");

    if (j.contains("truncation")) {
        const njson& tj = j["truncation"];
        if (!tj.is_object()) throw sx("$.truncation", "expected an object");
        auto geti = [&](const char* key, int lo, int def) {
            if (!tj.contains(key)) return def;
            if (!tj[key].is_number_integer())
                throw sx(std::string("$.truncation.") + key, "expected an integer");
            int v = tj[key].get<int>();
            if (v < lo)
                throw sx(std::string("$.truncation.") + key,
                         "must be >= " + std::to_string(lo));
            return v;
        };
        s.trunc.path_length = geti("path_length", 1, -1);
        s.trunc.dg_depth = geti("dg_depth", 0, 3);
        s.trunc.internal_degree = geti("internal_degree", 0, -1);
        s.trunc.resolution_length = geti("resolution_length", 1, 4);
    }
    return s;
}

QuiverSpec parse_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Err(0x80, "cannot open spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string base = path;
    if (auto q = base.find_last_of('/'); q != std::string::npos) base = base.substr(q + 1);
    if (auto q = base.find_last_of('.'); q != std::string::npos) base = base.substr(0, q);
    return parse_spec_text(ss.str(), base);
}

/* ---- shared plumbing ---------------------------------------------------- */

static Field field_of_string(const std::string& s) {
    if (s == "Q" || s == "q") return Field{0};
    std::string d = (s.size() > 1 && (s[0] == 'F' || s[0] == 'f')) ? s.substr(1) : s;
    if (!d.empty() && d.find_first_not_of("0123456789") == std::string::npos) {
        std::uint64_t p = std::stoull(d);
        if (p >= 2 && is_prime_u64(p)) return Field{p};
    }
    throw Err(0x80, "unknown field \"" + s + "\" (use Q or F<p>)");
}

static QuiverSpec with_overrides(QuiverSpec s, const JobConfig& cfg) {
    if (cfg.N > 0) s.trunc.path_length = cfg.N;
    if (cfg.J >= 0) s.trunc.dg_depth = cfg.J;
    if (cfg.D >= 0) s.trunc.internal_degree = cfg.D;
    if (cfg.L > 0) s.trunc.resolution_length = cfg.L;
    if (!cfg.field.empty()) s.field = field_of_string(cfg.field);
    return s;
}

struct Windows {
    int J = 3, D = 0, L = 4, W = 0;
};

static Windows resolve_windows(const Algebra& A, const QuiverSpec& s) {
    Windows w;
    w.J = s.trunc.dg_depth;
    w.D = s.trunc.internal_degree;
    if (!A.graded) w.D = 0;
    else if (w.D < 0) w.D = A.exact ? A.top_len * (w.J + 1) : A.N;
    if (A.graded && !A.exact && w.D > A.N) w.D = A.N;
    w.L = s.trunc.resolution_length;
    w.W = A.graded ? w.D : A.dim();
    return w;
}

static std::string field_name(const Field& f) {
    return f.p ? "F" + std::to_string(f.p) : "Q";
}

struct Out {
    njson j;
    std::vector<std::string> t;
    void line(const std::string& s) { t.push_back(s); }
};

static void head(Out& o, const JobConfig& cfg, const QuiverSpec& s, const Algebra& A,
                 const Windows& w) {
    o.j["schema_version"] = 1;
    o.j["command"] = cfg.command;
    o.j["spec"] = s.name;
    o.j["field"] = field_name(A.f);
    o.j["algebra"] = {{"dim", A.dim()},
                      {"graded", A.graded},
                      {"exact", A.exact},
                      {"path_window", A.N}};
    o.j["window"] = {{"J", w.J}, {"D", w.D}, {"L", w.L}};
    o.line("command: " + cfg.command);
    o.line("spec: " + s.name + "   field: " + field_name(A.f) +
           "   dim A: " + std::to_string(A.dim()) + (A.graded ? "   graded" : "   ungraded") +
           (A.exact ? ", exact" : ", truncated at N=" + std::to_string(A.N)));
    o.line("window: J=" + std::to_string(w.J) + " D=" + std::to_string(w.D) +
           " L=" + std::to_string(w.L));
}

static DerivedQuotientModel model_for(const Algebra& A, const Idempotent& e, int J, int D) {
    return A.graded ? build_model_reduced(A, e, J, D) : build_model(A, e, J, D);
}

static njson h_table(const CohomologyRing& H, const GradedWindow& g, int nlo, int nhi,
                     int D, std::vector<std::string>* lines) {
    njson rows = njson::array();
    std::vector<int> degs;
    if (nhi <= 0)
        for (int n = nhi; n >= nlo; --n) degs.push_back(n);
    else
        for (int n = nlo; n <= nhi; ++n) degs.push_back(n);
    for (int n : degs) {
        int total = 0;
        bool all_tr = true, any = false;
        njson bw = njson::array();
        for (int w = 0; w <= D; ++w) {
            NW b{n, w};
            int dd = H.dim.count(b) ? H.dim.at(b) : 0;
            bool tr;
            if (H.trusted.count(b)) tr = H.trusted.at(b);
            else
                tr = g.complete({n - 1, w}) && g.complete(b) && g.complete({n + 1, w});
            if (!tr) all_tr = false;
            if (dd) {
                any = true;
                bw.push_back({{"weight", w}, {"dim", dd}, {"trusted", tr}});
                if (tr) total += dd;
            }
        }
        rows.push_back({{"degree", n},
                        {"dim", total},
                        {"trusted", all_tr},
                        {"by_weight", bw}});
        if (lines) {
            std::string ln = "H^" + std::to_string(n) + ": dim " + std::to_string(total) +
                             (all_tr ? " [trusted]" : " [partial trust]");
            if (any) {
                ln += "   (";
                bool first = true;
                for (const auto& r : bw) {
                    if (!first) ln += ", ";
                    first = false;
                    ln += "w" + std::to_string(r["weight"].get<int>()) + ": " +
                          std::to_string(r["dim"].get<int>());
                    if (!r["trusted"].get<bool>()) ln += "?";
                }
                ln += ")";
            }
            lines->push_back(ln);
        }
    }
    return rows;
}

/* ---- commands ----------------------------------------------------------- */

static int cmd_derived_quotient(const QuiverSpec& s, const Algebra& A, const Windows& w,
                                Out& o) {
    Idempotent e = idempotent_for(A, s.marked);
    DerivedQuotientModel m = model_for(A, e, w.J, w.D);
    CohomologyRing H = dq_cohomology_ring(m);
    int cells = 0;
    for (const auto& [b, v] : m.dga.c.g.cells) {
        (void)b;
        cells += (int)v.size();
    }
    o.j["model"] = {{"reduced", m.data->reduced}, {"cells", cells}};
    o.line(std::string("model: ") + (m.data->reduced ? "reduced" : "full") + ", " +
           std::to_string(cells) + " cells");
    o.j["cohomology"] = h_table(H, m.dga.c.g, -w.J, 0, w.D, &o.t);
    StratifyingVerdict v = is_stratifying(m, H);
    o.j["stratifying"] = {{"verdict", v.stratifying}, {"depth", v.depth}, {"detail", v.detail}};
    o.line(std::string("stratifying: ") + (v.stratifying ? "yes" : "no") + " — " + v.detail);
    return 0;
}

static int cmd_h1(const QuiverSpec& s, const Algebra& A, const Windows& w, Out& o) {
    (void)w;
    MarkedRelationsResult mr = marked_relations(s);
    long bound = h1_bound(s); /* throws 0x35 if the bound is violated */
    Idempotent e = idempotent_for(A, s.marked);
    QuotientAlgebra q = quotient_by_idempotent_ideal(A, e);
    long ell = 0;
    for (const Relation& r : s.relations) {
        long li = 1;
        for (const RelTerm& t : r) li *= std::max<long>(1, (long)t.word.size() - 1);
        ell += li;
    }
    o.j["h1"] = {{"dim", mr.h1_dim}, {"trusted", mr.h1_trusted}};
    njson marked = njson::array();
    for (const MarkedRelation& m : mr.marked) {
        bool nz = false;
        for (const Scalar& c : m.cls)
            if (!c.is_zero()) nz = true;
        marked.push_back({{"relation", m.rel},
                          {"label", m.label},
                          {"degree", m.bucket.first},
                          {"weight", m.bucket.second},
                          {"class_nonzero", nz}});
    }
    o.j["marked"] = marked;
    njson basis = njson::array();
    std::string bl;
    for (int i : mr.basis_pick) {
        basis.push_back(mr.marked[i].label);
        if (!bl.empty()) bl += ", ";
        bl += mr.marked[i].label;
    }
    o.j["basis"] = basis;
    o.j["spans"] = mr.spans;
    o.j["bound"] = {{"ell", ell}, {"d", q.view.dim}, {"value", bound}};
    o.line("dim H^-1 = " + std::to_string(mr.h1_dim) +
           (mr.h1_trusted ? " [trusted]" : " [untrusted]"));
    o.line("basis from marked relations: {" + bl + "}");
    o.line(std::string("marked classes span H^-1: ") + (mr.spans ? "yes" : "no"));
    o.line("bound: l = " + std::to_string(ell) + ", d = " + std::to_string(q.view.dim) +
           ", d^2 l = " + std::to_string(bound));
    return 0;
}

static int cmd_ext(const QuiverSpec& s, const Algebra& A, const Windows& w, Out& o) {
    Idempotent e = idempotent_for(A, s.marked);
    SimpleTop st = simple_top(A, e);
    int cap = A.exact ? -1 : w.D;
    ResolutionWindow r = minimal_resolution(st.M, w.L, cap);
    ExtAlgebraWindow E = ext_algebra(r);
    std::map<int, int> hom = ext_dims_via_hom_complex(r);
    o.j["simple_vertex"] = A.q.vertices[st.vertex];
    njson terms = njson::array();
    std::string shape;
    for (std::size_t i = 0; i < r.terms.size(); ++i) {
        std::map<std::pair<int, int>, int> mult;
        for (const ProjSummand& t : r.terms[i]) mult[{t.vertex, t.shift}]++;
        njson tj = njson::array();
        std::string piece;
        for (const auto& [vs, c] : mult) {
            tj.push_back({{"vertex", A.q.vertices[vs.first]}, {"shift", vs.second}, {"mult", c}});
            if (!piece.empty()) piece += " + ";
            piece += "P(" + A.q.vertices[vs.first] + ")";
            if (vs.second) piece += "(-" + std::to_string(vs.second) + ")";
            if (c > 1) piece += "^" + std::to_string(c);
        }
        terms.push_back(tj);
        if (!shape.empty()) shape += " <- ";
        shape += piece;
    }
    o.j["resolution"] = {{"terms", terms},
                         {"minimal", r.minimal},
                         {"window_limited", r.window_limited}};
    o.line("resolution of S at " + A.q.vertices[st.vertex] + ": " + shape +
           (r.minimal ? "   [minimal]" : "   [NOT minimal]"));
    njson dims = njson::array(), homj = njson::array();
    std::string dl, hl;
    for (int j2 = 0; j2 <= E.L; ++j2) {
        int d1 = E.dims.count(j2) ? E.dims.at(j2) : 0;
        int d2 = hom.count(j2) ? hom.at(j2) : 0;
        dims.push_back(d1);
        homj.push_back(d2);
        if (!dl.empty()) dl += ", ";
        dl += std::to_string(d1);
        if (!hl.empty()) hl += ", ";
        hl += std::to_string(d2);
    }
    njson bywt = njson::array();
    for (const auto& [dw, dd] : E.dim_by_wt)
        bywt.push_back({{"degree", dw.first}, {"weight", dw.second}, {"dim", dd}});
    o.j["ext"] = {{"dims", dims},
                  {"hom_route", homj},
                  {"by_weight", bywt},
                  {"two_route_ok", E.two_route_ok}};
    njson notes = njson::array();
    for (const auto& n : E.notes) notes.push_back(n);
    for (const auto& n : r.notes) notes.push_back(n);
    o.j["notes"] = notes;
    o.line("Ext(S,S) dims (degree 0.." + std::to_string(E.L) + "): " + dl);
    o.line("hom-complex route:            " + hl);
    o.line(std::string("two routes agree: ") + (E.two_route_ok ? "yes" : "NO"));
    return E.two_route_ok ? 0 : 1;
}

static int cmd_koszul(const QuiverSpec& s, const Algebra& A, const Windows& w, Out& o,
                      long budget) {
    (void)s;
    int W = w.W;
    AugmentedDgaWindow ag = augment(algebra_dga(A, A.graded ? W : 0), W);
    CoalgebraWindow B = bar(ag, W);
    CoalgebraReport cr = check_coalgebra(B, budget);
    int bcells = 0;
    for (const auto& [b, v] : B.g.cells) {
        (void)b;
        bcells += (int)v.size();
    }
    njson viol = njson::array();
    for (const auto& v : cr.violations) viol.push_back(v);
    o.j["bar"] = {{"weight_cap", W},
                  {"cells", bcells},
                  {"coalgebra_ok", cr.ok},
                  {"checks", cr.checks},
                  {"violations", viol}};
    o.line("bar construction: " + std::to_string(bcells) + " words through weight " +
           std::to_string(W));
    o.line(std::string("coalgebra laws: ") + (cr.ok ? "pass" : "FAIL") + " (" +
           std::to_string(cr.checks) + " checks)");

    DgaWindow dual = koszul_dual(ag, W);
    DgaReport dr = check_dga(dual, budget);
    CohomologyRing Hd = cohomology(dual);
    njson hd = h_table(Hd, dual.c.g, dual.c.g.nmin, dual.c.g.nmax, W, nullptr);
    o.j["dual"] = {{"laws_ok", dr.ok}, {"h", hd}};
    o.line(std::string("Koszul dual dga laws: ") + (dr.ok ? "pass" : "FAIL"));
    for (int n = dual.c.g.nmin; n <= dual.c.g.nmax; ++n) {
        std::string ln;
        int tot = 0;
        for (int wt = 0; wt <= W; ++wt) {
            NW b{n, wt};
            if (Hd.dim.count(b) && Hd.dim.at(b)) {
                tot += Hd.dim.at(b);
                if (!ln.empty()) ln += ", ";
                ln += "w" + std::to_string(wt) + ":" + std::to_string(Hd.dim.at(b));
            }
        }
        if (tot) o.line("H^" + std::to_string(n) + "(dual): dim " + std::to_string(tot) +
                        " (" + ln + ")");
    }

    DoubleDualReport dd = double_dual_compare(ag, W, 0, 0);
    njson ddb = njson::array();
    for (const auto& [b, dl] : dd.lhs) {
        int rr = dd.rhs.count(b) ? dd.rhs.at(b) : 0;
        ddb.push_back(
            {{"degree", b.first}, {"weight", b.second}, {"lhs", dl}, {"rhs", rr}});
    }
    njson ddn = njson::array();
    for (const auto& n : dd.notes) ddn.push_back(n);
    o.j["double_dual"] = {{"ok", dd.ok}, {"status", dd.status}, {"buckets", ddb},
                          {"notes", ddn}};
    o.line("double dual: " + dd.status);

    DgaWindow Om = cobar(B, W);
    CohomologyRing Ho = cohomology(Om);
    bool h0ok = true, posok = true;
    for (int wt = 0; wt <= W; ++wt) {
        int aw = 0;
        for (int i = 0; i < A.dim(); ++i)
            if ((A.graded ? A.wt(i) : 0) == wt) ++aw;
        NW b{0, wt};
        bool tr = Ho.trusted.count(b) ? Ho.trusted.at(b) : Om.c.g.complete(b);
        int hw = Ho.dim.count(b) ? Ho.dim.at(b) : 0;
        if (tr && hw != aw) h0ok = false;
    }
    for (const auto& [b, dd2] : Ho.dim) {
        if (b.first <= 0 || dd2 == 0) continue;
        if (Ho.trusted.count(b) && Ho.trusted.at(b)) posok = false;
    }
    o.j["cobar_of_bar"] = {{"h0_matches_algebra", h0ok}, {"positive_h_vanishes", posok}};
    o.line(std::string("cobar(bar): H^0 matches A: ") + (h0ok ? "yes" : "NO") +
           ", positive H vanishes: " + (posok ? "yes" : "NO"));
    return (cr.ok && dr.ok && dd.ok && h0ok && posok) ? 0 : 1;
}

static int cmd_thma(const QuiverSpec& s, const Algebra& A, const Windows& w, Out& o) {
    Idempotent e = idempotent_for(A, s.marked);
    ThmAReport tr = theorem_a_consistency(A, e, w.J, w.D, w.L);
    njson rows = njson::array();
    std::set<NW> keys;
    for (const auto& [b, d] : tr.dual_dims)
        if (d) keys.insert(b);
    for (const auto& [b, d] : tr.model_dims)
        if (d) keys.insert(b);
    for (NW b : keys) {
        int dl = tr.dual_dims.count(b) ? tr.dual_dims.at(b) : 0;
        int dm = tr.model_dims.count(b) ? tr.model_dims.at(b) : 0;
        rows.push_back({{"degree", b.first}, {"weight", b.second}, {"dual", dl},
                        {"model", dm}});
        o.line("  (" + std::to_string(b.first) + ", w" + std::to_string(b.second) +
               "): dual " + std::to_string(dl) + "  model " + std::to_string(dm) +
               (dl == dm ? "" : "   <- differ"));
    }
    njson notes = njson::array();
    for (const auto& n : tr.notes) notes.push_back(n);
    o.j["theorem_a"] = {{"hypothesis_ok", tr.hypothesis_ok},
                        {"consistent", tr.consistent},
                        {"status", tr.status},
                        {"buckets", rows},
                        {"notes", notes}};
    o.t.insert(o.t.end() - (std::ptrdiff_t)rows.size(), "theorem A consistency: " + tr.status);
    if (!tr.hypothesis_ok || tr.status == "requires a graded algebra") return 2;
    return tr.consistent ? 0 : 1;
}

static int cmd_eta(const JobConfig& cfg, const QuiverSpec& s, const Algebra& A,
                   const Windows& w, Out& o) {
    Idempotent e = idempotent_for(A, s.marked);
    DerivedQuotientModel m = model_for(A, e, w.J, w.D);
    CohomologyRing H = dq_cohomology_ring(m);
    std::vector<int> ps;
    if (cfg.p > 0) ps.push_back(cfg.p);
    else
        for (int p = 1; p <= cfg.P; ++p) ps.push_back(p);
    njson periods = njson::array();
    bool any_found = false, any_ok_window = false, crosscheck_bad = false;
    for (int p : ps) {
        njson ent;
        ent["p"] = p;
        EtaSearch es;
        try {
            es = find_eta(m, H, p);
        } catch (const Err& er) {
            ent["error"] = er.what();
            periods.push_back(ent);
            o.line("p=" + std::to_string(p) + ": " + er.what());
            continue;
        }
        any_ok_window = true;
        ent["window_ok"] = es.window_ok;
        njson cands = njson::array();
        for (const EtaCandidate& c : es.found)
            cands.push_back({{"weight", c.bucket.second}, {"class", c.cell}});
        ent["candidates"] = cands;
        njson esn = njson::array();
        for (const auto& n : es.notes) esn.push_back(n);
        ent["notes"] = esn;
        if (es.found.empty()) {
            o.line("p=" + std::to_string(p) + ": no periodicity candidate");
        } else {
            any_found = true;
            EtaCandidate eta = es.found[0];
            bool central = centrality_check(m, H, eta);
            ent["central"] = central;
            std::string ln = "p=" + std::to_string(p) + ": eta in H^{-" + std::to_string(p) +
                             "} at weight " + std::to_string(eta.bucket.second) +
                             (central ? ", central" : ", NOT central");
            if (central) {
                LocalizedRingWindow L = localize_at_eta(m, H, eta);
                njson dims = njson::array();
                for (const auto& [j2, d2] : L.dims)
                    dims.push_back({{"degree", j2}, {"dim", d2}});
                ent["localized"] = {{"dims", dims}, {"periodic", L.periodic}};
                ln += "; localized dims ";
                bool first = true;
                for (const auto& [j2, d2] : L.dims) {
                    (void)j2;
                    if (!first) ln += ",";
                    first = false;
                    ln += std::to_string(d2);
                }
            }
            UniquenessReport uq = uniqueness_report(m, H, p);
            njson verd = njson::array();
            for (const auto& [c, v] : uq.verdicts)
                verd.push_back({{"weight", c.bucket.second}, {"class", c.cell},
                                {"verdict", v}});
            ent["uniqueness"] = {{"h0_local", uq.h0_local},
                                 {"unique_line", uq.unique_line},
                                 {"verdicts", verd}};
            StableExtReport sec = stable_ext_crosscheck(A, e, w.J, w.D, p);
            njson tbl = njson::array();
            for (const auto& [j2, pr] : sec.table)
                tbl.push_back({{"degree", j2}, {"localized", pr[0]}, {"oracle", pr[1]}});
            njson secn = njson::array();
            for (const auto& n : sec.notes) secn.push_back(n);
            ent["stable_ext"] = {{"applicable", sec.applicable},
                                 {"ok", sec.ok},
                                 {"table", tbl},
                                 {"notes", secn}};
            if (sec.applicable && !sec.ok) crosscheck_bad = true;
            ln += "; unique line: " + std::string(uq.unique_line ? "yes" : "no");
            ln += "; stable-ext: " +
                  std::string(!sec.applicable ? "not applicable" : (sec.ok ? "match" : "MISMATCH"));
            o.line(ln);
        }
        periods.push_back(ent);
    }
    o.j["periods"] = periods;
    o.j["found_any"] = any_found;
    if (!any_ok_window) throw Err(0x60, "window too shallow for every requested period");
    return crosscheck_bad ? 1 : 0;
}

/* random element supported on low weights so products stay in the window */
static DgElem sample_elem(const DgaWindow& T, int deg, int wcap, std::mt19937_64& rng) {
    DgElem x;
    for (const auto& [b, cells] : T.c.g.cells) {
        if (b.first != deg || b.second > wcap || cells.empty()) continue;
        SVec v;
        for (int i = 0; i < (int)cells.size(); ++i) {
            if (rng() % std::max<std::size_t>(4, cells.size()) >= 2) continue;
            long c = (long)(rng() % 5) - 2;
            if (c == 0) continue;
            v.push_back({i, Scalar::from_long(c, T.c.g.f)});
        }
        if (!v.empty()) x[b] = v;
    }
    return x;
}

static int cmd_mc(const JobConfig& cfg, const QuiverSpec& s, const Algebra& A,
                  const Windows& w, Out& o) {
    ArtinianTestAlgebra G;
    try {
        G = artinian(view_of(A));
    } catch (const Err& er) {
        o.j["artinian"] = {{"ok", false}, {"error", er.what()}};
        o.line(std::string("input algebra is not an Artinian test algebra: ") + er.what());
        return 2;
    }
    o.j["artinian"] = {{"ok", true},
                       {"ideal_dim", (int)G.mbasis.size()},
                       {"nilpotency", G.nilpotency}};
    o.line("Artinian input: maximal ideal dim " + std::to_string(G.mbasis.size()) +
           ", nilpotency " + std::to_string(G.nilpotency));
    std::mt19937_64 rng(cfg.seed);
    (void)s;

    int Wk = A.graded ? std::min(w.W, 6) : 8;
    AugmentedDgaWindow ag;
    try {
        ag = augment(algebra_dga(A, A.graded ? Wk : 0), Wk);
    } catch (const Err& er) {
        o.j["augmented"] = {{"ok", false}, {"error", er.what()}};
        o.line(std::string("input algebra admits no augmentation window: ") + er.what());
        return 2;
    }
    CoalgebraWindow B = bar(ag, Wk);
    DgaWindow Om = cobar(B, Wk);
    DgaWindow dual = koszul_dual(ag, Wk);

    /* group and homotopy laws over Omega(BA) tensor m: rich gauges, x = 0 */
    DgaWindow T1 = tensor_with_ideal(Om, G);
    int wcap = std::max(0, Wk / std::max(2, G.nilpotency));
    int gsamples = 0, gok = 0, hsamples = 0, hok = 0;
    DgElem x0; /* zero is Maurer-Cartan */
    for (int it = 0; it < 12; ++it) {
        DgElem g1 = sample_elem(T1, 0, wcap, rng);
        DgElem g2 = sample_elem(T1, 0, wcap, rng);
        try {
            DgElem y1 = gauge_act(T1, g1, x0);
            DgElem g12 = el_add(el_add(g1, g2), el_mul(T1, g2, g1));
            DgElem lhs = gauge_act(T1, g12, x0);
            DgElem rhs = gauge_act(T1, g2, y1);
            ++gsamples;
            if (el_zero(el_add(lhs, el_scale(rhs, -Scalar::one(A.f))))) ++gok;
            DgElem h = sample_elem(T1, -1, wcap, rng);
            ++hsamples;
            DgElem g1p = homotopy_act(T1, h, g1, x0, y1); /* verifies internally */
            (void)g1p;
            ++hok;
        } catch (const Err& er) {
            o.line(std::string("  sample skipped: ") + er.what());
        }
    }
    o.j["gauge"] = {{"samples", gsamples}, {"group_law_ok", gok}};
    o.j["homotopy"] = {{"samples", hsamples}, {"connected", hok}};
    o.line("gauge group law: " + std::to_string(gok) + "/" + std::to_string(gsamples) +
           " samples pass");
    o.line("homotopy action: " + std::to_string(hok) + "/" + std::to_string(hsamples) +
           " samples connect");

    /* Maurer-Cartan elements live in the dual, which sits in positive degrees */
    DgaWindow T2 = tensor_with_ideal(dual, G);
    int mc_found = 0, mc_gauged = 0;
    for (const auto& [b, cells] : T2.c.g.cells) {
        if (b.first != 1 || 2 * b.second > Wk) continue;
        for (int i = 0; i < (int)cells.size(); ++i) {
            DgElem x;
            x[b] = {{i, Scalar::one(A.f)}};
            try {
                if (!is_mc(T2, x)) continue;
                ++mc_found;
                DgElem g = sample_elem(T2, 0, 0, rng);
                DgElem y = gauge_act(T2, g, x);
                if (is_mc(T2, y)) ++mc_gauged;
            } catch (const Err&) {
            }
            if (mc_found >= 16) break;
        }
        if (mc_found >= 16) break;
    }
    o.j["mc"] = {{"basis_candidates_found", mc_found}, {"gauge_preserves", mc_gauged}};
    o.line("Maurer-Cartan basis candidates in the dual tensor m: " +
           std::to_string(mc_found) + ", gauge-preserved: " + std::to_string(mc_gauged));

    TwistReport tw = twist_correspondence(G, dual, (long)cfg.seed, cfg.budget);
    njson twn = njson::array();
    for (const auto& n : tw.notes) twn.push_back(n);
    o.j["twist"] = {{"ok", tw.ok},
                    {"tested", tw.tested},
                    {"exhaustive", tw.exhaustive},
                    {"notes", twn}};
    o.line(std::string("twist correspondence: ") + (tw.ok ? "pass" : "FAIL") + " (" +
           std::to_string(tw.tested) + " elements" +
           (tw.exhaustive ? ", exhaustive)" : ", sampled)"));
    bool ok = gok == gsamples && hok == hsamples && mc_gauged == mc_found && tw.ok;
    return ok ? 0 : 1;
}

static int cmd_check(const QuiverSpec& s, const Algebra& A, const Windows& w, Out& o,
                     long budget) {
    struct Row {
        std::string name, status, detail;
    };
    std::vector<Row> rows;
    auto run = [&](const std::string& name, std::function<std::string()> f) {
        try {
            rows.push_back({name, "pass", f()});
        } catch (const Err& er) {
            /* window limits and inapplicable structure skip; defects fail */
            bool skip = exit_code_for(er) == 3 || er.code == 0x40;
            rows.push_back({name, skip ? "skipped" : "fail", er.what()});
        } catch (const std::exception& ex) {
            rows.push_back({name, "fail", ex.what()});
        }
    };
    Idempotent e = idempotent_for(A, s.marked);
    int Jc = std::min(w.J, 4), Dc = A.graded ? std::min(w.D, 8) : 0;

    run("peirce-decomposition", [&] {
        auto pd = peirce_dims(A, e);
        int sum = pd[0] + pd[1] + pd[2] + pd[3];
        if (sum != A.dim()) throw Err(0x21, "Peirce blocks sum to " + std::to_string(sum));
        return "eAe " + std::to_string(pd[0]) + ", eA(1-e) " + std::to_string(pd[1]) +
               ", (1-e)Ae " + std::to_string(pd[2]) + ", (1-e)A(1-e) " + std::to_string(pd[3]);
    });
    DerivedQuotientModel m = model_for(A, e, Jc, Dc);
    run("model-d-squared", [&] {
        m.dga.c.check_d2();
        return "window J=" + std::to_string(Jc) + ", D=" + std::to_string(Dc);
    });
    run("model-dga-laws", [&] {
        DgaReport r = check_dga(m.dga, budget);
        if (!r.ok) throw Err(0x33, r.violations.empty() ? "violations" : r.violations[0]);
        return std::to_string(r.checks) + " checks" + (r.sampled ? " (sampled)" : "");
    });
    CohomologyRing H = dq_cohomology_ring(m);
    if (A.graded) {
        run("reduced-vs-full-model", [&] {
            DerivedQuotientModel mf = build_model(A, e, std::min(Jc, 3), std::min(Dc, 6));
            DerivedQuotientModel mr2 = build_model_reduced(A, e, std::min(Jc, 3), std::min(Dc, 6));
            CohomologyRing Hf = cohomology(mf.dga.c), Hr = cohomology(mr2.dga.c);
            int cmps = 0;
            for (int n = 0; n >= -std::min(Jc, 3); --n)
                for (int wt = 0; wt <= std::min(Dc, 6); ++wt) {
                    NW b{n, wt};
                    auto tf = Hf.trusted.find(b);
                    auto tr2 = Hr.trusted.find(b);
                    bool ft = tf != Hf.trusted.end() ? tf->second : mf.dga.c.g.complete(b);
                    bool rt = tr2 != Hr.trusted.end() ? tr2->second : mr2.dga.c.g.complete(b);
                    if (!ft || !rt) continue;
                    int df = Hf.dim.count(b) ? Hf.dim.at(b) : 0;
                    int dr = Hr.dim.count(b) ? Hr.dim.at(b) : 0;
                    if (df != dr)
                        throw Err(0x33, "models differ at (" + std::to_string(n) + "," +
                                            std::to_string(wt) + "): " + std::to_string(df) +
                                            " vs " + std::to_string(dr));
                    ++cmps;
                }
            return std::to_string(cmps) + " buckets compared";
        });
    }
    run("h0-is-quotient-algebra", [&] {
        QuotientAlgebra q = quotient_by_idempotent_ideal(A, e);
        int h0 = H.total_dim(0);
        if (h0 != q.view.dim)
            throw Err(0x33, "H^0 dim " + std::to_string(h0) + " vs dim A/AeA " +
                                std::to_string(q.view.dim));
        return "dim " + std::to_string(h0);
    });
    run("h1-two-routes", [&] {
        std::map<int, int> kd = h1_kernel_dims(A, e, Dc);
        int cmps = 0;
        for (int wt = 0; wt <= Dc; ++wt) {
            NW b{-1, wt};
            bool tr3 = H.trusted.count(b)
                           ? H.trusted.at(b)
                           : (m.dga.c.g.complete({-2, wt}) && m.dga.c.g.complete(b) &&
                              m.dga.c.g.complete({0, wt}));
            if (!tr3) continue;
            int dm = H.dim.count(b) ? H.dim.at(b) : 0;
            int dk = kd.count(wt) ? kd.at(wt) : 0;
            if (dm != dk)
                throw Err(0x33, "H^-1 weight " + std::to_string(wt) + ": model " +
                                    std::to_string(dm) + " vs kernel " + std::to_string(dk));
            ++cmps;
        }
        return std::to_string(cmps) + " weights compared";
    });
    run("tor-two-routes", [&] {
        int cmps = 0;
        for (int j = 2; j <= std::min(Jc - 1, 3); ++j) {
            TorResult t = tor_oracle(A, e, j - 1, Dc);
            bool tr4 = true;
            for (int wt = 0; wt <= Dc; ++wt) {
                NW b{-j, wt};
                bool tb = H.trusted.count(b)
                              ? H.trusted.at(b)
                              : (m.dga.c.g.complete({-j - 1, wt}) && m.dga.c.g.complete(b) &&
                                 m.dga.c.g.complete({-j + 1, wt}));
                if (!tb) tr4 = false;
            }
            if (!tr4 || t.edge) continue;
            int dm = H.total_dim(-j);
            if (dm != t.dim)
                throw Err(0x33, "degree -" + std::to_string(j) + ": model " +
                                    std::to_string(dm) + " vs Tor " + std::to_string(t.dim));
            ++cmps;
        }
        return std::to_string(cmps) + " degrees compared";
    });
    run("h1-bound", [&] {
        long b = h1_bound(s);
        return "bound " + std::to_string(b);
    });
    run("minimal-resolution", [&] {
        SimpleTop st = simple_top(A, e);
        ResolutionWindow r = minimal_resolution(st.M, std::min(w.L, 4), A.exact ? -1 : Dc);
        if (!r.minimal) throw Err(0x70, "resolution not minimal");
        return std::to_string(r.terms.size()) + " terms, minimal";
    });
    run("window-trust-consistency", [&] {
        int n = 0;
        for (const auto& [b, tr5] : H.trusted) {
            bool expect = m.dga.c.g.complete({b.first - 1, b.second}) &&
                          m.dga.c.g.complete(b) && m.dga.c.g.complete({b.first + 1, b.second});
            if (tr5 != expect)
                throw Err(0x33, "trust flag at (" + std::to_string(b.first) + "," +
                                    std::to_string(b.second) + ") disagrees with completeness");
            ++n;
        }
        return std::to_string(n) + " buckets";
    });
    run("bar-coalgebra-laws", [&] {
        int Wk = A.graded ? std::min(Dc, 6) : 0;
        AugmentedDgaWindow ag = augment(algebra_dga(A, Wk), std::max(Wk, A.graded ? Wk : A.dim()));
        CoalgebraWindow B = bar(ag, ag.W);
        CoalgebraReport r = check_coalgebra(B, budget / 2);
        if (!r.ok) throw Err(0x33, r.violations.empty() ? "violations" : r.violations[0]);
        return std::to_string(r.checks) + " checks";
    });
    run("koszul-dual-dga-laws", [&] {
        int Wk = A.graded ? std::min(Dc, 6) : 0;
        AugmentedDgaWindow ag = augment(algebra_dga(A, Wk), std::max(Wk, A.graded ? Wk : A.dim()));
        DgaWindow dual = koszul_dual(ag, ag.W);
        DgaReport r = check_dga(dual, budget / 2);
        if (!r.ok) throw Err(0x33, r.violations.empty() ? "violations" : r.violations[0]);
        return std::to_string(r.checks) + " checks";
    });

    njson rj = njson::array();
    bool all = true;
    for (const Row& r : rows) {
        rj.push_back({{"name", r.name}, {"status", r.status}, {"detail", r.detail}});
        if (r.status == "fail") all = false;
        o.line("  [" + (r.status == "pass" ? std::string("pass") : r.status) + "] " + r.name +
               ": " + r.detail);
    }
    o.j["checks"] = rj;
    o.j["ok"] = all;
    o.line(all ? "all invariants pass" : "INVARIANT FAILURES PRESENT");
    return all ? 0 : 1;
}

/* ---- the algebra as a dga window ---------------------------------------- */

DgaWindow algebra_dga(const Algebra& A, int W) {
    bool graded = A.graded && W > 0;
    if (graded && !A.exact && W > A.N)
        throw Err(0x41, "weight window exceeds the algebra window");
    auto ap = std::make_shared<Algebra>(A);
    DgaWindow a;
    a.c.g.f = A.f;
    a.c.g.nmin = 0;
    a.c.g.nmax = 0;
    a.c.g.D = graded ? W : 0;
    auto bcells = std::make_shared<std::map<int, std::vector<int>>>();
    auto pos = std::make_shared<std::map<int, std::pair<int, int>>>();
    for (int i = 0; i < A.dim(); ++i) {
        int wt = graded ? A.wt(i) : 0;
        if (graded && wt > W) continue;
        auto& v = (*bcells)[wt];
        (*pos)[i] = {wt, (int)v.size()};
        v.push_back(i);
    }
    for (const auto& [wt, v] : *bcells) {
        auto& lab = a.c.g.cells[{0, wt}];
        for (int i : v) lab.push_back(A.basis[i].label);
    }
    a.mul = [ap, bcells, pos](NW ba, int i, NW bb, int j) -> SVec {
        int bi = bcells->at(ba.second)[i], bj = bcells->at(bb.second)[j];
        bool of = false;
        SVec t = ap->mul(bi, bj, &of);
        if (of) throw Err(0x41, "product escaped the algebra window");
        SVec out;
        for (const auto& [k, c] : t) {
            auto it = pos->find(k);
            if (it == pos->end()) throw Err(0x41, "product escaped the weight window");
            out.push_back({it->second.second, c});
        }
        return out;
    };
    for (const auto& [k, c] : A.unit) a.unit.push_back({pos->at(k).second, c});
    return a;
}

/* ---- dispatch ----------------------------------------------------------- */

int exit_code_for(const Err& e) {
    int c = e.code;
    if (c == 0x80 || (c >= 0x20 && c <= 0x2f) || c == 0x40 || c == 0x50) return 2;
    if (c == 0x34 || c == 0x41 || c == 0x60 || c == 0x71) return 3;
    return 1;
}

int run_command(const JobConfig& cfg, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    QuiverSpec s = with_overrides(parse_spec(cfg.input), cfg);
    Algebra A = build_algebra(s);
    Windows w = resolve_windows(A, s);
    Out o;
    head(o, cfg, s, A, w);
    int rc;
    if (cfg.command == "derived-quotient") rc = cmd_derived_quotient(s, A, w, o);
    else if (cfg.command == "h1") rc = cmd_h1(s, A, w, o);
    else if (cfg.command == "ext") rc = cmd_ext(s, A, w, o);
    else if (cfg.command == "koszul") rc = cmd_koszul(s, A, w, o, cfg.budget);
    else if (cfg.command == "thma") rc = cmd_thma(s, A, w, o);
    else if (cfg.command == "eta") rc = cmd_eta(cfg, s, A, w, o);
    else if (cfg.command == "mc") rc = cmd_mc(cfg, s, A, w, o);
    else if (cfg.command == "check") rc = cmd_check(s, A, w, o, cfg.budget);
    else throw Err(0x80, "unknown command \"" + cfg.command + "\"");
    o.j["exit_code"] = rc;
    if (cfg.format == "structured") {
        out << o.j.dump(2) << "\n";
    } else {
        for (const std::string& ln : o.t) out << ln << "\n";
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        out << "wall-time: " << ms << " ms\n";
    }
    return rc;
}

} // namespace ncdq
