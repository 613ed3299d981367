#pragma once
/* Periodicity elements eta in the derived-quotient cohomology: detection by
 * the isomorphism-action property, centrality, graded localization at eta,
 * uniqueness within the window, and the stable-Ext cross-checks. */

#include "ncdq/derived_quotient.hpp"
#include "ncdq/resolutions_ext.hpp"

namespace ncdq {

struct EtaCandidate {
    int p = 0;
    NW bucket;     /* (-p, weight) */
    int cell = -1; /* H-class index within the bucket */
};

struct EtaSearch {
    int p = 0;
    bool window_ok = false; /* trusted depth >= 2p */
    std::vector<EtaCandidate> found;
    std::vector<std::string> notes;
};

/* Scans basis classes of H^{-p}; a candidate must act isomorphically
 * H^j -> H^{j-p} for every trusted j with trusted j-p in the window. */
EtaSearch find_eta(const DerivedQuotientModel& m, const CohomologyRing& H, int p);

/* Graded commutators with every trusted basis class vanish. */
bool centrality_check(const DerivedQuotientModel& m, const CohomologyRing& H,
                      const EtaCandidate& eta);

struct LocalizedRingWindow {
    int p = 0;
    std::map<int, int> dims;       /* localized dimension per degree in window */
    std::map<int, int> source_deg; /* degree j realized as H^{source_deg[j]} */
    bool periodic = true;
    std::vector<std::string> notes;
};

/* Ring of fractions with central denominator powers, presented at the
 * cohomology level on the window's degrees. */
LocalizedRingWindow localize_at_eta(const DerivedQuotientModel& m, const CohomologyRing& H,
                                    const EtaCandidate& eta);

struct UniquenessReport {
    bool h0_local = false;
    bool unique_line = false; /* non-nilpotent locus = the candidate line(s) */
    /* per basis class of H^{-p}: "candidate" | "nilpotent in window (power k)"
     * | "undetermined (left window at power k)" */
    std::vector<std::pair<EtaCandidate, std::string>> verdicts;
    std::vector<std::string> notes;
};

UniquenessReport uniqueness_report(const DerivedQuotientModel& m, const CohomologyRing& H, int p);

struct StableExtReport {
    bool applicable = false; /* eta exists */
    bool ok = false;
    std::map<int, std::array<int, 2>> table; /* degree -> {localized dim, oracle dim} */
    std::vector<std::string> notes;
};

/* Localized dims vs Ext_R^j(Ae, Ae) for j > 1 and Tor_{-j-1}(Ae, eA) for
 * j < -1, each computed by its own route. */
StableExtReport stable_ext_crosscheck(const Algebra& A, const Idempotent& e, int J, int D, int p);

} // namespace ncdq
